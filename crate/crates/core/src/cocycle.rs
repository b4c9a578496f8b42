//! Normalized 2-cocycles on a finite groupoid and their cohomology.
//!
//! A twist over a finite discrete groupoid always trivializes, so twists are
//! represented throughout by a pair `(G, sigma)` with `sigma` a normalized
//! circle-valued 2-cocycle on composable pairs.

use num_complex::Complex;
use thiserror::Error;

use crate::groupoid::{ArrowId, FiniteGroupoid};
use crate::scalar::Scalar;

/// Unit-modulus values on composable pairs of arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoCocycle<T> {
    /// Row-major `[left * n_arrows + right]`; meaningful only where the
    /// composition is defined, `1` elsewhere.
    values: Vec<Complex<T>>,
    n_arrows: usize,
}

impl<T: Scalar> TwoCocycle<T> {
    /// The trivial cocycle `sigma == 1`.
    pub fn trivial(g: &FiniteGroupoid) -> Self {
        let n = g.n_arrows();
        TwoCocycle {
            values: vec![Complex::new(T::one(), T::zero()); n * n],
            n_arrows: n,
        }
    }

    /// Fill from a function on composable pairs.
    pub fn from_fn(g: &FiniteGroupoid, f: impl Fn(ArrowId, ArrowId) -> Complex<T>) -> Self {
        let mut c = TwoCocycle::trivial(g);
        for (a, b, _) in g.composable_pairs() {
            c.values[a.0 * c.n_arrows + b.0] = f(a, b);
        }
        c
    }

    pub fn get(&self, left: ArrowId, right: ArrowId) -> Complex<T> {
        self.values[left.0 * self.n_arrows + right.0]
    }

    /// Overwrite one value. Axioms are not enforced here; run
    /// [`validate_cocycle`] on the result.
    pub fn set(&mut self, left: ArrowId, right: ArrowId, v: Complex<T>) {
        self.values[left.0 * self.n_arrows + right.0] = v;
    }

    pub fn n_arrows(&self) -> usize {
        self.n_arrows
    }
}

/// Violations of the cocycle axioms.
#[derive(Clone, Debug, PartialEq)]
pub enum CocycleViolation<T> {
    /// `|sigma(a, b)|` deviates from 1.
    NotUnitModulus {
        left: ArrowId,
        right: ArrowId,
        deviation: T,
    },
    /// `sigma(a, unit_arrow(src a))` or `sigma(unit_arrow(rng a), a)` is not 1.
    NotNormalized { arrow: ArrowId, deviation: T },
    /// The cocycle identity fails on a composable triple.
    Identity {
        a: ArrowId,
        b: ArrowId,
        c: ArrowId,
        deviation: T,
    },
}

impl<T: Scalar> CocycleViolation<T> {
    pub fn describe(&self, g: &FiniteGroupoid) -> String {
        let al = |a: &ArrowId| g.arrow_label(*a).to_string();
        match self {
            CocycleViolation::NotUnitModulus {
                left,
                right,
                deviation,
            } => format!(
                "sigma({}, {}) is not unit modulus (off by {deviation})",
                al(left),
                al(right)
            ),
            CocycleViolation::NotNormalized { arrow, deviation } => format!(
                "sigma not normalized at arrow {} (off by {deviation})",
                al(arrow)
            ),
            CocycleViolation::Identity { a, b, c, deviation } => format!(
                "cocycle identity fails on ({}, {}, {}) (off by {deviation})",
                al(a),
                al(b),
                al(c)
            ),
        }
    }
}

/// Exhaustive triple scan of the cocycle axioms. Empty report iff valid
/// within `tol`.
pub fn validate_cocycle<T: Scalar>(
    g: &FiniteGroupoid,
    sigma: &TwoCocycle<T>,
    tol: T,
) -> Vec<CocycleViolation<T>> {
    let one = Complex::new(T::one(), T::zero());
    let mut out = Vec::new();

    for (a, b, _) in g.composable_pairs() {
        let dev = (sigma.get(a, b).norm() - T::one()).abs();
        if dev > tol {
            out.push(CocycleViolation::NotUnitModulus {
                left: a,
                right: b,
                deviation: dev,
            });
        }
    }

    for a in g.arrows() {
        let us = g.unit_arrow(g.src(a));
        let ur = g.unit_arrow(g.rng(a));
        let dev_s = (sigma.get(a, us) - one).norm();
        let dev_r = (sigma.get(ur, a) - one).norm();
        let dev = if dev_s > dev_r { dev_s } else { dev_r };
        if dev > tol {
            out.push(CocycleViolation::NotNormalized {
                arrow: a,
                deviation: dev,
            });
        }
    }

    for (a, b, c) in g.composable_triples() {
        let ab = g.compose(a, b).expect("triple has a*b");
        let bc = g.compose(b, c).expect("triple has b*c");
        let lhs =
            sigma.get(b, c) * sigma.get(ab, c).conj() * sigma.get(a, bc) * sigma.get(a, b).conj();
        let dev = (lhs - one).norm();
        if dev > tol {
            out.push(CocycleViolation::Identity {
                a,
                b,
                c,
                deviation: dev,
            });
        }
    }

    out
}

#[derive(Debug, Error, PartialEq)]
pub enum CoboundaryError {
    #[error("b is not unit modulus at arrow {0}")]
    NotUnitModulus(usize),
    #[error("b is not 1 on the unit arrow at unit {0}")]
    NotNormalizedOnUnits(usize),
    #[error("b must assign a value to every arrow")]
    Shape,
}

/// The coboundary `sigma_b(a, c) = b(a) b(c) conj(b(ac))` of a circle-valued
/// function on arrows with `b == 1` on unit arrows.
pub fn coboundary<T: Scalar>(
    g: &FiniteGroupoid,
    b: &[Complex<T>],
    tol: T,
) -> Result<TwoCocycle<T>, CoboundaryError> {
    if b.len() != g.n_arrows() {
        return Err(CoboundaryError::Shape);
    }
    for (i, z) in b.iter().enumerate() {
        if (z.norm() - T::one()).abs() > tol {
            return Err(CoboundaryError::NotUnitModulus(i));
        }
    }
    let one = Complex::new(T::one(), T::zero());
    for x in g.units() {
        let u = g.unit_arrow(x);
        if (b[u.0] - one).norm() > tol {
            return Err(CoboundaryError::NotNormalizedOnUnits(x.0));
        }
    }
    Ok(TwoCocycle::from_fn(g, |l, r| {
        let c = g.compose(l, r).expect("from_fn visits composable pairs");
        b[l.0] * b[r.0] * b[c.0].conj()
    }))
}

/// Decide whether `sigma1` and `sigma2` are cohomologous; on success return
/// a witness `b` with `sigma1 = sigma2 * coboundary(b)`.
///
/// The ratio `rho = sigma1 / sigma2` must factor as
/// `rho(g, h) = b(g) b(h) conj(b(gh))`. The solver gauge-fixes `b = 1` on
/// the unit arrows and on a spanning forest of the unit-connectivity graph
/// (valid because any forest assignment extends to a groupoid homomorphism
/// into the circle), propagates values through compositions with a single
/// unknown, and resolves the remaining isotropy degrees of freedom by
/// k-th-root branching with backtracking. Every branch is verified against
/// the full constraint set before being returned.
pub fn cohomologous<T: Scalar>(
    g: &FiniteGroupoid,
    sigma1: &TwoCocycle<T>,
    sigma2: &TwoCocycle<T>,
    tol: T,
) -> Option<Vec<Complex<T>>> {
    let rho = TwoCocycle::from_fn(g, |l, r| sigma1.get(l, r) * sigma2.get(l, r).conj());
    let mut b: Vec<Option<Complex<T>>> = vec![None; g.n_arrows()];
    let one = Complex::new(T::one(), T::zero());

    for x in g.units() {
        b[g.unit_arrow(x).0] = Some(one);
    }

    // Spanning forest over units: gauge-fix b = 1 on one arrow per new unit.
    let mut reached: Vec<bool> = vec![false; g.n_units()];
    for x in g.units() {
        if reached[x.0] {
            continue;
        }
        reached[x.0] = true;
        let mut frontier = vec![x];
        while let Some(y) = frontier.pop() {
            for a in g.arrows() {
                let (s, r) = (g.src(a), g.rng(a));
                let other = if s == y && !reached[r.0] {
                    Some(r)
                } else if r == y && !reached[s.0] {
                    Some(s)
                } else {
                    None
                };
                if let Some(z) = other {
                    reached[z.0] = true;
                    frontier.push(z);
                    if b[a.0].is_none() {
                        b[a.0] = Some(one);
                    }
                }
            }
        }
    }

    let pairs: Vec<(ArrowId, ArrowId, ArrowId)> = g.composable_pairs().collect();
    solve_phases(g, &rho, &pairs, b, tol).filter(|b| {
        // Soundness: re-verify the defining equation for every pair.
        pairs.iter().all(|&(l, r, c)| {
            (rho.get(l, r) - b[l.0] * b[r.0] * b[c.0].conj()).norm() <= tol_scale(tol)
        })
    })
}

/// Slightly relaxed tolerance for accumulated phase products.
fn tol_scale<T: Scalar>(tol: T) -> T {
    tol * T::of(100.0)
}

fn solve_phases<T: Scalar>(
    g: &FiniteGroupoid,
    rho: &TwoCocycle<T>,
    pairs: &[(ArrowId, ArrowId, ArrowId)],
    mut b: Vec<Option<Complex<T>>>,
    tol: T,
) -> Option<Vec<Complex<T>>> {
    // Propagate through constraints with exactly one unknown.
    loop {
        let mut progress = false;
        for &(l, r, c) in pairs {
            let known = [b[l.0], b[r.0], b[c.0]];
            let rho_v = rho.get(l, r);
            match known {
                [Some(bl), Some(br), None] => {
                    b[c.0] = Some(bl * br * rho_v.conj());
                    progress = true;
                }
                [Some(bl), None, Some(bc)] => {
                    b[r.0] = Some(rho_v * bc * bl.conj());
                    progress = true;
                }
                [None, Some(br), Some(bc)] => {
                    b[l.0] = Some(rho_v * bc * br.conj());
                    progress = true;
                }
                [Some(bl), Some(br), Some(bc)]
                    if (rho_v - bl * br * bc.conj()).norm() > tol_scale(tol) =>
                {
                    return None;
                }
                _ => {}
            }
        }
        if !progress {
            break;
        }
    }

    if b.iter().all(|v| v.is_some()) {
        return b.into_iter().collect();
    }

    // Stalled: after forest gauge fixing, a stall always leaves some
    // isotropy arrow undetermined (any non-isotropy arrow would be pinned
    // through the tree transport once the isotropy values are in). Its
    // power along the self-composition chain eventually reaches a known
    // arrow, pinning its value up to a root of unity; branch over roots.
    let free = g
        .arrows()
        .find(|&a| b[a.0].is_none() && g.src(a) == g.rng(a))?;
    let (k, target) = power_constraint(g, rho, free, &b)?;
    for j in 0..k {
        let root = kth_root_branch(target, k, j);
        let mut attempt = b.clone();
        attempt[free.0] = Some(root);
        if let Some(sol) = solve_phases(g, rho, pairs, attempt, tol) {
            return Some(sol);
        }
    }
    None
}

/// Walk `free, free^2, free^3, ...` until hitting an arrow with a known
/// value; returns `(k, v)` such that `b(free)^k` must equal `v`.
fn power_constraint<T: Scalar>(
    g: &FiniteGroupoid,
    rho: &TwoCocycle<T>,
    free: ArrowId,
    b: &[Option<Complex<T>>],
) -> Option<(usize, Complex<T>)> {
    // free is undetermined after forest fixing, so src(free) == rng(free):
    // otherwise the tree transport would have determined it. Self powers
    // are therefore defined.
    let mut acc_phase = Complex::new(T::one(), T::zero());
    let mut current = free;
    for k in 1.. {
        let next = g.compose(free, current)?;
        // rho(free, current) = b(free) b(current) conj(b(free*current))
        // =>  b(next) = b(free) * b(current) * conj(rho)
        acc_phase = acc_phase * rho.get(free, current).conj();
        if let Some(known) = b[next.0] {
            // b(free)^(k+1) * acc_phase = b(next)
            return Some((k + 1, known * acc_phase.conj()));
        }
        current = next;
        if k > g.n_arrows() {
            return None;
        }
    }
    unreachable!()
}

/// The `j`-th `k`-th root of a unit-modulus complex number.
fn kth_root_branch<T: Scalar>(v: Complex<T>, k: usize, j: usize) -> Complex<T> {
    let (_, theta) = v.to_polar();
    let tau = T::PI() + T::PI();
    let angle = (theta + tau * T::of(j as f64)) / T::of(k as f64);
    Complex::from_polar(T::one(), angle)
}
