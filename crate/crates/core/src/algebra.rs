//! The finite-dimensional twisted convolution *-algebra.
//!
//! Elements are coefficient vectors indexed by arrows; the product is the
//! sigma-twisted convolution, the involution carries the trivialization
//! correction phase, and the conditional expectation is restriction to the
//! unit arrows.

use num_complex::Complex;

use crate::group::{Character, GroupElem};
use crate::groupoid::ArrowId;
use crate::scalar::Scalar;
use crate::twist::GradedTwist;

/// An element of the convolution algebra: one complex coefficient per arrow.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn zero(n_arrows: usize) -> Self {
        AlgebraElement {
            coeffs: vec![Complex::new(T::zero(), T::zero()); n_arrows],
        }
    }

    /// The point mass `delta_gamma`.
    pub fn delta(n_arrows: usize, gamma: ArrowId) -> Self {
        let mut e = AlgebraElement::zero(n_arrows);
        e.coeffs[gamma.0] = Complex::new(T::one(), T::zero());
        e
    }

    pub fn from_coeffs(coeffs: Vec<Complex<T>>) -> Self {
        AlgebraElement { coeffs }
    }

    pub fn coeff(&self, a: ArrowId) -> Complex<T> {
        self.coeffs[a.0]
    }

    pub fn set_coeff(&mut self, a: ArrowId, v: Complex<T>) {
        self.coeffs[a.0] = v;
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Arrows with coefficient modulus above `tol`.
    pub fn support(&self, tol: T) -> Vec<ArrowId> {
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i].norm() > tol)
            .map(ArrowId)
            .collect()
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.coeffs.iter().all(|z| z.norm() <= tol)
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        AlgebraElement {
            coeffs: self.coeffs.iter().map(|c| c * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        AlgebraElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        AlgebraElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest coefficient deviation from `other`.
    pub fn distance(&self, other: &Self) -> T {
        self.sub(other)
            .coeffs
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Twisted convolution: `(f*g)(gamma) = sum f(a) g(b) sigma(a, b)` over the
/// factorizations `a b = gamma`.
pub fn convolve<T: Scalar>(
    t: &GradedTwist<T>,
    f: &AlgebraElement<T>,
    g: &AlgebraElement<T>,
) -> AlgebraElement<T> {
    let mut out = AlgebraElement::zero(t.groupoid().n_arrows());
    for (a, b, c) in t.groupoid().composable_pairs() {
        let fa = f.coeff(a);
        let gb = g.coeff(b);
        if fa.norm_sqr() == T::zero() || gb.norm_sqr() == T::zero() {
            continue;
        }
        let add = fa * gb * t.sigma(a, b);
        out.set_coeff(c, out.coeff(c) + add);
    }
    out
}

/// The involution: `f*(gamma) = conj(f(inv gamma)) conj(sigma(gamma, inv gamma))`.
///
/// The correction phase is what makes the regular representations send the
/// involution to the conjugate transpose.
pub fn adjoint<T: Scalar>(t: &GradedTwist<T>, f: &AlgebraElement<T>) -> AlgebraElement<T> {
    let g = t.groupoid();
    let mut out = AlgebraElement::zero(g.n_arrows());
    for a in g.arrows() {
        let inv = g.inv(a);
        let v = f.coeff(inv).conj() * t.sigma(a, inv).conj();
        out.set_coeff(a, v);
    }
    out
}

/// Conditional expectation onto the diagonal: restriction to unit arrows.
pub fn delta_expectation<T: Scalar>(
    t: &GradedTwist<T>,
    f: &AlgebraElement<T>,
) -> AlgebraElement<T> {
    let g = t.groupoid();
    let mut out = AlgebraElement::zero(g.n_arrows());
    for x in g.units() {
        let u = g.unit_arrow(x);
        out.set_coeff(u, f.coeff(u));
    }
    out
}

/// The spectral component of degree `s`: restriction of `f` to the fiber
/// `c^{-1}(s)`.
pub fn spectral_component<T: Scalar>(
    t: &GradedTwist<T>,
    s: GroupElem,
    f: &AlgebraElement<T>,
) -> AlgebraElement<T> {
    assert!(s.0 < t.gamma().order(), "degree outside the grading group");
    let g = t.groupoid();
    let mut out = AlgebraElement::zero(g.n_arrows());
    for a in g.arrows() {
        if t.degree(a) == s {
            out.set_coeff(a, f.coeff(a));
        }
    }
    out
}

/// The dual-group action: pointwise multiplication by the character paired
/// with the degree.
pub fn dual_action<T: Scalar>(
    t: &GradedTwist<T>,
    omega: &Character<T>,
    f: &AlgebraElement<T>,
) -> AlgebraElement<T> {
    let g = t.groupoid();
    let mut out = AlgebraElement::zero(g.n_arrows());
    for a in g.arrows() {
        out.set_coeff(a, omega.value(t.degree(a)) * f.coeff(a));
    }
    out
}

/// Averaged form of the spectral component, abelian gradings only:
/// `(1/|dual|) sum_omega <omega^{-1}, s> (omega . f)`. Cross-check route
/// for [`spectral_component`].
pub fn spectral_component_by_characters<T: Scalar>(
    t: &GradedTwist<T>,
    s: GroupElem,
    f: &AlgebraElement<T>,
) -> Result<AlgebraElement<T>, crate::group::GroupError> {
    let chars = t.gamma().characters::<T>()?;
    let mut acc = AlgebraElement::zero(t.groupoid().n_arrows());
    for omega in &chars {
        let phase = omega.value(s).conj();
        acc = acc.add(&dual_action(t, omega, f).scale(phase));
    }
    let inv_count = Complex::new(T::one() / T::of(chars.len() as f64), T::zero());
    Ok(acc.scale(inv_count))
}

/// The zero fiber `R = c^{-1}(identity)`: arrows whose point masses span
/// the fixed-point algebra of the dual action.
pub fn fixed_point_basis<T: Scalar>(t: &GradedTwist<T>) -> Vec<ArrowId> {
    t.zero_fiber()
}

/// The normalizer condition against the diagonal generators:
/// `n d n*` and `n* d n` must stay diagonal for every unit indicator `d`.
pub fn is_normalizer<T: Scalar>(t: &GradedTwist<T>, n: &AlgebraElement<T>, tol: T) -> bool {
    let g = t.groupoid();
    let n_star = adjoint(t, n);
    for x in g.units() {
        let d = AlgebraElement::delta(g.n_arrows(), g.unit_arrow(x));
        for conj in [
            convolve(t, &convolve(t, n, &d), &n_star),
            convolve(t, &convolve(t, &n_star, &d), n),
        ] {
            for a in conj.support(tol) {
                if !g.is_unit_arrow(a) {
                    return false;
                }
            }
        }
    }
    true
}

/// Degree of a homogeneous normalizer: `Some(s)` iff the support sits in a
/// single fiber `c^{-1}(s)` and the normalizer condition holds. The zero
/// element is rejected (its degree is ambiguous).
pub fn is_homogeneous_normalizer<T: Scalar>(
    t: &GradedTwist<T>,
    n: &AlgebraElement<T>,
    tol: T,
) -> Option<GroupElem> {
    let support = n.support(tol);
    let first = *support.first()?;
    let s = t.degree(first);
    if support.iter().any(|&a| t.degree(a) != s) {
        return None;
    }
    if is_normalizer(t, n, tol) {
        Some(s)
    } else {
        None
    }
}

/// Dimension of the center, by exact linear solve of `[a, delta_gamma] = 0`
/// over all basis arrows.
pub fn center_dimension<T: Scalar>(t: &GradedTwist<T>, tol: T) -> usize {
    let g = t.groupoid();
    let n = g.n_arrows();
    if n == 0 {
        return 0;
    }
    // One block of rows per basis element b: row (b, target) has entry at
    // column a equal to the coefficient of `target` in
    // delta_a * delta_b - delta_b * delta_a.
    let mut m = crate::linalg::CMatrix::zeros(n * n, n);
    for b in g.arrows() {
        let db = AlgebraElement::delta(n, b);
        for a in g.arrows() {
            let da = AlgebraElement::delta(n, a);
            let comm = convolve(t, &da, &db).sub(&convolve(t, &db, &da));
            for target in g.arrows() {
                m[(b.0 * n + target.0, a.0)] = comm.coeff(target);
            }
        }
    }
    crate::linalg::nullspace(&m, tol).len()
}
