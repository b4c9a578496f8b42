//! Deterministic generators of graded twists: the example corpus and the
//! randomized helpers used by the property and verification suites.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::cocycle::TwoCocycle;
use crate::group::{lcm, FiniteGroup, GroupElem, GroupError};
use crate::groupoid::{ArrowId, FiniteGroupoid};
use crate::scalar::{root_of_unity, Scalar};
use crate::twist::{GradedTwist, Grading};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("grading map rejected: {0}")]
    Grading(#[from] GroupError),
    #[error("action is not free: group element {g} fixes point {x}")]
    NotFree { g: usize, x: usize },
    #[error("action table is not a group action at ({g}, {h}, {x})")]
    NotAction { g: usize, h: usize, x: usize },
    #[error("bilinear exponent matrix not reduced modulo the factor orders")]
    IllFormedBilinear,
}

/// `["p0", "p1", ...]`.
pub fn standard_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A finite group as a one-unit groupoid, arrows labelled by elements.
pub fn group_as_groupoid(group: &FiniteGroup) -> FiniteGroupoid {
    let n = group.order();
    let labels: Vec<String> = group
        .elements()
        .map(|g| group.label(g).to_string())
        .collect();
    let mut comps = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            comps.push((a, b, group.mul(GroupElem(a), GroupElem(b)).0));
        }
    }
    let inv = (0..n).map(|a| group.inv(GroupElem(a)).0).collect();
    FiniteGroupoid::new(
        vec!["*".to_string()],
        labels,
        vec![0; n],
        vec![0; n],
        &comps,
        inv,
        vec![group.identity().0],
    )
    .expect("group tables are well-formed")
}

/// A group groupoid graded by an injective homomorphism, trivial cocycle.
pub fn group_groupoid<T: Scalar>(
    group: &FiniteGroup,
    gamma: &FiniteGroup,
    c: &[GroupElem],
) -> Result<GradedTwist<T>, GenError> {
    group.check_injective_homomorphism(gamma, c)?;
    let g = group_as_groupoid(group);
    let cocycle = TwoCocycle::trivial(&g);
    let grading = Grading::new(&g, gamma.clone(), c.to_vec()).expect("degrees cover arrows");
    Ok(GradedTwist::new(g, cocycle, grading))
}

/// A group groupoid graded by an arbitrary homomorphism, trivial cocycle.
/// Unlike [`group_groupoid`], injectivity is not required, so the result
/// need not be effective; the algebra operations remain available.
pub fn graded_group_groupoid<T: Scalar>(
    group: &FiniteGroup,
    gamma: &FiniteGroup,
    c: &[GroupElem],
) -> Result<GradedTwist<T>, GenError> {
    group.check_homomorphism(gamma, c)?;
    let g = group_as_groupoid(group);
    let cocycle = TwoCocycle::trivial(&g);
    let grading = Grading::new(&g, gamma.clone(), c.to_vec()).expect("degrees cover arrows");
    Ok(GradedTwist::new(g, cocycle, grading))
}

/// A group groupoid with the trivial grading; not effective unless the
/// group is trivial. Exercises the precondition-failure paths.
pub fn group_with_trivial_grading<T: Scalar>(group: &FiniteGroup) -> GradedTwist<T> {
    let g = group_as_groupoid(group);
    let cocycle = TwoCocycle::trivial(&g);
    let grading = Grading::trivial(&g);
    GradedTwist::new(g, cocycle, grading)
}

/// The pair groupoid on `n` units: arrows `(i,j)` from `j` to `i` with
/// `(i,j)(j,k) = (i,k)`, trivial cocycle and trivial grading.
pub fn pair_groupoid<T: Scalar>(n: usize) -> GradedTwist<T> {
    assert!(n >= 1, "pair groupoid needs at least one unit");
    let arrow = |i: usize, j: usize| i * n + j;
    let labels: Vec<String> = (0..n)
        .flat_map(|i| (0..n).map(move |j| format!("({i},{j})")))
        .collect();
    let src: Vec<usize> = (0..n).flat_map(|_i| 0..n).collect();
    let rng: Vec<usize> = (0..n).flat_map(|i| vec![i; n]).collect();
    let mut comps = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                comps.push((arrow(i, j), arrow(j, k), arrow(i, k)));
            }
        }
    }
    let inv: Vec<usize> = (0..n)
        .flat_map(|i| (0..n).map(move |j| arrow(j, i)))
        .collect();
    let unit_arrow: Vec<usize> = (0..n).map(|x| arrow(x, x)).collect();
    let g = FiniteGroupoid::new(
        standard_labels("u", n),
        labels,
        src,
        rng,
        &comps,
        inv,
        unit_arrow,
    )
    .expect("pair groupoid tables are well-formed");
    let cocycle = TwoCocycle::trivial(&g);
    let grading = Grading::trivial(&g);
    GradedTwist::new(g, cocycle, grading)
}

/// Transformation groupoid of a free action: arrows `(g, x)` from `x` to
/// `g.x`, graded by `c(g, x) = c(g)` with `c` injective.
///
/// `action[g * points + x]` is `g.x`.
pub fn action_groupoid<T: Scalar>(
    group: &FiniteGroup,
    points: usize,
    action: &[usize],
    gamma: &FiniteGroup,
    c: &[GroupElem],
) -> Result<GradedTwist<T>, GenError> {
    assert_eq!(action.len(), group.order() * points, "action table shape");
    group.check_injective_homomorphism(gamma, c)?;
    let act = |g: usize, x: usize| action[g * points + x];
    let e = group.identity().0;
    for x in 0..points {
        if act(e, x) != x {
            return Err(GenError::NotAction { g: e, h: e, x });
        }
    }
    for g in 0..group.order() {
        for h in 0..group.order() {
            let gh = group.mul(GroupElem(g), GroupElem(h)).0;
            for x in 0..points {
                if act(g, act(h, x)) != act(gh, x) {
                    return Err(GenError::NotAction { g, h, x });
                }
            }
        }
        for x in 0..points {
            if g != e && act(g, x) == x {
                return Err(GenError::NotFree { g, x });
            }
        }
    }

    let arrow = |g: usize, x: usize| g * points + x;
    let labels: Vec<String> = (0..group.order())
        .flat_map(|g| {
            let gl = group.label(GroupElem(g)).to_string();
            (0..points)
                .map(move |x| format!("{gl}|p{x}"))
                .collect::<Vec<_>>()
        })
        .collect();
    let src: Vec<usize> = (0..group.order()).flat_map(|_| 0..points).collect();
    let rng: Vec<usize> = (0..group.order())
        .flat_map(|g| (0..points).map(move |x| act(g, x)).collect::<Vec<_>>())
        .collect();
    let mut comps = Vec::new();
    for g in 0..group.order() {
        for h in 0..group.order() {
            let gh = group.mul(GroupElem(g), GroupElem(h)).0;
            for x in 0..points {
                // (g, h.x) o (h, x) = (gh, x)
                comps.push((arrow(g, act(h, x)), arrow(h, x), arrow(gh, x)));
            }
        }
    }
    let inv: Vec<usize> = (0..group.order())
        .flat_map(|g| {
            let gi = group.inv(GroupElem(g)).0;
            (0..points)
                .map(move |x| arrow(gi, act(g, x)))
                .collect::<Vec<_>>()
        })
        .collect();
    let unit_arrow: Vec<usize> = (0..points).map(|x| arrow(e, x)).collect();
    let g = FiniteGroupoid::new(
        standard_labels("p", points),
        labels,
        src,
        rng,
        &comps,
        inv,
        unit_arrow,
    )
    .expect("action groupoid tables are well-formed");

    let degree: Vec<GroupElem> = (0..group.order())
        .flat_map(|gi| vec![c[gi]; points])
        .collect();
    let cocycle = TwoCocycle::trivial(&g);
    let grading = Grading::new(&g, gamma.clone(), degree).expect("degrees cover arrows");
    Ok(GradedTwist::new(g, cocycle, grading))
}

/// Bilinear cocycle twist on `Z/n1 x Z/n2`:
/// `sigma(a, b) = exp(2 pi i a^T M b / lcm(n1, n2))`, graded by itself.
pub fn twisted_group<T: Scalar>(
    n1: usize,
    n2: usize,
    m: [[i64; 2]; 2],
) -> Result<GradedTwist<T>, GenError> {
    let group = FiniteGroup::direct_product(&FiniteGroup::cyclic(n1), &FiniteGroup::cyclic(n2));
    let denom = lcm(n1, n2) as i64;
    let orders = [n1 as i64, n2 as i64];
    // Well-definedness modulo the factor orders.
    for i in 0..2 {
        for j in 0..2 {
            if (m[i][j] * orders[i]) % denom != 0 || (m[i][j] * orders[j]) % denom != 0 {
                return Err(GenError::IllFormedBilinear);
            }
        }
    }
    let g = group_as_groupoid(&group);
    let coords = |k: usize| [(k / n2) as i64, (k % n2) as i64];
    let cocycle = TwoCocycle::from_fn(&g, |l, r| {
        let a = coords(l.0);
        let b = coords(r.0);
        let mut exponent = 0i64;
        for i in 0..2 {
            for j in 0..2 {
                exponent += m[i][j] * a[i] * b[j];
            }
        }
        root_of_unity::<T>(exponent.rem_euclid(denom), denom)
    });
    let c: Vec<GroupElem> = group.elements().collect();
    let grading = Grading::new(&g, group.clone(), c).expect("identity grading");
    Ok(GradedTwist::new(g, cocycle, grading))
}

/// Stable seeded RNG for every randomized helper.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiply the cocycle by the coboundary of seeded random unit phases
/// (fixed to 1 on unit arrows). The result stays in the same cohomology
/// class.
pub fn randomize_cocycle<T: Scalar>(t: &GradedTwist<T>, seed: u64) -> GradedTwist<T> {
    let g = t.groupoid();
    let mut rng = seeded_rng(seed);
    let b: Vec<Complex<T>> = g
        .arrows()
        .map(|a| {
            if g.is_unit_arrow(a) {
                Complex::new(T::one(), T::zero())
            } else {
                let angle = T::of(rng.gen::<f64>()) * (T::PI() + T::PI());
                Complex::from_polar(T::one(), angle)
            }
        })
        .collect();
    let perturbed = TwoCocycle::from_fn(g, |l, r| {
        let c = g.compose(l, r).expect("composable pair");
        t.sigma(l, r) * b[l.0] * b[r.0] * b[c.0].conj()
    });
    t.with_cocycle(perturbed)
}

/// The empty groupoid with empty grading; degenerate but accepted.
pub fn empty_twist<T: Scalar>() -> GradedTwist<T> {
    let g = FiniteGroupoid::new(vec![], vec![], vec![], vec![], &[], vec![], vec![])
        .expect("empty tables");
    let cocycle = TwoCocycle::trivial(&g);
    let grading = Grading::trivial(&g);
    GradedTwist::new(g, cocycle, grading)
}

/// A random algebra element with coefficients uniform in the unit square.
pub fn random_element<T: Scalar>(t: &GradedTwist<T>, rng: &mut ChaCha8Rng) -> AlgebraElement<T> {
    let n = t.groupoid().n_arrows();
    AlgebraElement::from_coeffs(
        (0..n)
            .map(|_| {
                Complex::new(
                    T::of(rng.gen::<f64>() * 2.0 - 1.0),
                    T::of(rng.gen::<f64>() * 2.0 - 1.0),
                )
            })
            .collect(),
    )
}

/// A random homogeneous normalizer: nonzero coefficients on a random
/// bisection inside a single degree fiber.
pub fn random_homogeneous_normalizer<T: Scalar>(
    t: &GradedTwist<T>,
    rng: &mut ChaCha8Rng,
) -> AlgebraElement<T> {
    let g = t.groupoid();
    let n = g.n_arrows();
    assert!(n > 0, "normalizers need a nonempty groupoid");
    let seed_arrow = ArrowId(rng.gen_range(0..n));
    let degree = t.degree(seed_arrow);
    let mut fiber: Vec<ArrowId> = g.arrows().filter(|&a| t.degree(a) == degree).collect();
    // Shuffle deterministically.
    for i in (1..fiber.len()).rev() {
        let j = rng.gen_range(0..=i);
        fiber.swap(i, j);
    }
    let mut out = AlgebraElement::zero(n);
    let mut used_src = Vec::new();
    let mut used_rng = Vec::new();
    let keep = 1 + rng.gen_range(0..fiber.len().max(1));
    let mut taken = 0usize;
    for a in fiber {
        if taken >= keep {
            break;
        }
        if used_src.contains(&g.src(a)) || used_rng.contains(&g.rng(a)) {
            continue;
        }
        used_src.push(g.src(a));
        used_rng.push(g.rng(a));
        let magnitude = T::of(0.25 + 1.25 * rng.gen::<f64>());
        let angle = T::of(rng.gen::<f64>()) * (T::PI() + T::PI());
        out.set_coeff(a, Complex::from_polar(magnitude, angle));
        taken += 1;
    }
    out
}

/// All abelian groups of order at most `max` (up to isomorphism), with
/// their conventional names.
pub fn abelian_groups_up_to(max: usize) -> Vec<(String, FiniteGroup)> {
    let z = FiniteGroup::cyclic;
    let mut out: Vec<(String, FiniteGroup)> = Vec::new();
    for n in 1..=max.min(8) {
        out.push((format!("Z{n}"), z(n)));
    }
    if max >= 4 {
        out.push(("Z2xZ2".into(), FiniteGroup::direct_product(&z(2), &z(2))));
    }
    if max >= 8 {
        out.push(("Z2xZ4".into(), FiniteGroup::direct_product(&z(2), &z(4))));
        out.push((
            "Z2xZ2xZ2".into(),
            FiniteGroup::direct_product(&FiniteGroup::direct_product(&z(2), &z(2)), &z(2)),
        ));
    }
    out
}

/// The base verification corpus: every abelian group of order at most 8
/// with the identity grading, pair groupoids up to 5 units, free action
/// groupoids, and the two bilinear twists.
pub fn standard_corpus<T: Scalar>() -> Vec<(String, GradedTwist<T>)> {
    let mut out: Vec<(String, GradedTwist<T>)> = Vec::new();

    for (name, group) in abelian_groups_up_to(8) {
        let c: Vec<GroupElem> = group.elements().collect();
        let t = group_groupoid(&group, &group, &c).expect("identity grading is injective");
        out.push((format!("group-{name}"), t));
    }

    // A non-identity injective grading: Z/2 into Z/4 by doubling.
    let z2 = FiniteGroup::cyclic(2);
    let z4 = FiniteGroup::cyclic(4);
    out.push((
        "group-Z2-into-Z4".into(),
        group_groupoid(&z2, &z4, &[GroupElem(0), GroupElem(2)])
            .expect("doubling is an injective homomorphism"),
    ));

    for n in 1..=5 {
        out.push((format!("pair-{n}"), pair_groupoid(n)));
    }

    // Z/2 swapping two points.
    let z2 = FiniteGroup::cyclic(2);
    let swap = vec![0, 1, 1, 0];
    out.push((
        "action-z2-swap".into(),
        action_groupoid(&z2, 2, &swap, &z2, &[GroupElem(0), GroupElem(1)])
            .expect("swap action is free"),
    ));

    // Z/3 cycling three points.
    let z3 = FiniteGroup::cyclic(3);
    let mut cycle3 = vec![0usize; 9];
    for g in 0..3 {
        for x in 0..3 {
            cycle3[g * 3 + x] = (x + g) % 3;
        }
    }
    out.push((
        "action-z3-cycle".into(),
        action_groupoid(
            &z3,
            3,
            &cycle3,
            &z3,
            &[GroupElem(0), GroupElem(1), GroupElem(2)],
        )
        .expect("cyclic action is free"),
    ));

    // Z/4 cycling four points.
    let z4 = FiniteGroup::cyclic(4);
    let mut cycle4 = vec![0usize; 16];
    for g in 0..4 {
        for x in 0..4 {
            cycle4[g * 4 + x] = (x + g) % 4;
        }
    }
    out.push((
        "action-z4-cycle".into(),
        action_groupoid(
            &z4,
            4,
            &cycle4,
            &z4,
            &(0..4).map(GroupElem).collect::<Vec<_>>(),
        )
        .expect("cyclic action is free"),
    ));

    out.push((
        "twisted-z2xz2".into(),
        twisted_group(2, 2, [[0, 0], [1, 0]]).expect("square case is well-formed"),
    ));
    out.push((
        "twisted-z3xz3".into(),
        twisted_group(3, 3, [[0, 0], [1, 0]]).expect("square case is well-formed"),
    ));

    out
}

/// The corpus extended with seeded coboundary perturbations of every
/// instance.
pub fn corpus_with_perturbations<T: Scalar>(perturbations: usize) -> Vec<(String, GradedTwist<T>)> {
    let mut out = Vec::new();
    for (idx, (name, t)) in standard_corpus::<T>().into_iter().enumerate() {
        for k in 0..perturbations {
            let seed = 1_000 * (idx as u64 + 1) + k as u64;
            out.push((format!("{name}+cb{k}"), randomize_cocycle(&t, seed)));
        }
        out.push((name, t));
    }
    out
}
