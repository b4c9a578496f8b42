//! Property tests for the algebraic laws of the twisted convolution
//! algebra, over randomized elements of the generator corpus.

use num_complex::Complex;
use proptest::prelude::*;

use twistlab::algebra::{
    adjoint, convolve, delta_expectation, dual_action, fixed_point_basis, is_normalizer,
    spectral_component, spectral_component_by_characters, AlgebraElement,
};
use twistlab::cocycle::{coboundary, cohomologous, TwoCocycle};
use twistlab::generators::{
    pair_groupoid, random_homogeneous_normalizer, seeded_rng, standard_corpus, twisted_group,
};
use twistlab::rep::reduced_norm;
use twistlab::Twist64;

const ALGEBRAIC: f64 = 1e-10;
const NORM: f64 = 1e-8;

/// A handful of structurally distinct corpus instances.
fn instances() -> Vec<Twist64> {
    let corpus = standard_corpus::<f64>();
    let pick = |name: &str| {
        corpus
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.clone())
            .expect("corpus instance")
    };
    vec![
        pick("pair-3"),
        pick("group-Z4"),
        pick("group-Z2xZ2"),
        pick("action-z2-swap"),
        pick("twisted-z2xz2"),
        pick("twisted-z3xz3"),
    ]
}

fn element_for(t: &Twist64, coeffs: &[(f64, f64)]) -> AlgebraElement<f64> {
    let n = t.groupoid().n_arrows();
    AlgebraElement::from_coeffs(
        (0..n)
            .map(|i| {
                let (re, im) = coeffs[i % coeffs.len()];
                Complex::new(re, im)
            })
            .collect(),
    )
}

fn coeff_vec() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9..=25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_associative(
        idx in 0usize..6,
        a in coeff_vec(),
        b in coeff_vec(),
        c in coeff_vec(),
    ) {
        let t = &instances()[idx];
        let (f, g, h) = (element_for(t, &a), element_for(t, &b), element_for(t, &c));
        let lhs = convolve(t, &convolve(t, &f, &g), &h);
        let rhs = convolve(t, &f, &convolve(t, &g, &h));
        prop_assert!(lhs.distance(&rhs) < ALGEBRAIC);
    }

    #[test]
    fn involution_laws(idx in 0usize..6, a in coeff_vec(), b in coeff_vec()) {
        let t = &instances()[idx];
        let (f, g) = (element_for(t, &a), element_for(t, &b));
        prop_assert!(adjoint(t, &adjoint(t, &f)).distance(&f) < ALGEBRAIC);
        let lhs = adjoint(t, &convolve(t, &f, &g));
        let rhs = convolve(t, &adjoint(t, &g), &adjoint(t, &f));
        prop_assert!(lhs.distance(&rhs) < ALGEBRAIC);
    }

    #[test]
    fn cstar_identity(idx in 0usize..6, a in coeff_vec()) {
        let t = &instances()[idx];
        let f = element_for(t, &a);
        let n = reduced_norm(t, &f);
        let nn = reduced_norm(t, &convolve(t, &adjoint(t, &f), &f));
        prop_assert!((nn - n * n).abs() <= NORM * (1.0 + n * n));
    }

    #[test]
    fn expectation_is_faithful(idx in 0usize..6, a in coeff_vec()) {
        let t = &instances()[idx];
        let f = element_for(t, &a);
        prop_assume!(!f.is_zero(1e-6));
        let pos = delta_expectation(t, &convolve(t, &adjoint(t, &f), &f));
        let g = t.groupoid();
        let best = g
            .units()
            .map(|x| pos.coeff(g.unit_arrow(x)).re)
            .fold(0.0f64, f64::max);
        prop_assert!(best > 1e-9);
    }

    #[test]
    fn spectral_decomposition_and_orthogonality(idx in 0usize..6, a in coeff_vec()) {
        let t = &instances()[idx];
        let f = element_for(t, &a);
        let mut total = AlgebraElement::zero(t.groupoid().n_arrows());
        for s in t.gamma().elements() {
            total = total.add(&spectral_component(t, s, &f));
        }
        prop_assert!(total.distance(&f) < 1e-14);
        for s in t.gamma().elements() {
            for u in t.gamma().elements() {
                let nested = spectral_component(t, s, &spectral_component(t, u, &f));
                if s == u {
                    prop_assert!(nested.distance(&spectral_component(t, s, &f)) < 1e-14);
                } else {
                    prop_assert!(nested.is_zero(1e-14));
                }
            }
        }
    }

    #[test]
    fn restriction_matches_character_average(idx in 0usize..6, a in coeff_vec()) {
        let t = &instances()[idx];
        let f = element_for(t, &a);
        for s in t.gamma().elements() {
            let direct = spectral_component(t, s, &f);
            let averaged = spectral_component_by_characters(t, s, &f).unwrap();
            prop_assert!(direct.distance(&averaged) < 1e-12);
        }
    }

    #[test]
    fn dual_action_is_isometric(idx in 0usize..6, a in coeff_vec()) {
        let t = &instances()[idx];
        let f = element_for(t, &a);
        let base = reduced_norm(t, &f);
        for omega in t.gamma().characters::<f64>().unwrap() {
            let moved = reduced_norm(t, &dual_action(t, &omega, &f));
            prop_assert!((moved - base).abs() <= NORM);
        }
    }

    #[test]
    fn random_coboundaries_trivialize(idx in 0usize..6, phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 4..=25)) {
        let t = &instances()[idx];
        let g = t.groupoid();
        let b: Vec<Complex<f64>> = g
            .arrows()
            .map(|arw| {
                if g.is_unit_arrow(arw) {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::from_polar(1.0, phases[arw.0 % phases.len()])
                }
            })
            .collect();
        let sigma_b = coboundary(g, &b, ALGEBRAIC).unwrap();
        let witness = cohomologous(g, &sigma_b, &TwoCocycle::trivial(g), ALGEBRAIC);
        prop_assert!(witness.is_some());
        let w = witness.unwrap();
        for (l, r, c) in g.composable_pairs() {
            let rhs = w[l.0] * w[r.0] * w[c.0].conj();
            prop_assert!((sigma_b.get(l, r) - rhs).norm() < 1e-8);
        }
    }
}

#[test]
fn normalizer_products_stay_diagonal() {
    // For every normalizer n, n* n and n n* are supported on unit arrows.
    let mut rng = seeded_rng(2024);
    for (name, t) in standard_corpus::<f64>() {
        for _ in 0..20 {
            let n = random_homogeneous_normalizer(&t, &mut rng);
            assert!(is_normalizer(&t, &n, ALGEBRAIC), "{name}");
            let g = t.groupoid();
            for prod in [
                convolve(&t, &adjoint(&t, &n), &n),
                convolve(&t, &n, &adjoint(&t, &n)),
            ] {
                for a in prod.support(ALGEBRAIC) {
                    assert!(g.is_unit_arrow(a), "{name}: support off the diagonal");
                }
            }
        }
    }
}

#[test]
fn fixed_point_component_is_spanned_by_the_zero_fiber() {
    let mut rng = seeded_rng(99);
    for (name, t) in standard_corpus::<f64>() {
        let fiber = fixed_point_basis(&t);
        let e = t.gamma().identity();
        // The degree-zero component of any element is supported on the
        // fiber, and each fiber point mass is reproduced exactly.
        for _ in 0..10 {
            let f = twistlab::generators::random_element(&t, &mut rng);
            let comp = spectral_component(&t, e, &f);
            for a in comp.support(1e-14) {
                assert!(fiber.contains(&a), "{name}");
            }
        }
        for &a in &fiber {
            let d = AlgebraElement::delta(t.groupoid().n_arrows(), a);
            assert!(spectral_component(&t, e, &d).distance(&d) < 1e-15, "{name}");
        }
    }
}

#[test]
fn homogeneous_normalizers_match_the_bisection_criterion() {
    // Under effectiveness, "homogeneous normalizer" is the same as
    // "supported on a bisection inside one degree fiber".
    use twistlab::algebra::is_homogeneous_normalizer;
    use twistlab::groupoid::is_bisection;

    let mut rng = seeded_rng(512);
    for t in [
        pair_groupoid::<f64>(3),
        twisted_group(2, 2, [[0, 0], [1, 0]]).unwrap(),
    ] {
        let g = t.groupoid();
        for _ in 0..30 {
            let f = twistlab::generators::random_element(&t, &mut rng);
            // Sparsify to make bisection supports reachable.
            let mut f = f;
            for a in g.arrows() {
                if (a.0 * 7 + 3) % 5 < 2 {
                    f.set_coeff(a, Complex::new(0.0, 0.0));
                }
            }
            let support = f.support(ALGEBRAIC);
            if support.is_empty() {
                continue;
            }
            let single_fiber = support.iter().all(|&a| t.degree(a) == t.degree(support[0]));
            let criterion = single_fiber && is_bisection(g, &support);
            let decided = is_homogeneous_normalizer(&t, &f, ALGEBRAIC).is_some();
            assert_eq!(criterion, decided);
        }
    }

    // And a random phase combination supported on a one-fiber bisection is
    // accepted with the right degree.
    let t = twisted_group::<f64>(3, 3, [[0, 0], [1, 0]]).unwrap();
    for _ in 0..10 {
        let n = random_homogeneous_normalizer(&t, &mut rng);
        let support = n.support(ALGEBRAIC);
        let degree = is_homogeneous_normalizer(&t, &n, ALGEBRAIC).unwrap();
        assert!(support.iter().all(|&a| t.degree(a) == degree));
    }
}
