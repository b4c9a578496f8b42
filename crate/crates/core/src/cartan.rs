//! Verification that the diagonal is a graded Cartan subalgebra of the
//! concrete finite algebra.

use num_complex::Complex;

use crate::algebra::{
    adjoint, convolve, delta_expectation, is_homogeneous_normalizer, AlgebraElement,
};
use crate::groupoid::ArrowId;
use crate::linalg::{nullspace, CMatrix};
use crate::scalar::Scalar;
use crate::twist::{effective_zero_fiber_witness, GradedTwist};

/// One verified property with its witness text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the full graded-Cartan verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanReport {
    pub checks: Vec<CartanCheck>,
}

impl CartanReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(CartanCheck {
            name,
            passed,
            detail,
        });
    }
}

/// Verify the graded Cartan axioms on the concrete algebra:
///
/// 1. the zero fiber is principal (precondition; failure short-circuits);
/// 2. the diagonal is maximal abelian in the degree-zero component,
///    by an exact commutant solve;
/// 3. the expectation onto the diagonal is a faithful conditional
///    expectation;
/// 4. homogeneous normalizers span the algebra (dimension count over the
///    point-mass basis);
/// 5. the diagonal contains the unit of the algebra.
pub fn cartan_check<T: Scalar>(t: &GradedTwist<T>, tol: T) -> CartanReport {
    let mut report = CartanReport { checks: Vec::new() };
    let g = t.groupoid();
    let n = g.n_arrows();

    if let Some(w) = effective_zero_fiber_witness(t) {
        report.push(
            "effective-zero-fiber",
            false,
            format!(
                "precondition failure: non-unit isotropy arrow {} in the zero fiber",
                g.arrow_label(w)
            ),
        );
        return report;
    }
    report.push(
        "effective-zero-fiber",
        true,
        "zero fiber is principal".into(),
    );

    // (2) Commutant of the diagonal inside A0, as a kernel problem: solve
    // [a, delta_u] = 0 over the span of the zero fiber.
    let fiber = t.zero_fiber();
    let mut m = CMatrix::zeros(g.n_units() * n, fiber.len());
    for (block, x) in g.units().enumerate() {
        let du = AlgebraElement::delta(n, g.unit_arrow(x));
        for (col, &gamma) in fiber.iter().enumerate() {
            let dg = AlgebraElement::delta(n, gamma);
            let comm = convolve(t, &dg, &du).sub(&convolve(t, &du, &dg));
            for target in g.arrows() {
                m[(block * n + target.0, col)] = comm.coeff(target);
            }
        }
    }
    let kernel = nullspace(&m, tol);
    let expected = g.n_units();
    let on_units = kernel.iter().all(|v| {
        fiber
            .iter()
            .enumerate()
            .all(|(i, &gamma)| g.is_unit_arrow(gamma) || v[i].norm() <= tol)
    });
    let dim = kernel.len();
    report.push(
        "masa-in-degree-zero",
        dim == expected && on_units,
        format!(
            "commutant of the diagonal inside the zero-fiber span has dimension {dim} \
             (diagonal dimension {expected}); supported on unit arrows: {on_units}"
        ),
    );

    // (3) Expectation properties on the zero-fiber span.
    let mut expectation_ok = true;
    let mut detail = String::new();
    for &gamma in &fiber {
        let d = AlgebraElement::delta(n, gamma);
        let e1 = delta_expectation(t, &d);
        let e2 = delta_expectation(t, &e1);
        if e1.distance(&e2) > tol {
            expectation_ok = false;
            detail = format!("not idempotent at {}", g.arrow_label(gamma));
            break;
        }
        // Bimodularity over the diagonal generators.
        for x in g.units() {
            let du = AlgebraElement::delta(n, g.unit_arrow(x));
            let lhs = delta_expectation(t, &convolve(t, &du, &convolve(t, &d, &du)));
            let rhs = convolve(t, &du, &convolve(t, &delta_expectation(t, &d), &du));
            if lhs.distance(&rhs) > tol {
                expectation_ok = false;
                detail = format!(
                    "not bimodular at ({}, {})",
                    g.unit_label(x),
                    g.arrow_label(gamma)
                );
                break;
            }
        }
        // Faithfulness witness on the basis: Delta(d^* d) is the unit
        // indicator at the source, which is nonzero.
        let pos = delta_expectation(t, &convolve(t, &adjoint(t, &d), &d));
        let at_src = pos.coeff(g.unit_arrow(g.src(gamma)));
        if at_src.re <= tol || at_src.im.abs() > tol {
            expectation_ok = false;
            detail = format!(
                "Delta(d* d) not strictly positive at source of {}",
                g.arrow_label(gamma)
            );
            break;
        }
    }
    if expectation_ok {
        detail = "idempotent, bimodular, faithful on the basis".into();
    }
    report.push("faithful-expectation", expectation_ok, detail);

    // (4) Homogeneous normalizers span: every point mass is one.
    let mut span_count = 0usize;
    let mut bad = None;
    for a in g.arrows() {
        let d = AlgebraElement::delta(n, a);
        if is_homogeneous_normalizer(t, &d, tol).is_some() {
            span_count += 1;
        } else {
            bad = Some(a);
        }
    }
    report.push(
        "homogeneous-normalizers-span",
        span_count == n,
        match bad {
            None => format!("{span_count} homogeneous normalizers span dimension {n}"),
            Some(a) => format!("point mass at {} is not a normalizer", g.arrow_label(a)),
        },
    );

    // (5) The sum of unit indicators is the unit of the algebra.
    let mut unit = AlgebraElement::zero(n);
    for x in g.units() {
        let u = g.unit_arrow(x);
        unit.set_coeff(u, Complex::new(T::one(), T::zero()));
    }
    let mut unital = true;
    let mut witness = String::from("unit of the algebra lies in the diagonal");
    for a in g.arrows() {
        let d = AlgebraElement::delta(n, a);
        if convolve(t, &unit, &d).distance(&d) > tol || convolve(t, &d, &unit).distance(&d) > tol {
            unital = false;
            witness = format!("identity fails against {}", g.arrow_label(a));
            break;
        }
    }
    report.push("diagonal-contains-unit", unital, witness);

    report
}

/// Arrows of the zero fiber that carry isotropy, for report rendering.
pub fn isotropy_in_fiber<T: Scalar>(t: &GradedTwist<T>) -> Vec<ArrowId> {
    let g = t.groupoid();
    t.zero_fiber()
        .into_iter()
        .filter(|&a| g.src(a) == g.rng(a) && !g.is_unit_arrow(a))
        .collect()
}
