//! Gradings by a finite group and the assembled graded twist.

use thiserror::Error;

use crate::cocycle::{validate_cocycle, CocycleViolation, TwoCocycle};
use crate::group::{FiniteGroup, GroupElem};
use crate::groupoid::{validate_groupoid, ArrowId, FiniteGroupoid, GroupoidViolation};
use crate::scalar::Scalar;

/// A groupoid homomorphism into a finite group, one degree per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    group: FiniteGroup,
    degree: Vec<GroupElem>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradingDataError {
    #[error("degree list must cover every arrow")]
    Shape,
    #[error("degree index {0} out of range for the grading group")]
    Range(usize),
}

impl Grading {
    pub fn new(
        g: &FiniteGroupoid,
        group: FiniteGroup,
        degree: Vec<GroupElem>,
    ) -> Result<Self, GradingDataError> {
        if degree.len() != g.n_arrows() {
            return Err(GradingDataError::Shape);
        }
        if let Some(bad) = degree.iter().find(|d| d.0 >= group.order()) {
            return Err(GradingDataError::Range(bad.0));
        }
        Ok(Grading { group, degree })
    }

    /// Everything graded by the trivial group.
    pub fn trivial(g: &FiniteGroupoid) -> Self {
        Grading {
            group: FiniteGroup::trivial(),
            degree: vec![GroupElem(0); g.n_arrows()],
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn degree(&self, a: ArrowId) -> GroupElem {
        self.degree[a.0]
    }
}

/// Violations of the grading axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradingViolation {
    /// `c(gh) != c(g) c(h)` on a composable pair.
    NotHomomorphism { left: ArrowId, right: ArrowId },
    /// A unit arrow with nonidentity degree.
    UnitDegree { arrow: ArrowId },
    /// `c(inv g) != c(g)^{-1}`.
    InverseDegree { arrow: ArrowId },
}

impl GradingViolation {
    pub fn describe(&self, g: &FiniteGroupoid) -> String {
        match self {
            GradingViolation::NotHomomorphism { left, right } => format!(
                "grading is not multiplicative on ({}, {})",
                g.arrow_label(*left),
                g.arrow_label(*right)
            ),
            GradingViolation::UnitDegree { arrow } => format!(
                "unit arrow {} has nonidentity degree",
                g.arrow_label(*arrow)
            ),
            GradingViolation::InverseDegree { arrow } => format!(
                "degree of inverse of {} is not the inverse degree",
                g.arrow_label(*arrow)
            ),
        }
    }
}

/// Exhaustive check of the grading homomorphism property.
pub fn validate_grading(g: &FiniteGroupoid, grading: &Grading) -> Vec<GradingViolation> {
    let gamma = grading.group();
    let mut out = Vec::new();
    for (l, r, c) in g.composable_pairs() {
        if grading.degree(c) != gamma.mul(grading.degree(l), grading.degree(r)) {
            out.push(GradingViolation::NotHomomorphism { left: l, right: r });
        }
    }
    for x in g.units() {
        let u = g.unit_arrow(x);
        if grading.degree(u) != gamma.identity() {
            out.push(GradingViolation::UnitDegree { arrow: u });
        }
    }
    for a in g.arrows() {
        if grading.degree(g.inv(a)) != gamma.inv(grading.degree(a)) {
            out.push(GradingViolation::InverseDegree { arrow: a });
        }
    }
    out
}

/// A finite groupoid together with a 2-cocycle and a grading: the complete
/// finite-scale stand-in for a graded twist.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedTwist<T> {
    groupoid: FiniteGroupoid,
    cocycle: TwoCocycle<T>,
    grading: Grading,
}

/// Joint validation report for a graded twist.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistReport<T> {
    pub groupoid: Vec<GroupoidViolation>,
    pub cocycle: Vec<CocycleViolation<T>>,
    pub grading: Vec<GradingViolation>,
}

impl<T> TwistReport<T> {
    pub fn is_empty(&self) -> bool {
        self.groupoid.is_empty() && self.cocycle.is_empty() && self.grading.is_empty()
    }
}

impl<T: Scalar> GradedTwist<T> {
    pub fn new(groupoid: FiniteGroupoid, cocycle: TwoCocycle<T>, grading: Grading) -> Self {
        assert_eq!(cocycle.n_arrows(), groupoid.n_arrows());
        GradedTwist {
            groupoid,
            cocycle,
            grading,
        }
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn cocycle(&self) -> &TwoCocycle<T> {
        &self.cocycle
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn gamma(&self) -> &FiniteGroup {
        self.grading.group()
    }

    /// Degree of an arrow under the grading.
    pub fn degree(&self, a: ArrowId) -> GroupElem {
        self.grading.degree(a)
    }

    /// Cocycle value on a composable pair.
    pub fn sigma(&self, l: ArrowId, r: ArrowId) -> num_complex::Complex<T> {
        self.cocycle.get(l, r)
    }

    /// Replace the cocycle, keeping groupoid and grading.
    pub fn with_cocycle(&self, cocycle: TwoCocycle<T>) -> Self {
        GradedTwist::new(self.groupoid.clone(), cocycle, self.grading.clone())
    }

    /// Run all component validations with tolerance `tol` on the cocycle.
    pub fn validate(&self, tol: T) -> TwistReport<T> {
        TwistReport {
            groupoid: validate_groupoid(&self.groupoid),
            cocycle: validate_cocycle(&self.groupoid, &self.cocycle, tol),
            grading: validate_grading(&self.groupoid, &self.grading),
        }
    }

    pub fn is_valid(&self, tol: T) -> bool {
        self.validate(tol).is_empty()
    }

    /// The zero fiber `R = c^{-1}(identity)`, in arrow order.
    pub fn zero_fiber(&self) -> Vec<ArrowId> {
        let e = self.gamma().identity();
        self.groupoid
            .arrows()
            .filter(|&a| self.degree(a) == e)
            .collect()
    }
}

/// A non-unit isotropy arrow inside the zero fiber, if any. `None` means
/// the zero fiber is principal, i.e. the twist is effective.
pub fn effective_zero_fiber_witness<T: Scalar>(t: &GradedTwist<T>) -> Option<ArrowId> {
    let g = t.groupoid();
    let e = t.gamma().identity();
    g.arrows()
        .find(|&a| t.degree(a) == e && g.src(a) == g.rng(a) && !g.is_unit_arrow(a))
}

/// Whether `R = c^{-1}(identity)` is principal.
pub fn is_effective_zero_fiber<T: Scalar>(t: &GradedTwist<T>) -> bool {
    effective_zero_fiber_witness(t).is_none()
}
