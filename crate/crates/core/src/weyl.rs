//! Weyl-groupoid reconstruction: normalizer germs, the evaluation
//! functionals, the reconstructed graded twist, and the certified
//! isomorphism back to the input.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{adjoint, convolve, is_homogeneous_normalizer, AlgebraElement};
use crate::cartan::cartan_check;
use crate::cocycle::{cohomologous, validate_cocycle, TwoCocycle};
use crate::generators::{random_element, seeded_rng};
use crate::group::GroupElem;
use crate::groupoid::{validate_groupoid, ArrowId, FiniteGroupoid, UnitId};
use crate::rep::reduced_norm;
use crate::scalar::{Scalar, Tolerances};
use crate::twist::{effective_zero_fiber_witness, validate_grading, GradedTwist, Grading};

#[derive(Debug, Error, PartialEq)]
pub enum WeylError {
    #[error("element is not a homogeneous normalizer")]
    NotHomogeneousNormalizer,
    #[error("unit {0} is not in the domain of the normalizer")]
    NotInDomain(usize),
    #[error("functional does not match this algebra")]
    Mismatched,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReconstructError {
    #[error("input twist fails validation: {0}")]
    Invalid(String),
    #[error("zero fiber is not principal; witness arrow {0}")]
    NotEffective(String),
    #[error("graded Cartan verification failed: {0}")]
    CartanFailed(String),
    #[error("extracted cocycle phase off the circle by {0:e}")]
    PhaseDeviation(f64),
    #[error("certificate check '{name}' failed: {detail}")]
    CheckFailed { name: String, detail: String },
}

/// The evaluation functional `psi_(n,x)(a) = Delta(n* a)(x) / |n|(x)`,
/// attached to a homogeneous normalizer and a unit in its domain.
#[derive(Clone, Debug)]
pub struct WeylFunctional<T> {
    normalizer: AlgebraElement<T>,
    base: UnitId,
    degree: GroupElem,
    /// `(n* n)(x)`, strictly positive by construction.
    weight: T,
}

impl<T: Scalar> WeylFunctional<T> {
    pub fn new(
        t: &GradedTwist<T>,
        normalizer: AlgebraElement<T>,
        base: UnitId,
        tol: T,
    ) -> Result<Self, WeylError> {
        let degree = is_homogeneous_normalizer(t, &normalizer, tol)
            .ok_or(WeylError::NotHomogeneousNormalizer)?;
        let weight = domain_weight(t, &normalizer, base);
        if weight <= tol {
            return Err(WeylError::NotInDomain(base.0));
        }
        Ok(WeylFunctional {
            normalizer,
            base,
            degree,
            weight,
        })
    }

    pub fn normalizer(&self) -> &AlgebraElement<T> {
        &self.normalizer
    }

    pub fn base(&self) -> UnitId {
        self.base
    }

    pub fn degree(&self) -> GroupElem {
        self.degree
    }
}

/// `(n* n)(unit_arrow(x))`, the squared weight of `n` at `x`.
fn domain_weight<T: Scalar>(t: &GradedTwist<T>, n: &AlgebraElement<T>, x: UnitId) -> T {
    let g = t.groupoid();
    convolve(t, &adjoint(t, n), n).coeff(g.unit_arrow(x)).re
}

/// Evaluate the functional on an algebra element.
pub fn functional_eval<T: Scalar>(
    t: &GradedTwist<T>,
    psi: &WeylFunctional<T>,
    a: &AlgebraElement<T>,
) -> Complex<T> {
    let g = t.groupoid();
    let num = convolve(t, &adjoint(t, &psi.normalizer), a).coeff(g.unit_arrow(psi.base));
    num.unscale(psi.weight.sqrt())
}

/// The partial action on units: for a homogeneous normalizer `n` and
/// `x` in its domain, the unique arrow of `supp(n)` with source `x` moves
/// `x` to its range.
pub fn alpha<T: Scalar>(
    t: &GradedTwist<T>,
    n: &AlgebraElement<T>,
    x: UnitId,
    tol: T,
) -> Result<UnitId, WeylError> {
    is_homogeneous_normalizer(t, n, tol).ok_or(WeylError::NotHomogeneousNormalizer)?;
    if domain_weight(t, n, x) <= tol {
        return Err(WeylError::NotInDomain(x.0));
    }
    let g = t.groupoid();
    let over_x: Vec<ArrowId> = n
        .support(tol)
        .into_iter()
        .filter(|&a| g.src(a) == x)
        .collect();
    debug_assert_eq!(over_x.len(), 1, "normalizer support is a bisection");
    Ok(g.rng(over_x[0]))
}

/// Which germ relation is being decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GermRelation {
    /// Phase-sensitive relation (the twist level).
    Sigma,
    /// Phase-free relation (the groupoid level).
    G,
}

fn check_pair_in_domain<T: Scalar>(
    t: &GradedTwist<T>,
    n: &AlgebraElement<T>,
    x: UnitId,
    tol: T,
) -> Result<(), WeylError> {
    is_homogeneous_normalizer(t, n, tol).ok_or(WeylError::NotHomogeneousNormalizer)?;
    if domain_weight(t, n, x) <= tol {
        return Err(WeylError::NotInDomain(x.0));
    }
    Ok(())
}

/// Germ equality via the expectation criterion: `Delta(n1* n2)(x)` nonzero
/// (groupoid level) or strictly positive (twist level).
pub fn germ_equal<T: Scalar>(
    t: &GradedTwist<T>,
    rel: GermRelation,
    n1: &AlgebraElement<T>,
    x1: UnitId,
    n2: &AlgebraElement<T>,
    x2: UnitId,
    tol: T,
) -> Result<bool, WeylError> {
    check_pair_in_domain(t, n1, x1, tol)?;
    check_pair_in_domain(t, n2, x2, tol)?;
    if x1 != x2 {
        return Ok(false);
    }
    let g = t.groupoid();
    let v = convolve(t, &adjoint(t, n1), n2).coeff(g.unit_arrow(x1));
    Ok(match rel {
        GermRelation::G => v.norm() > tol,
        GermRelation::Sigma => {
            v.norm() > tol && v.im.abs() <= tol * (T::one() + v.norm()) && v.re > T::zero()
        }
    })
}

pub fn germ_equal_g<T: Scalar>(
    t: &GradedTwist<T>,
    n1: &AlgebraElement<T>,
    x1: UnitId,
    n2: &AlgebraElement<T>,
    x2: UnitId,
    tol: T,
) -> Result<bool, WeylError> {
    germ_equal(t, GermRelation::G, n1, x1, n2, x2, tol)
}

pub fn germ_equal_sigma<T: Scalar>(
    t: &GradedTwist<T>,
    n1: &AlgebraElement<T>,
    x1: UnitId,
    n2: &AlgebraElement<T>,
    x2: UnitId,
    tol: T,
) -> Result<bool, WeylError> {
    germ_equal(t, GermRelation::Sigma, n1, x1, n2, x2, tol)
}

/// Germ equality by brute-force factorization: decide whether diagonals
/// `d, d'` exist with `n1 d = n2 d'` and the sign/nonvanishing constraint
/// at `x`. Units other than `x` can be zeroed out, so the system reduces
/// to a parallelism test of the restrictions to arrows with source `x`,
/// solved by elimination. Independent of the expectation route; used to
/// cross-validate it.
pub fn germ_equal_via_factorization<T: Scalar>(
    t: &GradedTwist<T>,
    rel: GermRelation,
    n1: &AlgebraElement<T>,
    x1: UnitId,
    n2: &AlgebraElement<T>,
    x2: UnitId,
    tol: T,
) -> Result<bool, WeylError> {
    check_pair_in_domain(t, n1, x1, tol)?;
    check_pair_in_domain(t, n2, x2, tol)?;
    if x1 != x2 {
        return Ok(false);
    }
    let g = t.groupoid();
    let over_x = g.arrows_from(x1);
    let v1: Vec<Complex<T>> = over_x.iter().map(|&a| n1.coeff(a)).collect();
    let v2: Vec<Complex<T>> = over_x.iter().map(|&a| n2.coeff(a)).collect();

    // Pivot on the largest entry of v2 (nonzero by domain membership).
    let pivot = (0..v2.len())
        .max_by(|&i, &j| v2[i].norm().partial_cmp(&v2[j].norm()).unwrap())
        .expect("domain membership gives a nonzero restriction");
    if v2[pivot].norm() <= tol {
        return Err(WeylError::NotInDomain(x1.0));
    }
    // v1 = lambda v2 with lambda = d'(x) / d(x).
    let lambda = v1[pivot] / v2[pivot];
    let scale = T::one() + lambda.norm();
    for i in 0..v1.len() {
        if (v1[i] - lambda * v2[i]).norm() > tol * scale {
            return Ok(false);
        }
    }
    Ok(match rel {
        GermRelation::G => lambda.norm() > tol,
        GermRelation::Sigma => {
            lambda.norm() > tol && lambda.im.abs() <= tol * scale && lambda.re > T::zero()
        }
    })
}

/// One recorded check of the reconstruction certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Verification transcript of a reconstruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionCertificate {
    pub germ_count: usize,
    /// Input arrow index -> germ index.
    pub upsilon: Vec<usize>,
    /// Labels of the representative input arrow per germ.
    pub germ_representatives: Vec<String>,
    /// Witness `b` with `pullback(cocycle1) = cocycle * coboundary(b)`,
    /// one `(re, im)` pair per input arrow.
    pub cocycle_witness: Option<Vec<(f64, f64)>>,
    /// Whether the reconstructed cocycle is cohomologous to the trivial one.
    pub cocycle_trivial_class: bool,
    /// Largest deviation of an extracted phase from unit modulus.
    pub max_phase_deviation: f64,
    pub checks: Vec<CertificateCheck>,
}

impl ReconstructionCertificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_check(&self) -> Option<&CertificateCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Norm comparison of one element under the reconstruction isomorphism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub sample: usize,
    pub input_norm: f64,
    pub image_norm: f64,
}

/// Full roundtrip certificate: the reconstruction transcript plus the
/// sampled norm isometry of the hat map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundtripCertificate {
    pub reconstruction: ReconstructionCertificate,
    pub norm_tolerance: f64,
    pub norm_samples: Vec<NormSample>,
}

impl RoundtripCertificate {
    pub fn passed(&self) -> bool {
        self.reconstruction.passed()
            && self
                .norm_samples
                .iter()
                .all(|s| (s.input_norm - s.image_norm).abs() <= self.norm_tolerance)
    }
}

/// The reconstructed graded twist with the maps certifying the isomorphism.
#[derive(Clone, Debug)]
pub struct ReconstructedTwist<T> {
    twist1: GradedTwist<T>,
    germ_reps: Vec<ArrowId>,
    upsilon_g: Vec<usize>,
    certificate: ReconstructionCertificate,
}

impl<T: Scalar> ReconstructedTwist<T> {
    pub fn twist(&self) -> &GradedTwist<T> {
        &self.twist1
    }

    /// Representative input arrow of each germ: arrow `i` of the
    /// reconstructed groupoid is the class of `(delta_rep, src(rep))`
    /// under the phase-free germ relation.
    pub fn germ_representatives(&self) -> &[ArrowId] {
        &self.germ_reps
    }

    /// The groupoid isomorphism on arrows: input arrow index -> germ index.
    pub fn upsilon_g(&self) -> &[usize] {
        &self.upsilon_g
    }

    pub fn certificate(&self) -> &ReconstructionCertificate {
        &self.certificate
    }
}

/// Run the Weyl reconstruction and certify the isomorphism of
/// the reconstructed twist with the input.
pub fn reconstruct<T: Scalar>(
    t: &GradedTwist<T>,
    tol: &Tolerances<T>,
) -> Result<ReconstructedTwist<T>, ReconstructError> {
    let g = t.groupoid();
    let n = g.n_arrows();

    let report = t.validate(tol.algebraic);
    if !report.is_empty() {
        let mut parts = Vec::new();
        parts.extend(report.groupoid.iter().map(|v| v.describe(g)));
        parts.extend(report.cocycle.iter().map(|v| v.describe(g)));
        parts.extend(report.grading.iter().map(|v| v.describe(g)));
        return Err(ReconstructError::Invalid(parts.join("; ")));
    }
    if let Some(w) = effective_zero_fiber_witness(t) {
        return Err(ReconstructError::NotEffective(g.arrow_label(w).to_string()));
    }
    let cartan = cartan_check(t, tol.algebraic);
    if !cartan.passed() {
        let failed = cartan
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(ReconstructError::CartanFailed(failed));
    }

    // Enumerate germs of the canonical normalizers, deduplicating with the
    // expectation criterion.
    let mut classes: Vec<Vec<ArrowId>> = Vec::new();
    for a in g.arrows() {
        let da = AlgebraElement::delta(n, a);
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = class[0];
            let dr = AlgebraElement::delta(n, rep);
            let equal =
                germ_equal_g(t, &da, g.src(a), &dr, g.src(rep), tol.algebraic).map_err(|_| {
                    ReconstructError::CheckFailed {
                        name: "germ-enumeration".into(),
                        detail: format!("canonical normalizer at {} rejected", g.arrow_label(a)),
                    }
                })?;
            if equal {
                class.push(a);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![a]);
        }
    }

    // Deterministic order: by (degree, arrow id) of the class minimum.
    for class in classes.iter_mut() {
        class.sort_by_key(|a| (t.degree(*a).0, a.0));
    }
    classes.sort_by_key(|class| (t.degree(class[0]).0, class[0].0));
    let germ_reps: Vec<ArrowId> = classes.iter().map(|c| c[0]).collect();
    let germ_count = classes.len();

    let mut upsilon_g = vec![usize::MAX; n];
    for (i, class) in classes.iter().enumerate() {
        for &a in class {
            upsilon_g[a.0] = i;
        }
    }

    // Units of the reconstructed groupoid: germs of the unit arrows.
    let mut unit_class: Vec<usize> = Vec::new();
    for x in g.units() {
        let class = upsilon_g[g.unit_arrow(x).0];
        if !unit_class.contains(&class) {
            unit_class.push(class);
        }
    }
    unit_class.sort_unstable();
    let class_to_unit = |class: usize| unit_class.iter().position(|&c| c == class);

    // Germ source and range through the partial action.
    let mut src1 = Vec::with_capacity(germ_count);
    let mut rng1 = Vec::with_capacity(germ_count);
    for &rep in &germ_reps {
        let x = g.src(rep);
        let d = AlgebraElement::delta(n, rep);
        let moved = alpha(t, &d, x, tol.algebraic).map_err(|e| ReconstructError::CheckFailed {
            name: "germ-source-range".into(),
            detail: format!("alpha failed at {}: {e}", g.arrow_label(rep)),
        })?;
        let sx = class_to_unit(upsilon_g[g.unit_arrow(x).0]).expect("unit class recorded");
        let rx = class_to_unit(upsilon_g[g.unit_arrow(moved).0]).expect("unit class recorded");
        src1.push(sx);
        rng1.push(rx);
    }

    // Composition, inverses and identity arrows of the germ groupoid:
    // [m, alpha_n(x)] [n, x] = [m n, x], realized on representatives.
    let mut compositions = Vec::new();
    for (i, &ri) in germ_reps.iter().enumerate() {
        for (j, &rj) in germ_reps.iter().enumerate() {
            if let Some(c) = g.compose(ri, rj) {
                compositions.push((i, j, upsilon_g[c.0]));
            }
        }
    }
    let inv1: Vec<usize> = germ_reps.iter().map(|&r| upsilon_g[g.inv(r).0]).collect();
    let unit_arrow1: Vec<usize> = unit_class.to_vec();

    let unit_labels1: Vec<String> = unit_class
        .iter()
        .map(|&c| format!("[{}]", g.arrow_label(germ_reps[c])))
        .collect();
    let arrow_labels1: Vec<String> = germ_reps
        .iter()
        .map(|&r| format!("[{}]", g.arrow_label(r)))
        .collect();

    let groupoid1 = FiniteGroupoid::new(
        unit_labels1,
        arrow_labels1,
        src1,
        rng1,
        &compositions,
        inv1,
        unit_arrow1,
    )
    .map_err(|e| ReconstructError::CheckFailed {
        name: "germ-groupoid-structure".into(),
        detail: e.to_string(),
    })?;

    // Extract the cocycle from products of canonical functionals: the
    // phase of psi_(delta_i * delta_j, x) against the canonical
    // psi_(delta_ij, x), snapped to the circle.
    let mut max_dev = 0.0f64;
    let mut cocycle1 = TwoCocycle::trivial(&groupoid1);
    for (i, j, _) in groupoid1.composable_pairs().collect::<Vec<_>>() {
        let ri = germ_reps[i.0];
        let rj = germ_reps[j.0];
        let Some(rc) = g.compose(ri, rj) else {
            return Err(ReconstructError::CheckFailed {
                name: "cocycle-extraction".into(),
                detail: format!(
                    "germ pair ({}, {}) composable but representatives are not",
                    g.arrow_label(ri),
                    g.arrow_label(rj)
                ),
            });
        };
        let x = g.src(rj);
        let product = convolve(
            t,
            &AlgebraElement::delta(n, ri),
            &AlgebraElement::delta(n, rj),
        );
        let psi_prod = WeylFunctional::new(t, product, x, tol.algebraic).map_err(|e| {
            ReconstructError::CheckFailed {
                name: "cocycle-extraction".into(),
                detail: format!("product functional invalid: {e}"),
            }
        })?;
        let psi_canon = WeylFunctional::new(t, AlgebraElement::delta(n, rc), x, tol.algebraic)
            .map_err(|e| ReconstructError::CheckFailed {
                name: "cocycle-extraction".into(),
                detail: format!("canonical functional invalid: {e}"),
            })?;
        let probe = AlgebraElement::delta(n, rc);
        let v_prod = functional_eval(t, &psi_prod, &probe);
        let v_canon = functional_eval(t, &psi_canon, &probe);
        let extracted = (v_prod / v_canon).conj();
        let dev = (extracted.norm() - T::one()).abs();
        let dev_f = dev.to_f64().unwrap_or(f64::INFINITY);
        if dev_f > max_dev {
            max_dev = dev_f;
        }
        if dev > tol.norm {
            return Err(ReconstructError::PhaseDeviation(dev_f));
        }
        cocycle1.set(i, j, extracted.unscale(extracted.norm()));
    }

    // Grading of germs through the representatives.
    let degree1: Vec<GroupElem> = germ_reps.iter().map(|&r| t.degree(r)).collect();
    let grading1 = Grading::new(&groupoid1, t.gamma().clone(), degree1).map_err(|e| {
        ReconstructError::CheckFailed {
            name: "germ-grading".into(),
            detail: e.to_string(),
        }
    })?;
    let twist1 = GradedTwist::new(groupoid1, cocycle1, grading1);

    // Assemble the certificate.
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(CertificateCheck {
            name: name.to_string(),
            passed,
            detail,
        });
    };

    push(
        "input-valid",
        true,
        "groupoid, cocycle and grading axioms verified".into(),
    );
    push(
        "effective-zero-fiber",
        true,
        "zero fiber is principal".into(),
    );
    push("cartan", true, "graded Cartan verification passed".into());

    let g1_report = validate_groupoid(twist1.groupoid());
    push(
        "germ-groupoid-valid",
        g1_report.is_empty(),
        if g1_report.is_empty() {
            "germ groupoid satisfies the groupoid axioms".into()
        } else {
            g1_report[0].describe(twist1.groupoid())
        },
    );

    let c1_report = validate_cocycle(twist1.groupoid(), twist1.cocycle(), tol.algebraic);
    push(
        "extracted-cocycle-valid",
        c1_report.is_empty(),
        if c1_report.is_empty() {
            "extracted cocycle satisfies the cocycle axioms".into()
        } else {
            c1_report[0].describe(twist1.groupoid())
        },
    );

    let gr_report = validate_grading(twist1.groupoid(), twist1.grading());
    let degree_consistent = classes
        .iter()
        .all(|class| class.iter().all(|&a| t.degree(a) == t.degree(class[0])));
    push(
        "germ-grading-valid",
        gr_report.is_empty() && degree_consistent,
        if gr_report.is_empty() && degree_consistent {
            "germ grading is a homomorphism and constant on classes".into()
        } else {
            "degree mismatch within a germ class or grading violation".into()
        },
    );

    let bijective = germ_count == n && upsilon_g.iter().all(|&i| i < germ_count);
    push(
        "upsilon-bijective",
        bijective,
        format!("{germ_count} germs for {n} arrows"),
    );

    let mut functorial = true;
    let mut functorial_detail = "composition preserved on all composable pairs".to_string();
    for (a, b, c) in g.composable_pairs() {
        let gi = ArrowId(upsilon_g[a.0]);
        let gj = ArrowId(upsilon_g[b.0]);
        match twist1.groupoid().compose(gi, gj) {
            Some(gc) if gc.0 == upsilon_g[c.0] => {}
            _ => {
                functorial = false;
                functorial_detail = format!(
                    "composite of ({}, {}) not preserved",
                    g.arrow_label(a),
                    g.arrow_label(b)
                );
                break;
            }
        }
    }
    // Composability must also not grow: counts agree for a bijection.
    let pairs_in = g.composable_pairs().count();
    let pairs_out = twist1.groupoid().composable_pairs().count();
    if pairs_in != pairs_out {
        functorial = false;
        functorial_detail = format!(
            "composable-pair counts differ: {pairs_in} in input, {pairs_out} in germ groupoid"
        );
    }
    push("upsilon-functorial", functorial, functorial_detail);

    let grading_commutes = g
        .arrows()
        .all(|a| twist1.degree(ArrowId(upsilon_g[a.0])) == t.degree(a));
    push(
        "grading-commutes",
        grading_commutes,
        "degree of every germ matches the degree of its arrow".into(),
    );

    // Pull the extracted cocycle back along upsilon and compare classes.
    let pullback = TwoCocycle::from_fn(g, |l, r| {
        twist1
            .cocycle()
            .get(ArrowId(upsilon_g[l.0]), ArrowId(upsilon_g[r.0]))
    });
    let witness = cohomologous(g, &pullback, t.cocycle(), tol.algebraic);
    let witness_f64: Option<Vec<(f64, f64)>> = witness.as_ref().map(|b| {
        b.iter()
            .map(|z| {
                (
                    z.re.to_f64().unwrap_or(f64::NAN),
                    z.im.to_f64().unwrap_or(f64::NAN),
                )
            })
            .collect()
    });
    push(
        "cocycle-cohomologous",
        witness.is_some(),
        match &witness {
            Some(_) => "pulled-back extracted cocycle is cohomologous to the input".into(),
            None => "no coboundary relates the extracted cocycle to the input".into(),
        },
    );

    let trivial = TwoCocycle::trivial(twist1.groupoid());
    let trivial_class =
        cohomologous(twist1.groupoid(), twist1.cocycle(), &trivial, tol.algebraic).is_some();

    let certificate = ReconstructionCertificate {
        germ_count,
        upsilon: upsilon_g.clone(),
        germ_representatives: germ_reps
            .iter()
            .map(|&r| g.arrow_label(r).to_string())
            .collect(),
        cocycle_witness: witness_f64,
        cocycle_trivial_class: trivial_class,
        max_phase_deviation: max_dev,
        checks,
    };

    Ok(ReconstructedTwist {
        twist1,
        germ_reps,
        upsilon_g,
        certificate,
    })
}

/// The hat map: transport an algebra element to the reconstructed algebra
/// by evaluating the canonical functionals.
pub fn hat_map<T: Scalar>(
    t: &GradedTwist<T>,
    a: &AlgebraElement<T>,
    rt: &ReconstructedTwist<T>,
) -> Result<AlgebraElement<T>, WeylError> {
    let g = t.groupoid();
    if rt.upsilon_g.len() != g.n_arrows() || a.dim() != g.n_arrows() {
        return Err(WeylError::Mismatched);
    }
    let tol = Tolerances::<T>::default().algebraic;
    let mut out = AlgebraElement::zero(rt.twist1.groupoid().n_arrows());
    for (i, &rep) in rt.germ_reps.iter().enumerate() {
        let psi =
            WeylFunctional::new(t, AlgebraElement::delta(g.n_arrows(), rep), g.src(rep), tol)?;
        out.set_coeff(ArrowId(i), functional_eval(t, &psi, a));
    }
    Ok(out)
}

/// Number of norm-isometry samples drawn by [`verify_roundtrip`].
pub const ROUNDTRIP_NORM_SAMPLES: usize = 12;
const ROUNDTRIP_SEED: u64 = 0x7715_7AB5;

/// Run [`reconstruct`] and assert the full certificate, including sampled
/// norm isometry of the hat map. Any failed assertion aborts with its
/// witness.
pub fn verify_roundtrip<T: Scalar>(
    t: &GradedTwist<T>,
    tol: &Tolerances<T>,
) -> Result<RoundtripCertificate, ReconstructError> {
    verify_roundtrip_with(t, tol, ROUNDTRIP_NORM_SAMPLES, ROUNDTRIP_SEED)
}

/// [`verify_roundtrip`] with explicit sample count and seed.
pub fn verify_roundtrip_with<T: Scalar>(
    t: &GradedTwist<T>,
    tol: &Tolerances<T>,
    samples: usize,
    seed: u64,
) -> Result<RoundtripCertificate, ReconstructError> {
    let rt = reconstruct(t, tol)?;
    if let Some(failed) = rt.certificate.failed_check() {
        return Err(ReconstructError::CheckFailed {
            name: failed.name.clone(),
            detail: failed.detail.clone(),
        });
    }

    let mut rng = seeded_rng(seed);
    let mut norm_samples = Vec::with_capacity(samples);
    for k in 0..samples {
        let a = random_element(t, &mut rng);
        let before = reduced_norm(t, &a);
        let image = hat_map(t, &a, &rt).map_err(|e| ReconstructError::CheckFailed {
            name: "norm-isometry".into(),
            detail: e.to_string(),
        })?;
        let after = reduced_norm(rt.twist(), &image);
        let sample = NormSample {
            sample: k,
            input_norm: before.to_f64().unwrap_or(f64::NAN),
            image_norm: after.to_f64().unwrap_or(f64::NAN),
        };
        if (before - after).abs() > tol.norm {
            return Err(ReconstructError::CheckFailed {
                name: "norm-isometry".into(),
                detail: format!(
                    "sample {k}: input norm {} vs image norm {}",
                    sample.input_norm, sample.image_norm
                ),
            });
        }
        norm_samples.push(sample);
    }

    Ok(RoundtripCertificate {
        reconstruction: rt.certificate,
        norm_tolerance: tol.norm.to_f64().unwrap_or(f64::NAN),
        norm_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        group_groupoid, group_with_trivial_grading, pair_groupoid, random_homogeneous_normalizer,
        twisted_group,
    };
    use crate::group::FiniteGroup;

    const TOL: f64 = 1e-10;

    fn tols() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn delta(t: &GradedTwist<f64>, a: ArrowId) -> AlgebraElement<f64> {
        AlgebraElement::delta(t.groupoid().n_arrows(), a)
    }

    fn diagonal(t: &GradedTwist<f64>, values: &[Complex<f64>]) -> AlgebraElement<f64> {
        let g = t.groupoid();
        let mut d = AlgebraElement::zero(g.n_arrows());
        for x in g.units() {
            d.set_coeff(g.unit_arrow(x), values[x.0]);
        }
        d
    }

    fn z3_identity_graded() -> GradedTwist<f64> {
        let z3 = FiniteGroup::cyclic(3);
        group_groupoid(&z3, &z3, &[GroupElem(0), GroupElem(1), GroupElem(2)]).unwrap()
    }

    #[test]
    fn alpha_moves_source_to_range() {
        let t = pair_groupoid::<f64>(3);
        // (2,1): source 1, range 2.
        let n = delta(&t, ArrowId(2 * 3 + 1));
        assert_eq!(alpha(&t, &n, UnitId(1), TOL).unwrap(), UnitId(2));
        assert_eq!(
            alpha(&t, &n, UnitId(0), TOL).unwrap_err(),
            WeylError::NotInDomain(0)
        );
    }

    #[test]
    fn alpha_fixes_the_single_unit_of_a_group() {
        let t = z3_identity_graded();
        for a in t.groupoid().arrows() {
            assert_eq!(alpha(&t, &delta(&t, a), UnitId(0), TOL).unwrap(), UnitId(0));
        }
    }

    #[test]
    fn alpha_satisfies_the_defining_equation() {
        let mut rng = crate::generators::seeded_rng(31);
        for (_, t) in crate::generators::standard_corpus::<f64>() {
            for _ in 0..4 {
                let n = random_homogeneous_normalizer(&t, &mut rng);
                let g = t.groupoid();
                let nstar = adjoint(&t, &n);
                let nn = convolve(&t, &nstar, &n);
                for x in g.units() {
                    let weight = nn.coeff(g.unit_arrow(x));
                    if weight.norm() <= TOL {
                        continue;
                    }
                    let moved = alpha(&t, &n, x, TOL).unwrap();
                    // (n* d n)(x) = d(alpha(x)) (n* n)(x) for every unit
                    // indicator d.
                    for y in g.units() {
                        let d = delta(&t, g.unit_arrow(y));
                        let lhs =
                            convolve(&t, &nstar, &convolve(&t, &d, &n)).coeff(g.unit_arrow(x));
                        let expect = if y == moved {
                            weight
                        } else {
                            Complex::new(0.0, 0.0)
                        };
                        assert!((lhs - expect).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_functional_values_on_point_masses() {
        let t = twisted_group::<f64>(2, 2, [[0, 0], [1, 0]]).unwrap();
        let g = t.groupoid();
        for gamma in g.arrows() {
            let psi = WeylFunctional::new(&t, delta(&t, gamma), g.src(gamma), TOL).unwrap();
            for eta in g.arrows() {
                let v = functional_eval(&t, &psi, &delta(&t, eta));
                if eta == gamma {
                    assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-12);
                } else {
                    assert!(v.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn functional_is_invariant_under_positive_diagonal_rescaling() {
        let mut rng = crate::generators::seeded_rng(57);
        for (_, t) in [
            ("pair", pair_groupoid::<f64>(3)),
            ("tw", twisted_group(3, 3, [[0, 0], [1, 0]]).unwrap()),
        ] {
            let g = t.groupoid();
            for _ in 0..5 {
                let n = random_homogeneous_normalizer(&t, &mut rng);
                let Some(x) = g
                    .units()
                    .find(|&x| convolve(&t, &adjoint(&t, &n), &n).coeff(g.unit_arrow(x)).re > TOL)
                else {
                    continue;
                };
                // d positive at x, arbitrary positive elsewhere.
                use rand::Rng;
                let values: Vec<Complex<f64>> = g
                    .units()
                    .map(|_| Complex::new(0.3 + rng.gen::<f64>(), 0.0))
                    .collect();
                let d = diagonal(&t, &values);
                let nd = convolve(&t, &n, &d);
                let psi_n = WeylFunctional::new(&t, n.clone(), x, TOL).unwrap();
                let psi_nd = WeylFunctional::new(&t, nd, x, TOL).unwrap();
                for a in g.arrows() {
                    let probe = delta(&t, a);
                    let lhs = functional_eval(&t, &psi_nd, &probe);
                    let rhs = functional_eval(&t, &psi_n, &probe);
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn functional_eigenlaw_and_unit_norm() {
        let mut rng = crate::generators::seeded_rng(91);
        let t = pair_groupoid::<f64>(4);
        let g = t.groupoid();
        for _ in 0..8 {
            let n = random_homogeneous_normalizer(&t, &mut rng);
            let support = n.support(TOL);
            let gamma0 = support[0];
            let x = g.src(gamma0);
            let psi = WeylFunctional::new(&t, n.clone(), x, TOL).unwrap();
            // Norm one on the support arrow over x.
            assert!((functional_eval(&t, &psi, &delta(&t, gamma0)).norm() - 1.0).abs() < 1e-10);
            // psi(d1 a d2) = d1(alpha(x)) psi(a) d2(x).
            use rand::Rng;
            let v1: Vec<Complex<f64>> = g
                .units()
                .map(|_| Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let v2: Vec<Complex<f64>> = g
                .units()
                .map(|_| Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let (d1, d2) = (diagonal(&t, &v1), diagonal(&t, &v2));
            let moved = alpha(&t, &n, x, TOL).unwrap();
            let a = crate::generators::random_element(&t, &mut rng);
            let lhs = functional_eval(&t, &psi, &convolve(&t, &d1, &convolve(&t, &a, &d2)));
            let rhs = v1[moved.0] * functional_eval(&t, &psi, &a) * v2[x.0];
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn germ_equality_base_cases() {
        let t = pair_groupoid::<f64>(3);
        let g = t.groupoid();
        let gamma = ArrowId(2 * 3 + 1); // (2,1)
        let eta = ArrowId(1); // (0,1): same source, different arrow
        let x = g.src(gamma);
        let dg = delta(&t, gamma);
        let de = delta(&t, eta);

        assert!(germ_equal_g(&t, &dg, x, &dg, x, TOL).unwrap());
        assert!(germ_equal_sigma(&t, &dg, x, &dg, x, TOL).unwrap());
        assert!(!germ_equal_g(&t, &dg, x, &de, x, TOL).unwrap());
        assert!(!germ_equal_sigma(&t, &dg, x, &de, x, TOL).unwrap());

        // i * delta: G-equal but not Sigma-equal.
        let scaled = dg.scale(Complex::new(0.0, 1.0));
        assert!(germ_equal_g(&t, &dg, x, &scaled, x, TOL).unwrap());
        assert!(!germ_equal_sigma(&t, &dg, x, &scaled, x, TOL).unwrap());

        // 2 * delta: Sigma-equal; -delta: G-equal only. Cross-check with
        // the factorization route.
        let doubled = dg.scale(Complex::new(2.0, 0.0));
        let negated = dg.scale(Complex::new(-1.0, 0.0));
        for rel in [GermRelation::Sigma, GermRelation::G] {
            let fact_doubled =
                germ_equal_via_factorization(&t, rel, &dg, x, &doubled, x, TOL).unwrap();
            let fact_negated =
                germ_equal_via_factorization(&t, rel, &dg, x, &negated, x, TOL).unwrap();
            let delta_doubled = germ_equal(&t, rel, &dg, x, &doubled, x, TOL).unwrap();
            let delta_negated = germ_equal(&t, rel, &dg, x, &negated, x, TOL).unwrap();
            assert_eq!(fact_doubled, delta_doubled);
            assert_eq!(fact_negated, delta_negated);
            match rel {
                GermRelation::Sigma => {
                    assert!(fact_doubled);
                    assert!(!fact_negated);
                }
                GermRelation::G => {
                    assert!(fact_doubled);
                    assert!(fact_negated);
                }
            }
        }
    }

    #[test]
    fn exists_h_finite_form() {
        // If Delta(n)(x) != 0 for a homogeneous normalizer, then alpha
        // fixes x and the unit indicator h at x satisfies n h = h n, a
        // diagonal element supported at x.
        let t = z3_identity_graded();
        let g = t.groupoid();
        let e = g.unit_arrow(UnitId(0));
        let mut n = delta(&t, e).scale(Complex::new(0.7, 0.3));
        // Only degree-zero normalizers can have Delta(n) != 0.
        let x = UnitId(0);
        assert_eq!(alpha(&t, &n, x, TOL).unwrap(), x);
        let h = delta(&t, e);
        let nh = convolve(&t, &n, &h);
        let hn = convolve(&t, &h, &n);
        assert!(nh.distance(&hn) < 1e-12);
        assert_eq!(nh.support(TOL), vec![e]);
        n.set_coeff(e, Complex::new(0.0, 0.0));
        assert!(n.is_zero(TOL));
    }

    #[test]
    fn ndel_identity_on_random_pairs() {
        let mut rng = crate::generators::seeded_rng(13);
        for (_, t) in [
            ("pair", pair_groupoid::<f64>(3)),
            ("tw", twisted_group(2, 2, [[0, 0], [1, 0]]).unwrap()),
        ] {
            for _ in 0..10 {
                let n = random_homogeneous_normalizer(&t, &mut rng);
                let a = crate::generators::random_element(&t, &mut rng);
                let nstar = adjoint(&t, &n);
                let lhs = convolve(
                    &t,
                    &nstar,
                    &convolve(&t, &crate::algebra::delta_expectation(&t, &a), &n),
                );
                let rhs = crate::algebra::delta_expectation(
                    &t,
                    &convolve(&t, &nstar, &convolve(&t, &a, &n)),
                );
                assert!(lhs.distance(&rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn reconstruct_group_z3_matches_the_group_example() {
        let t = z3_identity_graded();
        let rt = reconstruct(&t, &tols()).unwrap();
        assert!(rt.certificate().passed(), "{:#?}", rt.certificate());
        assert_eq!(rt.certificate().germ_count, 3);
        // One germ per group element, represented by its own point mass.
        for a in t.groupoid().arrows() {
            assert_eq!(rt.germ_representatives()[rt.upsilon_g()[a.0]], a);
        }
        assert!(rt.certificate().cocycle_trivial_class);
    }

    #[test]
    fn reconstruct_pair_groupoid_recovers_pair_groupoid() {
        let t = pair_groupoid::<f64>(3);
        let rt = reconstruct(&t, &tols()).unwrap();
        assert!(rt.certificate().passed());
        assert_eq!(rt.certificate().germ_count, 9);
        assert_eq!(rt.twist().groupoid().n_units(), 3);
        assert!(rt.certificate().cocycle_trivial_class);
    }

    #[test]
    fn reconstruct_twisted_z2xz2_reports_nontrivial_class() {
        let t = twisted_group::<f64>(2, 2, [[0, 0], [1, 0]]).unwrap();
        let rt = reconstruct(&t, &tols()).unwrap();
        assert!(rt.certificate().passed(), "{:#?}", rt.certificate());
        assert!(!rt.certificate().cocycle_trivial_class);
        assert!(rt.certificate().cocycle_witness.is_some());
        assert!(rt.certificate().max_phase_deviation < 1e-12);
    }

    #[test]
    fn hat_map_transports_point_masses_and_diagonals() {
        let t = twisted_group::<f64>(3, 3, [[0, 0], [1, 0]]).unwrap();
        let rt = reconstruct(&t, &tols()).unwrap();
        let g = t.groupoid();
        for a in g.arrows() {
            let image = hat_map(&t, &delta(&t, a), &rt).unwrap();
            let expect = AlgebraElement::delta(
                rt.twist().groupoid().n_arrows(),
                ArrowId(rt.upsilon_g()[a.0]),
            );
            assert!(image.distance(&expect) < 1e-12);
        }
        // Diagonals land on unit germs with the same values.
        let u = g.unit_arrow(UnitId(0));
        let d = delta(&t, u).scale(Complex::new(0.4, -0.2));
        let image = hat_map(&t, &d, &rt).unwrap();
        let g1 = rt.twist().groupoid();
        for s in image.support(1e-13) {
            assert!(g1.is_unit_arrow(s));
        }
        let at_unit_germ = image.coeff(ArrowId(rt.upsilon_g()[u.0]));
        assert!((at_unit_germ - Complex::new(0.4, -0.2)).norm() < 1e-12);
    }

    #[test]
    fn hat_map_is_a_star_homomorphism() {
        let mut rng = crate::generators::seeded_rng(101);
        for t in [
            pair_groupoid::<f64>(3),
            twisted_group(2, 2, [[0, 0], [1, 0]]).unwrap(),
        ] {
            let rt = reconstruct(&t, &tols()).unwrap();
            let t1 = rt.twist();
            for _ in 0..6 {
                let a = crate::generators::random_element(&t, &mut rng);
                let b = crate::generators::random_element(&t, &mut rng);
                let lhs = hat_map(&t, &convolve(&t, &a, &b), &rt).unwrap();
                let rhs = convolve(
                    t1,
                    &hat_map(&t, &a, &rt).unwrap(),
                    &hat_map(&t, &b, &rt).unwrap(),
                );
                assert!(lhs.distance(&rhs) < 1e-10);
                let star_lhs = hat_map(&t, &adjoint(&t, &a), &rt).unwrap();
                let star_rhs = adjoint(t1, &hat_map(&t, &a, &rt).unwrap());
                assert!(star_lhs.distance(&star_rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn hat_map_preserves_normalizer_bisection_supports() {
        let mut rng = crate::generators::seeded_rng(23);
        let t = pair_groupoid::<f64>(4);
        let rt = reconstruct(&t, &tols()).unwrap();
        for _ in 0..8 {
            let n = random_homogeneous_normalizer(&t, &mut rng);
            let image = hat_map(&t, &n, &rt).unwrap();
            let expected: Vec<ArrowId> = {
                let mut v: Vec<ArrowId> = n
                    .support(TOL)
                    .iter()
                    .map(|a| ArrowId(rt.upsilon_g()[a.0]))
                    .collect();
                v.sort_unstable();
                v
            };
            assert_eq!(image.support(1e-12), expected);
            assert!(crate::groupoid::is_bisection(
                rt.twist().groupoid(),
                &image.support(1e-12)
            ));
        }
    }

    #[test]
    fn roundtrip_rejects_broken_cocycle_at_validation() {
        let t = twisted_group::<f64>(2, 2, [[0, 0], [1, 0]]).unwrap();
        let g = t.groupoid();
        let mut sigma = t.cocycle().clone();
        let (l, r, _) = g
            .composable_pairs()
            .find(|&(l, r, _)| !g.is_unit_arrow(l) && !g.is_unit_arrow(r))
            .unwrap();
        sigma.set(l, r, -sigma.get(l, r));
        let bad = t.with_cocycle(sigma);
        assert!(matches!(
            verify_roundtrip(&bad, &tols()),
            Err(ReconstructError::Invalid(_))
        ));
    }

    #[test]
    fn roundtrip_rejects_ineffective_grading() {
        let z2 = FiniteGroup::cyclic(2);
        let t = group_with_trivial_grading::<f64>(&z2);
        assert!(matches!(
            verify_roundtrip(&t, &tols()),
            Err(ReconstructError::NotEffective(_))
        ));
    }

    #[test]
    fn roundtrip_passes_on_z3() {
        let cert = verify_roundtrip(&z3_identity_graded(), &tols()).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.norm_samples.len(), ROUNDTRIP_NORM_SAMPLES);
        for s in &cert.norm_samples {
            assert!((s.input_norm - s.image_norm).abs() <= cert.norm_tolerance);
        }
    }
}
