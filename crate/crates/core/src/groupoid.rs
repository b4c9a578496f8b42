//! Finite groupoids: arrows over a finite unit space with partial composition.
//!
//! Arrows and units are identified by dense indices; composition is stored as
//! a dense table so that every operation downstream can iterate composable
//! pairs without hashing. Structural well-formedness (index ranges, table
//! shape) is enforced at construction; the groupoid *axioms* are checked by
//! [`validate_groupoid`], which reports violations as data rather than errors.

use thiserror::Error;

/// Index of a unit in the unit space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitId(pub usize);

/// Index of an arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub usize);

/// A finite groupoid with a chosen embedding of units as identity arrows.
///
/// Composition convention: `compose(g, h)` is defined exactly when
/// `src(g) == rng(h)`, and the composite runs `src(h) -> rng(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupoid {
    unit_labels: Vec<String>,
    arrow_labels: Vec<String>,
    src: Vec<UnitId>,
    rng: Vec<UnitId>,
    /// Row-major `[left * n_arrows + right]`.
    comp: Vec<Option<ArrowId>>,
    inv: Vec<ArrowId>,
    unit_arrow: Vec<ArrowId>,
}

/// Structural defects that prevent even building the arrow tables.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupoidDataError {
    #[error("arrow table length mismatch: {0}")]
    Shape(String),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("no unique identity arrow at unit {unit}: {detail}")]
    UnitArrow { unit: String, detail: String },
    #[error("no unique inverse for arrow {arrow}: {detail}")]
    Inverse { arrow: String, detail: String },
}

impl FiniteGroupoid {
    /// Build from explicit tables. Only shape and index ranges are checked
    /// here; run [`validate_groupoid`] for the axioms.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        unit_labels: Vec<String>,
        arrow_labels: Vec<String>,
        src: Vec<usize>,
        rng: Vec<usize>,
        compositions: &[(usize, usize, usize)],
        inv: Vec<usize>,
        unit_arrow: Vec<usize>,
    ) -> Result<Self, GroupoidDataError> {
        let nu = unit_labels.len();
        let na = arrow_labels.len();
        if src.len() != na || rng.len() != na || inv.len() != na {
            return Err(GroupoidDataError::Shape(format!(
                "src/rng/inv must each list {na} arrows"
            )));
        }
        if unit_arrow.len() != nu {
            return Err(GroupoidDataError::Shape(format!(
                "unit_arrow must list {nu} units"
            )));
        }
        let check_unit = |i: usize| {
            if i < nu {
                Ok(UnitId(i))
            } else {
                Err(GroupoidDataError::Range(format!("unit index {i} >= {nu}")))
            }
        };
        let check_arrow = |i: usize| {
            if i < na {
                Ok(ArrowId(i))
            } else {
                Err(GroupoidDataError::Range(format!("arrow index {i} >= {na}")))
            }
        };
        let src = src.into_iter().map(check_unit).collect::<Result<_, _>>()?;
        let rng = rng.into_iter().map(check_unit).collect::<Result<_, _>>()?;
        let inv = inv.into_iter().map(check_arrow).collect::<Result<_, _>>()?;
        let unit_arrow = unit_arrow
            .into_iter()
            .map(check_arrow)
            .collect::<Result<_, _>>()?;
        let mut comp = vec![None; na * na];
        for &(l, r, c) in compositions {
            check_arrow(l)?;
            check_arrow(r)?;
            comp[l * na + r] = Some(check_arrow(c)?);
        }
        Ok(FiniteGroupoid {
            unit_labels,
            arrow_labels,
            src,
            rng,
            comp,
            inv,
            unit_arrow,
        })
    }

    /// Build from a composition table alone, deriving identity arrows (the
    /// idempotents) and inverses. This is the loading path for documents
    /// that list only arrows and compositions.
    pub fn from_composition(
        unit_labels: Vec<String>,
        arrow_labels: Vec<String>,
        src: Vec<usize>,
        rng: Vec<usize>,
        compositions: &[(usize, usize, usize)],
    ) -> Result<Self, GroupoidDataError> {
        let na = arrow_labels.len();
        let inv_placeholder = vec![0; na];
        let unit_placeholder = vec![0; unit_labels.len()];
        let mut g = FiniteGroupoid::new(
            unit_labels,
            arrow_labels,
            src,
            rng,
            compositions,
            inv_placeholder,
            unit_placeholder,
        )?;

        // Identity arrows are the idempotents g*g = g with src = rng.
        for x in 0..g.n_units() {
            let mut found = Vec::new();
            for a in g.arrows() {
                if g.src(a) == UnitId(x) && g.rng(a) == UnitId(x) && g.compose(a, a) == Some(a) {
                    found.push(a);
                }
            }
            match found.as_slice() {
                [u] => g.unit_arrow[x] = *u,
                [] => {
                    return Err(GroupoidDataError::UnitArrow {
                        unit: g.unit_labels[x].clone(),
                        detail: "no idempotent arrow over this unit".into(),
                    })
                }
                many => {
                    return Err(GroupoidDataError::UnitArrow {
                        unit: g.unit_labels[x].clone(),
                        detail: format!("{} idempotent arrows over this unit", many.len()),
                    })
                }
            }
        }

        // inv(a) is the unique b with a*b and b*a the identity arrows.
        for a in g.arrows() {
            let want_r = g.unit_arrow[g.rng(a).0];
            let want_s = g.unit_arrow[g.src(a).0];
            let mut found = Vec::new();
            for b in g.arrows() {
                if g.compose(a, b) == Some(want_r) && g.compose(b, a) == Some(want_s) {
                    found.push(b);
                }
            }
            match found.as_slice() {
                [b] => g.inv[a.0] = *b,
                [] => {
                    return Err(GroupoidDataError::Inverse {
                        arrow: g.arrow_labels[a.0].clone(),
                        detail: "no two-sided inverse in the composition table".into(),
                    })
                }
                many => {
                    return Err(GroupoidDataError::Inverse {
                        arrow: g.arrow_labels[a.0].clone(),
                        detail: format!("{} candidate inverses", many.len()),
                    })
                }
            }
        }
        Ok(g)
    }

    pub fn n_units(&self) -> usize {
        self.unit_labels.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrow_labels.len()
    }

    pub fn units(&self) -> impl Iterator<Item = UnitId> {
        (0..self.n_units()).map(UnitId)
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> {
        (0..self.n_arrows()).map(ArrowId)
    }

    pub fn src(&self, a: ArrowId) -> UnitId {
        self.src[a.0]
    }

    pub fn rng(&self, a: ArrowId) -> UnitId {
        self.rng[a.0]
    }

    pub fn inv(&self, a: ArrowId) -> ArrowId {
        self.inv[a.0]
    }

    pub fn unit_arrow(&self, x: UnitId) -> ArrowId {
        self.unit_arrow[x.0]
    }

    pub fn is_unit_arrow(&self, a: ArrowId) -> bool {
        self.unit_arrow[self.src(a).0] == a
    }

    pub fn compose(&self, left: ArrowId, right: ArrowId) -> Option<ArrowId> {
        self.comp[left.0 * self.n_arrows() + right.0]
    }

    pub fn unit_label(&self, x: UnitId) -> &str {
        &self.unit_labels[x.0]
    }

    pub fn arrow_label(&self, a: ArrowId) -> &str {
        &self.arrow_labels[a.0]
    }

    /// `Gx`: arrows with source `x`, in index order.
    pub fn arrows_from(&self, x: UnitId) -> Vec<ArrowId> {
        self.arrows().filter(|&a| self.src(a) == x).collect()
    }

    /// Arrows with range `x`, in index order.
    pub fn arrows_into(&self, x: UnitId) -> Vec<ArrowId> {
        self.arrows().filter(|&a| self.rng(a) == x).collect()
    }

    /// All `(left, right, composite)` triples present in the table.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (ArrowId, ArrowId, ArrowId)> + '_ {
        let n = self.n_arrows();
        self.comp
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.map(|c| (ArrowId(i / n), ArrowId(i % n), c)))
    }

    /// All `(a, b, c)` with both `a*b` and `b*c` defined.
    pub fn composable_triples(&self) -> Vec<(ArrowId, ArrowId, ArrowId)> {
        let mut out = Vec::new();
        for (a, b, _) in self.composable_pairs() {
            for c in self.arrows() {
                if self.compose(b, c).is_some() {
                    out.push((a, b, c));
                }
            }
        }
        out
    }
}

/// Violations of the groupoid axioms, each carrying its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupoidViolation {
    /// `compose(g, h)` defined but `src(g) != rng(h)`, or vice versa.
    CompositionDomain { left: ArrowId, right: ArrowId },
    /// Composite has wrong source or range.
    CompositionEndpoints { left: ArrowId, right: ArrowId },
    /// `(ab)c != a(bc)` on a composable triple.
    Associativity { a: ArrowId, b: ArrowId, c: ArrowId },
    /// Identity arrow at a unit does not stay over that unit.
    UnitArrowEndpoints { unit: UnitId },
    /// `g * unit_arrow(src g) != g` or `unit_arrow(rng g) * g != g`.
    IdentityLaw { arrow: ArrowId },
    /// `inv` is not an involution at this arrow.
    InverseInvolution { arrow: ArrowId },
    /// `g * inv(g)` or `inv(g) * g` is not the expected identity arrow.
    InverseLaw { arrow: ArrowId },
}

impl GroupoidViolation {
    pub fn describe(&self, g: &FiniteGroupoid) -> String {
        let al = |a: &ArrowId| g.arrow_label(*a).to_string();
        match self {
            GroupoidViolation::CompositionDomain { left, right } => format!(
                "composition domain: ({}, {}) disagrees with src/rng matching",
                al(left),
                al(right)
            ),
            GroupoidViolation::CompositionEndpoints { left, right } => format!(
                "composite of ({}, {}) has wrong endpoints",
                al(left),
                al(right)
            ),
            GroupoidViolation::Associativity { a, b, c } => {
                format!("associativity fails on ({}, {}, {})", al(a), al(b), al(c))
            }
            GroupoidViolation::UnitArrowEndpoints { unit } => format!(
                "identity arrow at unit {} leaves the unit",
                g.unit_label(*unit)
            ),
            GroupoidViolation::IdentityLaw { arrow } => {
                format!("identity law fails at arrow {}", al(arrow))
            }
            GroupoidViolation::InverseInvolution { arrow } => {
                format!("inv is not an involution at arrow {}", al(arrow))
            }
            GroupoidViolation::InverseLaw { arrow } => {
                format!("g*inv(g) law fails at arrow {}", al(arrow))
            }
        }
    }
}

/// Check every groupoid axiom exhaustively. Empty report iff valid.
pub fn validate_groupoid(g: &FiniteGroupoid) -> Vec<GroupoidViolation> {
    let mut out = Vec::new();

    for x in g.units() {
        let u = g.unit_arrow(x);
        if g.src(u) != x || g.rng(u) != x {
            out.push(GroupoidViolation::UnitArrowEndpoints { unit: x });
        }
    }

    for a in g.arrows() {
        for b in g.arrows() {
            let defined = g.compose(a, b).is_some();
            if defined != (g.src(a) == g.rng(b)) {
                out.push(GroupoidViolation::CompositionDomain { left: a, right: b });
            }
            if let Some(c) = g.compose(a, b) {
                if g.src(c) != g.src(b) || g.rng(c) != g.rng(a) {
                    out.push(GroupoidViolation::CompositionEndpoints { left: a, right: b });
                }
            }
        }
    }

    for a in g.arrows() {
        if g.compose(a, g.unit_arrow(g.src(a))) != Some(a)
            || g.compose(g.unit_arrow(g.rng(a)), a) != Some(a)
        {
            out.push(GroupoidViolation::IdentityLaw { arrow: a });
        }
        if g.inv(g.inv(a)) != a {
            out.push(GroupoidViolation::InverseInvolution { arrow: a });
        }
        let i = g.inv(a);
        if g.src(i) != g.rng(a)
            || g.rng(i) != g.src(a)
            || g.compose(a, i) != Some(g.unit_arrow(g.rng(a)))
            || g.compose(i, a) != Some(g.unit_arrow(g.src(a)))
        {
            out.push(GroupoidViolation::InverseLaw { arrow: a });
        }
    }

    for (a, b, c) in g.composable_triples() {
        let ab = g.compose(a, b);
        let bc = g.compose(b, c);
        let left = ab.and_then(|ab| g.compose(ab, c));
        let right = bc.and_then(|bc| g.compose(a, bc));
        if left != right || left.is_none() {
            out.push(GroupoidViolation::Associativity { a, b, c });
        }
    }

    out
}

/// A subset of arrows on which both source and range are injective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisection {
    arrows: Vec<ArrowId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BisectionError {
    #[error("source not injective: arrows {0} and {1} share a source")]
    SourceClash(usize, usize),
    #[error("range not injective: arrows {0} and {1} share a range")]
    RangeClash(usize, usize),
}

impl Bisection {
    pub fn new(g: &FiniteGroupoid, mut arrows: Vec<ArrowId>) -> Result<Self, BisectionError> {
        arrows.sort_unstable();
        arrows.dedup();
        for i in 0..arrows.len() {
            for j in (i + 1)..arrows.len() {
                if g.src(arrows[i]) == g.src(arrows[j]) {
                    return Err(BisectionError::SourceClash(arrows[i].0, arrows[j].0));
                }
                if g.rng(arrows[i]) == g.rng(arrows[j]) {
                    return Err(BisectionError::RangeClash(arrows[i].0, arrows[j].0));
                }
            }
        }
        Ok(Bisection { arrows })
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }
}

/// Convenience predicate form of [`Bisection::new`].
pub fn is_bisection(g: &FiniteGroupoid, arrows: &[ArrowId]) -> bool {
    Bisection::new(g, arrows.to_vec()).is_ok()
}
