//! The on-disk twist document: a JSON description of units, arrows,
//! compositions with cocycle values, and the grading group.
//!
//! Identity arrows and inverses are not stored; they are derived from the
//! composition table on load. Omitted cocycle values default to `1 + 0i`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use twistlab::cocycle::TwoCocycle;
use twistlab::group::GroupElem;
use twistlab::groupoid::FiniteGroupoid;
use twistlab::twist::Grading;
use twistlab::{FiniteGroup, GradedTwist, Twist64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub rng: String,
    /// Degree label in the grading group; defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub left: String,
    pub right: String,
    pub result: String,
    #[serde(default = "one")]
    pub sigma_re: f64,
    #[serde(default)]
    pub sigma_im: f64,
}

fn one() -> f64 {
    1.0
}

/// The grading group: either a named preset (`"Z4"`, `"Z2xZ2"`, `"S3"`,
/// `"trivial"`) or an explicit multiplication table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Preset(String),
    Table {
        elements: Vec<String>,
        table: Vec<Vec<String>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistDocument {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
    pub units: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub gamma: GammaSpec,
    #[serde(default)]
    pub compositions: Vec<CompositionSpec>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("duplicate unit label '{0}'")]
    DuplicateUnit(String),
    #[error("duplicate arrow id '{0}'")]
    DuplicateArrow(String),
    #[error("arrow '{arrow}' references unknown unit '{unit}' in field '{field}'")]
    UnknownUnit {
        arrow: String,
        unit: String,
        field: &'static str,
    },
    #[error("composition references unknown arrow id '{0}'")]
    UnknownArrow(String),
    #[error("composition ({left}, {right}) listed more than once")]
    DuplicateComposition { left: String, right: String },
    #[error("unknown gamma preset '{0}'")]
    UnknownPreset(String),
    #[error("gamma table rejected: {0}")]
    BadGamma(#[from] twistlab::group::GroupError),
    #[error("arrow '{arrow}' has unknown degree '{degree}'")]
    UnknownDegree { arrow: String, degree: String },
    #[error("composition table does not define a groupoid: {0}")]
    Structure(#[from] twistlab::groupoid::GroupoidDataError),
}

/// Resolve a named grading-group preset.
pub fn gamma_preset(name: &str) -> Option<FiniteGroup> {
    if name.eq_ignore_ascii_case("trivial") {
        return Some(FiniteGroup::trivial());
    }
    if name.eq_ignore_ascii_case("s3") {
        return Some(FiniteGroup::symmetric3());
    }
    let parse_cyclic =
        |s: &str| -> Option<usize> { s.strip_prefix(['Z', 'z'])?.parse().ok().filter(|&n| n >= 1) };
    if let Some((a, b)) = name.split_once(['x', 'X']) {
        let (na, nb) = (parse_cyclic(a)?, parse_cyclic(b)?);
        return Some(FiniteGroup::direct_product(
            &FiniteGroup::cyclic(na),
            &FiniteGroup::cyclic(nb),
        ));
    }
    parse_cyclic(name).map(FiniteGroup::cyclic)
}

impl TwistDocument {
    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| DocumentError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        let text = serde_json::to_string_pretty(self).expect("document serializes");
        std::fs::write(path, text + "\n").map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn gamma_group(&self) -> Result<FiniteGroup, DocumentError> {
        match &self.gamma {
            GammaSpec::Preset(name) => {
                gamma_preset(name).ok_or_else(|| DocumentError::UnknownPreset(name.clone()))
            }
            GammaSpec::Table { elements, table } => {
                let index = |label: &str| {
                    elements
                        .iter()
                        .position(|e| e == label)
                        .ok_or_else(|| DocumentError::UnknownPreset(label.to_string()))
                };
                let mut rows = Vec::with_capacity(table.len());
                for row in table {
                    rows.push(
                        row.iter()
                            .map(|l| index(l))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                Ok(FiniteGroup::from_table(elements.clone(), rows)?)
            }
        }
    }

    /// Build the graded twist. Structural defects are errors; axiom
    /// violations are left to `validate` downstream.
    pub fn to_twist(&self) -> Result<Twist64, DocumentError> {
        let mut unit_index = BTreeMap::new();
        for (i, u) in self.units.iter().enumerate() {
            if unit_index.insert(u.clone(), i).is_some() {
                return Err(DocumentError::DuplicateUnit(u.clone()));
            }
        }
        let mut arrow_index = BTreeMap::new();
        for (i, a) in self.arrows.iter().enumerate() {
            if arrow_index.insert(a.id.clone(), i).is_some() {
                return Err(DocumentError::DuplicateArrow(a.id.clone()));
            }
        }

        let mut src = Vec::with_capacity(self.arrows.len());
        let mut rng = Vec::with_capacity(self.arrows.len());
        for a in &self.arrows {
            src.push(
                *unit_index
                    .get(&a.src)
                    .ok_or_else(|| DocumentError::UnknownUnit {
                        arrow: a.id.clone(),
                        unit: a.src.clone(),
                        field: "src",
                    })?,
            );
            rng.push(
                *unit_index
                    .get(&a.rng)
                    .ok_or_else(|| DocumentError::UnknownUnit {
                        arrow: a.id.clone(),
                        unit: a.rng.clone(),
                        field: "rng",
                    })?,
            );
        }

        let mut comps = Vec::with_capacity(self.compositions.len());
        let mut seen = BTreeMap::new();
        for c in &self.compositions {
            let l = *arrow_index
                .get(&c.left)
                .ok_or_else(|| DocumentError::UnknownArrow(c.left.clone()))?;
            let r = *arrow_index
                .get(&c.right)
                .ok_or_else(|| DocumentError::UnknownArrow(c.right.clone()))?;
            let res = *arrow_index
                .get(&c.result)
                .ok_or_else(|| DocumentError::UnknownArrow(c.result.clone()))?;
            if seen.insert((l, r), res).is_some() {
                return Err(DocumentError::DuplicateComposition {
                    left: c.left.clone(),
                    right: c.right.clone(),
                });
            }
            comps.push((l, r, res));
        }

        let groupoid = FiniteGroupoid::from_composition(
            self.units.clone(),
            self.arrows.iter().map(|a| a.id.clone()).collect(),
            src,
            rng,
            &comps,
        )?;

        let gamma = self.gamma_group()?;
        let mut degrees = Vec::with_capacity(self.arrows.len());
        for a in &self.arrows {
            let elem = match &a.degree {
                None => gamma.identity(),
                Some(label) => {
                    gamma
                        .elem_by_label(label)
                        .ok_or_else(|| DocumentError::UnknownDegree {
                            arrow: a.id.clone(),
                            degree: label.clone(),
                        })?
                }
            };
            degrees.push(elem);
        }
        let grading =
            Grading::new(&groupoid, gamma, degrees).expect("degrees cover arrows by construction");

        let mut sigma = TwoCocycle::trivial(&groupoid);
        for c in &self.compositions {
            let l = twistlab::ArrowId(arrow_index[&c.left]);
            let r = twistlab::ArrowId(arrow_index[&c.right]);
            sigma.set(l, r, Complex::new(c.sigma_re, c.sigma_im));
        }

        Ok(GradedTwist::new(groupoid, sigma, grading))
    }

    /// Render a twist back into document form, grading group as an
    /// explicit table. Output ordering is deterministic.
    pub fn from_twist(t: &Twist64, metadata: BTreeMap<String, String>) -> Self {
        let g = t.groupoid();
        let gamma = t.gamma();
        let units: Vec<String> = g.units().map(|x| g.unit_label(x).to_string()).collect();
        let arrows: Vec<ArrowSpec> = g
            .arrows()
            .map(|a| ArrowSpec {
                id: g.arrow_label(a).to_string(),
                src: g.unit_label(g.src(a)).to_string(),
                rng: g.unit_label(g.rng(a)).to_string(),
                degree: Some(gamma.label(t.degree(a)).to_string()),
            })
            .collect();
        let compositions: Vec<CompositionSpec> = g
            .composable_pairs()
            .map(|(l, r, c)| {
                let s = t.sigma(l, r);
                CompositionSpec {
                    left: g.arrow_label(l).to_string(),
                    right: g.arrow_label(r).to_string(),
                    result: g.arrow_label(c).to_string(),
                    sigma_re: s.re,
                    sigma_im: s.im,
                }
            })
            .collect();
        let elements: Vec<String> = gamma
            .elements()
            .map(|e| gamma.label(e).to_string())
            .collect();
        let table: Vec<Vec<String>> = gamma
            .elements()
            .map(|a| {
                gamma
                    .elements()
                    .map(|b| gamma.label(gamma.mul(a, b)).to_string())
                    .collect()
            })
            .collect();
        TwistDocument {
            metadata,
            units,
            arrows,
            gamma: GammaSpec::Table { elements, table },
            compositions,
        }
    }
}

/// Parse an element spec for `--norm`: `all-ones` or `id1+id2+...`.
pub fn parse_element_spec(t: &Twist64, spec: &str) -> Result<twistlab::Element64, DocumentError> {
    let g = t.groupoid();
    let n = g.n_arrows();
    if spec == "all-ones" {
        return Ok(twistlab::AlgebraElement::from_coeffs(vec![
            Complex::new(
                1.0, 0.0
            );
            n
        ]));
    }
    let mut out = twistlab::AlgebraElement::zero(n);
    for term in spec.split('+') {
        let id = term.trim();
        let arrow = g
            .arrows()
            .find(|&a| g.arrow_label(a) == id)
            .ok_or_else(|| DocumentError::UnknownArrow(id.to_string()))?;
        out.set_coeff(arrow, out.coeff(arrow) + Complex::new(1.0, 0.0));
    }
    Ok(out)
}

/// The degree fibers of the grading, as `(degree label, arrow labels)`.
pub fn degree_fibers(t: &Twist64) -> Vec<(String, Vec<String>)> {
    let g = t.groupoid();
    let gamma = t.gamma();
    gamma
        .elements()
        .map(|s| {
            let arrows: Vec<String> = g
                .arrows()
                .filter(|&a| t.degree(a) == s)
                .map(|a| g.arrow_label(a).to_string())
                .collect();
            (gamma.label(s).to_string(), arrows)
        })
        .collect()
}

/// Fiber of one degree label.
pub fn degree_fiber(t: &Twist64, label: &str) -> Option<(GroupElem, Vec<String>)> {
    let gamma = t.gamma();
    let s = gamma.elem_by_label(label)?;
    let g = t.groupoid();
    let arrows = g
        .arrows()
        .filter(|&a| t.degree(a) == s)
        .map(|a| g.arrow_label(a).to_string())
        .collect();
    Some((s, arrows))
}
