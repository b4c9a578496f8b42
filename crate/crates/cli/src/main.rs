//! twistlab: validate graded twist documents, compute in their convolution
//! algebras, and run the certified twist reconstruction.
//!
//! Exit codes: 0 success, 1 validation failure, 2 precondition failure,
//! 3 internal assertion (tolerance breach).

mod document;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use document::{degree_fiber, degree_fibers, parse_element_spec, TwistDocument};
use twistlab::cartan::cartan_check;
use twistlab::generators;
use twistlab::group::GroupElem;
use twistlab::rep::reduced_norm;
use twistlab::weyl::{verify_roundtrip, ReconstructError};
use twistlab::{Tolerances, Twist64};

const EXIT_VALIDATION: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "twistlab",
    version,
    about = "Twisted convolution algebras of finite graded groupoids"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the groupoid, cocycle and grading axioms of a document.
    Validate { path: PathBuf },
    /// Inspect the convolution algebra of a valid document.
    Algebra {
        path: PathBuf,
        /// Reduced norm of an element: `all-ones` or `id1+id2+...`.
        #[arg(long)]
        norm: Option<String>,
        /// Print the arrows of one degree fiber (a degree label, or `all`).
        #[arg(long)]
        component: Option<String>,
        /// Run the graded Cartan verification.
        #[arg(long)]
        cartan: bool,
        /// Print the structure constants (products of point masses).
        #[arg(long)]
        structure: bool,
    },
    /// Run the certified Weyl reconstruction roundtrip.
    Reconstruct {
        path: PathBuf,
        /// Write the machine-readable certificate to this path.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Emit example documents.
    Generate {
        #[command(subcommand)]
        kind: GenCmd,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// A group as a one-unit groupoid with the identity grading.
    Group {
        /// Group preset: Z1..Z9, ZmxZn, S3, trivial.
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: PathBuf,
        /// Multiply the cocycle by a seeded random coboundary.
        #[arg(long)]
        perturb_seed: Option<u64>,
    },
    /// The pair groupoid on n units.
    Pair {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        perturb_seed: Option<u64>,
    },
    /// A free transformation groupoid preset.
    Action {
        /// One of: z2-swap, z3-cycle, z4-cycle.
        #[arg(long)]
        preset: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        perturb_seed: Option<u64>,
    },
    /// Bilinear cocycle twist on Z/n1 x Z/n2.
    Twisted {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// Exponent matrix `m11,m12;m21,m22`.
        #[arg(long, default_value = "0,0;1,0")]
        matrix: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        perturb_seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

/// Default tolerances, with the norm level overridable via TWISTLAB_TOL.
fn tolerances() -> Result<Tolerances<f64>> {
    let tol = Tolerances::<f64>::default();
    match std::env::var("TWISTLAB_TOL") {
        Err(_) => Ok(tol),
        Ok(text) => {
            let v: f64 = text
                .parse()
                .with_context(|| format!("TWISTLAB_TOL must be a float, got '{text}'"))?;
            if !v.is_finite() || v <= 0.0 {
                bail!("TWISTLAB_TOL must be positive, got {v}");
            }
            Ok(tol.with_norm(v))
        }
    }
}

fn load_twist(path: &Path) -> Result<Twist64> {
    let doc = TwistDocument::load(path)?;
    Ok(doc.to_twist()?)
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Validate { path } => cmd_validate(&path),
        Cmd::Algebra {
            path,
            norm,
            component,
            cartan,
            structure,
        } => cmd_algebra(&path, norm, component, cartan, structure),
        Cmd::Reconstruct { path, certificate } => cmd_reconstruct(&path, certificate),
        Cmd::Generate { kind } => cmd_generate(kind),
    }
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let tol = tolerances()?;
    let t = load_twist(path)?;
    let report = t.validate(tol.algebraic);
    let g = t.groupoid();
    if report.is_empty() {
        println!(
            "valid: {} units, {} arrows, grading group of order {}",
            g.n_units(),
            g.n_arrows(),
            t.gamma().order()
        );
        return Ok(ExitCode::SUCCESS);
    }
    for v in &report.groupoid {
        println!("groupoid violation: {}", v.describe(g));
    }
    for v in &report.cocycle {
        println!("cocycle violation: {}", v.describe(g));
    }
    for v in &report.grading {
        println!("grading violation: {}", v.describe(g));
    }
    Ok(ExitCode::from(EXIT_VALIDATION))
}

fn require_valid(t: &Twist64, tol: &Tolerances<f64>) -> Result<()> {
    let report = t.validate(tol.algebraic);
    if !report.is_empty() {
        bail!(
            "document fails validation ({} violations); run `twistlab validate` for details",
            report.groupoid.len() + report.cocycle.len() + report.grading.len()
        );
    }
    Ok(())
}

fn cmd_algebra(
    path: &Path,
    norm: Option<String>,
    component: Option<String>,
    cartan: bool,
    structure: bool,
) -> Result<ExitCode> {
    let tol = tolerances()?;
    let t = load_twist(path)?;
    require_valid(&t, &tol)?;
    let g = t.groupoid();
    println!(
        "algebra dimension {} over {} units; grading group order {}",
        g.n_arrows(),
        g.n_units(),
        t.gamma().order()
    );

    if structure {
        for (l, r, c) in g.composable_pairs() {
            let s = t.sigma(l, r);
            println!(
                "d[{}] * d[{}] = ({:+.6}{:+.6}i) d[{}]",
                g.arrow_label(l),
                g.arrow_label(r),
                s.re,
                s.im,
                g.arrow_label(c)
            );
        }
    }

    if let Some(spec) = norm {
        let f = parse_element_spec(&t, &spec)?;
        println!("reduced norm of {spec} = {:.12}", reduced_norm(&t, &f));
    }

    if let Some(label) = component {
        if label == "all" {
            for (degree, arrows) in degree_fibers(&t) {
                println!("component {degree}: {}", arrows.join(", "));
            }
        } else {
            let (_, arrows) = degree_fiber(&t, &label)
                .ok_or_else(|| anyhow!("unknown degree label '{label}'"))?;
            println!("component {label}: {}", arrows.join(", "));
        }
    }

    if cartan {
        let report = cartan_check(&t, tol.algebraic);
        for check in &report.checks {
            println!(
                "cartan {}: {} ({})",
                check.name,
                if check.passed { "pass" } else { "FAIL" },
                check.detail
            );
        }
        if !report.passed() {
            let precondition = report
                .checks
                .iter()
                .any(|c| c.name == "effective-zero-fiber" && !c.passed);
            return Ok(ExitCode::from(if precondition {
                EXIT_PRECONDITION
            } else {
                EXIT_ASSERTION
            }));
        }
    }

    Ok(ExitCode::SUCCESS)
}

fn cmd_reconstruct(path: &Path, certificate: Option<PathBuf>) -> Result<ExitCode> {
    let tol = tolerances()?;
    let t = load_twist(path)?;

    let cert = match verify_roundtrip(&t, &tol) {
        Ok(cert) => cert,
        Err(e @ ReconstructError::Invalid(_)) => {
            eprintln!("validation failure: {e}");
            return Ok(ExitCode::from(EXIT_VALIDATION));
        }
        Err(e @ (ReconstructError::NotEffective(_) | ReconstructError::CartanFailed(_))) => {
            eprintln!("precondition failure: {e}");
            return Ok(ExitCode::from(EXIT_PRECONDITION));
        }
        Err(e) => {
            eprintln!("assertion failure: {e}");
            return Ok(ExitCode::from(EXIT_ASSERTION));
        }
    };

    let rec = &cert.reconstruction;
    println!(
        "reconstruction certified: {} germs, cocycle class {}",
        rec.germ_count,
        if rec.cocycle_trivial_class {
            "trivial"
        } else {
            "nontrivial"
        }
    );
    println!(
        "max extracted-phase deviation {:.3e}; norm isometry on {} samples within {:.1e}",
        rec.max_phase_deviation,
        cert.norm_samples.len(),
        cert.norm_tolerance
    );
    let g = t.groupoid();
    for a in g.arrows() {
        println!(
            "Y_G: {} -> {}",
            g.arrow_label(a),
            rec.germ_representatives[rec.upsilon[a.0]]
        );
    }

    if let Some(out) = certificate {
        let text = serde_json::to_string_pretty(&cert).expect("certificate serializes");
        std::fs::write(&out, text + "\n")
            .with_context(|| format!("cannot write certificate to {}", out.display()))?;
        println!("certificate written to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn action_preset(name: &str) -> Result<Twist64> {
    let cyclic_shift = |n: usize| -> Vec<usize> {
        let mut table = vec![0usize; n * n];
        for g in 0..n {
            for x in 0..n {
                table[g * n + x] = (x + g) % n;
            }
        }
        table
    };
    let t = match name {
        "z2-swap" => {
            let z2 = twistlab::FiniteGroup::cyclic(2);
            generators::action_groupoid(&z2, 2, &[0, 1, 1, 0], &z2, &[GroupElem(0), GroupElem(1)])
        }
        "z3-cycle" => {
            let z3 = twistlab::FiniteGroup::cyclic(3);
            generators::action_groupoid(
                &z3,
                3,
                &cyclic_shift(3),
                &z3,
                &(0..3).map(GroupElem).collect::<Vec<_>>(),
            )
        }
        "z4-cycle" => {
            let z4 = twistlab::FiniteGroup::cyclic(4);
            generators::action_groupoid(
                &z4,
                4,
                &cyclic_shift(4),
                &z4,
                &(0..4).map(GroupElem).collect::<Vec<_>>(),
            )
        }
        other => bail!("unknown action preset '{other}' (try z2-swap, z3-cycle, z4-cycle)"),
    };
    Ok(t?)
}

fn parse_matrix(text: &str) -> Result<[[i64; 2]; 2]> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 2 {
        bail!("matrix must be 'm11,m12;m21,m22'");
    }
    let mut m = [[0i64; 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != 2 {
            bail!("matrix must be 'm11,m12;m21,m22'");
        }
        for (j, e) in entries.iter().enumerate() {
            m[i][j] = e
                .trim()
                .parse()
                .context("matrix entries must be integers")?;
        }
    }
    Ok(m)
}

fn cmd_generate(kind: GenCmd) -> Result<ExitCode> {
    let (t, name, out, perturb): (Twist64, String, PathBuf, Option<u64>) = match kind {
        GenCmd::Group {
            group,
            out,
            perturb_seed,
        } => {
            let gr = document::gamma_preset(&group)
                .ok_or_else(|| anyhow!("unknown group preset '{group}'"))?;
            let c: Vec<GroupElem> = gr.elements().collect();
            let t = generators::group_groupoid(&gr, &gr, &c)?;
            (t, format!("group-{group}"), out, perturb_seed)
        }
        GenCmd::Pair {
            n,
            out,
            perturb_seed,
        } => {
            if n == 0 {
                bail!("pair groupoid needs n >= 1");
            }
            (
                generators::pair_groupoid(n),
                format!("pair-{n}"),
                out,
                perturb_seed,
            )
        }
        GenCmd::Action {
            preset,
            out,
            perturb_seed,
        } => (
            action_preset(&preset)?,
            format!("action-{preset}"),
            out,
            perturb_seed,
        ),
        GenCmd::Twisted {
            n1,
            n2,
            matrix,
            out,
            perturb_seed,
        } => {
            let m = parse_matrix(&matrix)?;
            let t = generators::twisted_group(n1, n2, m)?;
            (t, format!("twisted-Z{n1}xZ{n2}"), out, perturb_seed)
        }
    };

    let t = match perturb {
        Some(seed) => generators::randomize_cocycle(&t, seed),
        None => t,
    };

    let mut metadata = BTreeMap::new();
    metadata.insert("name".to_string(), name.clone());
    if let Some(seed) = perturb {
        metadata.insert("perturb_seed".to_string(), seed.to_string());
    }
    let doc = TwistDocument::from_twist(&t, metadata);
    doc.save(&out)?;
    println!("wrote {name} to {}", out.display());
    Ok(ExitCode::SUCCESS)
}
