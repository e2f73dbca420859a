use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ghyper::gkz::SystemDocument;
use ghyper::gl_action::substitute_real;
use ghyper::invariants::all_invariants;
use ghyper::io::{parse_matrix, CoefficientFile};
use ghyper::lattice::BasisDocument;
use ghyper::quadrature::{decay_check, integrate, moment, QuadratureConfig};
use ghyper::verifier::{run_suites, ReportDocument, Suite, VerifierConfig};
use ghyper::{Error, ExponentVector, GkzSystem, MonomialBasis, SCHEMA};
use serde_json::{json, Value};

/// Covariance defect above which `orbit-check` exits with status 1.
const ORBIT_TOLERANCE: f64 = 1e-5;

#[derive(Parser)]
#[command(name = "ghyper", version, about = "Hypergeometric systems of exponential integrals of homogeneous forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Relative tolerance between refinement levels.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Nodes per axis on the coarsest level.
    #[arg(long, global = true)]
    nodes: Option<usize>,

    /// Number of refinement levels.
    #[arg(long, global = true)]
    levels: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Monomial basis and toric relations.
    Monomials {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: u32,
    },
    /// Box and Euler operators.
    System {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        d: u32,
    },
    /// J(a) for a coefficient file.
    Integrate {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// The moment of x^e for a coefficient file.
    Moment {
        #[arg(short, long)]
        file: PathBuf,
        /// Comma-joined exponent, e.g. "2,0".
        #[arg(short, long)]
        exponent: String,
    },
    /// All invariants defined for the form.
    Invariants {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Compares |det g| J(σ_g a) with J(a).
    OrbitCheck {
        #[arg(short, long)]
        file: PathBuf,
        /// JSON matrix, `[[..],..]` or `{"g": [[..],..]}`.
        #[arg(short, long)]
        g: PathBuf,
    },
    /// Runs the verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path (same as --out).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Operators exported by `system`, used instead of rebuilding them.
        #[arg(long)]
        system_file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Thm1,
    Thm2,
    Thm4,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Thm1 => vec![Suite::Thm1],
            SuiteArg::Thm2 => vec![Suite::Thm2],
            SuiteArg::Thm4 => vec![Suite::Thm4],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

enum Failure {
    Error(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Error(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn quadrature_config(cli: &Cli) -> Result<QuadratureConfig, Error> {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = cli.tolerance {
        cfg.relative_tolerance = t;
    }
    if let Some(n) = cli.nodes {
        cfg.nodes_per_axis = n;
    }
    if let Some(l) = cli.levels {
        cfg.refinement_levels = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_coefficients(path: &Path) -> Result<(MonomialBasis, ghyper::CoefficientVector), Error> {
    let text = fs::read_to_string(path)?;
    CoefficientFile::parse(&text)
        .and_then(|f| f.resolve())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn complex(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn run(cli: &Cli) -> Outcome {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Monomials { n, d } => {
            let basis = MonomialBasis::new(*n, *d)?;
            let doc = BasisDocument::build(&basis)?;
            eprintln!("|A| = {}, {} relations", basis.len(), doc.relations.len());
            emit(&serde_json::to_value(doc).map_err(Error::from)?, out)?;
        }
        Command::System { n, d } => {
            let system = GkzSystem::new(MonomialBasis::new(*n, *d)?)?;
            eprintln!("{} box operators, {} Euler operators", system.box_operators.len(), system.euler_operators.len());
            emit(&serde_json::to_value(system.document()).map_err(Error::from)?, out)?;
        }
        Command::Integrate { file } => {
            let cfg = quadrature_config(cli)?;
            let (basis, a) = read_coefficients(file)?;
            let decay = decay_check(&basis, &a, cfg.sphere_samples, cfg.decay_margin)?;
            let j = integrate(&basis, &a, &cfg)?;
            eprintln!(
                "J = {} {:+}i, error estimate {:.2e}, {} nodes per axis",
                j.value.re, j.value.im, j.error_estimate, j.nodes_per_axis
            );
            if !j.converged {
                eprintln!("warning: refinement did not reach the relative tolerance");
            }
            emit(
                &json!({
                    "schema": SCHEMA,
                    "value": complex(j.value),
                    "error_estimate": j.error_estimate,
                    "converged": j.converged,
                    "nodes_per_axis": j.nodes_per_axis,
                    "abs_scale": j.abs_scale,
                    "decay": decay,
                    "config": j.config_used,
                }),
                out,
            )?;
        }
        Command::Moment { file, exponent } => {
            let cfg = quadrature_config(cli)?;
            let (basis, a) = read_coefficients(file)?;
            let e = ExponentVector::parse(exponent)?;
            let m = moment(&basis, &a, e.entries(), &cfg)?;
            eprintln!(
                "moment x^({}) = {} {:+}i, error estimate {:.2e}",
                e.key(),
                m.value.re,
                m.value.im,
                m.error_estimate
            );
            if !m.converged {
                eprintln!("warning: refinement did not reach the relative tolerance");
            }
            emit(
                &json!({
                    "schema": SCHEMA,
                    "exponent": e.entries(),
                    "value": complex(m.value),
                    "error_estimate": m.error_estimate,
                    "converged": m.converged,
                    "nodes_per_axis": m.nodes_per_axis,
                    "abs_scale": m.abs_scale,
                    "config": m.config_used,
                }),
                out,
            )?;
        }
        Command::Invariants { file } => {
            let (basis, a) = read_coefficients(file)?;
            let values = all_invariants(&basis, &a)?;
            for v in &values {
                eprintln!("{} = {} {:+}i (weight {})", v.name, v.value.re, v.value.im, v.weight);
            }
            let list: Vec<Value> =
                values.iter().map(|v| json!({"name": v.name, "value": complex(v.value), "weight": v.weight})).collect();
            emit(&json!({"schema": SCHEMA, "n": basis.n(), "d": basis.d(), "invariants": list}), out)?;
        }
        Command::OrbitCheck { file, g } => {
            let cfg = quadrature_config(cli)?;
            let (basis, a) = read_coefficients(file)?;
            let g = parse_matrix(&fs::read_to_string(g)?, basis.n())?;
            let det = g.det();
            if det == 0.0 {
                return Err(Error::Domain("g is singular".into()).into());
            }
            let ga = substitute_real(&g, &basis, &a);
            let j = integrate(&basis, &a, &cfg)?;
            let jg = integrate(&basis, &ga, &cfg)?;
            let defect = (jg.value * det.abs() - j.value).norm() / j.value.norm();
            eprintln!("J(a) = {}, J(σ_g a) = {}, det g = {det}, defect {defect:.2e}", j.value, jg.value);
            emit(
                &json!({
                    "schema": SCHEMA,
                    "j": complex(j.value),
                    "j_transformed": complex(jg.value),
                    "det_g": det,
                    "covariance_defect": defect,
                    "tolerance": ORBIT_TOLERANCE,
                }),
                out,
            )?;
            if defect.is_nan() || defect > ORBIT_TOLERANCE {
                return Err(Failure::Check(format!("covariance defect {defect:.2e} above {ORBIT_TOLERANCE:e}")));
            }
        }
        Command::Verify { suite, seed, json: json_path, system_file } => {
            let cfg = VerifierConfig { quadrature: quadrature_config(cli)?, ..VerifierConfig::default() };
            let systems = match system_file {
                Some(p) => {
                    let text = fs::read_to_string(p)?;
                    let doc: SystemDocument = serde_json::from_str(&text)
                        .map_err(|e| Error::Parse(format!("{}: line {}: {e}", p.display(), e.line())))?;
                    let same = doc.matches_rebuilt()?;
                    eprintln!(
                        "system file for (n, d) = ({}, {}) {} the rebuilt operators",
                        doc.n,
                        doc.d,
                        if same { "matches" } else { "differs from" }
                    );
                    Some(vec![doc.to_system()?])
                }
                None => None,
            };
            let reports = run_suites(*seed, &suite.suites(), systems, &cfg)?;
            let mut failed = 0;
            for r in &reports {
                let bad: Vec<_> = r.failures().collect();
                if !bad.is_empty() {
                    failed += 1;
                }
                eprintln!(
                    "{} {} #{}: {} checks, {}",
                    r.suite.name(),
                    r.case.label,
                    r.case.index,
                    r.checks.len(),
                    if bad.is_empty() { "pass".to_string() } else { format!("{} failed", bad.len()) }
                );
                for c in bad {
                    eprintln!(
                        "    {} residual {:?} scale {:?} tolerance {:e}",
                        c.identity, c.residual, c.scale, c.tolerance
                    );
                }
            }
            let doc = ReportDocument::new(*seed, reports);
            emit(&serde_json::to_value(&doc).map_err(Error::from)?, json_path.as_deref().or(out))?;
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} of {} reports failed", doc.reports.len())));
            }
        }
    }
    Ok(())
}
