//! `chpolar`: JSON front end for the polar-action toolkit.
//!
//! Exit codes: 0 success (or verdict true / equivalent), 1 verdict false or not
//! shown equivalent, 2 input error, 3 internal error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chpolar::an_geometry::OrbitModel;
use chpolar::kahler::{self, RealSubspace};
use chpolar::polar::{self, BFlag, Family, PolarActionSpec, Trilean};
use chpolar::{selfcheck, Error, Tolerances};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "chpolar", version, about = "Polar actions on complex hyperbolic space")]
struct Cli {
    /// Complex hyperbolic dimension (enumerate, selfcheck).
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "tol-eig", global = true)]
    tol_eig: Option<f64>,
    #[arg(long = "tol-angle", global = true)]
    tol_angle: Option<f64>,
    #[arg(long = "tol-rank", global = true)]
    tol_rank: Option<f64>,
    /// Sampling seed; overrides the seed stored in a spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kähler angle decomposition of a real subspace (JSON file, `-` for stdin).
    Decompose { input: PathBuf },
    /// Build a polar action spec and run the polarity criterion.
    Verify { input: PathBuf },
    /// Orbit-equivalence invariants of two specs.
    Compare { first: PathBuf, second: PathBuf },
    /// Catalog of moduli classes for `--n`.
    Enumerate {
        /// Comma-separated angles in (0, π/2), in radians.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles: Vec<f64>,
    },
    /// Mean curvature of the orbit through o of a family II spec.
    Curvature { input: PathBuf },
    /// Identity suite for the Lie-algebraic model.
    Selfcheck {
        /// Random inputs per identity.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

/// Resolved settings shared by all subcommands.
#[derive(Debug)]
struct RunConfig {
    n: Option<usize>,
    tol: Tolerances,
    seed: Option<u64>,
    format: Format,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        let mut tol = Tolerances::default();
        for (name, value, slot) in [
            ("--tol-eig", cli.tol_eig, &mut tol.eig),
            ("--tol-angle", cli.tol_angle, &mut tol.angle),
            ("--tol-rank", cli.tol_rank, &mut tol.rank),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Failure::Input(format!("{name} must be positive")));
                }
                *slot = v;
            }
        }
        if let Some(n) = cli.n {
            if n < 2 {
                return Err(Failure::Input("--n must be at least 2".into()));
            }
        }
        Ok(Self { n: cli.n, tol, seed: cli.seed, format: cli.format })
    }
}

/// Writes floats with 17 significant digits so that they round-trip exactly.
struct RoundTripFormatter;

impl serde_json::ser::Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RoundTripFormatter);
    value.serialize(&mut ser).map_err(|e| Failure::Internal(e.to_string()))?;
    let mut s = String::from_utf8(buf).map_err(|e| Failure::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn parse<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_spec(path: &PathBuf, cfg: &RunConfig) -> Result<PolarActionSpec, Failure> {
    let mut spec: PolarActionSpec = parse(path)?;
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    Ok(spec)
}

/// Rendered output plus the exit code it implies.
struct Outcome {
    text: String,
    code: u8,
}

fn render<T: Serialize>(cfg: &RunConfig, value: &T, text: impl FnOnce() -> String, code: u8) -> Result<Outcome, Failure> {
    let text = match cfg.format {
        Format::Json => to_json(value)?,
        Format::Text => text(),
    };
    Ok(Outcome { text, code })
}

fn cmd_decompose(cfg: &RunConfig, input: &PathBuf) -> Result<Outcome, Failure> {
    let space: RealSubspace = parse(input)?;
    let dec = kahler::decompose(&space, &cfg.tol);
    render(cfg, &dec, || {
        let mut s = format!("dim {} in C^{}\n", space.dim(), space.ambient_complex_dim());
        for f in &dec.factors {
            s += &format!("angle {:.10} rad  dim {}\n", f.angle, f.subspace.dim());
        }
        s
    }, 0)
}

fn cmd_verify(cfg: &RunConfig, input: &PathBuf) -> Result<Outcome, Failure> {
    let spec = read_spec(input, cfg)?;
    let report = polar::verify(&spec, &cfg.tol)?;
    let code = if report.verdict { 0 } else { 1 };
    render(cfg, &report, || {
        format!(
            "verdict: {}\nsection in normal space: {} (residual {:.3e})\nbracket condition: {} (residual {:.3e})\nslice condition: {} (achieved {} of {})\ncohomogeneity: {}\ncertified by construction: {}\n",
            report.verdict,
            report.section_in_normal,
            report.section_normal_residual,
            report.bracket_condition,
            report.bracket_residual,
            report.slice_condition,
            report.slice_dimension_achieved,
            report.normal_dim,
            report.cohomogeneity,
            report.certified_by_construction,
        )
    }, code)
}

fn cmd_compare(cfg: &RunConfig, a: &PathBuf, b: &PathBuf) -> Result<Outcome, Failure> {
    let sa = read_spec(a, cfg)?;
    let sb = read_spec(b, cfg)?;
    let report = polar::orbit_equivalence_invariants(&sa, &sb, &cfg.tol)?;
    let code = if report.equivalent == Trilean::Yes { 0 } else { 1 };
    render(cfg, &report, || format!("equivalent: {} ({})\n", report.equivalent, report.reason), code)
}

#[derive(Serialize)]
struct Catalog {
    n: usize,
    angle_grid: Vec<f64>,
    count: usize,
    classes: Vec<polar::CatalogEntry>,
}

fn cmd_enumerate(cfg: &RunConfig, angles: &[f64]) -> Result<Outcome, Failure> {
    let n = cfg.n.ok_or_else(|| Failure::Input("enumerate needs --n".into()))?;
    let classes = polar::enumerate_moduli(n, angles, &cfg.tol)?;
    let catalog = Catalog { n, angle_grid: angles.to_vec(), count: classes.len(), classes };
    render(cfg, &catalog, || {
        let mut s = format!("{} classes for n = {}\n", catalog.count, n);
        for c in &catalog.classes {
            s += &format!("  {}\n", c.label);
        }
        s
    }, 0)
}

#[derive(Serialize)]
struct CurvatureReport {
    mean_curvature: chpolar::an_geometry::ANVector,
    closed_form: chpolar::an_geometry::ANVector,
    residual: f64,
}

fn cmd_curvature(cfg: &RunConfig, input: &PathBuf) -> Result<Outcome, Failure> {
    let spec = read_spec(input, cfg)?;
    spec.validate(&cfg.tol)?;
    if spec.family != Family::II {
        return Err(Failure::Input("curvature supports family II specs (orbits of b ⊕ w ⊕ g_2α)".into()));
    }
    let w = spec.w.as_ref().expect("validated");
    let orbit = OrbitModel::flag(spec.n, w, spec.b == Some(BFlag::Full))?;
    let h = orbit.mean_curvature();
    let closed = orbit.mean_curvature_closed_form();
    let report = CurvatureReport { residual: h.sub(&closed).norm(), mean_curvature: h, closed_form: closed };
    render(cfg, &report, || {
        let h = &report.mean_curvature;
        format!(
            "H = {:.12} B + U + {:.12} Z, |U| = {:.3e}\nclosed form residual: {:.3e}\n",
            h.a_part,
            h.z_part,
            h.u_part.norm(),
            report.residual
        )
    }, 0)
}

fn cmd_selfcheck(cfg: &RunConfig, samples: usize) -> Result<Outcome, Failure> {
    let ns = match cfg.n {
        Some(n) => vec![n],
        None => vec![2, 3, 5],
    };
    let report = selfcheck::run_selfcheck(&ns, samples, cfg.seed.unwrap_or(0))?;
    let code = if report.all_passed { 0 } else { 1 };
    render(cfg, &report, || {
        let mut s = String::new();
        for c in &report.checks {
            s += &format!(
                "[{}] n={} {}: max residual {:.3e} (tol {:.0e})\n",
                if c.passed { "ok" } else { "FAIL" },
                c.n,
                c.name,
                c.max_residual,
                c.tolerance
            );
        }
        s
    }, code)
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = RunConfig::from_cli(cli)?;
    match &cli.command {
        Command::Decompose { input } => cmd_decompose(&cfg, input),
        Command::Verify { input } => cmd_verify(&cfg, input),
        Command::Compare { first, second } => cmd_compare(&cfg, first, second),
        Command::Enumerate { angles } => cmd_enumerate(&cfg, angles),
        Command::Curvature { input } => cmd_curvature(&cfg, input),
        Command::Selfcheck { samples } => cmd_selfcheck(&cfg, *samples),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &outcome.text),
                None => io::stdout().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(3);
            }
            ExitCode::from(outcome.code)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
