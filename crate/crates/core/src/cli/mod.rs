//! Command-line front end: `crsing <task> [--input FILE] [flags]`.
//!
//! Exit codes: `0` verdict produced, `1` input error, `2` precondition or
//! hypothesis error, `3` search or experiment inconclusive. Errors print one
//! line `error <CODE>: <message>` on stderr.

mod report;
mod tasks;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::discs::DiscError;
use crate::geometry::GeometryError;
use crate::images::ImagesError;
use crate::parser::{parse_problem, ParseError, ProblemFile, TaskKind};
use crate::quadratic::QuadraticError;

pub use report::{hash_input, Evidence, Provenance, Report, Value};

#[derive(Debug, Parser)]
#[command(
    name = "crsing",
    version,
    about = "CR singularities of polynomial submanifolds and their images"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Problem file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Base point, comma-separated constants such as `0,1/2,i`.
    #[arg(long)]
    pub point: Option<String>,
    /// Working box: `lo:hi` for every real coordinate, or one `lo:hi` per
    /// coordinate separated by commas.
    #[arg(long = "box")]
    pub bbox: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write per-experiment CSV here (`disc`).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// CR dimension and singular locus.
    Analyze(#[command(flatten)] Common),
    /// Equidimensional stability verdict at the base point.
    Stability {
        #[command(flatten)]
        common: Common,
    },
    /// Perturbation search with certificate.
    Perturb {
        #[command(flatten)]
        common: Common,
        /// `linear` or `2jet`; defaults by the dimension inequality.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Quadratic type of `w = ρ(z, z̄)`.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rho: Option<String>,
        /// Variables of `--rho`, default `z1,z2`.
        #[arg(long)]
        vars: Option<String>,
    },
    /// Removability of the CR singularity of `w = ρ(z1, z2, z̄1, z̄2)`.
    Removable {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rho: Option<String>,
    },
    /// Explicit constructions.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Analytic disc experiments.
    Disc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<String>,
        /// Comma-separated disc parameters.
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        perturbations: Option<usize>,
    },
    /// Runs the task named in the problem file.
    Run(#[command(flatten)] Common),
}

#[derive(Debug, Subcommand)]
enum ConstructCmd {
    /// Sharpness example for `(n, k, m)`.
    Sharp {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Map realizing a quadratic type on a codimension-2 generic submanifold.
    Realize {
        #[command(flatten)]
        common: Common,
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long)]
        a: Option<String>,
    },
    /// `w = z̄1 z2 + z̄2^{k+3}`.
    Ck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<u32>,
    },
}

/// Error with its exit code and machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub exit: i32,
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn input(code: &str, message: impl Into<String>) -> Self {
        CliError {
            exit: 1,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn precondition(code: &str, message: impl Into<String>) -> Self {
        CliError {
            exit: 2,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn inconclusive(code: &str, message: impl Into<String>) -> Self {
        CliError {
            exit: 3,
            code: code.into(),
            message: message.into(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::input(
            e.code.as_str(),
            format!("{}:{}: {}", e.line, e.col, e.message),
        )
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::precondition("E_GEOMETRY", e.to_string())
    }
}

impl From<ImagesError> for CliError {
    fn from(e: ImagesError) -> Self {
        let code = match &e {
            ImagesError::InequalityNotSatisfied { .. } | ImagesError::InequalityHolds { .. } => {
                "E_INEQUALITY"
            }
            ImagesError::WrongShape { .. } | ImagesError::InvalidDimensions { .. } => "E_SHAPE",
            ImagesError::RankDeficientMap { .. } => "E_DEGENERATE_MAP",
            ImagesError::NotHolomorphic(_) => {
                return CliError::input("E_NOT_HOLOMORPHIC", e.to_string())
            }
            ImagesError::Geometry(_) => "E_GEOMETRY",
            _ => "E_PRECONDITION",
        };
        CliError::precondition(code, e.to_string())
    }
}

impl From<QuadraticError> for CliError {
    fn from(e: QuadraticError) -> Self {
        CliError::precondition("E_PRECONDITION", e.to_string())
    }
}

impl From<DiscError> for CliError {
    fn from(e: DiscError) -> Self {
        match &e {
            DiscError::BadParameter(_) => CliError::input("E_BAD_VALUE", e.to_string()),
            DiscError::HypothesisFails(_) => CliError::precondition("E_HYPOTHESIS", e.to_string()),
            DiscError::Diverged { .. } => CliError::inconclusive("E_DIVERGED", e.to_string()),
            DiscError::Inconclusive(_) | DiscError::Unresolved(_) => {
                CliError::inconclusive("E_INCONCLUSIVE", e.to_string())
            }
            _ => CliError::precondition("E_PRECONDITION", e.to_string()),
        }
    }
}

/// A problem file (if any) with its raw bytes, and parameter lookup that
/// prefers command-line values over `[task]` entries.
pub(crate) struct Input {
    pub problem: Option<ProblemFile>,
    pub bytes: Option<Vec<u8>>,
}

impl Input {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Input {
                problem: None,
                bytes: None,
            });
        };
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::input("E_IO", format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::input("E_IO", "input is not UTF-8"))?;
        Ok(Input {
            problem: Some(parse_problem(&text)?),
            bytes: Some(bytes),
        })
    }

    pub fn require(&self) -> Result<&ProblemFile, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::input("E_MISSING_INPUT", "this task needs --input FILE"))
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        self.problem
            .as_ref()
            .map(|p| p.task.params.clone())
            .unwrap_or_default()
    }

    pub fn param(&self, cli: Option<String>, key: &str) -> Option<String> {
        cli.or_else(|| self.params().get(key).cloned())
    }
}

/// Parses `argv` (program name first), runs the task and writes the report.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(argv, &mut out, &mut err)
}

/// As [`run`], writing to the given streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("bad arguments")
                .trim_start_matches("error: ");
            let _ = writeln!(err, "error E_USAGE: {first}");
            return 1;
        }
    };
    let (json, outcome) = dispatch(cli);
    match outcome {
        Ok((report, failure, csv)) => {
            let body = if json {
                report.render_json()
            } else {
                report.render_text()
            };
            let _ = out.write_all(body.as_bytes());
            if let Some((path, data)) = csv {
                if let Err(e) = std::fs::write(&path, data) {
                    let _ = writeln!(err, "error E_IO: {}: {e}", path.display());
                    return 1;
                }
            }
            match failure {
                None => 0,
                Some(f) => {
                    let _ = writeln!(err, "error {}: {}", f.code, f.message);
                    f.exit
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error {}: {}", f.code, f.message.replace('\n', " "));
            f.exit
        }
    }
}

/// A finished report, an optional inconclusive status to signal after
/// printing it, and an optional CSV file.
pub(crate) type Outcome = (Report, Option<CliError>, Option<(PathBuf, String)>);

fn dispatch(cli: Cli) -> (bool, Result<Outcome, CliError>) {
    fn with_input(
        common: &Common,
        f: impl FnOnce(&Input, &Common) -> Result<Outcome, CliError>,
    ) -> Result<Outcome, CliError> {
        let input = Input::load(common.input.as_ref())?;
        let mut o = f(&input, common)?;
        o.0.provenance.input = hash_input(input.bytes.as_deref());
        Ok(o)
    }
    match cli.cmd {
        Cmd::Analyze(c) => (c.json, with_input(&c, tasks::analyze)),
        Cmd::Stability { common } => (common.json, with_input(&common, tasks::stability)),
        Cmd::Perturb {
            common,
            mode,
            delta,
            depth,
        } => (
            common.json,
            with_input(&common, |i, c| tasks::perturb(i, c, mode, delta, depth)),
        ),
        Cmd::Classify { common, rho, vars } => (
            common.json,
            with_input(&common, |i, c| tasks::classify(i, c, rho, vars)),
        ),
        Cmd::Removable { common, rho } => (
            common.json,
            with_input(&common, |i, c| tasks::removable(i, c, rho)),
        ),
        Cmd::Construct { what } => match what {
            ConstructCmd::Sharp { common, n, k, m } => (
                common.json,
                with_input(&common, |i, c| tasks::construct_sharp(i, c, n, k, m)),
            ),
            ConstructCmd::Realize { common, ty, a } => (
                common.json,
                with_input(&common, |i, c| tasks::construct_realize(i, c, ty, a)),
            ),
            ConstructCmd::Ck { common, k } => (
                common.json,
                with_input(&common, |i, c| tasks::construct_ck(i, c, k)),
            ),
        },
        Cmd::Disc {
            common,
            phi,
            t,
            perturbations,
        } => (
            common.json,
            with_input(&common, |i, c| tasks::disc(i, c, phi, t, perturbations)),
        ),
        Cmd::Run(c) => (
            c.json,
            with_input(&c, |i, c| {
                let kind = i.require()?.task.kind;
                match kind {
                    TaskKind::Analyze => tasks::analyze(i, c),
                    TaskKind::Stability => tasks::stability(i, c),
                    TaskKind::Perturb => tasks::perturb(i, c, None, None, None),
                    TaskKind::Classify => tasks::classify(i, c, None, None),
                    TaskKind::Removable => tasks::removable(i, c, None),
                    TaskKind::Disc => tasks::disc(i, c, None, None, None),
                    TaskKind::Construct => match i.params().get("what").map(String::as_str) {
                        Some("sharp") => tasks::construct_sharp(i, c, None, None, None),
                        Some("realize") => tasks::construct_realize(i, c, None, None),
                        Some("ck") => tasks::construct_ck(i, c, None),
                        _ => Err(CliError::input(
                            "E_BAD_VALUE",
                            "construct needs `what = sharp|realize|ck`",
                        )),
                    },
                }
            }),
        ),
    }
}
