//! The `hyperball` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage or parse error,
//! 3 undetermined classification, 4 mathematical precondition violated.

pub mod format;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use crate::ball::{caratheodory_distance, BallPoint, BOUNDARY_EPS};
use crate::classify::{dynamical_type, Kind};
use crate::error::Error;
use crate::families::{sample, Family};
use crate::group::{FormMatrix, GElement};
use crate::linalg::{ComplexMatrix, ComplexVector};

pub use format::{classification_json, fmt_sig12, round_sig12};
pub use verify::{run_catalog, SuiteResult, VerifyConfig, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;
pub const EXIT_MATH: i32 = 4;

pub const DEFAULT_DIM: usize = 8;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_COUNT: usize = 100;
pub const DEFAULT_VERIFY_COUNT: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "hyperball",
    version,
    about = "Isometries of the complex hyperbolic ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Ball dimension n (matrices are (n+1)x(n+1))
    #[arg(long, default_value_t = DEFAULT_DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Numerical tolerance
    #[arg(long, env = "HYPERBALL_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded corpus of `.gel.json` elements.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        #[arg(long, value_parser = parse_family)]
        family: Family,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the dynamical classification of an element as JSON.
    Classify {
        input: PathBuf,
        #[arg(long, env = "HYPERBALL_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Print the Carathéodory distance between two ball points.
    Dist { x: PathBuf, y: PathBuf },
    /// Compose elements left to right (the rightmost acts first).
    Compose {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// 1-based positions of inputs to invert before composing
        #[arg(long, value_delimiter = ',')]
        invert: Vec<usize>,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "HYPERBALL_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run the full property catalog.
    Verify {
        /// Restrict to one dimension instead of {2, 8, 32}
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, env = "HYPERBALL_TOL", default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Random instances per suite and dimension
        #[arg(long, default_value_t = DEFAULT_VERIFY_COUNT)]
        count: usize,
        /// Also write the report as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

/// Resolved settings shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub seed: u64,
    pub tol: f64,
    pub count: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: DEFAULT_DIM,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            count: DEFAULT_COUNT,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.dim < 2 {
            return Err(format!("--dim must be at least 2, got {}", self.dim));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(format!("--tol must be positive, got {}", self.tol));
        }
        if self.count == 0 {
            return Err("--count must be at least 1".into());
        }
        Ok(())
    }
}

/// A CLI failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn math(err: Error) -> Self {
        CliError {
            code: EXIT_MATH,
            message: err.to_string(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: format!("{}: {err}", path.display()),
        }
    }
}

/// Entry point used by the binary: parses `args`, writes to the given
/// streams and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Gen {
            common,
            count,
            family,
            out,
        } => {
            let cfg = RunConfig {
                dim: common.dim,
                seed: common.seed,
                tol: common.tol,
                count,
                out: Some(out),
            };
            cfg.validate().map_err(CliError::usage)?;
            let paths = cmd_gen(&cfg, family)?;
            for p in paths {
                writeln!(stdout, "{}", p.display()).map_err(|e| CliError::usage(e.to_string()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Classify { input, tol } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(CliError::usage("--tol must be positive"));
            }
            let (report, kind) = cmd_classify(&input, tol)?;
            writeln!(stdout, "{report}").map_err(|e| CliError::usage(e.to_string()))?;
            Ok(if kind == Kind::Undetermined {
                EXIT_UNDETERMINED
            } else {
                EXIT_OK
            })
        }
        Command::Dist { x, y } => {
            let d = cmd_dist(&x, &y)?;
            writeln!(stdout, "{}", fmt_sig12(d)).map_err(|e| CliError::usage(e.to_string()))?;
            Ok(EXIT_OK)
        }
        Command::Compose {
            inputs,
            invert,
            out,
            tol,
        } => {
            let product = cmd_compose(&inputs, &invert, tol)?;
            let text = element_to_string(&product);
            match out {
                Some(path) => write_file(&path, &text)?,
                None => writeln!(stdout, "{text}").map_err(|e| CliError::usage(e.to_string()))?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            dim,
            seed,
            tol,
            count,
            out,
        } => {
            let dims = match dim {
                Some(d) if d < 2 => return Err(CliError::usage("--dim must be at least 2")),
                Some(d) => vec![d],
                None => vec![2, 8, 32],
            };
            if tol.is_nan() || tol <= 0.0 || count == 0 {
                return Err(CliError::usage(
                    "--tol must be positive and --count at least 1",
                ));
            }
            let cfg = VerifyConfig {
                dims,
                seed,
                tol,
                count,
            };
            let report = run_catalog(&cfg);
            write!(stdout, "{}", report.render()).map_err(|e| CliError::usage(e.to_string()))?;
            writeln!(stdout, "wall time: {:.3} s", report.wall_time_s)
                .map_err(|e| CliError::usage(e.to_string()))?;
            if let Some(path) = out {
                write_file(&path, &report.to_json())?;
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, format!("{text}\n")).map_err(|e| CliError::io(path, e))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: invalid JSON: {e}", path.display())))
}

#[derive(Deserialize)]
struct RawElement {
    theta: f64,
    #[serde(rename = "U")]
    u: ComplexMatrix,
    xi: ComplexVector,
}

#[derive(Deserialize)]
struct RawForm {
    #[serde(rename = "M")]
    m: ComplexMatrix,
}

#[derive(Deserialize)]
struct RawPoint {
    v: ComplexVector,
}

/// Reads a `.gel.json` element or a `{"M": matrix}` form matrix.
///
/// Shape errors map to exit code 2, non-unitary `U` or a matrix outside `G`
/// to exit code 4.
pub fn load_element(path: &Path, tol: f64) -> Result<GElement, CliError> {
    let value = read_json(path)?;
    let bad = |e: serde_json::Error| CliError::usage(format!("{}: {e}", path.display()));
    if value.get("M").is_some() {
        let raw: RawForm = serde_json::from_value(value).map_err(bad)?;
        let form = FormMatrix::new(raw.m).map_err(|e| CliError::usage(e.to_string()))?;
        return form.canonicalize(tol).map_err(CliError::math);
    }
    let raw: RawElement = serde_json::from_value(value).map_err(bad)?;
    if !raw.theta.is_finite() {
        return Err(CliError::usage("theta must be finite"));
    }
    let elem = GElement::make(raw.theta, raw.u, raw.xi).map_err(|e| match e {
        Error::DimError { .. } => CliError::usage(e.to_string()),
        other => CliError::math(other),
    })?;
    let form = elem.form_matrix();
    if !form.preserves_form(tol) {
        return Err(CliError::math(Error::FormViolation {
            residual: form.form_residual(),
        }));
    }
    Ok(elem)
}

pub fn load_point(path: &Path) -> Result<BallPoint, CliError> {
    let value = read_json(path)?;
    let raw: RawPoint = serde_json::from_value(value)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    BallPoint::new(raw.v).map_err(CliError::math)
}

/// Full-precision JSON of an element (exact `f64` round trip).
pub fn element_to_string(g: &GElement) -> String {
    serde_json::to_string(g).expect("element serializes")
}

/// Keeps `g` only if its file text survives parse → serialize byte for byte
/// and matrix canonicalization reproduces it within `10 tol`.
fn settle(g: GElement, tol: f64) -> Option<GElement> {
    let text = element_to_string(&g);
    let parsed: GElement = serde_json::from_str(&text).ok()?;
    if element_to_string(&parsed) != text {
        return None;
    }
    let m = parsed.matrix();
    let canonical = parsed.form_matrix().canonicalize(tol).ok()?;
    (canonical.matrix().max_diff(&m) <= 10.0 * tol * m.max_abs().max(1.0)).then_some(parsed)
}

fn family_predicate(family: Family, g: &GElement, tol: f64) -> bool {
    use crate::classify::*;
    if !g.form_matrix().preserves_form(tol) {
        return false;
    }
    match family {
        Family::Uniform => true,
        Family::Normal => is_normal_elem(g, tol),
        Family::SelfAdjoint => is_self_adjoint_elem(g, tol),
        Family::Involutory => is_involutory_elem(g, tol),
        Family::Reducing => g
            .xi()
            .normalized()
            .is_some_and(|e| reduces(g, &[e], tol).unwrap_or(false)),
        Family::Parabolic => dynamical_type(g, tol).kind == Kind::Parabolic,
        Family::Unitary => is_unitary_elem(g, tol),
    }
}

/// Generates `count` elements of `family` and writes them as
/// `<out>/<family>_<index>.gel.json`.
pub fn cmd_gen(cfg: &RunConfig, family: Family) -> Result<Vec<PathBuf>, CliError> {
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut paths = Vec::with_capacity(cfg.count);
    let mut index = 0;
    let mut attempts = 0;
    while index < cfg.count {
        attempts += 1;
        if attempts > 100 * cfg.count {
            return Err(CliError::math(Error::InvalidData(format!(
                "could not generate {family} elements passing their predicate at tol {}",
                cfg.tol
            ))));
        }
        let Some(g) = settle(sample(family, cfg.dim, &mut rng), cfg.tol) else {
            continue;
        };
        if !family_predicate(family, &g, cfg.tol) {
            continue;
        }
        let path = out.join(format!("{}_{:04}.gel.json", family.name(), index));
        write_file(&path, &element_to_string(&g))?;
        paths.push(path);
        index += 1;
    }
    Ok(paths)
}

/// Classification report (JSON text) and the kind, for the exit code.
pub fn cmd_classify(input: &Path, tol: f64) -> Result<(String, Kind), CliError> {
    let g = load_element(input, tol)?;
    let c = dynamical_type(&g, tol);
    let report = serde_json::to_string(&classification_json(&c)).expect("report serializes");
    Ok((report, c.kind))
}

pub fn cmd_dist(x: &Path, y: &Path) -> Result<f64, CliError> {
    let x = load_point(x)?;
    let y = load_point(y)?;
    if x.dim() != y.dim() {
        return Err(CliError::usage(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let d = caratheodory_distance(&x, &y);
    // coincident points up to rounding
    Ok(if d <= BOUNDARY_EPS { 0.0 } else { d })
}

/// Product `F₁ F₂ ⋯ F_k` with the listed positions inverted first.
pub fn cmd_compose(inputs: &[PathBuf], invert: &[usize], tol: f64) -> Result<GElement, CliError> {
    if let Some(&bad) = invert.iter().find(|&&i| i == 0 || i > inputs.len()) {
        return Err(CliError::usage(format!(
            "--invert position {bad} is outside 1..={}",
            inputs.len()
        )));
    }
    let mut elems = Vec::with_capacity(inputs.len());
    for (i, path) in inputs.iter().enumerate() {
        let g = load_element(path, tol)?;
        elems.push(if invert.contains(&(i + 1)) {
            g.inverse()
        } else {
            g
        });
    }
    let dim = elems[0].dim();
    if let Some(g) = elems.iter().find(|g| g.dim() != dim) {
        return Err(CliError::usage(format!(
            "dimension mismatch: {dim} vs {}",
            g.dim()
        )));
    }
    let mut product = elems[0].clone();
    for g in &elems[1..] {
        product = product.compose(g).map_err(CliError::math)?;
    }
    Ok(product)
}
