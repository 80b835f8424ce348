//! `twistor`: generate, verify and export discrete nets in HP¹, CP¹ and Q⁴.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 geometric degeneracy,
//! 3 verification failure.

mod check;
mod doc;
mod evolve;
mod export;
mod single;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable files or malformed documents.
    Usage(String),
    /// A construction hit a degenerate configuration.
    Degenerate(String),
    /// A check found residuals above tolerance.
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Degenerate(_) => 2,
            CliError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Degenerate(m) | CliError::Verification(m) => m,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Maps a core error to a degeneracy with context.
pub fn degenerate(ctx: impl std::fmt::Display) -> impl FnOnce(twistor_core::GeomError) -> CliError {
    move |e| CliError::Degenerate(format!("{ctx}: {e}"))
}

#[derive(Parser)]
#[command(
    name = "twistor",
    version,
    about = "Discrete nets in quaternionic and twistor geometry"
)]
struct Cli {
    /// Numerical tolerance for checks and degeneracy tests.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a curve into a 2D cross-ratio net.
    Evolve(EvolveArgs),
    /// Report per-face residuals of a net document.
    Check(CheckArgs),
    /// Export a net document as OBJ or canonical JSON.
    Export(ExportArgs),
    /// Complete a combinatorial cube from seven vertices.
    Hexahedron(HexahedronArgs),
    /// Holonomy of the complex cross-ratio evolution around a closed curve.
    Holonomy(HolonomyArgs),
    /// Signatures of the Lie quadric for the standard quaternionic hermitian form.
    LieReport(LieArgs),
    /// Write a random sample curve document.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Real cross-ratio evolution in HP¹.
    Circular,
    /// Complex cross-ratio evolution in CP¹.
    Complex,
}

#[derive(Args)]
pub struct EvolveArgs {
    /// Curve document (dim 1): hp1 or cp1 for circular mode, cp1 for complex mode.
    curve: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Cross-ratio, e.g. `-1`, `0.5`, `0+1i`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    /// Transversal document (dim 1) sharing its first point with the curve.
    #[arg(long)]
    transversal: Option<PathBuf>,
    /// Number of rows to generate when no transversal is given.
    #[arg(long)]
    rows: Option<usize>,
    /// Output the net lifted to Q⁴ (conic net in Q²_S for complex mode).
    #[arg(long)]
    lift: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    /// Pick the natural report for the document kind.
    Auto,
    /// Planarity of each face (conjugate net test).
    Planarity,
    /// Face conics in Q⁴ and their irreducibility.
    Conic,
    /// Concircularity of HP¹ faces.
    Circular,
    /// Deviation of each face cross-ratio from λ.
    CrossRatio,
    /// Closure of contact elements around each face.
    Closure,
}

#[derive(Args)]
pub struct CheckArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Report::Auto)]
    report: Report,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Obj,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Chart {
    /// q = a·b⁻¹ − c.
    Affine,
    /// q = (a·b⁻¹ − c)⁻¹.
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    W,
    X,
    Y,
    Z,
}

#[derive(Args)]
pub struct ExportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Obj)]
    format: Format,
    #[arg(long, value_enum, default_value_t = Chart::Affine)]
    chart: Chart,
    /// Chart center c as `w,x,y,z`.
    #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
    center: String,
    /// Quaternion coordinate dropped for ℝ³ display.
    #[arg(long, value_enum, default_value_t = Axis::W)]
    drop: Axis,
    /// Longitudinal segments of sphere meshes.
    #[arg(long, default_value_t = 24)]
    segments: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct HexahedronArgs {
    /// Document of dim 3 on the box [0,1]³ with every vertex except (1,1,1).
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct HolonomyArgs {
    /// Closed cp1 curve document (dim 1); a repeated last point is ignored.
    curve: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
pub struct LieArgs {
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Cp1,
    Hp1,
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    kind: SampleKind,
    /// Number of points.
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Sample a closed polygon around the origin instead of an open curve.
    #[arg(long)]
    closed: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Global settings shared by all subcommands.
#[derive(Clone, Copy)]
pub struct Globals {
    pub tol: f64,
    pub seed: u64,
}

/// Parses `a`, `a+bi`, `bi` and similar complex literals.
pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.replace('j', "i");
    let fixed = match t.as_str() {
        "i" | "+i" => "1i".to_string(),
        "-i" => "-1i".to_string(),
        _ => t.replace("+i", "+1i").replace("-i", "-1i"),
    };
    let z: Complex64 = fixed
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse complex number {s:?}")))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(CliError::Usage(format!("non-finite complex number {s:?}")));
    }
    Ok(z)
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Writes to the file, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let g = Globals {
        tol: cli.tol,
        seed: cli.seed,
    };
    match cli.command {
        Command::Evolve(a) => evolve::run(&a, g),
        Command::Check(a) => check::run(&a, g),
        Command::Export(a) => export::run(&a, g),
        Command::Hexahedron(a) => single::hexahedron(&a, g),
        Command::Holonomy(a) => single::holonomy(&a, g),
        Command::LieReport(a) => single::lie_report(&a),
        Command::Sample(a) => single::sample(&a, g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twistor: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
