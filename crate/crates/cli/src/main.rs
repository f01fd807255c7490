//! `holefill` command line: validate, solve, verify, generate and draw
//! boundary-folding instances.
//!
//! Exit codes: 0 ok, 1 invalid input, 2 verification failure, 3 solver
//! failure, 64 unreadable or malformed file, 65 bad flags.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holefill::bend::{BendPolicy, Branch};
use holefill::gen::{self, BaseShape, RandomConfig};
use holefill::geom::Tolerance;
use holefill::io::{FormatError, InstanceFile, SolutionFile};
use holefill::model::ModelError;
use holefill::solver::{self, SolveOptions};
use holefill::verify::{self, VerifyOptions};
use holefill::{corpus, BoundaryMapping64};
use serde_json::json;

use render::{Format, RenderStyle, Stroke};

const EXIT_INVALID: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_PARSE: u8 = 64;
const EXIT_USAGE: u8 = 65;

#[derive(Parser)]
#[command(name = "holefill", version, about = "Isometric fillings of polygons with folded boundaries")]
struct Cli {
    /// More log output on standard error (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that an instance admits an isometric filling.
    Validate(ValidateArgs),
    /// Compute a filling and write it as a solution file.
    Solve(SolveArgs),
    /// Check a solution against its instance.
    Verify(VerifyArgs),
    /// Write a random instance built by folding paper.
    Gen(GenArgs),
    /// Draw a solution as SVG, or export its folded surface as OBJ.
    Render(RenderArgs),
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    /// Relative length tolerance (default depends on the float type).
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Output path; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// bisector, min-angle, max-angle or random. Defaults to bisector for
    /// d >= 3 and min-angle in the plane.
    #[arg(long)]
    policy: Option<BendPolicy>,
    /// Which mirror-image solution to take: + or -.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    branch: Branch,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-check partition invariants after every step.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Absolute tolerance; defaults to 1e-7 times the polygon diameter.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    /// random, convex, star or square; or a corpus name (identity, fold,
    /// dihedral, skew, corner-fold), which ignores the other options.
    #[arg(long, default_value = "random")]
    shape: String,
    #[arg(long, default_value_t = 2)]
    folds: usize,
    /// Target dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    solution: PathBuf,
    /// Output path ending in .svg or .obj.
    #[arg(short, long)]
    output: PathBuf,
    /// SVG stroke classes.
    #[arg(long, value_enum, default_value_t = Stroke::Parity)]
    style: Stroke,
}

/// A command outcome that is not a plain success.
struct Exit {
    code: u8,
    message: String,
}

impl Exit {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Exit { code, message: message.into() }
    }
}

type Outcome = Result<u8, Exit>;

/// Standard output that tolerates a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Exit> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Exit::new(EXIT_USAGE, format!("{}: {e}", p.display()))),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn format_exit(path: &Path, e: FormatError) -> Exit {
    match e {
        FormatError::Model(m) => model_exit(m),
        other => Exit::new(EXIT_PARSE, format!("{}: {other}", path.display())),
    }
}

fn model_exit(e: ModelError) -> Exit {
    emit(&format!("{}\n", json!({ "status": "invalid", "error": e.to_string() })));
    Exit::new(EXIT_INVALID, e.to_string())
}

fn load_instance(path: &Path) -> Result<BoundaryMapping64, Exit> {
    let text = read(path)?;
    InstanceFile::parse(&text).and_then(|f| f.to_mapping()).map_err(|e| format_exit(path, e))
}

fn cmd_validate(args: &ValidateArgs) -> Outcome {
    let bm = load_instance(&args.instance)?;
    let tol = match args.eps {
        Some(eps) => Tolerance::new(eps, bm.default_tolerance().eps_abs).map_err(|e| Exit::new(EXIT_USAGE, e.to_string()))?,
        None => bm.default_tolerance(),
    };
    match bm.validate(&tol) {
        Ok(()) => {
            emit(&format!("{}\n", json!({ "status": "valid" })));
            Ok(0)
        }
        Err(v) => {
            emit(&format!("{}\n", json!({ "status": "invalid", "violation": v })));
            Ok(EXIT_INVALID)
        }
    }
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let bm = load_instance(&args.instance)?;
    let policy = args.policy.unwrap_or_else(|| BendPolicy::default_for(bm.dimension()));
    if policy == BendPolicy::Bisector && bm.dimension() < 3 {
        return Err(Exit::new(EXIT_USAGE, "--policy bisector needs a target dimension of at least 3"));
    }
    if let Err(v) = bm.validate(&bm.default_tolerance()) {
        emit(&format!("{}\n", json!({ "status": "invalid", "violation": v })));
        return Ok(EXIT_INVALID);
    }
    let opts = SolveOptions { policy: Some(policy), branch: args.branch, seed: args.seed, audit: args.audit };
    match solver::solve(&bm, &opts) {
        Ok((mesh, trace)) => {
            log::info!("{} routine 1, {} routine 2, {} faces", trace.routine1, trace.routine2, mesh.faces.len());
            write(args.output.as_deref(), &SolutionFile::new(&mesh, &trace).to_json())?;
            Ok(0)
        }
        Err(failure) => {
            let dump = json!({ "status": "solver-failure", "error": failure.error.to_string(), "trace": failure.trace });
            emit(&format!("{}\n", serde_json::to_string_pretty(&dump).expect("trace serializes")));
            Ok(EXIT_SOLVER)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let bm = load_instance(&args.instance)?;
    let text = read(&args.solution)?;
    let mesh = SolutionFile::parse(&text).and_then(|f| f.to_mesh()).map_err(|e| format_exit(&args.solution, e))?;
    if mesh.dimension != bm.dimension() {
        return Err(Exit::new(EXIT_PARSE, "solution and instance have different dimensions"));
    }
    let opts = VerifyOptions { tol: args.tol, samples: args.samples, seed: args.seed };
    let report = verify::verify(&bm, &mesh, &opts);
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")));
    Ok(if report.pass { 0 } else { EXIT_VERIFY })
}

fn cmd_gen(args: &GenArgs) -> Outcome {
    if args.d < 2 {
        return Err(Exit::new(EXIT_USAGE, "--d must be at least 2"));
    }
    let bm = match corpus::by_name::<f64>(&args.shape) {
        Some(bm) => bm,
        None => {
            let shape: BaseShape = args.shape.parse().map_err(|e: String| Exit::new(EXIT_USAGE, e))?;
            let cfg = RandomConfig { shape, ..RandomConfig::new(args.folds, args.d) };
            gen::random_instance_with(&cfg, args.seed).map_err(|e| Exit::new(EXIT_SOLVER, e.to_string()))?
        }
    };
    write(args.output.as_deref(), &InstanceFile::from_mapping(&bm).to_json())?;
    Ok(0)
}

fn cmd_render(args: &RenderArgs) -> Outcome {
    let format = match args.output.extension().and_then(|e| e.to_str()) {
        Some("svg") => Format::Svg,
        Some("obj") => Format::Obj,
        _ => return Err(Exit::new(EXIT_USAGE, "output must end in .svg or .obj")),
    };
    let style = RenderStyle { format, stroke: args.style };
    let text = read(&args.solution)?;
    let mesh = SolutionFile::parse(&text).and_then(|f| f.to_mesh()).map_err(|e| format_exit(&args.solution, e))?;
    let body = match style.format {
        Format::Svg => render::svg(&mesh, style.stroke),
        Format::Obj if mesh.dimension == 3 => render::obj(&mesh),
        Format::Obj => return Err(Exit::new(EXIT_USAGE, format!("OBJ export needs a 3-dimensional image, got d={}", mesh.dimension))),
    };
    write(Some(&args.output), &body)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    let outcome = match &cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Render(a) => cmd_render(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("holefill: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
