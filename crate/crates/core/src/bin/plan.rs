use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use plan_core::bench::{self, Budget, PlannerSpec};
use plan_core::planner::{make_preset, PlannerConfig, PlannerKind};
use plan_core::{suite, PlanError, Scenario};

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "plan", version, about = "Motion planning benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run planners over every scenario in a directory and write traces.
    Run(RunArgs),
    /// Aggregate a trace CSV into per-group means and 95% intervals.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Traversal speed for execution time, config units per second.
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
    },
    /// Check a scenario file.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Vine,
    Cubicle,
    Custom,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Directory of scenario JSON files.
    #[arg(long)]
    suite: PathBuf,
    /// Planner name; repeat or comma-separate for several.
    #[arg(long, required = true, value_delimiter = ',')]
    planner: Vec<PlannerKind>,
    #[arg(long, value_enum, default_value = "custom")]
    preset: PresetArg,
    /// Seconds (`3`, `0.3s`) or iterations (`5000it`); repeatable.
    #[arg(long, value_delimiter = ',')]
    budget: Vec<Budget>,
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Trace CSV destination.
    #[arg(long)]
    out: PathBuf,
    /// Also write a summary CSV here.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    #[arg(long)]
    range: Option<f64>,
    #[arg(long)]
    scf: Option<f64>,
    #[arg(long)]
    opt_threshold: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    no_informed: bool,
    #[arg(long)]
    no_rejection: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, e: impl std::fmt::Display) -> Self {
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn runtime(e: PlanError) -> Failure {
    Failure::new(EXIT_RUNTIME, e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Summarize { input, out, speed } => summarize(input, out, speed),
        Command::Validate { file } => validate(file),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn planner_config(kind: PlannerKind, args: &RunArgs) -> Result<PlannerConfig, Failure> {
    let mut cfg = match args.preset {
        PresetArg::Vine => make_preset("vine", kind).map_err(|e| Failure::new(EXIT_USAGE, e))?,
        PresetArg::Cubicle => {
            make_preset("cubicle", kind).map_err(|e| Failure::new(EXIT_USAGE, e))?
        }
        PresetArg::Custom => PlannerConfig::default(),
    };
    if let Some(r) = args.range {
        cfg.range = r;
    }
    if let Some(s) = args.scf {
        cfg.scf = s;
    }
    if let Some(t) = args.opt_threshold {
        cfg.opt_threshold = t;
    }
    cfg.gamma_override = args.gamma.or(cfg.gamma_override);
    cfg.heuristics.informed_sampling &= !args.no_informed;
    cfg.heuristics.sample_rejection &= !args.no_rejection;
    cfg.validate().map_err(|e| Failure::new(EXIT_USAGE, e))?;
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<(), Failure> {
    if args.seeds == 0 {
        return Err(Failure::new(EXIT_USAGE, "--seeds must be at least 1"));
    }
    if !(args.speed.is_finite() && args.speed > 0.0) {
        return Err(Failure::new(EXIT_USAGE, "--speed must be positive"));
    }
    let scenarios = suite::load_suite(&args.suite).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let mut planners = Vec::new();
    for &kind in &args.planner {
        planners.push(PlannerSpec::new(kind, planner_config(kind, &args)?));
    }
    let budgets = if args.budget.is_empty() {
        Budget::defaults()
    } else {
        args.budget.clone()
    };
    let runs =
        bench::run_benchmark(&scenarios, &planners, &budgets, args.seeds).map_err(runtime)?;
    bench::write_traces_file(&args.out, &runs).map_err(runtime)?;
    if let Some(path) = &args.summary {
        bench::write_summary_file(path, &bench::summarize(&runs, args.speed)).map_err(runtime)?;
    }
    Ok(())
}

fn summarize(input: PathBuf, out: PathBuf, speed: f64) -> Result<(), Failure> {
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Failure::new(EXIT_USAGE, "--speed must be positive"));
    }
    let f = File::open(&input).map_err(|e| {
        runtime(PlanError::Io {
            path: input.clone(),
            source: e,
        })
    })?;
    let runs = bench::read_traces(f)
        .map_err(|e| Failure::new(EXIT_RUNTIME, format!("{}: {e}", input.display())))?;
    bench::write_summary_file(&out, &bench::summarize(&runs, speed)).map_err(runtime)
}

fn validate(file: PathBuf) -> Result<(), Failure> {
    let s = Scenario::load(&file).map_err(|e| match e {
        PlanError::Io { .. } => Failure::new(EXIT_RUNTIME, e),
        other => Failure::new(EXIT_INVALID, format!("{}: {other}", file.display())),
    })?;
    println!(
        "{}: ok ({}, dimension {}, {} obstacles, {} goals)",
        file.display(),
        s.name(),
        s.dim(),
        s.world().obstacles.len(),
        s.goals().len()
    );
    Ok(())
}
