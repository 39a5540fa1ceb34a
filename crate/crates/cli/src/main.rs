use std::env;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swarmlab::analysis::PotentialTrace;
use swarmlab::harness::{self, ExperimentPlan, ExperimentReport, Preset, ReportFormat};
use swarmlab::swarm::{self, SwarmConfig, DEFAULT_MAXITER, DEFAULT_PARTICLES};
use swarmlab::{format_float, Benchmark, Error, FunctionId, Variant};

const FUNCTIONS_HELP: &str = "\
Functions: ackley, griewank (accepts --mu, default 1/4000), elliptic, rastrigin, rosenbrock, schwefel, sphere
Variants:  classical, social-only, hybrid";

/// Default output directory when `--out-dir` is omitted.
const OUT_DIR_ENV: &str = "SWARMLAB_OUT_DIR";

/// Classical, social-only and hybrid particle swarm optimization experiments.
#[derive(Parser, Debug)]
#[command(name = "swarmlab", version, about, after_help = FUNCTIONS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single seeded optimization and classify its result.
    #[command(after_help = FUNCTIONS_HELP)]
    Run(RunArgs),
    /// Run a plan file or a table preset and write CSV and JSON reports.
    Experiment(ExperimentArgs),
    /// Sweep the Griewank sphere weight.
    #[command(after_help = FUNCTIONS_HELP)]
    Sweep(SweepArgs),
    /// Record swarm potential traces of several variants under one seed.
    #[command(after_help = FUNCTIONS_HELP)]
    Potential(PotentialArgs),
    /// List benchmark functions with their default bounds.
    ListBenchmarks,
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Benchmark function, optionally as `griewank:mu=<value>`.
    #[arg(long)]
    function: String,
    /// Griewank sphere weight.
    #[arg(long)]
    mu: Option<f64>,
    /// Search-space dimension.
    #[arg(long)]
    dim: usize,
}

impl FunctionArgs {
    fn benchmark(&self) -> Result<Benchmark, Error> {
        let id = match (self.function.parse::<FunctionId>()?, self.mu) {
            (id, None) => id,
            (FunctionId::Griewank { .. }, Some(_)) if self.function.contains(':') => {
                return Err(Error::Config("mu given twice".into()))
            }
            (id, Some(mu)) => FunctionId::from_parts(id.name(), Some(mu))?,
        };
        let bench = Benchmark::new(id);
        bench.check_dimension(self.dim)?;
        Ok(bench)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, default_value = "classical")]
    variant: Variant,
    #[arg(long, default_value_t = DEFAULT_PARTICLES)]
    particles: usize,
    #[arg(long, default_value_t = DEFAULT_MAXITER)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record the swarm potential after every iteration.
    #[arg(long)]
    trace_potential: bool,
    /// Trace CSV path (implies --trace-potential).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "source")]
struct PlanSource {
    /// JSON plan file.
    #[arg(long, group = "source")]
    plan: Option<PathBuf>,
    /// Built-in plan: table1, table2 or table34.
    #[arg(long, group = "source")]
    preset: Option<Preset>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    source: PlanSource,
    /// Base seed for presets; plan files carry their own seeds.
    #[arg(long, default_value_t = harness::DEFAULT_BASE_SEED)]
    seed: u64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Maximum number of concurrent runs (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated sphere weights.
    #[arg(long, value_delimiter = ',', default_values_t = harness::DEFAULT_GRIEWANK_MUS)]
    mu: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, value_delimiter = ',', default_value = "classical,social-only")]
    variants: Vec<Variant>,
    #[arg(long, default_value_t = harness::DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = harness::DEFAULT_BASE_SEED)]
    seed: u64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct PotentialArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Comma-separated variants, all run with the same seed.
    #[arg(long, value_delimiter = ',', required = true)]
    variants: Vec<Variant>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAXITER)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_PARTICLES)]
    particles: usize,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let bench = args.function.benchmark()?;
    let dim = args.function.dim;
    let config = SwarmConfig {
        variant: args.variant,
        n_particles: args.particles,
        maxiter: args.iters,
        seed: args.seed,
        ..Default::default()
    };
    let trace = args.trace_potential || args.out.is_some();
    let record = swarm::run(&config, &bench, dim, trace)?;
    let optimum = bench.optimum_position(dim);

    println!("function:       {}", bench.id());
    println!("dimension:      {dim}");
    println!("variant:        {}", record.variant);
    println!("seed:           {}", record.seed);
    println!("evaluations:    {}", record.evaluations);
    println!("value:          {}", record.value);
    println!(
        "position:       [{}]",
        record
            .position
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "distance:       [{}]",
        record
            .position
            .iter()
            .zip(&optimum)
            .map(|(x, o)| (x - o).abs().to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("classification: {}", record.classification);

    if let Some(trace) = record.potential {
        let path = args.out.unwrap_or_else(|| {
            out_dir(None).join(harness::trace_file_name(&bench, dim, record.variant))
        });
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                path: parent.to_path_buf(),
                source: e,
            })?;
        }
        trace.save(&path)?;
        println!("trace:          {}", path.display());
    }
    Ok(())
}

fn write_reports(report: &ExperimentReport, dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    harness::write_report(report, ReportFormat::Csv, &dir.join("report.csv"))?;
    harness::write_report(report, ReportFormat::Json, &dir.join("report.json"))?;
    Ok(())
}

fn print_report(report: &ExperimentReport) {
    println!(
        "{:<10} {:>9} {:>3} {:<12} {:>4} {:>4} {:>4} {:>4} {:>24} {:>6}",
        "function", "mu", "D", "variant", "runs", "G", "L", "O", "precision", "failed"
    );
    for s in &report.summaries {
        println!(
            "{:<10} {:>9} {:>3} {:<12} {:>4} {:>4} {:>4} {:>4} {:>24} {:>6}",
            s.function,
            s.mu.map(format_float).unwrap_or_default(),
            s.dimension,
            s.variant.to_string(),
            s.runs,
            s.g,
            s.l,
            s.o,
            s.precision.map_or_else(|| "n/a".to_owned(), format_float),
            s.failed
        );
    }
    if !report.failures.is_empty() {
        eprintln!(
            "WARNING: {} run(s) failed and were excluded from the counts:",
            report.failures.len()
        );
        for f in &report.failures {
            eprintln!(
                "  {} D={} {} seed {}: {}",
                f.function, f.dimension, f.variant, f.seed, f.message
            );
        }
    }
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), Error> {
    let plan = match (args.source.plan, args.source.preset) {
        (Some(path), _) => ExperimentPlan::load(&path)?,
        (None, Some(preset)) => preset.plan(args.seed),
        (None, None) => unreachable!("clap requires a plan source"),
    };
    let dir = out_dir(args.out_dir);
    let outcome = harness::execute_plan(&plan, args.jobs)?;
    write_reports(&outcome.report, &dir)?;
    if plan.trace_potential {
        let traces = dir.join("traces");
        std::fs::create_dir_all(&traces).map_err(|e| Error::Io {
            path: traces.clone(),
            source: e,
        })?;
        for (c, (cell, runs)) in plan.cells.iter().zip(&outcome.runs).enumerate() {
            for record in runs.iter().filter_map(|r| r.as_ref().ok()) {
                let name = format!(
                    "cell{c:03}_{}_d{}_{}_seed{}.csv",
                    cell.benchmark().id().name(),
                    cell.dimension(),
                    cell.variant(),
                    record.seed
                );
                record
                    .potential
                    .as_ref()
                    .map_or(Ok(()), |t: &PotentialTrace| t.save(&traces.join(name)))?;
            }
        }
    }
    print_report(&outcome.report);
    println!("reports written to {}", dir.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let plan =
        harness::griewank_sweep_plan(&args.mu, args.dim, &args.variants, args.runs, args.seed)?;
    let report = harness::run_plan(&plan, args.jobs)?;
    let dir = out_dir(args.out_dir);
    write_reports(&report, &dir)?;
    print_report(&report);
    println!("reports written to {}", dir.display());
    Ok(())
}

fn cmd_potential(args: PotentialArgs) -> Result<(), Error> {
    let bench = args.function.benchmark()?;
    let dim = args.function.dim;
    let traces = harness::potential_experiment(
        &bench,
        dim,
        &args.variants,
        args.seed,
        args.iters,
        args.particles,
    )?;
    let paths = harness::write_traces(&out_dir(args.out_dir), &bench, dim, &traces)?;
    for ((variant, trace), path) in traces.iter().zip(&paths) {
        let last = trace.samples.last().map(|s| s.total()).unwrap_or(0.0);
        println!(
            "{variant:<12} final potential {:<24} {}",
            last,
            path.display()
        );
    }
    Ok(())
}

fn cmd_list() {
    println!(
        "{:<10} {:>10} {:>10} {:>8} {:>7}",
        "function", "lo", "hi", "G-factor", "min-D"
    );
    for id in FunctionId::ALL {
        let b = id.default_bounds();
        println!(
            "{:<10} {:>10} {:>10} {:>8} {:>7}",
            id.name(),
            b.lo,
            b.hi,
            id.g_threshold_factor(),
            id.min_dimension()
        );
    }
    println!("variants: classical, social-only, hybrid");
}

fn exit_code(err: &Error) -> u8 {
    if err.is_config() {
        1
    } else if err.is_numeric() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Potential(args) => cmd_potential(args),
        Command::ListBenchmarks => {
            cmd_list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
