mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use submat_core::dynbase::BackendKind;
use submat_core::exec::Execution;
use submat_core::io::parse_instance;
use submat_core::pipeline::{brute_force_opt, solve, Algo, PipelineConfig};
use submat_core::selfcheck::{run_all, SelfcheckConfig};
use submat_core::ValuationOracle;

#[derive(Parser)]
#[command(
    name = "submat",
    version,
    about = "Monotone submodular maximization over partition and graphic matroids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file (objective block followed by a matroid block).
    Solve(SolveArgs),
    /// Oracle-call and wall-time scaling over generated instances, as CSV.
    Bench(bench::BenchArgs),
    /// Randomized equivalence suites against brute-force references.
    Selfcheck(SelfcheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum AlgoArg {
    Pipeline,
    Greedy,
    LazyOnly,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Pipeline => Algo::Pipeline,
            AlgoArg::Greedy => Algo::Greedy,
            AlgoArg::LazyOnly => Algo::LazyOnly,
        }
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "pipeline")]
    algo: AlgoArg,
    /// Independent pipeline runs; the best rounded solution is kept.
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Run the sampling fan-out on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Also compute the exact optimum (n ≤ 24 and rank ≤ 4 only).
    #[arg(long)]
    opt: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fewer cases, for smoke runs.
    #[arg(long)]
    quick: bool,
    /// Swap in a dynamic-base backend with a planted bug; the run must fail.
    #[arg(long)]
    inject_fault: bool,
}

/// Failures of the user's input; they map to exit code 2.
#[derive(Debug)]
struct Invalid(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.into())
    }
}

pub(crate) fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run_solve(args: &SolveArgs) -> Result<(), Invalid> {
    let text = fs::read_to_string(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let (objective, matroid) = parse_instance(&text).with_context(|| format!("in {}", args.instance.display()))?;
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let oracle = ValuationOracle::from_arc(objective.into_function()).with_execution(exec);
    let mut config = PipelineConfig::new(args.eps);
    config.restarts = args.restarts;
    let mut report = solve(&oracle, &matroid, args.algo.into(), &config, args.seed)?;
    if args.opt {
        let (_, opt) = brute_force_opt(&oracle, &matroid)
            .ok_or_else(|| anyhow!("--opt needs at most 24 elements and rank at most 4"))?;
        report.opt = Some(opt);
    }
    log::info!(
        "{:?}: value {} with {} oracle calls",
        report.algo,
        report.value,
        report.total_calls
    );
    let json = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n";
    write_output(args.out.as_deref(), &json)?;
    Ok(())
}

fn run_selfcheck(args: &SelfcheckArgs) -> bool {
    let mut config = SelfcheckConfig {
        seed: args.seed,
        ..SelfcheckConfig::default()
    };
    if args.quick {
        config.dynbase_sequences = 100;
        config.euler_ops = 5000;
        config.rounding_pairs = 100;
    }
    if args.inject_fault {
        config.backend = BackendKind::FaultyNaive;
    }
    let mut ok = true;
    for r in run_all(&config) {
        let status = if r.passed() { "ok" } else { "FAILED" };
        println!(
            "{:<14} {status:<6} {} cases, {} checks, {:.2}s",
            r.name, r.cases, r.checks, r.secs
        );
        for msg in &r.failures {
            println!("    {msg}");
        }
        if r.failed > r.failures.len() as u64 {
            println!("    ... {} failures in total", r.failed);
        }
        ok &= r.passed();
    }
    ok
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => bench::run(args).map_err(Invalid),
        Command::Selfcheck(args) => {
            return if run_selfcheck(args) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
