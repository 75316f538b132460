use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use submat_core::exec::Execution;
use submat_core::pipeline::{solve, welfare_reduce, PipelineConfig, WelfareInstance};
use submat_core::{gen, MatroidInstance, SetFunction, ValuationOracle};

use crate::{write_output, AlgoArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Family {
    /// Coverage sets, one per block of 16 (rank n/16).
    Coverage,
    /// Four players with coverage valuations over n/4 items.
    Welfare,
}

const WELFARE_PLAYERS: usize = 4;

#[derive(clap::Args)]
pub(crate) struct BenchArgs {
    #[arg(long, value_enum, default_value = "coverage")]
    family: Family,
    /// Ground-set sizes: `2^12..2^16` (powers of two), or a comma list like `1024,2^11`.
    #[arg(long, default_value = "2^10..2^12")]
    sizes: String,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "pipeline,greedy")]
    algo: Vec<AlgoArg>,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    instance: String,
    n: usize,
    k: usize,
    seed: u64,
    eps: f64,
    algo: String,
    value: f64,
    calls: u64,
    secs: f64,
}

fn parse_size(tok: &str) -> anyhow::Result<usize> {
    let tok = tok.trim();
    let n = match tok.split_once('^') {
        Some(("2", p)) => {
            let p: u32 = p.parse().with_context(|| format!("bad exponent in {tok:?}"))?;
            if p > 30 {
                bail!("size {tok} is too large");
            }
            1usize << p
        }
        Some(_) => bail!("only powers of two may use ^, got {tok:?}"),
        None => tok.parse().with_context(|| format!("bad size {tok:?}"))?,
    };
    Ok(n)
}

pub(crate) fn parse_sizes(spec: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse_size(lo)?, parse_size(hi)?);
                if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
                    bail!("range {part:?} must run between powers of two, low to high");
                }
                let mut n = lo;
                while n <= hi {
                    out.push(n);
                    n *= 2;
                }
            }
            None => out.push(parse_size(part)?),
        }
    }
    if out.is_empty() {
        bail!("no sizes given");
    }
    Ok(out)
}

fn instance(family: Family, n: usize, seed: u64) -> (Arc<dyn SetFunction>, MatroidInstance) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(32));
    match family {
        Family::Coverage => {
            let (f, m) = gen::scaling_coverage(n, &mut rng);
            (Arc::new(f), m.into())
        }
        Family::Welfare => {
            let items = n / WELFARE_PLAYERS;
            let vals = (0..WELFARE_PLAYERS)
                .map(|_| Arc::new(gen::random_coverage(items, items.div_ceil(2), 1..=8, &mut rng)) as _)
                .collect();
            let red = welfare_reduce(&WelfareInstance::new(items, vals).expect("sizes agree"));
            (red.oracle.function().clone(), red.matroid)
        }
    }
}

fn check_size(family: Family, n: usize) -> anyhow::Result<()> {
    match family {
        Family::Coverage if n < 16 || !n.is_multiple_of(16) => bail!("coverage sizes must be multiples of 16, got {n}"),
        Family::Welfare if n < WELFARE_PLAYERS || !n.is_multiple_of(WELFARE_PLAYERS) => {
            bail!("welfare sizes must be multiples of {WELFARE_PLAYERS}, got {n}")
        }
        _ => Ok(()),
    }
}

fn run_cell(args: &BenchArgs, n: usize, seed: u64, algo: AlgoArg) -> anyhow::Result<Row> {
    let (f, m) = instance(args.family, n, seed);
    let oracle = ValuationOracle::from_arc(f).with_execution(Execution::Sequential);
    let mut config = PipelineConfig::new(args.eps);
    config.restarts = args.restarts;
    let start = Instant::now();
    let r = solve(&oracle, &m, algo.into(), &config, seed)?;
    let algo = algo
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    Ok(Row {
        instance: format!("{:?}-{n}-{seed}", args.family).to_lowercase(),
        n,
        k: m.rank(),
        seed,
        eps: args.eps,
        algo,
        value: r.value,
        calls: r.total_calls,
        secs: start.elapsed().as_secs_f64(),
    })
}

/// Cells run on parallel workers; each solver stays on its worker's thread.
fn run_cells(args: &BenchArgs, cells: &[(usize, u64, AlgoArg)]) -> Vec<anyhow::Result<Row>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cells.par_iter().map(|&(n, s, a)| run_cell(args, n, s, a)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cells.iter().map(|&(n, s, a)| run_cell(args, n, s, a)).collect()
    }
}

pub(crate) fn run(args: &BenchArgs) -> anyhow::Result<()> {
    let sizes = parse_sizes(&args.sizes)?;
    for &n in &sizes {
        check_size(args.family, n)?;
    }
    PipelineConfig {
        restarts: args.restarts,
        ..PipelineConfig::new(args.eps)
    }
    .validate()?;
    let mut cells = Vec::new();
    for &n in &sizes {
        for seed in 0..args.seeds {
            for &a in &args.algo {
                cells.push((n, seed, a));
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in run_cells(args, &cells) {
        w.serialize(row?)?;
    }
    let text = String::from_utf8(w.into_inner()?)?;
    write_output(args.out.as_deref(), &text)
}
