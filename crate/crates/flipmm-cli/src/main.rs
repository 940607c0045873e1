//! Command-line tools for discovering, transforming, verifying and lifting
//! fast matrix multiplication schemes.
//!
//! Every randomized subcommand takes `--seed`; when omitted, a seed is
//! drawn from the clock and printed so the run can be replayed. With a
//! fixed seed, outputs are byte-identical regardless of `--threads`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flipmm::alternatives::{alternatives, AlternativesOptions};
use flipmm::compose::{compose, pipeline, plan_blocks, ComposeOutcome, Partition, SchemeLibrary};
use flipmm::io::{read_scheme, render_rational_scheme, render_scheme, write_scheme};
use flipmm::lift::{lift, LiftOptions};
use flipmm::optimize::{optimize, Direction, Metric, OptimizeOptions};
use flipmm::search::{run_search, MetaWeights, WalkConfig};
use flipmm::{Dims, Ring, Scheme};

#[derive(Parser)]
#[command(name = "flipmm", version, about = "Fast matrix multiplication scheme toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scheme file against the correctness equations.
    Verify {
        file: PathBuf,
    },
    /// Generate the naive scheme for given dimensions.
    Naive {
        #[arg(long, value_parser = parse_dims)]
        dims: Dims,
        #[arg(long, value_enum, default_value = "zt")]
        ring: RingArg,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print rank, exponent and structural metrics of a scheme file.
    Stats {
        file: PathBuf,
    },
    /// Random-walk search at fixed dimensions.
    Search(SearchArgs),
    /// Random-walk search with dimension-changing meta-operations.
    MetaSearch(MetaSearchArgs),
    /// Generate distinct same-rank schemes from a seed scheme.
    Alternatives {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 20_000)]
        step_budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output files are written as `<prefix><index>.scheme`.
        #[arg(long, default_value = "alternative_")]
        out_prefix: String,
    },
    /// Hensel-lift a z2/z3 scheme to exact coefficients.
    Lift {
        #[arg(long = "in")]
        input: PathBuf,
        /// Constrain correction digits by reconstructibility (z2 only; on
        /// by default).
        #[arg(long, overrides_with = "no_guided")]
        guided: bool,
        /// Solve every level without reconstructibility constraints.
        #[arg(long)]
        no_guided: bool,
        #[arg(long, default_value_t = 16)]
        max_levels: u32,
        /// Randomize free variables of the correction solves.
        #[arg(long)]
        free_var_seed: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Flip-only optimization of a scheme under a metric.
    Optimize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "zero-count")]
        metric: MetricArg,
        #[arg(long, value_enum, default_value = "maximize")]
        direction: DirectionArg,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        sideways_probability: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Block-construct a large scheme, or evaluate a composition
    /// expression.
    Compose(ComposeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RingArg {
    Z2,
    Z3,
    Zt,
}

impl From<RingArg> for Ring {
    fn from(r: RingArg) -> Ring {
        match r {
            RingArg::Z2 => Ring::Z2,
            RingArg::Z3 => Ring::Z3,
            RingArg::Zt => Ring::Zt,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    ZeroCount,
    FlipPotential,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Maximize,
    Minimize,
}

#[derive(Args)]
struct SearchArgs {
    /// Start from the naive scheme of these dimensions.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<Dims>,
    #[arg(long, value_enum, default_value = "z2")]
    ring: RingArg,
    /// Start from existing scheme files instead of (or merged with) the
    /// naive scheme.
    #[arg(long = "init")]
    init: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    runners: usize,
    #[arg(long, default_value_t = 300)]
    flips_min: u64,
    #[arg(long, default_value_t = 10_000)]
    flips_max: u64,
    #[arg(long, default_value_t = 1_000_000)]
    reset_limit: u64,
    #[arg(long, default_value_t = 10)]
    pool_capacity: usize,
    #[arg(long, default_value_t = 1.0)]
    reduce_probability: f64,
    #[arg(long, default_value_t = 0.01)]
    sandwich_probability: f64,
    /// Search reductions on all axes, not only the flipped one.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    reduce_all_axes: bool,
    /// Per-runner iteration budget.
    #[arg(long, default_value_t = 1_000_000)]
    max_iterations: u64,
    /// Per-runner wall-clock budget in seconds (makes runs
    /// non-reproducible).
    #[arg(long)]
    wall_limit_secs: Option<f64>,
    /// Stop runners once this rank is reached.
    #[arg(long)]
    target_rank: Option<usize>,
    /// Worker threads (0: one per runner). Results do not depend on this.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Stream improvements to stderr.
    #[arg(long, default_value_t = false)]
    progress: bool,
    /// Write the best scheme per dimension signature into this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct MetaSearchArgs {
    #[command(flatten)]
    search: SearchArgs,
    /// Chance of a meta-operation at each phase boundary.
    #[arg(long, default_value_t = 0.01)]
    meta_probability: f64,
    /// Weights `extend,project,merge,product`.
    #[arg(long, default_value = "1,1,1,1", value_parser = parse_meta_weights)]
    meta_weights: MetaWeights,
}

#[derive(Args)]
struct ComposeArgs {
    /// Composition expression, e.g. `product(load(a.scheme), load(b.scheme))`.
    #[arg(long, conflicts_with_all = ["target", "partition", "base"])]
    expr: Option<String>,
    #[arg(long, value_parser = parse_dims, requires_all = ["partition", "base"])]
    target: Option<Dims>,
    /// Block sizes per axis, e.g. `2,2x3,4x7,8`.
    #[arg(long)]
    partition: Option<String>,
    /// Base scheme file defining the block structure.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Directory of sub-scheme files, scanned recursively.
    #[arg(long)]
    library: Option<PathBuf>,
    /// Rank manifest (`m n p rank` lines) for planning without schemes.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Report the rank plan without materializing the scheme.
    #[arg(long, default_value_t = false)]
    plan_only: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn parse_dims(text: &str) -> Result<Dims, String> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(format!("expected MxNxP, got {text:?}"));
    }
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.parse::<usize>()).collect();
    let nums = nums.map_err(|e| format!("invalid dimension in {text:?}: {e}"))?;
    Dims::new(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

fn parse_meta_weights(text: &str) -> Result<MetaWeights, String> {
    let parts: Result<Vec<u32>, _> = text.split(',').map(|p| p.trim().parse::<u32>()).collect();
    match parts.map_err(|e| e.to_string())?.as_slice() {
        [e, p, m, pr] => Ok(MetaWeights { extend: *e, project: *p, merge: *m, product: *pr }),
        _ => Err(format!("expected four comma-separated weights, got {text:?}")),
    }
}

/// Explicit seed, or one drawn from the clock and announced on stderr.
fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let auto = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            eprintln!("seed: {auto} (auto-chosen; pass --seed {auto} to reproduce)");
            auto
        }
    }
}

fn load_scheme(path: &Path) -> Result<Scheme> {
    read_scheme(path).with_context(|| format!("reading {}", path.display()))
}

fn emit_scheme(s: &Scheme, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_scheme(s, path).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", render_scheme(s)),
    }
    Ok(())
}

fn run_walk(args: &SearchArgs, meta: Option<(f64, MetaWeights)>) -> Result<bool> {
    let mut init = Vec::new();
    if let Some(dims) = args.dims {
        init.push(Scheme::naive(dims, args.ring.into()));
    }
    for path in &args.init {
        init.push(load_scheme(path)?);
    }
    if init.is_empty() {
        bail!("provide --dims or at least one --init scheme");
    }
    let (meta_probability, meta_weights) = meta.unwrap_or((0.0, MetaWeights::default()));
    let cfg = WalkConfig {
        seed: resolve_seed(args.seed),
        runners: args.runners,
        flips_limit_min: args.flips_min,
        flips_limit_max: args.flips_max.max(args.flips_min),
        reset_limit: args.reset_limit,
        pool_capacity: args.pool_capacity,
        reduce_probability: args.reduce_probability,
        sandwich_probability: args.sandwich_probability,
        meta_probability,
        meta_weights,
        reduce_all_axes: args.reduce_all_axes,
        dim_limit: flipmm::ring::MAX_LEN,
        max_iterations: args.max_iterations,
        wall_limit: args.wall_limit_secs.map(Duration::from_secs_f64),
        target_rank: args.target_rank,
        threads: args.threads,
        progress: args.progress,
    };
    let report = run_search(&init, &cfg)?;
    print!("{}", report.render());
    eprintln!("wall time: {:.3}s", report.wall_time.as_secs_f64());
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)?;
        for (dims, scheme) in &report.best {
            let name = format!("{}_r{}.{}.scheme", dims, scheme.rank(), scheme.ring().name());
            write_scheme(scheme, dir.join(name))?;
        }
    }
    // Exit status reflects the target when one was requested.
    Ok(match (args.target_rank, args.dims) {
        (Some(target), Some(dims)) => report.best_rank(dims).is_some_and(|r| r <= target),
        _ => true,
    })
}

fn cmd_verify(file: &Path) -> Result<bool> {
    let s = load_scheme(file)?;
    let ok = s.verify();
    println!(
        "dims {} rank {} ring {} exponent {:.6} {}",
        s.dims(),
        s.rank(),
        s.ring(),
        s.exponent(),
        if ok { "VALID" } else { "INVALID" }
    );
    Ok(ok)
}

fn cmd_stats(file: &Path) -> Result<()> {
    let s = load_scheme(file)?;
    let m = s.metrics();
    println!("dims {}", s.dims());
    println!("ring {}", s.ring());
    println!("rank {}", m.rank);
    println!("exponent {:.6}", m.exponent);
    println!("zero_count {}", m.zero_count);
    println!("flip_potential {}", m.flip_potential);
    Ok(())
}

fn cmd_alternatives(
    input: &Path,
    count: usize,
    seed: Option<u64>,
    step_budget: u64,
    workers: usize,
    out_prefix: &str,
) -> Result<()> {
    let s = load_scheme(input)?;
    if !s.verify() {
        bail!("input scheme fails verification");
    }
    let opts = AlternativesOptions { count, seed: resolve_seed(seed), step_budget, workers };
    let found = alternatives(&s, &opts);
    for (idx, alt) in found.iter().enumerate() {
        let path = format!("{out_prefix}{idx}.scheme");
        write_scheme(alt, &path)?;
        println!("{path} rank {}", alt.rank());
    }
    println!("found {} of {count}", found.len());
    Ok(())
}

fn cmd_lift(
    input: &Path,
    guided: bool,
    max_levels: u32,
    free_var_seed: Option<u64>,
    out: Option<&Path>,
) -> Result<()> {
    let s = load_scheme(input)?;
    let opts = LiftOptions { guided, max_levels, free_var_seed };
    let outcome = lift(&s, &opts)?;
    let text = render_rational_scheme(&outcome.scheme);
    match out {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }
    println!(
        "classification {} rank {} levels {}",
        outcome.classification.name(),
        outcome.scheme.rank(),
        outcome.levels_used
    );
    Ok(())
}

fn cmd_optimize(
    input: &Path,
    metric: MetricArg,
    direction: DirectionArg,
    budget: u64,
    seed: Option<u64>,
    sideways_probability: f64,
    out: Option<&Path>,
) -> Result<()> {
    let s = load_scheme(input)?;
    if !s.verify() {
        bail!("input scheme fails verification");
    }
    let opts = OptimizeOptions {
        metric: match metric {
            MetricArg::ZeroCount => Metric::ZeroCount,
            MetricArg::FlipPotential => Metric::FlipPotential,
        },
        direction: match direction {
            DirectionArg::Maximize => Direction::Maximize,
            DirectionArg::Minimize => Direction::Minimize,
        },
        budget,
        seed: resolve_seed(seed),
        sideways_probability,
    };
    let before = s.metrics();
    let optimized = optimize(&s, &opts);
    let after = optimized.metrics();
    println!(
        "zero_count {} -> {}, flip_potential {} -> {}",
        before.zero_count, after.zero_count, before.flip_potential, after.flip_potential
    );
    emit_scheme(&optimized, out)
}

fn cmd_compose(args: &ComposeArgs) -> Result<()> {
    if let Some(expr) = &args.expr {
        let s = pipeline(expr)?;
        println!("dims {} rank {} ring {}", s.dims(), s.rank(), s.ring());
        return emit_scheme(&s, args.out.as_deref());
    }
    let (Some(target), Some(partition), Some(base)) =
        (args.target, args.partition.as_deref(), args.base.as_deref())
    else {
        bail!("compose needs either --expr or --target/--partition/--base");
    };
    let partition = Partition::parse(partition)?;
    let base = load_scheme(base)?;
    let mut lib = SchemeLibrary::new();
    if let Some(dir) = &args.library {
        let loaded = lib.load_dir(dir)?;
        eprintln!("library: {loaded} schemes from {}", dir.display());
    }
    if let Some(manifest) = &args.manifest {
        let text = std::fs::read_to_string(manifest)?;
        lib.load_manifest(&text)?;
    }
    if lib.is_empty() {
        bail!("compose needs --library and/or --manifest entries");
    }
    if args.plan_only {
        let plan = plan_blocks(target, &partition, &base, &lib)?;
        print!("{}", plan.render());
        return Ok(());
    }
    match compose(target, &partition, &base, &lib)? {
        ComposeOutcome::Materialized(s) => {
            println!("dims {} rank {} ring {}", s.dims(), s.rank(), s.ring());
            emit_scheme(&s, args.out.as_deref())
        }
        ComposeOutcome::Report(plan) => {
            print!("{}", plan.render());
            Ok(())
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { file } => cmd_verify(&file),
        Command::Naive { dims, ring, out } => {
            let s = Scheme::naive(dims, ring.into());
            emit_scheme(&s, out.as_deref())?;
            Ok(true)
        }
        Command::Stats { file } => cmd_stats(&file).map(|_| true),
        Command::Search(args) => run_walk(&args, None),
        Command::MetaSearch(args) => {
            run_walk(&args.search, Some((args.meta_probability, args.meta_weights)))
        }
        Command::Alternatives { input, count, seed, step_budget, workers, out_prefix } => {
            cmd_alternatives(&input, count, seed, step_budget, workers, &out_prefix).map(|_| true)
        }
        Command::Lift { input, guided: _, no_guided, max_levels, free_var_seed, out } => {
            cmd_lift(&input, !no_guided, max_levels, free_var_seed, out.as_deref()).map(|_| true)
        }
        Command::Optimize { input, metric, direction, budget, seed, sideways_probability, out } => {
            cmd_optimize(&input, metric, direction, budget, seed, sideways_probability, out.as_deref())
                .map(|_| true)
        }
        Command::Compose(args) => cmd_compose(&args).map(|_| true),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
