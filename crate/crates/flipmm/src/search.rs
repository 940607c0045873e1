//! Seeded parallel random walks over the flip graph.
//!
//! Each runner owns a scheme and repeatedly attempts a flip; failed flips
//! fall back to an expansion, successful ones are followed by probabilistic
//! reduction and sandwiching. Two counters drive the restart machinery:
//! `flips_count` (consecutive flips since the last rank reduction) forces an
//! expansion once it passes a randomly sampled threshold, and
//! `iterations_count` (steps since the last improvement) resets the runner
//! onto a scheme drawn from its pool of recent improvements.
//!
//! Runner `i` is seeded with `seed + i` and shares no mutable state with
//! other runners, so results are bit-identical for a fixed configuration
//! regardless of how many worker threads execute them.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::time::Duration;
#[cfg(not(target_arch = "wasm32"))]
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flip::{
    eligible_flips_into, eligible_reductions_into, expand_in_place, flip_in_place,
    reduce_in_place, sandwich_in_place, SandwichTriple,
};
use crate::meta::{self, DimAxis};
use crate::ring::{CoeffVec, Ring};
use crate::scheme::{Axis, Dims, Scheme};

/// Monotonic clock that degrades to a no-op on targets without one; the
/// wall-clock budget is then simply never reached.
#[derive(Debug, Clone, Copy)]
struct WallClock(#[cfg(not(target_arch = "wasm32"))] Instant);

impl WallClock {
    fn start() -> WallClock {
        WallClock(
            #[cfg(not(target_arch = "wasm32"))]
            Instant::now(),
        )
    }

    fn elapsed(&self) -> Duration {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.0.elapsed()
        }
        #[cfg(target_arch = "wasm32")]
        {
            Duration::ZERO
        }
    }
}

/// Relative weights for the four meta-operations attempted between walk
/// phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaWeights {
    pub extend: u32,
    pub project: u32,
    pub merge: u32,
    pub product: u32,
}

impl Default for MetaWeights {
    fn default() -> Self {
        MetaWeights { extend: 1, project: 1, merge: 1, product: 1 }
    }
}

impl MetaWeights {
    fn total(&self) -> u32 {
        self.extend + self.project + self.merge + self.product
    }
}

/// All parameters of a random walk run.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    /// Master seed; runner `i` uses `seed + i`.
    pub seed: u64,
    pub runners: usize,
    /// Bounds for the per-phase flip threshold, resampled uniformly at each
    /// forced expansion and reset.
    pub flips_limit_min: u64,
    pub flips_limit_max: u64,
    /// Steps without improvement before a runner restarts from its pool.
    pub reset_limit: u64,
    pub pool_capacity: usize,
    /// Chance of searching for a reduction after each successful flip.
    pub reduce_probability: f64,
    /// Chance of applying a random sandwich after each successful flip.
    pub sandwich_probability: f64,
    /// Chance of attempting a meta-operation at each phase boundary
    /// (forced expansion or reset). Zero keeps the dimensions fixed.
    pub meta_probability: f64,
    pub meta_weights: MetaWeights,
    /// Whether reductions are searched on all three axes or only on the
    /// axis of the flip that preceded them.
    pub reduce_all_axes: bool,
    /// Upper bound on matrix slice entries for meta-operations; cannot
    /// exceed the 128-entry encoding limit.
    pub dim_limit: usize,
    /// Per-runner iteration budget.
    pub max_iterations: u64,
    /// Optional wall-clock budget per runner. Trajectories stop mid-stream
    /// when it expires, so runs using it are not reproducible.
    pub wall_limit: Option<Duration>,
    /// Stop a runner once its best rank for the current dimensions reaches
    /// this value.
    pub target_rank: Option<usize>,
    /// Worker threads executing the runners; 0 means one thread per runner.
    pub threads: usize,
    /// Print improvements to stderr as they happen.
    pub progress: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            seed: 0,
            runners: 1,
            flips_limit_min: 300,
            flips_limit_max: 10_000,
            reset_limit: 1_000_000,
            pool_capacity: 10,
            reduce_probability: 1.0,
            sandwich_probability: 0.01,
            meta_probability: 0.0,
            meta_weights: MetaWeights::default(),
            reduce_all_axes: true,
            dim_limit: crate::ring::MAX_LEN,
            max_iterations: 1_000_000,
            wall_limit: None,
            target_rank: None,
            threads: 0,
            progress: false,
        }
    }
}

/// Circular buffer of restart candidates, seeded with the initial schemes
/// and fed with every improvement; the oldest entry is evicted when full.
#[derive(Debug, Clone)]
pub struct ImprovementPool {
    entries: VecDeque<Scheme>,
    capacity: usize,
}

impl ImprovementPool {
    pub fn new(capacity: usize, initial: &[Scheme]) -> ImprovementPool {
        assert!(capacity >= 1);
        let mut pool = ImprovementPool { entries: VecDeque::with_capacity(capacity), capacity };
        for s in initial {
            pool.push(s.clone());
        }
        pool
    }

    pub fn push(&mut self, s: Scheme) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(s);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> &Scheme {
        &self.entries[rng.random_range(0..self.entries.len())]
    }
}

/// One improvement event, reported as `dims rank ring runner iteration`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Improvement {
    pub dims: Dims,
    pub rank: usize,
    pub ring: Ring,
    pub runner: usize,
    pub iteration: u64,
}

/// Private state of one runner.
pub struct RunnerState {
    pub runner: usize,
    pub current: Scheme,
    pub best_by_dims: BTreeMap<Dims, Scheme>,
    pub flips_count: u64,
    pub iterations_count: u64,
    pub flip_threshold: u64,
    rng: ChaCha8Rng,
    pool: ImprovementPool,
    improvements: Vec<Improvement>,
    total_iterations: u64,
    started: WallClock,
    // reusable scratch for candidate enumeration
    keys: Vec<[CoeffVec; 3]>,
    cands: Vec<(usize, usize, Axis)>,
}

fn sample_threshold(cfg: &WalkConfig, rng: &mut ChaCha8Rng) -> u64 {
    rng.random_range(cfg.flips_limit_min..=cfg.flips_limit_max.max(cfg.flips_limit_min))
}

impl RunnerState {
    pub fn new(runner: usize, init: &[Scheme], cfg: &WalkConfig) -> RunnerState {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(runner as u64));
        let start = init[runner % init.len()].clone();
        let flip_threshold = sample_threshold(cfg, &mut rng);
        let mut best = BTreeMap::new();
        best.insert(start.dims(), start.clone());
        RunnerState {
            runner,
            current: start,
            best_by_dims: best,
            flips_count: 0,
            iterations_count: 0,
            flip_threshold,
            rng,
            pool: ImprovementPool::new(cfg.pool_capacity, init),
            improvements: Vec::new(),
            total_iterations: 0,
            started: WallClock::start(),
            keys: Vec::new(),
            cands: Vec::new(),
        }
    }

    fn record_improvement(&mut self) {
        let dims = self.current.dims();
        let improved = match self.best_by_dims.get(&dims) {
            Some(best) => self.current.rank() < best.rank(),
            None => true,
        };
        if improved {
            debug_assert!(self.current.verify(), "improvement fails verification");
            self.best_by_dims.insert(dims, self.current.clone());
            self.pool.push(self.current.clone());
            self.improvements.push(Improvement {
                dims,
                rank: self.current.rank(),
                ring: self.current.ring(),
                runner: self.runner,
                iteration: self.total_iterations,
            });
            self.iterations_count = 0;
        }
    }

    fn reached_target(&self, cfg: &WalkConfig) -> bool {
        match cfg.target_rank {
            Some(target) => self
                .best_by_dims
                .get(&self.current.dims())
                .is_some_and(|best| best.rank() <= target),
            None => false,
        }
    }
}

/// One walk iteration. A flip is attempted first; on failure an expansion
/// keeps the walk moving. Successful flips are followed by probabilistic
/// reduction and sandwiching, and a forced expansion fires once
/// `flips_count` exceeds the sampled threshold.
pub fn walk_step(state: &mut RunnerState, cfg: &WalkConfig) {
    state.total_iterations += 1;
    state.iterations_count += 1;

    if state.flips_count >= state.flip_threshold {
        if expand_in_place(&mut state.current, &mut state.rng).is_ok() {
            state.flips_count = 0;
            state.flip_threshold = sample_threshold(cfg, &mut state.rng);
            maybe_meta(state, cfg);
        }
    } else {
        // Attempt a flip on a uniformly chosen eligible candidate; over Zt
        // a candidate can still be rejected by the range check, in which
        // case another is drawn. Expansion is the fallback once no flip
        // applies.
        let mut flipped_axis = None;
        eligible_flips_into(&state.current, &mut state.keys, &mut state.cands);
        while !state.cands.is_empty() {
            let pick = state.rng.random_range(0..state.cands.len());
            let (i, j, axis) = state.cands.swap_remove(pick);
            let before = state.current.rank();
            if flip_in_place(&mut state.current, i, j, axis).is_ok() {
                state.flips_count += 1;
                if state.current.rank() < before {
                    state.flips_count = 0;
                }
                flipped_axis = Some(axis);
                break;
            }
        }
        match flipped_axis {
            Some(axis) => {
                if cfg.reduce_probability > 0.0 && state.rng.random_bool(cfg.reduce_probability) {
                    try_reduce(state, cfg, axis);
                }
                if cfg.sandwich_probability > 0.0
                    && state.rng.random_bool(cfg.sandwich_probability)
                {
                    let t = SandwichTriple::random(
                        state.current.dims(),
                        state.current.ring(),
                        &mut state.rng,
                    );
                    sandwich_in_place(&mut state.current, &t);
                }
            }
            None => {
                let _ = expand_in_place(&mut state.current, &mut state.rng);
            }
        }
    }

    state.record_improvement();

    if state.iterations_count >= cfg.reset_limit {
        state.current = state.pool.sample(&mut state.rng).clone();
        state.flips_count = 0;
        state.iterations_count = 0;
        state.flip_threshold = sample_threshold(cfg, &mut state.rng);
        maybe_meta(state, cfg);
    }
}

fn try_reduce(state: &mut RunnerState, cfg: &WalkConfig, flip_axis: Axis) {
    eligible_reductions_into(&state.current, &mut state.keys, &mut state.cands);
    if !cfg.reduce_all_axes {
        state.cands.retain(|&(_, _, axis)| axis == flip_axis);
    }
    while !state.cands.is_empty() {
        let pick = state.rng.random_range(0..state.cands.len());
        let (i, j, axis) = state.cands.swap_remove(pick);
        if reduce_in_place(&mut state.current, i, j, axis).is_ok() {
            state.flips_count = 0;
            return;
        }
    }
}

/// With probability `meta_probability`, applies one weighted-random
/// dimension-changing operation, keeping the result only if it fits the
/// encoding limits and verifies.
pub fn maybe_meta(state: &mut RunnerState, cfg: &WalkConfig) {
    if cfg.meta_probability <= 0.0
        || cfg.meta_weights.total() == 0
        || !state.rng.random_bool(cfg.meta_probability)
    {
        return;
    }
    let w = cfg.meta_weights;
    let pick = state.rng.random_range(0..w.total());
    let axis = DimAxis::ALL[state.rng.random_range(0..3usize)];
    let result = if pick < w.extend {
        meta::extend_along(&state.current, axis)
    } else if pick < w.extend + w.project {
        let size = match axis {
            DimAxis::M => state.current.dims().m,
            DimAxis::N => state.current.dims().n,
            DimAxis::P => state.current.dims().p,
        };
        if size < 2 {
            return;
        }
        let slice = state.rng.random_range(0..size);
        meta::project_along(&state.current, axis, slice)
    } else if pick < w.extend + w.project + w.merge {
        let partner = state.pool.sample(&mut state.rng).clone();
        meta::merge_along(&state.current, &partner, axis)
    } else {
        let partner = state.pool.sample(&mut state.rng).clone();
        meta::product(&state.current, &partner)
    };
    if let Ok(mut s) = result {
        s.normalize();
        let d = s.dims();
        let fits = d.u_len() <= cfg.dim_limit
            && d.v_len() <= cfg.dim_limit
            && d.w_len() <= cfg.dim_limit;
        if fits && s.rank() >= 1 && s.verify() {
            state.current = s;
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("at least one initial scheme is required")]
    NoInit,
    #[error("initial scheme {0} fails verification")]
    InitInvalid(usize),
    #[error("initial schemes must share one ring")]
    MixedRings,
}

/// Aggregated outcome of a run: the best scheme found for every dimension
/// signature, plus the full improvement log.
#[derive(Debug)]
pub struct SearchReport {
    pub best: BTreeMap<Dims, Scheme>,
    pub improvements: Vec<Improvement>,
    pub total_iterations: u64,
    pub wall_time: Duration,
}

impl SearchReport {
    pub fn best_rank(&self, dims: Dims) -> Option<usize> {
        self.best.get(&dims).map(|s| s.rank())
    }

    /// Line-oriented text report: one line per improvement, then a summary
    /// block. Contains no timing, so equal runs render byte-identically.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# improvements: dims rank ring runner iteration");
        for imp in &self.improvements {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                imp.dims,
                imp.rank,
                imp.ring.name(),
                imp.runner,
                imp.iteration
            );
        }
        let _ = writeln!(out, "# summary: dims best_rank exponent");
        for (dims, scheme) in &self.best {
            let _ = writeln!(
                out,
                "{} {} {:.6}",
                dims,
                scheme.rank(),
                crate::scheme::exponent(*dims, scheme.rank())
            );
        }
        let _ = writeln!(out, "# iterations {}", self.total_iterations);
        out
    }
}

struct RunnerOutcome {
    runner: usize,
    best: BTreeMap<Dims, Scheme>,
    improvements: Vec<Improvement>,
    iterations: u64,
}

fn run_runner(runner: usize, init: &[Scheme], cfg: &WalkConfig) -> RunnerOutcome {
    let mut state = RunnerState::new(runner, init, cfg);
    let mut iter = 0u64;
    while iter < cfg.max_iterations {
        if state.reached_target(cfg) {
            break;
        }
        if let Some(limit) = cfg.wall_limit {
            if iter.is_multiple_of(256) && state.started.elapsed() >= limit {
                break;
            }
        }
        let before_len = state.improvements.len();
        walk_step(&mut state, cfg);
        if cfg.progress {
            for imp in &state.improvements[before_len..] {
                eprintln!(
                    "improvement: {} rank {} runner {} iteration {}",
                    imp.dims, imp.rank, imp.runner, imp.iteration
                );
            }
        }
        iter += 1;
    }
    RunnerOutcome {
        runner,
        best: state.best_by_dims,
        improvements: state.improvements,
        iterations: state.total_iterations,
    }
}

/// Runs `cfg.runners` independent walks and merges their results. Every
/// reported scheme is re-verified before it is returned.
pub fn run_search(init: &[Scheme], cfg: &WalkConfig) -> Result<SearchReport, SearchError> {
    if init.is_empty() {
        return Err(SearchError::NoInit);
    }
    let ring = init[0].ring();
    for (idx, s) in init.iter().enumerate() {
        if s.ring() != ring {
            return Err(SearchError::MixedRings);
        }
        if !s.verify() {
            return Err(SearchError::InitInvalid(idx));
        }
    }

    let started = WallClock::start();
    let runners = cfg.runners.max(1);
    let threads = if cfg!(target_arch = "wasm32") {
        1 // no thread support; runners execute sequentially
    } else if cfg.threads == 0 {
        runners
    } else {
        cfg.threads.min(runners)
    };

    let mut outcomes: Vec<RunnerOutcome>;
    if threads <= 1 {
        outcomes = (0..runners).map(|r| run_runner(r, init, cfg)).collect();
    } else {
        let collected: Vec<Vec<RunnerOutcome>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    scope.spawn(move || {
                        (t..runners)
                            .step_by(threads)
                            .map(|r| run_runner(r, init, cfg))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("runner panicked")).collect()
        });
        outcomes = collected.into_iter().flatten().collect();
        outcomes.sort_by_key(|o| o.runner);
    }

    let mut best: BTreeMap<Dims, Scheme> = BTreeMap::new();
    let mut improvements = Vec::new();
    let mut total_iterations = 0;
    for outcome in outcomes {
        total_iterations += outcome.iterations;
        improvements.extend(outcome.improvements);
        for (dims, scheme) in outcome.best {
            let keep = match best.get(&dims) {
                Some(existing) => scheme.rank() < existing.rank(),
                None => true,
            };
            if keep {
                best.insert(dims, scheme);
            }
        }
    }
    for scheme in best.values() {
        assert!(scheme.verify(), "reported scheme fails verification");
    }
    Ok(SearchReport { best, improvements, total_iterations, wall_time: started.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;

    fn naive(m: usize, n: usize, p: usize, ring: Ring) -> Scheme {
        Scheme::naive(Dims::new(m, n, p).unwrap(), ring)
    }

    #[test]
    fn rng_reference_trace() {
        // Frozen outputs of the deterministic generator for seed 42. A port
        // that wants trajectory-level compatibility must match these.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let got: Vec<u64> = (0..4).map(|_| rng.random()).collect();
        assert_eq!(
            got,
            vec![
                12578764544318200737,
                17529487244874322312,
                7886285670807131020,
                11572758976476374866
            ]
        );
    }

    #[test]
    fn pool_is_bounded_and_evicts_oldest() {
        let s = Scheme::strassen();
        let mut pool = ImprovementPool::new(3, std::slice::from_ref(&s));
        assert_eq!(pool.len(), 1);
        for _ in 0..5 {
            pool.push(s.clone());
        }
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn search_222_z2_reaches_rank_seven() {
        let cfg = WalkConfig {
            seed: 1,
            runners: 2,
            max_iterations: 200_000,
            target_rank: Some(7),
            ..WalkConfig::default()
        };
        let init = [naive(2, 2, 2, Ring::Z2)];
        let report = run_search(&init, &cfg).unwrap();
        assert_eq!(report.best_rank(Dims { m: 2, n: 2, p: 2 }), Some(7));
    }

    #[test]
    fn identical_configs_give_identical_reports() {
        let cfg = WalkConfig {
            seed: 99,
            runners: 3,
            max_iterations: 8_000,
            ..WalkConfig::default()
        };
        let init = [naive(2, 2, 2, Ring::Zt)];
        let a = run_search(&init, &cfg).unwrap();
        let b = run_search(&init, &cfg).unwrap();
        assert_eq!(a.render(), b.render());
        let threaded = WalkConfig { threads: 3, ..cfg };
        let c = run_search(&init, &threaded).unwrap();
        assert_eq!(a.render(), c.render());
        for (dims, scheme) in &a.best {
            assert_eq!(c.best[dims], *scheme);
        }
    }

    #[test]
    fn forced_expand_bounds_consecutive_flips() {
        let cfg = WalkConfig {
            seed: 5,
            flips_limit_min: 10,
            flips_limit_max: 20,
            max_iterations: 5_000,
            reduce_probability: 0.0,
            sandwich_probability: 0.0,
            ..WalkConfig::default()
        };
        let init = [naive(2, 2, 2, Ring::Z2)];
        let mut state = RunnerState::new(0, &init, &cfg);
        for _ in 0..5_000 {
            walk_step(&mut state, &cfg);
            assert!(state.flips_count <= state.flip_threshold);
            assert!(state.flip_threshold >= 10 && state.flip_threshold <= 20);
        }
    }

    #[test]
    fn improvements_are_monotone_per_dims() {
        let cfg = WalkConfig {
            seed: 3,
            runners: 1,
            max_iterations: 40_000,
            ..WalkConfig::default()
        };
        let init = [naive(2, 2, 2, Ring::Z2)];
        let report = run_search(&init, &cfg).unwrap();
        let mut last: BTreeMap<Dims, usize> = BTreeMap::new();
        for imp in &report.improvements {
            if let Some(&prev) = last.get(&imp.dims) {
                assert!(imp.rank < prev);
            }
            last.insert(imp.dims, imp.rank);
        }
    }

    #[test]
    fn meta_probability_zero_matches_fixed_dims() {
        let base =
            WalkConfig { seed: 7, runners: 1, max_iterations: 20_000, ..WalkConfig::default() };
        let meta = WalkConfig { meta_probability: 0.0, ..base.clone() };
        let init = [naive(2, 2, 2, Ring::Z2)];
        let a = run_search(&init, &base).unwrap();
        let b = run_search(&init, &meta).unwrap();
        assert_eq!(a.render(), b.render());
    }

    #[test]
    fn meta_search_changes_dims_but_stays_sound() {
        let cfg = WalkConfig {
            seed: 11,
            runners: 1,
            max_iterations: 2_000,
            meta_probability: 0.3,
            flips_limit_min: 20,
            flips_limit_max: 50,
            ..WalkConfig::default()
        };
        let init = [naive(2, 2, 2, Ring::Z2)];
        let report = run_search(&init, &cfg).unwrap();
        for scheme in report.best.values() {
            assert!(scheme.verify());
        }
    }

    #[test]
    fn resets_fall_back_to_the_initial_scheme() {
        // Strassen admits no flips, so every step is an expansion attempt
        // and no improvement is ever recorded: the pool holds only the
        // initial scheme and each reset must restore it exactly.
        let cfg = WalkConfig {
            seed: 13,
            reset_limit: 20,
            flips_limit_min: 5,
            flips_limit_max: 10,
            max_iterations: 500,
            ..WalkConfig::default()
        };
        let init = [Scheme::strassen()];
        let mut state = RunnerState::new(0, &init, &cfg);
        let mut resets = 0;
        for _ in 0..500 {
            let before = state.iterations_count;
            walk_step(&mut state, &cfg);
            if state.iterations_count == 0 && before >= cfg.reset_limit - 1 {
                resets += 1;
                assert_eq!(state.current, init[0]);
            }
        }
        assert!(resets > 0, "expected at least one reset");
        assert_eq!(state.best_by_dims[&init[0].dims()].rank(), 7);
    }

    #[test]
    fn z3_search_reaches_rank_seven() {
        let cfg = WalkConfig {
            seed: 2,
            runners: 2,
            max_iterations: 300_000,
            target_rank: Some(7),
            ..WalkConfig::default()
        };
        let init = [naive(2, 2, 2, Ring::Z3)];
        let report = run_search(&init, &cfg).unwrap();
        assert_eq!(report.best_rank(Dims { m: 2, n: 2, p: 2 }), Some(7));
        assert!(report.best[&Dims { m: 2, n: 2, p: 2 }].verify());
    }

    #[test]
    fn report_lines_have_the_documented_shape() {
        let cfg = WalkConfig { seed: 1, max_iterations: 50_000, ..WalkConfig::default() };
        let report = run_search(&[naive(2, 2, 2, Ring::Z2)], &cfg).unwrap();
        let text = report.render();
        let first = text
            .lines()
            .find(|l| !l.starts_with('#'))
            .expect("at least one improvement line");
        // dims rank ring runner iteration
        let fields: Vec<&str> = first.split_whitespace().collect();
        assert_eq!(fields.len(), 5, "{first}");
        assert_eq!(fields[0], "2x2x2");
        assert_eq!(fields[2], "z2");
    }

    #[test]
    fn rejects_invalid_init() {
        let mut bad = Scheme::strassen();
        let c = bad.components_mut()[0];
        bad.components_mut()[0].u = c.u.neg();
        assert!(matches!(
            run_search(&[bad], &WalkConfig::default()),
            Err(SearchError::InitInvalid(0))
        ));
        assert!(matches!(run_search(&[], &WalkConfig::default()), Err(SearchError::NoInit)));
    }
}
