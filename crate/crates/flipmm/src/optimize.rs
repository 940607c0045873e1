//! Flip-only optimization of a fixed-rank scheme under a selectable metric.
//!
//! Hill climbing with sideways moves: a uniformly chosen flip is kept iff
//! it does not worsen the metric (equal-metric moves are accepted with a
//! configurable probability to cross plateaus). Flips whose cancellation
//! cascade would change the rank are rejected, so rank and dims are
//! invariant.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flip::{eligible_flips, flip};
use crate::scheme::Scheme;

/// What the optimizer scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Total zero coefficients: a proxy for the additive cost of the
    /// scheme's linear phases.
    ZeroCount,
    /// Number of row-sharing component pairs: how many flips are available.
    FlipPotential,
}

impl Metric {
    fn eval(self, s: &Scheme) -> i64 {
        match self {
            Metric::ZeroCount => s.zero_count() as i64,
            Metric::FlipPotential => s.flip_potential() as i64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub metric: Metric,
    pub direction: Direction,
    /// Attempted flips.
    pub budget: u64,
    pub seed: u64,
    /// Chance of accepting an equal-metric move.
    pub sideways_probability: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            metric: Metric::ZeroCount,
            direction: Direction::Maximize,
            budget: 10_000,
            seed: 0,
            sideways_probability: 0.5,
        }
    }
}

/// Returns a verifying scheme of equal rank and dims whose metric is at
/// least as good as the input's.
pub fn optimize(s: &Scheme, opts: &OptimizeOptions) -> Scheme {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut current = s.clone();
    let mut score = opts.metric.eval(&current);
    for _ in 0..opts.budget {
        let cands = eligible_flips(&current);
        if cands.is_empty() {
            break;
        }
        let (i, j, axis) = cands[rng.random_range(0..cands.len())];
        let Ok(candidate) = flip(&current, i, j, axis) else { continue };
        if candidate.rank() != current.rank() {
            continue; // a cascade fired; rank must stay fixed here
        }
        let cand_score = opts.metric.eval(&candidate);
        let better = match opts.direction {
            Direction::Maximize => cand_score > score,
            Direction::Minimize => cand_score < score,
        };
        let accept = better
            || (cand_score == score
                && opts.sideways_probability > 0.0
                && rng.random_bool(opts.sideways_probability));
        if accept {
            current = candidate;
            score = cand_score;
        }
    }
    current
}
