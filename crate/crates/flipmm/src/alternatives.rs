//! Generation of distinct same-dimension, same-rank schemes from a seed
//! scheme, by randomized flips, sandwiching and rank excursions
//! (expand, walk, reduce back). Candidates are only emitted while the walk
//! sits at the baseline rank, and distinctness means inequality of the
//! sign-normalized component multisets.

use std::collections::BTreeSet;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flip::{
    eligible_flips, eligible_reductions, expand_in_place, flip_in_place, reduce_in_place,
    sandwich_in_place, SandwichTriple,
};
use crate::ring::CoeffVec;
use crate::scheme::Scheme;

#[derive(Debug, Clone)]
pub struct AlternativesOptions {
    /// Up to this many distinct schemes are returned.
    pub count: usize,
    pub seed: u64,
    /// Walk steps per worker.
    pub step_budget: u64,
    /// Parallel workers; worker `i` is seeded with `seed + i`.
    pub workers: usize,
}

impl Default for AlternativesOptions {
    fn default() -> Self {
        AlternativesOptions { count: 5, seed: 0, step_budget: 20_000, workers: 1 }
    }
}

type MultisetKey = Vec<(CoeffVec, CoeffVec, CoeffVec)>;

fn worker_walk(
    input: &Scheme,
    baseline_key: &MultisetKey,
    worker: usize,
    opts: &AlternativesOptions,
) -> Vec<(MultisetKey, Scheme)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(worker as u64));
    let baseline_rank = input.rank();
    let mut current = input.clone();
    let mut at_baseline = current.clone();
    let mut found: Vec<(MultisetKey, Scheme)> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut steps = 0u64;
    while steps < opts.step_budget && found.len() < opts.count {
        steps += 1;
        let action = rng.random_range(0..10u32);
        if action < 3 {
            let t = SandwichTriple::random(current.dims(), current.ring(), &mut rng);
            sandwich_in_place(&mut current, &t);
        } else if action < 5 {
            // Excursion: one expansion, then flips with reduction attempts
            // until the baseline rank is regained or the excursion is
            // abandoned.
            if expand_in_place(&mut current, &mut rng).is_err() {
                continue;
            }
            let mut recovered = false;
            for _ in 0..60 {
                steps += 1;
                let cands = eligible_flips(&current);
                if !cands.is_empty() {
                    let (i, j, axis) = cands[rng.random_range(0..cands.len())];
                    let _ = flip_in_place(&mut current, i, j, axis);
                }
                let mut reds = eligible_reductions(&current);
                while current.rank() > baseline_rank && !reds.is_empty() {
                    let pick = rng.random_range(0..reds.len());
                    let (i, j, axis) = reds.swap_remove(pick);
                    if i < current.rank() && j < current.rank() {
                        let _ = reduce_in_place(&mut current, i, j, axis);
                        reds = eligible_reductions(&current);
                    }
                }
                if current.rank() <= baseline_rank {
                    recovered = current.rank() == baseline_rank;
                    break;
                }
            }
            if !recovered {
                current = at_baseline.clone();
                continue;
            }
        } else {
            let cands = eligible_flips(&current);
            if cands.is_empty() {
                continue;
            }
            let (i, j, axis) = cands[rng.random_range(0..cands.len())];
            if flip_in_place(&mut current, i, j, axis).is_err() {
                continue;
            }
            if current.rank() != baseline_rank {
                // a cancellation cascade dropped below baseline; restart
                current = at_baseline.clone();
                continue;
            }
        }
        if current.rank() == baseline_rank {
            at_baseline = current.clone();
            let key = current.canonical_components();
            if key != *baseline_key && !seen.contains(&key) {
                debug_assert!(current.verify());
                seen.insert(key.clone());
                found.push((key, current.clone()));
            }
        }
    }
    found
}

/// Produces up to `count` verifying schemes with the dims and rank of the
/// input, pairwise distinct (and distinct from the input) as normalized
/// component multisets. Fewer may be returned within the step budget.
pub fn alternatives(input: &Scheme, opts: &AlternativesOptions) -> Vec<Scheme> {
    if opts.count == 0 {
        return Vec::new();
    }
    let baseline_key = input.canonical_components();
    let workers = if cfg!(target_arch = "wasm32") { 1 } else { opts.workers.max(1) };
    let per_worker: Vec<Vec<(MultisetKey, Scheme)>> = if workers == 1 {
        vec![worker_walk(input, &baseline_key, 0, opts)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let key = &baseline_key;
                    scope.spawn(move || worker_walk(input, key, w, opts))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for worker_found in per_worker {
        for (key, scheme) in worker_found {
            if out.len() == opts.count {
                break;
            }
            if seen.insert(key) {
                out.push(scheme);
            }
        }
    }
    out
}
