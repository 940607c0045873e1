//! Browser bindings for the scheme toolkit: inspect a scheme, run a seeded
//! mini-search and watch the rank descend, or lift a modular scheme to
//! exact coefficients. All entry points take and return plain strings
//! (scheme text in, JSON out) so the page stays framework-free.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use flipmm::io::{parse_scheme, render_rational_scheme, render_scheme};
use flipmm::lift::{lift, LiftOptions};
use flipmm::search::{run_search, WalkConfig};
use flipmm::{Dims, Ring, Scheme};

#[derive(Serialize)]
struct ComponentOut {
    u: Vec<i8>,
    v: Vec<i8>,
    w: Vec<i8>,
}

#[derive(Serialize)]
struct StatsOut {
    m: usize,
    n: usize,
    p: usize,
    ring: String,
    rank: usize,
    exponent: f64,
    zero_count: usize,
    flip_potential: usize,
    valid: bool,
    components: Vec<ComponentOut>,
}

fn stats_json(s: &Scheme) -> Result<String, JsError> {
    let metrics = s.metrics();
    let out = StatsOut {
        m: s.dims().m,
        n: s.dims().n,
        p: s.dims().p,
        ring: s.ring().name().to_string(),
        rank: metrics.rank,
        exponent: metrics.exponent,
        zero_count: metrics.zero_count,
        flip_potential: metrics.flip_potential,
        valid: s.verify(),
        components: s
            .components()
            .iter()
            .map(|c| ComponentOut { u: c.u.decode(), v: c.v.decode(), w: c.w.decode() })
            .collect(),
    };
    Ok(serde_json::to_string(&out)?)
}

/// Parses a scheme file and returns its metrics, verification status and
/// decoded coefficient grids as JSON.
#[wasm_bindgen]
pub fn scheme_stats(text: &str) -> Result<String, JsError> {
    let s = parse_scheme(text).map_err(|e| JsError::new(&e.to_string()))?;
    stats_json(&s)
}

/// The bundled seven-product 2x2x2 scheme, in file format.
#[wasm_bindgen]
pub fn preset_strassen() -> String {
    render_scheme(&Scheme::strassen())
}

/// The naive scheme for the given shape, in file format.
#[wasm_bindgen]
pub fn preset_naive(m: usize, n: usize, p: usize, ring: &str) -> Result<String, JsError> {
    let ring = Ring::parse(ring).ok_or_else(|| JsError::new("ring must be z2, z3 or zt"))?;
    let dims = Dims::new(m, n, p).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(render_scheme(&Scheme::naive(dims, ring)))
}

#[derive(Serialize)]
struct TrajectoryPoint {
    iteration: u64,
    rank: usize,
    runner: usize,
}

#[derive(Serialize)]
struct SearchOut {
    start_rank: usize,
    best_rank: usize,
    exponent: f64,
    iterations: u64,
    trajectory: Vec<TrajectoryPoint>,
    best_scheme: String,
}

/// Runs a seeded random-walk search from the naive scheme and returns the
/// improvement trajectory plus the best scheme found, as JSON. Runners
/// execute sequentially in the browser; identical parameters give
/// identical results.
#[wasm_bindgen]
pub fn search_demo(
    m: usize,
    n: usize,
    p: usize,
    ring: &str,
    seed: u32,
    runners: u32,
    max_iterations: u32,
    target_rank: u32,
) -> Result<String, JsError> {
    let ring = Ring::parse(ring).ok_or_else(|| JsError::new("ring must be z2, z3 or zt"))?;
    let dims = Dims::new(m, n, p).map_err(|e| JsError::new(&e.to_string()))?;
    if dims.volume() > 64 {
        return Err(JsError::new("demo searches are limited to m*n*p <= 64"));
    }
    let start = Scheme::naive(dims, ring);
    let cfg = WalkConfig {
        seed: u64::from(seed),
        runners: runners.clamp(1, 8) as usize,
        max_iterations: u64::from(max_iterations.min(2_000_000)),
        target_rank: (target_rank > 0).then_some(target_rank as usize),
        threads: 1,
        ..WalkConfig::default()
    };
    let start_rank = start.rank();
    let report = run_search(&[start], &cfg).map_err(|e| JsError::new(&e.to_string()))?;
    let best = report.best.get(&dims).ok_or_else(|| JsError::new("no scheme found"))?;
    let out = SearchOut {
        start_rank,
        best_rank: best.rank(),
        exponent: best.exponent(),
        iterations: report.total_iterations,
        trajectory: report
            .improvements
            .iter()
            .map(|imp| TrajectoryPoint {
                iteration: imp.iteration,
                rank: imp.rank,
                runner: imp.runner,
            })
            .collect(),
        best_scheme: render_scheme(best),
    };
    Ok(serde_json::to_string(&out)?)
}

#[derive(Serialize)]
struct LiftOut {
    classification: String,
    levels_used: u32,
    rank: usize,
    scheme: String,
}

/// Hensel-lifts a z2/z3 scheme to exact coefficients and returns the
/// classification and the lifted scheme text as JSON.
#[wasm_bindgen]
pub fn lift_demo(text: &str, guided: bool, max_levels: u32) -> Result<String, JsError> {
    let s = parse_scheme(text).map_err(|e| JsError::new(&e.to_string()))?;
    let opts = LiftOptions { guided, max_levels: max_levels.min(40), free_var_seed: None };
    let outcome = lift(&s, &opts).map_err(|e| JsError::new(&e.to_string()))?;
    let out = LiftOut {
        classification: outcome.classification.name().to_string(),
        levels_used: outcome.levels_used,
        rank: outcome.scheme.rank(),
        scheme: render_rational_scheme(&outcome.scheme),
    };
    Ok(serde_json::to_string(&out)?)
}
