//! Block matrix multiplication constructions and composition pipelines.
//!
//! A base scheme dictates how blocks of the operands combine; every base
//! multiplication becomes one sub-scheme drawn from a library, and the
//! target rank is the sum of the sub-scheme ranks. The effective dimensions
//! of each block multiplication are bounded per axis by the smaller of the
//! two sides that interact through it: zeros beyond a block boundary
//! contribute nothing, and products that land outside the written blocks
//! are discarded, so the smaller bound is always sufficient.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::io::{parse_scheme, IoError};
use crate::meta::{self, MetaError};
use crate::ring::{CoeffVec, Ring};
use crate::scheme::{Component, Dims, Scheme, SchemeError};

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),
    #[error("library has no scheme for dims {}", format_dims_list(.0))]
    MissingSubScheme(Vec<Dims>),
    #[error("library entry {0} fails verification")]
    LibraryInvalid(String),
    #[error("expression error: {0}")]
    Expr(String),
    #[error(transparent)]
    Meta(#[from] MetaError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Io(#[from] IoError),
}

fn format_dims_list(dims: &[Dims]) -> String {
    dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
}

/// Ordered block sizes along each dimension; the counts must equal the base
/// scheme's dims and the sums the target dims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub m_sizes: Vec<usize>,
    pub n_sizes: Vec<usize>,
    pub p_sizes: Vec<usize>,
}

impl Partition {
    /// Parses `"2,2x3,4x7,8"` into the three block-size lists.
    pub fn parse(text: &str) -> Result<Partition, ComposeError> {
        let groups: Vec<&str> = text.split('x').collect();
        if groups.len() != 3 {
            return Err(ComposeError::PartitionMismatch(format!(
                "expected three x-separated groups, got {text:?}"
            )));
        }
        let parse_group = |g: &str| -> Result<Vec<usize>, ComposeError> {
            g.split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|_| {
                        ComposeError::PartitionMismatch(format!("invalid block size {tok:?}"))
                    })
                })
                .collect()
        };
        Ok(Partition {
            m_sizes: parse_group(groups[0])?,
            n_sizes: parse_group(groups[1])?,
            p_sizes: parse_group(groups[2])?,
        })
    }

    fn validate(&self, target: Dims, base: Dims) -> Result<(), ComposeError> {
        let check = |sizes: &[usize], count: usize, sum: usize, axis: &str| {
            if sizes.len() != count {
                return Err(ComposeError::PartitionMismatch(format!(
                    "{axis}: {} blocks, base scheme expects {count}",
                    sizes.len()
                )));
            }
            if sizes.iter().any(|&s| s == 0) {
                return Err(ComposeError::PartitionMismatch(format!("{axis}: zero block size")));
            }
            if sizes.iter().sum::<usize>() != sum {
                return Err(ComposeError::PartitionMismatch(format!(
                    "{axis}: block sizes sum to {}, target needs {sum}",
                    sizes.iter().sum::<usize>()
                )));
            }
            Ok(())
        };
        check(&self.m_sizes, base.m, target.m, "m")?;
        check(&self.n_sizes, base.n, target.n, "n")?;
        check(&self.p_sizes, base.p, target.p, "p")
    }
}

/// Scheme store keyed by dims, with rank-only stub entries for planning.
/// Lookup is rotation-aware: a request may be served by cyclically rotating
/// a stored scheme.
#[derive(Debug, Default)]
pub struct SchemeLibrary {
    schemes: BTreeMap<Dims, Scheme>,
    stubs: BTreeMap<Dims, usize>,
}

impl SchemeLibrary {
    pub fn new() -> SchemeLibrary {
        SchemeLibrary::default()
    }

    /// Keeps the lowest-rank scheme per dims key.
    pub fn insert(&mut self, s: Scheme) {
        let dims = s.dims();
        match self.schemes.get(&dims) {
            Some(existing) if existing.rank() <= s.rank() => {}
            _ => {
                self.schemes.insert(dims, s);
            }
        }
    }

    /// Registers a known rank without a scheme (planning only).
    pub fn insert_stub(&mut self, dims: Dims, rank: usize) {
        match self.stubs.get(&dims) {
            Some(&existing) if existing <= rank => {}
            _ => {
                self.stubs.insert(dims, rank);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.schemes.len() + self.stubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemes.is_empty() && self.stubs.is_empty()
    }

    /// Recursively loads every `*.scheme` file under `dir`. Entries must
    /// verify.
    pub fn load_dir(&mut self, dir: impl AsRef<Path>) -> Result<usize, ComposeError> {
        fn walk(
            lib: &mut SchemeLibrary,
            dir: &Path,
            loaded: &mut usize,
        ) -> Result<(), ComposeError> {
            let mut entries: Vec<_> =
                std::fs::read_dir(dir).map_err(IoError::from)?.collect::<Result<_, _>>()
                    .map_err(IoError::from)?;
            entries.sort_by_key(|e| e.path());
            for entry in entries {
                let path = entry.path();
                if path.is_dir() {
                    walk(lib, &path, loaded)?;
                } else if path.extension().is_some_and(|e| e == "scheme") {
                    let text = std::fs::read_to_string(&path).map_err(IoError::from)?;
                    let s = parse_scheme(&text)?;
                    if !s.verify() {
                        return Err(ComposeError::LibraryInvalid(path.display().to_string()));
                    }
                    lib.insert(s);
                    *loaded += 1;
                }
            }
            Ok(())
        }
        let mut loaded = 0;
        walk(self, dir.as_ref(), &mut loaded)?;
        Ok(loaded)
    }

    /// Loads a rank manifest: lines of `m n p rank`, `#` comments allowed.
    pub fn load_manifest(&mut self, text: &str) -> Result<usize, ComposeError> {
        let mut loaded = 0;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed: Option<Vec<usize>> =
                fields.iter().map(|f| f.parse::<usize>().ok()).collect();
            match parsed.as_deref() {
                Some([m, n, p, rank]) => {
                    let dims = Dims::new(*m, *n, *p).map_err(|e| {
                        ComposeError::Expr(format!("manifest line {}: {e}", idx + 1))
                    })?;
                    self.insert_stub(dims, *rank);
                    loaded += 1;
                }
                _ => {
                    return Err(ComposeError::Expr(format!(
                        "manifest line {}: expected `m n p rank`",
                        idx + 1
                    )))
                }
            }
        }
        Ok(loaded)
    }

    fn rotations(dims: Dims) -> [(Dims, usize); 3] {
        // (stored key, rotations to bring the stored scheme onto the request)
        let r1 = dims.rotated();
        let r2 = r1.rotated();
        [(dims, 0), (r1, 2), (r2, 1)]
    }

    /// Best known rank for these dims, scheme or stub, up to rotation.
    pub fn rank_for(&self, dims: Dims) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (key, _) in Self::rotations(dims) {
            if let Some(s) = self.schemes.get(&key) {
                best = Some(best.map_or(s.rank(), |b: usize| b.min(s.rank())));
            }
            if let Some(&r) = self.stubs.get(&key) {
                best = Some(best.map_or(r, |b: usize| b.min(r)));
            }
        }
        best
    }

    /// Lowest-rank stored scheme for these dims, rotated into the requested
    /// orientation.
    pub fn lookup(&self, dims: Dims) -> Option<Scheme> {
        let mut best: Option<Scheme> = None;
        for (key, rot) in Self::rotations(dims) {
            if let Some(s) = self.schemes.get(&key) {
                if best.as_ref().is_none_or(|b| s.rank() < b.rank()) {
                    let mut out = s.clone();
                    for _ in 0..rot {
                        out = out.rotate();
                    }
                    best = Some(out);
                }
            }
        }
        best
    }
}

/// One planned block multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedMult {
    pub dims: Dims,
    pub rank: usize,
}

/// The rank budget of a block construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    pub target: Dims,
    pub multiplications: Vec<PlannedMult>,
    pub total_rank: usize,
}

impl BlockPlan {
    /// Structured text: target, total, then one line per multiplication.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "target {} rank {}", self.target, self.total_rank);
        for (idx, mult) in self.multiplications.iter().enumerate() {
            let _ = writeln!(out, "m{} {} {}", idx + 1, mult.dims, mult.rank);
        }
        out
    }
}

fn touched(grid: &CoeffVec, rows: usize, cols: usize) -> (Vec<usize>, Vec<usize>) {
    let mut touched_rows = Vec::new();
    let mut touched_cols = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if grid.get(i * cols + j) != 0 {
                if !touched_rows.contains(&i) {
                    touched_rows.push(i);
                }
                if !touched_cols.contains(&j) {
                    touched_cols.push(j);
                }
            }
        }
    }
    (touched_rows, touched_cols)
}

fn max_size(sizes: &[usize], idx: &[usize]) -> usize {
    idx.iter().map(|&i| sizes[i]).max().unwrap_or(0)
}

/// Computes, for every multiplication of the base scheme, the dims of the
/// sub-scheme it needs and the rank the library provides for it.
pub fn plan_blocks(
    target: Dims,
    partition: &Partition,
    base: &Scheme,
    lib: &SchemeLibrary,
) -> Result<BlockPlan, ComposeError> {
    partition.validate(target, base.dims())?;
    let bd = base.dims();
    let mut multiplications = Vec::with_capacity(base.rank());
    let mut missing = Vec::new();
    for comp in base.components() {
        // Which blocks each tensor touches: u over (m-blocks x n-blocks),
        // v over (n x p), w over (p x m).
        let (u_rows, u_cols) = touched(&comp.u, bd.m, bd.n);
        let (v_rows, v_cols) = touched(&comp.v, bd.n, bd.p);
        let (w_rows, w_cols) = touched(&comp.w, bd.p, bd.m);
        let m_l = max_size(&partition.m_sizes, &u_rows).min(max_size(&partition.m_sizes, &w_cols));
        let n_l = max_size(&partition.n_sizes, &u_cols).min(max_size(&partition.n_sizes, &v_rows));
        let p_l = max_size(&partition.p_sizes, &v_cols).min(max_size(&partition.p_sizes, &w_rows));
        let dims = Dims { m: m_l, n: n_l, p: p_l };
        match lib.rank_for(dims) {
            Some(rank) => multiplications.push(PlannedMult { dims, rank }),
            None => missing.push(dims),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(ComposeError::MissingSubScheme(missing));
    }
    let total_rank = multiplications.iter().map(|m| m.rank).sum();
    Ok(BlockPlan { target, multiplications, total_rank })
}

/// Either a full scheme (target fits the encoding limits) or a rank report.
#[derive(Debug)]
pub enum ComposeOutcome {
    Materialized(Scheme),
    Report(BlockPlan),
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for &s in sizes {
        out.push(acc);
        acc += s;
    }
    out
}

fn ring_mul(a: i64, b: i64, ring: Ring) -> i64 {
    match ring {
        Ring::Z2 => (a * b).rem_euclid(2),
        Ring::Z3 => (a * b).rem_euclid(3),
        Ring::Zt => a * b,
    }
}

/// Builds the block construction. If the target dims fit the 128-entry
/// encoding limit the full scheme is materialized and verified; otherwise
/// the rank report is returned.
pub fn compose(
    target: Dims,
    partition: &Partition,
    base: &Scheme,
    lib: &SchemeLibrary,
) -> Result<ComposeOutcome, ComposeError> {
    let plan = plan_blocks(target, partition, base, lib)?;
    if Dims::new(target.m, target.n, target.p).is_err() {
        return Ok(ComposeOutcome::Report(plan));
    }

    // Materialization needs actual schemes, not stubs.
    let mut subs = Vec::with_capacity(plan.multiplications.len());
    let mut missing = Vec::new();
    for mult in &plan.multiplications {
        match lib.lookup(mult.dims) {
            Some(s) if s.ring() == base.ring() => subs.push(s),
            _ => missing.push(mult.dims),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(ComposeError::MissingSubScheme(missing));
    }

    let ring = base.ring();
    let bd = base.dims();
    let m_off = offsets(&partition.m_sizes);
    let n_off = offsets(&partition.n_sizes);
    let p_off = offsets(&partition.p_sizes);
    let mut components = Vec::with_capacity(plan.total_rank);
    for (comp, sub) in base.components().iter().zip(&subs) {
        let sd = sub.dims();
        for t in sub.components() {
            let mut u = vec![0i64; target.m * target.n];
            let mut v = vec![0i64; target.n * target.p];
            let mut w = vec![0i64; target.p * target.m];
            // u: base block (bi, bk) scales the sub-scheme's A combination
            for bi in 0..bd.m {
                for bk in 0..bd.n {
                    let c = comp.u.get(bi * bd.n + bk) as i64;
                    if c == 0 {
                        continue;
                    }
                    for x in 0..sd.m.min(partition.m_sizes[bi]) {
                        for y in 0..sd.n.min(partition.n_sizes[bk]) {
                            let val = t.u.get(x * sd.n + y) as i64;
                            if val != 0 {
                                u[(m_off[bi] + x) * target.n + (n_off[bk] + y)] =
                                    ring_mul(c, val, ring);
                            }
                        }
                    }
                }
            }
            for bk in 0..bd.n {
                for bj in 0..bd.p {
                    let c = comp.v.get(bk * bd.p + bj) as i64;
                    if c == 0 {
                        continue;
                    }
                    for y in 0..sd.n.min(partition.n_sizes[bk]) {
                        for z in 0..sd.p.min(partition.p_sizes[bj]) {
                            let val = t.v.get(y * sd.p + z) as i64;
                            if val != 0 {
                                v[(n_off[bk] + y) * target.p + (p_off[bj] + z)] =
                                    ring_mul(c, val, ring);
                            }
                        }
                    }
                }
            }
            for bj in 0..bd.p {
                for bi in 0..bd.m {
                    let c = comp.w.get(bj * bd.m + bi) as i64;
                    if c == 0 {
                        continue;
                    }
                    for z in 0..sd.p.min(partition.p_sizes[bj]) {
                        for x in 0..sd.m.min(partition.m_sizes[bi]) {
                            let val = t.w.get(z * sd.m + x) as i64;
                            if val != 0 {
                                w[(p_off[bj] + z) * target.m + (m_off[bi] + x)] =
                                    ring_mul(c, val, ring);
                            }
                        }
                    }
                }
            }
            let comp_out = Component {
                u: CoeffVec::encode(&u, ring).map_err(SchemeError::from)?,
                v: CoeffVec::encode(&v, ring).map_err(SchemeError::from)?,
                w: CoeffVec::encode(&w, ring).map_err(SchemeError::from)?,
            };
            if !comp_out.has_zero_row() {
                components.push(comp_out);
            }
        }
    }
    let scheme = Scheme::new(target, ring, components)?;
    if !scheme.verify() {
        return Err(ComposeError::Expr(format!(
            "composed scheme for {target} fails verification"
        )));
    }
    Ok(ComposeOutcome::Materialized(scheme))
}

/// Evaluates a composition expression over scheme files:
/// `load(path)`, `merge(a, b)`, `product(a, b)`, `extend(a)`, `rotate(a)`.
pub fn pipeline(expr: &str) -> Result<Scheme, ComposeError> {
    let mut parser = ExprParser { text: expr, pos: 0 };
    let scheme = parser.parse_expr()?;
    parser.skip_ws();
    if parser.pos != parser.text.len() {
        return Err(ComposeError::Expr(format!(
            "trailing input at byte {}: {:?}",
            parser.pos,
            &parser.text[parser.pos..]
        )));
    }
    if !scheme.verify() {
        return Err(ComposeError::Expr("pipeline result fails verification".into()));
    }
    Ok(scheme)
}

struct ExprParser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ComposeError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(ComposeError::Expr(format!("expected {c:?} at byte {}", self.pos)))
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..]
            .starts_with(|c: char| c.is_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        self.text[start..self.pos].to_string()
    }

    fn path_argument(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && !")".contains(&self.text[self.pos..self.pos + 1]) {
            self.pos += 1;
        }
        self.text[start..self.pos].trim().to_string()
    }

    fn parse_expr(&mut self) -> Result<Scheme, ComposeError> {
        let name = self.ident();
        self.expect('(')?;
        let out = match name.as_str() {
            "load" => {
                let path = self.path_argument();
                if path.is_empty() {
                    return Err(ComposeError::Expr("load() needs a file path".into()));
                }
                crate::io::read_scheme(&path)?
            }
            "merge" => {
                let a = self.parse_expr()?;
                self.expect(',')?;
                let b = self.parse_expr()?;
                meta::merge(&a, &b)?
            }
            "product" => {
                let a = self.parse_expr()?;
                self.expect(',')?;
                let b = self.parse_expr()?;
                meta::product(&a, &b)?
            }
            "extend" => {
                let a = self.parse_expr()?;
                meta::extend(&a)?
            }
            "rotate" => {
                let a = self.parse_expr()?;
                a.rotate()
            }
            other => {
                return Err(ComposeError::Expr(format!(
                    "unknown operator {other:?} (expected load/merge/product/extend/rotate)"
                )))
            }
        };
        self.expect(')')?;
        Ok(out)
    }
}
