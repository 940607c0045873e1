//! Hensel lifting of modular schemes to exact integer or rational
//! coefficients.
//!
//! A scheme valid mod `p^k` is promoted to one valid mod `p^(k+1)` by
//! solving one linear correction system per level: the Jacobian of the
//! correctness equations, evaluated at the scheme mod `p`, against the
//! residual scaled down by `p^k`. After every level, componentwise rational
//! reconstruction is attempted; a candidate is accepted only if it passes
//! exact rational verification.
//!
//! For `p = 2` a guided mode fixes correction digits whose two candidate
//! residues differ in reconstructibility (most effectively at the first
//! level, where the residue 2 mod 4 reconstructs to nothing), falling back
//! to the unconstrained solve when the constraints are infeasible.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ring::Ring;
use crate::scheme::{Dims, Scheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("input scheme must be over z2 or z3")]
    NotModular,
    #[error("input scheme fails verification")]
    InitInvalid,
    #[error("residual is not divisible by the modulus at level {0}")]
    ResidualInvariant(u32),
    #[error("correction system has no solution at level {0}")]
    NoSolution(u32),
    #[error("no verifying rational reconstruction within {0} levels")]
    Exhausted(u32),
}

/// How coefficients compare to the practical rings: ternary integers,
/// general integers, or true fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Zt,
    Z,
    Q,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Zt => "zt",
            Classification::Z => "z",
            Classification::Q => "q",
        }
    }
}

/// A scheme whose coefficients are residues mod `p^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftScheme {
    dims: Dims,
    prime: u8,
    level: u32,
    modulus: BigUint,
    // Flat coefficient store: component-major, u then v then w rows.
    coeffs: Vec<BigUint>,
    rank: usize,
}

impl LiftScheme {
    fn per_component(&self) -> usize {
        self.dims.u_len() + self.dims.v_len() + self.dims.w_len()
    }

    fn u_at(&self, l: usize, a: usize) -> &BigUint {
        &self.coeffs[l * self.per_component() + a]
    }

    fn v_at(&self, l: usize, b: usize) -> &BigUint {
        &self.coeffs[l * self.per_component() + self.dims.u_len() + b]
    }

    fn w_at(&self, l: usize, c: usize) -> &BigUint {
        &self.coeffs[l * self.per_component() + self.dims.u_len() + self.dims.v_len() + c]
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn prime(&self) -> u8 {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coeffs
    }

    #[cfg(test)]
    pub(crate) fn corrupt_coefficient(&mut self, index: usize) {
        self.coeffs[index] = (&self.coeffs[index] + BigUint::one()) % &self.modulus;
    }

    /// `T - U (x) V (x) W` over the integers, one entry per correctness
    /// equation, equations ordered `(a, b, c)` row-major.
    pub fn residual(&self) -> Vec<BigInt> {
        let d = self.dims;
        let (m, n, p) = (d.m, d.n, d.p);
        let mut out = Vec::with_capacity(d.u_len() * d.v_len() * d.w_len());
        for a in 0..d.u_len() {
            let (i1, i2) = (a / n, a % n);
            for b in 0..d.v_len() {
                let (j1, j2) = (b / p, b % p);
                for c in 0..d.w_len() {
                    let (k2, k1) = (c / m, c % m);
                    let delta = if i2 == j1 && i1 == k1 && j2 == k2 {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    };
                    let mut sum = BigInt::zero();
                    for l in 0..self.rank {
                        let term = self.u_at(l, a) * self.v_at(l, b);
                        if term.is_zero() {
                            continue;
                        }
                        sum += BigInt::from(term * self.w_at(l, c));
                    }
                    out.push(delta - sum);
                }
            }
        }
        out
    }

    /// True iff the residual vanishes mod the current modulus.
    pub fn residual_is_zero(&self) -> bool {
        let m = BigInt::from(self.modulus.clone());
        self.residual().iter().all(|r| r.mod_floor(&m).is_zero())
    }
}

/// Wraps a verified `Z2`/`Z3` scheme as the level-1 rung of the lifting
/// tower.
pub fn embed(s: &Scheme) -> Result<LiftScheme, LiftError> {
    let prime = match s.ring() {
        Ring::Z2 => 2u8,
        Ring::Z3 => 3,
        Ring::Zt => return Err(LiftError::NotModular),
    };
    if !s.verify() {
        return Err(LiftError::InitInvalid);
    }
    let mut coeffs = Vec::new();
    for comp in s.components() {
        for row in [&comp.u, &comp.v, &comp.w] {
            coeffs.extend(row.decode().iter().map(|&x| BigUint::from(x as u8)));
        }
    }
    Ok(LiftScheme {
        dims: s.dims(),
        prime,
        level: 1,
        modulus: BigUint::from(prime),
        coeffs,
        rank: s.rank(),
    })
}

/// The unique fraction `a/b` with `c * b = a (mod m)`,
/// `|a| <= floor(sqrt(m/2))`, `0 < b <= floor(sqrt(m/2))`, `gcd(a, b) = 1`
/// and `gcd(b, m) = 1`, when it exists.
pub fn rational_reconstruct(c: &BigUint, m: &BigUint) -> Option<BigRational> {
    let bound = BigInt::from((m / 2u8).sqrt());
    let mut r0 = BigInt::from(m.clone());
    let mut t0 = BigInt::zero();
    let mut r1 = BigInt::from(c.clone());
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let (mut a, mut b) = (r1, t1);
    if b.is_negative() {
        a = -a;
        b = -b;
    }
    if b.is_zero() || b > bound {
        return None;
    }
    if a.gcd(&b) != BigInt::one() || b.gcd(&BigInt::from(m.clone())) != BigInt::one() {
        return None;
    }
    Some(BigRational::new(a, b))
}

/// Free-variable policy for the underdetermined correction solves.
enum FreeVars {
    Zero,
    Random(ChaCha8Rng),
}

impl FreeVars {
    fn choose(&mut self, p: u8) -> u8 {
        match self {
            FreeVars::Zero => 0,
            FreeVars::Random(rng) => rng.random_range(0..p),
        }
    }
}

/// The linear correction system of one Hensel level: sparse Jacobian rows
/// (each correctness equation touches the `3r` unknowns of its coordinate
/// triple), the scaled residual as right-hand side, and optional fixed
/// digit assignments from the guided mode.
pub struct JacobianSystem {
    /// One sparse row of `(column, coefficient mod p)` per equation.
    rows: Vec<Vec<(usize, u8)>>,
    rhs: Vec<u8>,
    cols: usize,
    prime: u8,
    fixed: BTreeMap<usize, u8>,
}

impl JacobianSystem {
    pub fn equations(&self) -> usize {
        self.rows.len()
    }

    pub fn unknowns(&self) -> usize {
        self.cols
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.len()
    }

    /// Solves the system by Gauss-Jordan elimination mod p with the fixed
    /// assignments substituted; remaining free variables follow the policy.
    /// `None` when inconsistent.
    fn solve(&self, free: &mut FreeVars) -> Option<Vec<u8>> {
        solve_mod_p(&self.rows, &self.rhs, self.cols, self.prime, &self.fixed, free)
    }
}

/// Solves `rows * x = rhs (mod p)` by Gauss-Jordan elimination with some
/// variables pre-assigned; remaining free variables follow the
/// free-variable policy. Returns `None` when inconsistent.
fn solve_mod_p(
    rows: &[Vec<(usize, u8)>],
    rhs: &[u8],
    cols: usize,
    p: u8,
    fixed: &BTreeMap<usize, u8>,
    free: &mut FreeVars,
) -> Option<Vec<u8>> {
    let eqs = rows.len();
    let mut mat: Vec<Vec<u8>> = vec![vec![0; cols + 1]; eqs];
    for (e, row) in rows.iter().enumerate() {
        let mut b = i32::from(rhs[e]);
        for &(col, coeff) in row {
            match fixed.get(&col) {
                Some(&val) => b -= i32::from(coeff) * i32::from(val),
                None => {
                    mat[e][col] =
                        (i32::from(mat[e][col]) + i32::from(coeff)).rem_euclid(p as i32) as u8;
                }
            }
        }
        mat[e][cols] = b.rem_euclid(p as i32) as u8;
    }

    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut next_row = 0;
    for col in 0..cols {
        if next_row >= eqs {
            break;
        }
        let Some(pr) = (next_row..eqs).find(|&r| mat[r][col] != 0) else { continue };
        mat.swap(next_row, pr);
        // The only non-trivial pivot inverse mod 2 or 3 is 2^-1 = 2 mod 3.
        if mat[next_row][col] == 2 {
            for x in mat[next_row].iter_mut() {
                *x = (*x * 2) % p;
            }
        }
        for r in 0..eqs {
            if r != next_row && mat[r][col] != 0 {
                let f = i32::from(mat[r][col]);
                for j in col..=cols {
                    let sub =
                        (i32::from(mat[r][j]) - f * i32::from(mat[next_row][j])).rem_euclid(p as i32);
                    mat[r][j] = sub as u8;
                }
            }
        }
        pivot_row_of_col[col] = Some(next_row);
        next_row += 1;
    }
    // Rows without a pivot end up with all-zero coefficients, so a nonzero
    // right-hand side there means the system is inconsistent.
    for r in next_row..eqs {
        if mat[r][cols] != 0 {
            return None;
        }
    }

    let mut x = vec![0u8; cols];
    for col in 0..cols {
        if pivot_row_of_col[col].is_none() && !fixed.contains_key(&col) {
            x[col] = free.choose(p);
        }
    }
    for col in 0..cols {
        if let Some(r) = pivot_row_of_col[col] {
            let mut val = i32::from(mat[r][cols]);
            for j in 0..cols {
                if j != col && mat[r][j] != 0 {
                    val -= i32::from(mat[r][j]) * i32::from(x[j]);
                }
            }
            x[col] = val.rem_euclid(p as i32) as u8;
        }
    }
    for (&col, &val) in fixed {
        x[col] = val;
    }
    Some(x)
}

struct StepContext {
    free: FreeVars,
}

/// One Hensel level: solves the correction system mod `p` against the
/// scaled residual and returns the scheme valid mod `p^(k+1)`.
pub fn hensel_step(ls: &LiftScheme, guided: bool) -> Result<LiftScheme, LiftError> {
    hensel_step_with(ls, guided, &mut StepContext { free: FreeVars::Zero })
}

fn hensel_step_with(
    ls: &LiftScheme,
    guided: bool,
    ctx: &mut StepContext,
) -> Result<LiftScheme, LiftError> {
    let p = ls.prime;
    let d = ls.dims;
    let modulus = BigInt::from(ls.modulus.clone());
    let next_modulus = &ls.modulus * BigUint::from(p);
    let p_big = BigInt::from(p);

    // Scaled residual mod p: (T - UVW) / p^k.
    let residual = ls.residual();
    let mut rhs = Vec::with_capacity(residual.len());
    for r in &residual {
        let (q, rem) = r.div_mod_floor(&modulus);
        if !rem.is_zero() {
            return Err(LiftError::ResidualInvariant(ls.level));
        }
        let digit = q.mod_floor(&p_big);
        rhs.push(digit.to_u64_digits().1.first().copied().unwrap_or(0) as u8);
    }

    // Jacobian mod p, evaluated at the scheme mod p (constant across the
    // tower, since all corrections are multiples of p). Sparse rows: each
    // equation touches the 3r unknowns of its (a, b, c) coordinates.
    let per = ls.per_component();
    let cols = ls.rank * per;
    let val_mod_p =
        |x: &BigUint| -> u8 { (x % p).to_u64_digits().first().copied().unwrap_or(0) as u8 };
    let mut rows = Vec::with_capacity(rhs.len());
    for a in 0..d.u_len() {
        for b in 0..d.v_len() {
            for c in 0..d.w_len() {
                let mut row = Vec::with_capacity(3 * ls.rank);
                for l in 0..ls.rank {
                    let u = val_mod_p(ls.u_at(l, a));
                    let v = val_mod_p(ls.v_at(l, b));
                    let w = val_mod_p(ls.w_at(l, c));
                    let base = l * per;
                    let du = (v * w) % p;
                    if du != 0 {
                        row.push((base + a, du));
                    }
                    let dv = (u * w) % p;
                    if dv != 0 {
                        row.push((base + d.u_len() + b, dv));
                    }
                    let dw = (u * v) % p;
                    if dw != 0 {
                        row.push((base + d.u_len() + d.v_len() + c, dw));
                    }
                }
                rows.push(row);
            }
        }
    }

    let mut system = JacobianSystem { rows, rhs, cols, prime: p, fixed: BTreeMap::new() };

    // Guided constraints (p = 2 only): fix a correction digit when exactly
    // one of its two candidate residues reconstructs at the next modulus.
    let mut solution = None;
    if guided && p == 2 {
        for (col, val) in ls.coeffs.iter().enumerate() {
            let bump = val + &ls.modulus;
            let ok0 = rational_reconstruct(val, &next_modulus).is_some();
            let ok1 = rational_reconstruct(&bump, &next_modulus).is_some();
            if ok0 != ok1 {
                system.fixed.insert(col, u8::from(ok1));
            }
        }
        solution = system.solve(&mut ctx.free);
    }
    // Constrained infeasibility discards all constraints.
    let solution = match solution {
        Some(x) => x,
        None => {
            system.fixed.clear();
            system.solve(&mut ctx.free).ok_or(LiftError::NoSolution(ls.level))?
        }
    };

    let coeffs = ls
        .coeffs
        .iter()
        .zip(&solution)
        .map(|(val, &x)| val + &ls.modulus * BigUint::from(x))
        .collect();
    let out = LiftScheme {
        dims: d,
        prime: p,
        level: ls.level + 1,
        modulus: next_modulus,
        coeffs,
        rank: ls.rank,
    };
    debug_assert!(out.residual_is_zero(), "lifted scheme violates the level invariant");
    Ok(out)
}

/// A scheme with exact fraction coefficients, the output of lifting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalScheme {
    dims: Dims,
    rank: usize,
    // Same flat layout as LiftScheme.
    coeffs: Vec<BigRational>,
}

impl RationalScheme {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn per_component(&self) -> usize {
        self.dims.u_len() + self.dims.v_len() + self.dims.w_len()
    }

    pub fn component_rows(&self, l: usize) -> (&[BigRational], &[BigRational], &[BigRational]) {
        let per = self.per_component();
        let base = l * per;
        let d = self.dims;
        (
            &self.coeffs[base..base + d.u_len()],
            &self.coeffs[base + d.u_len()..base + d.u_len() + d.v_len()],
            &self.coeffs[base + d.u_len() + d.v_len()..base + per],
        )
    }

    /// Exact verification of all correctness equations over the rationals.
    pub fn verify(&self) -> bool {
        let d = self.dims;
        let (m, n, p) = (d.m, d.n, d.p);
        for a in 0..d.u_len() {
            let (i1, i2) = (a / n, a % n);
            for b in 0..d.v_len() {
                let (j1, j2) = (b / p, b % p);
                for c in 0..d.w_len() {
                    let (k2, k1) = (c / m, c % m);
                    let mut sum = BigRational::zero();
                    for l in 0..self.rank {
                        let (u, v, w) = self.component_rows(l);
                        if u[a].is_zero() || v[b].is_zero() {
                            continue;
                        }
                        sum += &u[a] * &v[b] * &w[c];
                    }
                    let want = if i2 == j1 && i1 == k1 && j2 == k2 {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    };
                    if sum != want {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Ternary iff every coefficient lies in {-1, 0, 1}; integer iff all
    /// are integers with at least one |c| > 1; rational otherwise.
    pub fn classification(&self) -> Classification {
        let mut all_ternary = true;
        for c in &self.coeffs {
            if !c.is_integer() {
                return Classification::Q;
            }
            if c.numer().abs() > BigInt::one() {
                all_ternary = false;
            }
        }
        if all_ternary {
            Classification::Zt
        } else {
            Classification::Z
        }
    }

    /// Converts to a packed ternary scheme when every coefficient is in
    /// {-1, 0, 1}.
    pub fn to_ternary(&self) -> Option<Scheme> {
        if self.classification() != Classification::Zt {
            return None;
        }
        let to_i64 = |c: &BigRational| -> i64 {
            if c.is_zero() {
                0
            } else if c.numer().is_negative() {
                -1
            } else {
                1
            }
        };
        let d = self.dims;
        let mut components = Vec::with_capacity(self.rank);
        for l in 0..self.rank {
            let (u, v, w) = self.component_rows(l);
            let enc = |vals: &[BigRational]| {
                let ints: Vec<i64> = vals.iter().map(to_i64).collect();
                crate::ring::CoeffVec::encode(&ints, Ring::Zt).unwrap()
            };
            components.push(crate::scheme::Component { u: enc(u), v: enc(v), w: enc(w) });
        }
        Scheme::new(d, Ring::Zt, components).ok()
    }
}

/// Componentwise reconstruction of every coefficient at the current
/// modulus; `None` unless all succeed.
fn reconstruct_all(ls: &LiftScheme) -> Option<RationalScheme> {
    let mut coeffs = Vec::with_capacity(ls.coeffs.len());
    for c in &ls.coeffs {
        coeffs.push(rational_reconstruct(c, &ls.modulus)?);
    }
    Some(RationalScheme { dims: ls.dims, rank: ls.rank, coeffs })
}

/// Result of a successful lift.
#[derive(Debug, Clone)]
pub struct LiftOutcome {
    pub scheme: RationalScheme,
    pub classification: Classification,
    /// Hensel levels applied before the accepted reconstruction.
    pub levels_used: u32,
}

/// Options for [`lift`].
#[derive(Debug, Clone)]
pub struct LiftOptions {
    pub guided: bool,
    pub max_levels: u32,
    /// Randomize free variables of the underdetermined solves with this
    /// seed instead of zeroing them.
    pub free_var_seed: Option<u64>,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions { guided: true, max_levels: 16, free_var_seed: None }
    }
}

/// Lifts a verified `Z2`/`Z3` scheme up the modulus tower, attempting a
/// rational reconstruction after every level, and returns the first
/// candidate that passes exact verification.
pub fn lift(s: &Scheme, options: &LiftOptions) -> Result<LiftOutcome, LiftError> {
    let mut current = embed(s)?;
    let mut ctx = StepContext {
        free: match options.free_var_seed {
            Some(seed) => FreeVars::Random(ChaCha8Rng::seed_from_u64(seed)),
            None => FreeVars::Zero,
        },
    };
    for level in 0..=options.max_levels {
        if let Some(candidate) = reconstruct_all(&current) {
            if candidate.verify() {
                let classification = candidate.classification();
                return Ok(LiftOutcome { scheme: candidate, classification, levels_used: level });
            }
        }
        if level < options.max_levels {
            current = hensel_step_with(&current, options.guided, &mut ctx)?;
        }
    }
    Err(LiftError::Exhausted(options.max_levels))
}
