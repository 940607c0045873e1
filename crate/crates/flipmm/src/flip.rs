//! Local transformations on schemes: flip, plus, split, expand, reduction
//! and sandwiching.
//!
//! Every operator preserves the represented tensor. Flips keep the rank,
//! plus/split raise it by one, reduction lowers it by one or two, and all of
//! them can be applied with any of the three tensors in the distinguished
//! role (the `axis`). Over `Zt` two rows that agree up to a global sign are
//! treated as equal: the matching component is re-signed first (an even sign
//! change, which leaves its rank-one tensor intact).

use rand::{Rng, RngExt};
use thiserror::Error;

use crate::modmat::{Mat, MatError};
use crate::ring::{CoeffVec, OutOfRing, Ring};
use crate::scheme::{Axis, Dims, Scheme};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum Rejected {
    #[error("rows do not satisfy the operator precondition")]
    Precondition,
    #[error("a componentwise update leaves {{-1, 0, 1}}")]
    OutOfRing,
    #[error("no eligible pair under the sampled operator")]
    NoEligiblePair,
}

impl From<OutOfRing> for Rejected {
    fn from(_: OutOfRing) -> Rejected {
        Rejected::OutOfRing
    }
}

/// Relative sign with which `row` matches `target`: `+1` for equality, `-1`
/// if `row` is the exact negation (only counted over `Zt`).
fn match_sign(target: &CoeffVec, row: &CoeffVec, ring: Ring) -> Option<i8> {
    if row == target {
        Some(1)
    } else if ring == Ring::Zt && row.neg() == *target {
        Some(-1)
    } else {
        None
    }
}

fn rows_differ(a: &CoeffVec, b: &CoeffVec, ring: Ring) -> bool {
    match_sign(a, b, ring).is_none()
}

/// Rank-preserving flip on `axis`: with `A_i = A_j`, sends
/// `B_i <- B_i + B_j` and `C_j <- C_j - C_i` where `B` and `C` are the next
/// two tensors in cyclic order. Cancellations are normalized away, so the
/// returned scheme may have lower rank.
pub fn flip(s: &Scheme, i: usize, j: usize, axis: Axis) -> Result<Scheme, Rejected> {
    let mut out = s.clone();
    flip_in_place(&mut out, i, j, axis)?;
    Ok(out)
}

pub(crate) fn flip_in_place(s: &mut Scheme, i: usize, j: usize, axis: Axis) -> Result<(), Rejected> {
    assert!(i < s.rank() && j < s.rank());
    if i == j {
        return Err(Rejected::Precondition);
    }
    let ring = s.ring();
    let (b_axis, c_axis) = (axis.next(), axis.next().next());
    let (ci, cj) = (s.components()[i], s.components()[j]);
    let sigma = match_sign(ci.row(axis), cj.row(axis), ring).ok_or(Rejected::Precondition)?;
    // Re-signed representative of component j: (A_i, sigma * B_j, C_j).
    let b_j = if sigma < 0 { cj.row(b_axis).neg() } else { *cj.row(b_axis) };
    let new_b_i = ci.row(b_axis).add(&b_j)?;
    let new_c_j = cj.row(c_axis).sub(ci.row(c_axis))?;

    let comps = s.components_mut();
    *comps[i].row_mut(b_axis) = new_b_i;
    *comps[j].row_mut(axis) = *ci.row(axis);
    *comps[j].row_mut(b_axis) = b_j;
    *comps[j].row_mut(c_axis) = new_c_j;
    s.normalize();
    Ok(())
}

/// Rank-raising plus: replaces components `i`, `j` (all three row pairs
/// distinct) by the three components
/// `(A_i, B_i + B_j, C_i)`, `(A_i, B_j, C_j - C_i)`, `(A_j - A_i, B_j, C_j)`.
pub fn plus(s: &Scheme, i: usize, j: usize) -> Result<Scheme, Rejected> {
    plus_on(s, i, j, Axis::U)
}

pub(crate) fn plus_on(s: &Scheme, i: usize, j: usize, axis: Axis) -> Result<Scheme, Rejected> {
    let mut out = s.clone();
    plus_in_place(&mut out, i, j, axis)?;
    Ok(out)
}

pub(crate) fn plus_in_place(s: &mut Scheme, i: usize, j: usize, axis: Axis) -> Result<(), Rejected> {
    assert!(i < s.rank() && j < s.rank());
    if i == j {
        return Err(Rejected::Precondition);
    }
    let ring = s.ring();
    let (ci, cj) = (s.components()[i], s.components()[j]);
    for ax in Axis::ALL {
        if !rows_differ(ci.row(ax), cj.row(ax), ring) {
            return Err(Rejected::Precondition);
        }
    }
    let (b_axis, c_axis) = (axis.next(), axis.next().next());
    let new_b_i = ci.row(b_axis).add(cj.row(b_axis))?;
    let new_c_j = cj.row(c_axis).sub(ci.row(c_axis))?;
    let new_a = cj.row(axis).sub(ci.row(axis))?;
    // Mod 3, distinct rows can still sum to zero; a degenerate expansion
    // would not raise the rank, so it is not an eligible plus.
    if new_b_i.is_zero() {
        return Err(Rejected::Precondition);
    }

    let mut first = ci;
    *first.row_mut(b_axis) = new_b_i;
    let mut second = cj;
    *second.row_mut(axis) = *ci.row(axis);
    *second.row_mut(c_axis) = new_c_j;
    let mut third = cj;
    *third.row_mut(axis) = new_a;

    let comps = s.components_mut();
    comps[i] = first;
    comps[j] = second;
    comps.push(third);
    s.normalize();
    Ok(())
}

/// Rank-raising split on `axis`: with `A_i != A_j`, component `i` keeps its
/// other rows but takes `A_j`, and a new component `(A_i - A_j, B_i, C_i)`
/// is appended.
pub fn split(s: &Scheme, i: usize, j: usize, axis: Axis) -> Result<Scheme, Rejected> {
    let mut out = s.clone();
    split_in_place(&mut out, i, j, axis)?;
    Ok(out)
}

pub(crate) fn split_in_place(s: &mut Scheme, i: usize, j: usize, axis: Axis) -> Result<(), Rejected> {
    assert!(i < s.rank() && j < s.rank());
    if i == j {
        return Err(Rejected::Precondition);
    }
    let ring = s.ring();
    let (ci, cj) = (s.components()[i], s.components()[j]);
    if !rows_differ(ci.row(axis), cj.row(axis), ring) {
        return Err(Rejected::Precondition);
    }
    let new_a = ci.row(axis).sub(cj.row(axis))?;
    let mut replaced = ci;
    *replaced.row_mut(axis) = *cj.row(axis);
    let mut extra = ci;
    *extra.row_mut(axis) = new_a;

    let comps = s.components_mut();
    comps[i] = replaced;
    comps.push(extra);
    s.normalize();
    Ok(())
}

/// Rank-lowering reduction on `axis`: with the other two row pairs equal,
/// merges components `i` and `j` into one whose `axis` row is `A_i + A_j`.
/// If the sum cancels, both components vanish and the rank drops by two.
pub fn reduce(s: &Scheme, i: usize, j: usize, axis: Axis) -> Result<Scheme, Rejected> {
    let mut out = s.clone();
    reduce_in_place(&mut out, i, j, axis)?;
    Ok(out)
}

pub(crate) fn reduce_in_place(s: &mut Scheme, i: usize, j: usize, axis: Axis) -> Result<(), Rejected> {
    assert!(i < s.rank() && j < s.rank());
    if i == j {
        return Err(Rejected::Precondition);
    }
    let ring = s.ring();
    let (b_axis, c_axis) = (axis.next(), axis.next().next());
    let (ci, cj) = (s.components()[i], s.components()[j]);
    let sig_b = match_sign(ci.row(b_axis), cj.row(b_axis), ring).ok_or(Rejected::Precondition)?;
    let sig_c = match_sign(ci.row(c_axis), cj.row(c_axis), ring).ok_or(Rejected::Precondition)?;
    // Each mismatched row is negated together with the axis row, keeping the
    // rank-one tensor of component j unchanged; two mismatches cancel on the
    // axis row.
    let a_j = if sig_b * sig_c == 1 { *cj.row(axis) } else { cj.row(axis).neg() };
    let merged = ci.row(axis).add(&a_j)?;

    let comps = s.components_mut();
    *comps[i].row_mut(axis) = merged;
    comps.remove(j);
    s.normalize();
    Ok(())
}

/// A triple of invertible matrices conjugating a scheme.
#[derive(Debug, Clone)]
pub struct SandwichTriple {
    s_u: Mat,
    s_v: Mat,
    s_w: Mat,
    inv_u: Mat,
    inv_v: Mat,
    inv_w: Mat,
}

impl SandwichTriple {
    pub fn new(s_u: Mat, s_v: Mat, s_w: Mat) -> Result<SandwichTriple, MatError> {
        let inv_u = s_u.inverse()?;
        let inv_v = s_v.inverse()?;
        let inv_w = s_w.inverse()?;
        Ok(SandwichTriple { s_u, s_v, s_w, inv_u, inv_v, inv_w })
    }

    pub fn identity(dims: Dims, ring: Ring) -> SandwichTriple {
        SandwichTriple::new(
            Mat::identity(dims.m, ring),
            Mat::identity(dims.n, ring),
            Mat::identity(dims.p, ring),
        )
        .unwrap()
    }

    /// Uniform random triple: invertible matrices over `Z2`/`Z3`, signed
    /// permutations over `Zt`.
    pub fn random(dims: Dims, ring: Ring, rng: &mut impl Rng) -> SandwichTriple {
        SandwichTriple::new(
            Mat::random_invertible(dims.m, ring, rng),
            Mat::random_invertible(dims.n, ring, rng),
            Mat::random_invertible(dims.p, ring, rng),
        )
        .expect("random invertible matrices")
    }

    pub fn matrices(&self) -> (&Mat, &Mat, &Mat) {
        (&self.s_u, &self.s_v, &self.s_w)
    }
}

/// Conjugates every component: `u -> S_U u S_V^-1`, `v -> S_V v S_W^-1`,
/// `w -> S_W w S_U^-1` (rows reshaped as matrix slices). Rank and
/// correctness are preserved.
pub fn sandwich(s: &Scheme, t: &SandwichTriple) -> Scheme {
    let mut out = s.clone();
    sandwich_in_place(&mut out, t);
    out
}

pub(crate) fn sandwich_in_place(s: &mut Scheme, t: &SandwichTriple) {
    let dims = s.dims();
    let ring = s.ring();
    assert_eq!(t.s_u.size(), dims.m, "S_U must be m x m");
    assert_eq!(t.s_v.size(), dims.n, "S_V must be n x n");
    assert_eq!(t.s_w.size(), dims.p, "S_W must be p x p");
    assert_eq!(t.s_u.ring(), ring);
    let encode = |vals: Vec<i8>| {
        let wide: Vec<i64> = vals.iter().map(|&x| x as i64).collect();
        CoeffVec::encode(&wide, ring).expect("sandwich keeps coefficients canonical")
    };
    for c in s.components_mut() {
        c.u = encode(Mat::sandwich_slice(&t.s_u, &c.u.decode(), &t.inv_v));
        c.v = encode(Mat::sandwich_slice(&t.s_v, &c.v.decode(), &t.inv_w));
        c.w = encode(Mat::sandwich_slice(&t.s_w, &c.w.decode(), &t.inv_u));
    }
}

/// Sign-canonical per-axis rows used for matching.
pub(crate) fn axis_keys(s: &Scheme, keys: &mut Vec<[CoeffVec; 3]>) {
    keys.clear();
    keys.extend(s.components().iter().map(|c| {
        [c.u.sign_canonical().0, c.v.sign_canonical().0, c.w.sign_canonical().0]
    }));
}

fn axis_index(axis: Axis) -> usize {
    match axis {
        Axis::U => 0,
        Axis::V => 1,
        Axis::W => 2,
    }
}

/// All ordered `(i, j, axis)` with matching rows on `axis` -- the flips that
/// can be attempted. `flip(i, j)` and `flip(j, i)` differ, so both appear.
pub fn eligible_flips(s: &Scheme) -> Vec<(usize, usize, Axis)> {
    let mut keys = Vec::new();
    let mut out = Vec::new();
    eligible_flips_into(s, &mut keys, &mut out);
    out
}

pub(crate) fn eligible_flips_into(
    s: &Scheme,
    keys: &mut Vec<[CoeffVec; 3]>,
    out: &mut Vec<(usize, usize, Axis)>,
) {
    axis_keys(s, keys);
    out.clear();
    let r = keys.len();
    for axis in Axis::ALL {
        let a = axis_index(axis);
        for i in 0..r {
            for j in 0..r {
                if i != j && keys[i][a] == keys[j][a] {
                    out.push((i, j, axis));
                }
            }
        }
    }
}

/// All unordered pairs with both non-axis rows matching: the reductions.
/// `axis` names the row that receives the sum.
pub fn eligible_reductions(s: &Scheme) -> Vec<(usize, usize, Axis)> {
    let mut keys = Vec::new();
    let mut out = Vec::new();
    eligible_reductions_into(s, &mut keys, &mut out);
    out
}

pub(crate) fn eligible_reductions_into(
    s: &Scheme,
    keys: &mut Vec<[CoeffVec; 3]>,
    out: &mut Vec<(usize, usize, Axis)>,
) {
    axis_keys(s, keys);
    out.clear();
    let r = keys.len();
    for axis in Axis::ALL {
        let b = axis_index(axis.next());
        let c = axis_index(axis.next().next());
        for i in 0..r {
            for j in i + 1..r {
                if keys[i][b] == keys[j][b] && keys[i][c] == keys[j][c] {
                    out.push((i, j, axis));
                }
            }
        }
    }
}

fn eligible_expansions(s: &Scheme, use_plus: bool) -> Vec<(usize, usize, Axis)> {
    let mut keys = Vec::new();
    axis_keys(s, &mut keys);
    let r = keys.len();
    let mut out = Vec::new();
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            if use_plus {
                if (0..3).all(|a| keys[i][a] != keys[j][a]) {
                    for axis in Axis::ALL {
                        out.push((i, j, axis));
                    }
                }
            } else {
                for axis in Axis::ALL {
                    if keys[i][axis_index(axis)] != keys[j][axis_index(axis)] {
                        out.push((i, j, axis));
                    }
                }
            }
        }
    }
    out
}

/// Raises the rank by one: a uniform coin picks plus or split, then a
/// uniformly chosen eligible `(pair, axis)` is applied. Over `Zt`,
/// candidates whose updates leave the ring are skipped and another is
/// drawn, so the operation succeeds whenever any candidate applies.
pub fn expand(s: &Scheme, rng: &mut impl Rng) -> Result<Scheme, Rejected> {
    let mut out = s.clone();
    expand_in_place(&mut out, rng)?;
    Ok(out)
}

pub(crate) fn expand_in_place(s: &mut Scheme, rng: &mut impl Rng) -> Result<(), Rejected> {
    let use_plus = rng.random::<bool>();
    let mut candidates = eligible_expansions(s, use_plus);
    while !candidates.is_empty() {
        let pick = rng.random_range(0..candidates.len());
        let (i, j, axis) = candidates.swap_remove(pick);
        let applied = if use_plus {
            plus_in_place(s, i, j, axis)
        } else {
            split_in_place(s, i, j, axis)
        };
        if applied.is_ok() {
            return Ok(());
        }
    }
    Err(Rejected::NoEligiblePair)
}
