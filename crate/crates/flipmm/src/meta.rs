//! Dimension-changing operations: merge, product, extend, project.
//!
//! All four act along the `p` dimension by default and are available along
//! any axis through rotate-conjugation: rotate until the target axis sits in
//! the `p` position, apply, rotate back.

use thiserror::Error;

use crate::ring::{CoeffVec, Ring};
use crate::scheme::{Component, Dims, Scheme, SchemeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetaError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("dims mismatch: {0} and {1} do not agree on the shared dimensions")]
    DimsMismatch(Dims, Dims),
    #[error("cannot project a dimension of size 1")]
    UnitDim,
    #[error("slice {slice} out of range for p = {p}")]
    SliceOutOfRange { slice: usize, p: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// One of the three dimensions of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimAxis {
    M,
    N,
    P,
}

impl DimAxis {
    pub const ALL: [DimAxis; 3] = [DimAxis::M, DimAxis::N, DimAxis::P];

    /// Rotations needed to bring this axis into the `p` position.
    fn rotations(self) -> usize {
        match self {
            DimAxis::P => 0,
            DimAxis::M => 1,
            DimAxis::N => 2,
        }
    }
}

fn rotated(s: &Scheme, times: usize) -> Scheme {
    let mut out = s.clone();
    for _ in 0..times % 3 {
        out = out.rotate();
    }
    out
}

fn decode_grid(row: &CoeffVec) -> Vec<i64> {
    row.decode().iter().map(|&x| x as i64).collect()
}

fn encode(values: &[i64], ring: Ring) -> CoeffVec {
    CoeffVec::encode(values, ring).expect("meta operation keeps coefficients canonical")
}

/// Stacks `b`'s output dimension after `a`'s:
/// `(m, n, p1 : r1) + (m, n, p2 : r2) -> (m, n, p1 + p2 : r1 + r2)`.
pub fn merge(a: &Scheme, b: &Scheme) -> Result<Scheme, MetaError> {
    if a.ring() != b.ring() {
        return Err(MetaError::RingMismatch(a.ring(), b.ring()));
    }
    let (da, db) = (a.dims(), b.dims());
    if da.m != db.m || da.n != db.n {
        return Err(MetaError::DimsMismatch(da, db));
    }
    let ring = a.ring();
    let (p1, p2) = (da.p, db.p);
    let dims = Dims::new(da.m, da.n, p1 + p2)?;
    let p = dims.p;

    let widen = |c: &Component, offset: usize, old_p: usize| {
        let v_old = decode_grid(&c.v);
        let mut v = vec![0i64; dims.v_len()];
        for j1 in 0..dims.n {
            for j2 in 0..old_p {
                v[j1 * p + offset + j2] = v_old[j1 * old_p + j2];
            }
        }
        let w_old = decode_grid(&c.w);
        let mut w = vec![0i64; dims.w_len()];
        w[offset * dims.m..offset * dims.m + w_old.len()].copy_from_slice(&w_old);
        Component { u: c.u, v: encode(&v, ring), w: encode(&w, ring) }
    };

    let mut components = Vec::with_capacity(a.rank() + b.rank());
    components.extend(a.components().iter().map(|c| widen(c, 0, p1)));
    components.extend(b.components().iter().map(|c| widen(c, p1, p2)));
    Ok(Scheme::new(dims, ring, components)?)
}

pub fn merge_along(a: &Scheme, b: &Scheme, axis: DimAxis) -> Result<Scheme, MetaError> {
    let k = axis.rotations();
    let out = merge(&rotated(a, k), &rotated(b, k))?;
    Ok(rotated(&out, 3 - k))
}

fn ring_mul(a: i64, b: i64, ring: Ring) -> i64 {
    match ring {
        Ring::Z2 => (a * b).rem_euclid(2),
        Ring::Z3 => (a * b).rem_euclid(3),
        Ring::Zt => a * b,
    }
}

/// Kronecker product of two flattened slices. Position
/// `((i1, i2), (j1, j2))` of the result flattens as
/// `(i1 * rows2 + i2) * (cols1 * cols2) + (j1 * cols2 + j2)`.
fn kron(
    a: &[i64],
    (rows1, cols1): (usize, usize),
    b: &[i64],
    (rows2, cols2): (usize, usize),
    ring: Ring,
) -> Vec<i64> {
    let cols = cols1 * cols2;
    let mut out = vec![0i64; rows1 * rows2 * cols];
    for i1 in 0..rows1 {
        for j1 in 0..cols1 {
            let x = a[i1 * cols1 + j1];
            if x == 0 {
                continue;
            }
            for i2 in 0..rows2 {
                for j2 in 0..cols2 {
                    let y = b[i2 * cols2 + j2];
                    if y == 0 {
                        continue;
                    }
                    out[(i1 * rows2 + i2) * cols + (j1 * cols2 + j2)] = ring_mul(x, y, ring);
                }
            }
        }
    }
    out
}

/// Tensor product of schemes:
/// `(m1, n1, p1 : r1) x (m2, n2, p2 : r2) -> (m1 m2, n1 n2, p1 p2 : r1 r2)`.
/// Component `(i, j)` is the Kronecker product of `a`'s component `i` with
/// `b`'s component `j`.
pub fn product(a: &Scheme, b: &Scheme) -> Result<Scheme, MetaError> {
    if a.ring() != b.ring() {
        return Err(MetaError::RingMismatch(a.ring(), b.ring()));
    }
    let ring = a.ring();
    let (da, db) = (a.dims(), b.dims());
    let dims = Dims::new(da.m * db.m, da.n * db.n, da.p * db.p)?;
    let mut components = Vec::with_capacity(a.rank() * b.rank());
    for ca in a.components() {
        let (ua, va, wa) = (decode_grid(&ca.u), decode_grid(&ca.v), decode_grid(&ca.w));
        for cb in b.components() {
            let u = kron(&ua, (da.m, da.n), &decode_grid(&cb.u), (db.m, db.n), ring);
            let v = kron(&va, (da.n, da.p), &decode_grid(&cb.v), (db.n, db.p), ring);
            let w = kron(&wa, (da.p, da.m), &decode_grid(&cb.w), (db.p, db.m), ring);
            components.push(Component {
                u: encode(&u, ring),
                v: encode(&v, ring),
                w: encode(&w, ring),
            });
        }
    }
    Ok(Scheme::new(dims, ring, components)?)
}

/// Naive widening `(m, n, p : r) -> (m, n, p + 1 : r + mn)`: merge with the
/// trivial single-column scheme.
pub fn extend(s: &Scheme) -> Result<Scheme, MetaError> {
    let d = s.dims();
    let unit = Scheme::naive(Dims::new(d.m, d.n, 1)?, s.ring());
    merge(s, &unit)
}

pub fn extend_along(s: &Scheme, axis: DimAxis) -> Result<Scheme, MetaError> {
    let k = axis.rotations();
    let out = extend(&rotated(s, k))?;
    Ok(rotated(&out, 3 - k))
}

/// Removes one output slice: `(m, n, p) -> (m, n, p - 1)`. Coefficients of
/// the removed slice are deleted from every `v` and `w` row; components left
/// with a zero row are dropped, so the rank can only shrink.
pub fn project(s: &Scheme, slice: usize) -> Result<Scheme, MetaError> {
    let d = s.dims();
    if d.p < 2 {
        return Err(MetaError::UnitDim);
    }
    if slice >= d.p {
        return Err(MetaError::SliceOutOfRange { slice, p: d.p });
    }
    let ring = s.ring();
    let dims = Dims::new(d.m, d.n, d.p - 1)?;
    let components = s
        .components()
        .iter()
        .map(|c| {
            let v_old = decode_grid(&c.v);
            let mut v = Vec::with_capacity(dims.v_len());
            for j1 in 0..d.n {
                for j2 in 0..d.p {
                    if j2 != slice {
                        v.push(v_old[j1 * d.p + j2]);
                    }
                }
            }
            let w_old = decode_grid(&c.w);
            let mut w = Vec::with_capacity(dims.w_len());
            for k2 in 0..d.p {
                if k2 != slice {
                    w.extend_from_slice(&w_old[k2 * d.m..(k2 + 1) * d.m]);
                }
            }
            Component { u: c.u, v: encode(&v, ring), w: encode(&w, ring) }
        })
        .filter(|c| !c.has_zero_row())
        .collect();
    Ok(Scheme::new(dims, ring, components)?)
}

pub fn project_along(s: &Scheme, axis: DimAxis, slice: usize) -> Result<Scheme, MetaError> {
    let k = axis.rotations();
    let out = project(&rotated(s, k), slice)?;
    Ok(rotated(&out, 3 - k))
}
