//! Matrix multiplication schemes and their invariants.
//!
//! A scheme for multiplying an `m x n` matrix by an `n x p` matrix with `r`
//! products is stored as `r` components, each a triple of coefficient rows
//! `(u, v, w)`. The `u` row selects a linear combination of entries of `A`,
//! the `v` row one of `B`, and the `w` row distributes the product into the
//! result. `w` rows address the transposed result (a `p x m` slice), which
//! makes the correctness equations symmetric under cyclic rotation of the
//! three tensors.
//!
//! Matrix slices are flattened row-major: entry `(i, j)` of an `a x b` slice
//! maps to position `i * b + j`.

use std::fmt;

use thiserror::Error;

use crate::ring::{CoeffVec, EncodeError, Ring, MAX_LEN};

/// Operand shape `(m, n, p)`: `A` is `m x n`, `B` is `n x p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("dims {0}: every matrix slice must have 1..={MAX_LEN} entries")]
    DimsTooLarge(Dims),
    #[error("component {index}: {tensor} row has length {got}, expected {want}")]
    RowLength { index: usize, tensor: char, got: usize, want: usize },
    #[error("component {index}: {tensor} row is over {got}, scheme is over {want}")]
    RingMismatch { index: usize, tensor: char, got: Ring, want: Ring },
    #[error("scheme must have rank >= 1")]
    EmptyScheme,
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

impl Dims {
    pub fn new(m: usize, n: usize, p: usize) -> Result<Dims, SchemeError> {
        let dims = Dims { m, n, p };
        if m == 0 || n == 0 || p == 0 || m * n > MAX_LEN || n * p > MAX_LEN || p * m > MAX_LEN {
            return Err(SchemeError::DimsTooLarge(dims));
        }
        Ok(dims)
    }

    /// Length of a `u` row (entries of `A`).
    pub fn u_len(&self) -> usize {
        self.m * self.n
    }

    /// Length of a `v` row (entries of `B`).
    pub fn v_len(&self) -> usize {
        self.n * self.p
    }

    /// Length of a `w` row (entries of the transposed result).
    pub fn w_len(&self) -> usize {
        self.p * self.m
    }

    /// Cyclic rotation `(m, n, p) -> (n, p, m)`.
    pub fn rotated(&self) -> Dims {
        Dims { m: self.n, n: self.p, p: self.m }
    }

    pub fn volume(&self) -> usize {
        self.m * self.n * self.p
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.p)
    }
}

/// One rank-one component of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Component {
    pub u: CoeffVec,
    pub v: CoeffVec,
    pub w: CoeffVec,
}

/// Which of the three coefficient tensors plays the distinguished role in an
/// operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    U,
    V,
    W,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::U, Axis::V, Axis::W];

    /// The next axis in the cyclic order U -> V -> W -> U.
    pub fn next(self) -> Axis {
        match self {
            Axis::U => Axis::V,
            Axis::V => Axis::W,
            Axis::W => Axis::U,
        }
    }
}

impl Component {
    pub fn row(&self, axis: Axis) -> &CoeffVec {
        match axis {
            Axis::U => &self.u,
            Axis::V => &self.v,
            Axis::W => &self.w,
        }
    }

    pub fn row_mut(&mut self, axis: Axis) -> &mut CoeffVec {
        match axis {
            Axis::U => &mut self.u,
            Axis::V => &mut self.v,
            Axis::W => &mut self.w,
        }
    }

    pub fn has_zero_row(&self) -> bool {
        self.u.is_zero() || self.v.is_zero() || self.w.is_zero()
    }

    /// Negates two of the three rows (an even sign change), leaving the
    /// rank-one tensor unchanged. `axis` names the row that keeps its sign.
    pub fn negate_except(&mut self, axis: Axis) {
        match axis {
            Axis::U => {
                self.v = self.v.neg();
                self.w = self.w.neg();
            }
            Axis::V => {
                self.u = self.u.neg();
                self.w = self.w.neg();
            }
            Axis::W => {
                self.u = self.u.neg();
                self.v = self.v.neg();
            }
        }
    }
}

/// A rank-`r` decomposition of the `(m, n, p)` matrix multiplication tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    dims: Dims,
    ring: Ring,
    components: Vec<Component>,
}

impl Scheme {
    pub fn new(dims: Dims, ring: Ring, components: Vec<Component>) -> Result<Scheme, SchemeError> {
        if components.is_empty() {
            return Err(SchemeError::EmptyScheme);
        }
        for (index, c) in components.iter().enumerate() {
            for (tensor, row, want) in [
                ('u', &c.u, dims.u_len()),
                ('v', &c.v, dims.v_len()),
                ('w', &c.w, dims.w_len()),
            ] {
                if row.ring() != ring {
                    return Err(SchemeError::RingMismatch {
                        index,
                        tensor,
                        got: row.ring(),
                        want: ring,
                    });
                }
                if row.len() != want {
                    return Err(SchemeError::RowLength { index, tensor, got: row.len(), want });
                }
            }
        }
        Ok(Scheme { dims, ring, components })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub(crate) fn components_mut(&mut self) -> &mut Vec<Component> {
        &mut self.components
    }

    /// The rank-`mnp` scheme read off the definition of matrix
    /// multiplication: one component per scalar product `a_ik * b_kj`.
    pub fn naive(dims: Dims, ring: Ring) -> Scheme {
        let one = match ring {
            Ring::Z2 | Ring::Z3 | Ring::Zt => 1i8,
        };
        let mut components = Vec::with_capacity(dims.volume());
        for i in 0..dims.m {
            for k in 0..dims.n {
                for j in 0..dims.p {
                    let mut u = CoeffVec::zero(dims.u_len(), ring);
                    let mut v = CoeffVec::zero(dims.v_len(), ring);
                    let mut w = CoeffVec::zero(dims.w_len(), ring);
                    set_one(&mut u, i * dims.n + k, one);
                    set_one(&mut v, k * dims.p + j, one);
                    set_one(&mut w, j * dims.m + i, one);
                    components.push(Component { u, v, w });
                }
            }
        }
        Scheme { dims, ring, components }
    }

    /// The classical seven-product scheme for `(2, 2, 2)` over `Zt`.
    pub fn strassen() -> Scheme {
        let dims = Dims::new(2, 2, 2).unwrap();
        let rows: [([i64; 4], [i64; 4], [i64; 4]); 7] = [
            ([1, 0, 0, 1], [1, 0, 0, 1], [1, 0, 0, 1]),
            ([0, 0, 1, 1], [1, 0, 0, 0], [0, 1, 0, -1]),
            ([1, 0, 0, 0], [0, 1, 0, -1], [0, 0, 1, 1]),
            ([0, 0, 0, 1], [-1, 0, 1, 0], [1, 1, 0, 0]),
            ([1, 1, 0, 0], [0, 0, 0, 1], [-1, 0, 1, 0]),
            ([-1, 0, 1, 0], [1, 1, 0, 0], [0, 0, 0, 1]),
            ([0, 1, 0, -1], [0, 0, 1, 1], [1, 0, 0, 0]),
        ];
        let components = rows
            .iter()
            .map(|(u, v, w)| Component {
                u: CoeffVec::encode(u, Ring::Zt).unwrap(),
                v: CoeffVec::encode(v, Ring::Zt).unwrap(),
                w: CoeffVec::encode(w, Ring::Zt).unwrap(),
            })
            .collect();
        Scheme { dims, ring: Ring::Zt, components }
    }

    /// Checks all `(mn)(np)(pm)` trilinear correctness equations: the scheme
    /// reproduces every coefficient of the matrix multiplication tensor, in
    /// the scheme's own arithmetic (exact over `Zt`, mod 2 or 3 otherwise).
    pub fn verify(&self) -> bool {
        let Dims { m, n, p } = self.dims;
        let us: Vec<Vec<i8>> = self.components.iter().map(|c| c.u.decode()).collect();
        let vs: Vec<Vec<i8>> = self.components.iter().map(|c| c.v.decode()).collect();
        let ws: Vec<Vec<i8>> = self.components.iter().map(|c| c.w.decode()).collect();
        let w_len = self.dims.w_len();
        let mut acc = vec![0i32; w_len];
        for a in 0..self.dims.u_len() {
            let (i1, i2) = (a / n, a % n);
            for b in 0..self.dims.v_len() {
                let (j1, j2) = (b / p, b % p);
                acc.fill(0);
                for l in 0..self.components.len() {
                    let mu = i32::from(us[l][a]) * i32::from(vs[l][b]);
                    if mu == 0 {
                        continue;
                    }
                    let w = &ws[l];
                    for c in 0..w_len {
                        acc[c] += mu * i32::from(w[c]);
                    }
                }
                for c in 0..w_len {
                    let (k2, k1) = (c / m, c % m);
                    let want = i32::from(i2 == j1 && i1 == k1 && j2 == k2);
                    let ok = match self.ring {
                        Ring::Z2 => acc[c].rem_euclid(2) == want,
                        Ring::Z3 => acc[c].rem_euclid(3) == want,
                        Ring::Zt => acc[c] == want,
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Effective recursion exponent `3 ln r / ln(mnp)`.
    ///
    /// Meaningful only for `mnp >= 2`; the degenerate `(1,1,1)` shape yields
    /// a non-finite value.
    pub fn exponent(&self) -> f64 {
        exponent(self.dims, self.rank())
    }

    /// Number of component pairs sharing a row on some tensor (each pair
    /// counted once, rows compared up to global sign over `Zt`).
    pub fn flip_potential(&self) -> usize {
        let keys: Vec<[CoeffVec; 3]> = self
            .components
            .iter()
            .map(|c| {
                [c.u.sign_canonical().0, c.v.sign_canonical().0, c.w.sign_canonical().0]
            })
            .collect();
        let mut count = 0;
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                if keys[i][0] == keys[j][0] || keys[i][1] == keys[j][1] || keys[i][2] == keys[j][2]
                {
                    count += 1;
                }
            }
        }
        count
    }

    /// Total number of zero coefficients across all rows.
    pub fn zero_count(&self) -> usize {
        let per_comp = self.dims.u_len() + self.dims.v_len() + self.dims.w_len();
        self.components
            .iter()
            .map(|c| {
                per_comp
                    - (c.u.nonzero_count() + c.v.nonzero_count() + c.w.nonzero_count()) as usize
            })
            .sum()
    }

    /// Cyclic tensor rotation `(U, V, W) -> (V, W, U)`, dims
    /// `(m, n, p) -> (n, p, m)`. Correctness is preserved because the
    /// transposed-result convention makes the target tensor cyclically
    /// symmetric.
    pub fn rotate(&self) -> Scheme {
        Scheme {
            dims: self.dims.rotated(),
            ring: self.ring,
            components: self
                .components
                .iter()
                .map(|c| Component { u: c.v, v: c.w, w: c.u })
                .collect(),
        }
    }

    /// Drops components with an all-zero row and, over `Zt`, re-signs each
    /// component so the first nonzero entry of its `u` row is +1 (the sign
    /// is absorbed into `v`). The represented tensor is unchanged.
    pub fn normalize(&mut self) {
        self.components.retain(|c| !c.has_zero_row());
        if self.ring == Ring::Zt {
            for c in &mut self.components {
                let (u, negated) = c.u.sign_canonical();
                if negated {
                    c.u = u;
                    c.v = c.v.neg();
                }
            }
        }
    }

    pub fn normalized(&self) -> Scheme {
        let mut s = self.clone();
        s.normalize();
        s
    }

    /// Canonical multiset key: fully sign-normalized components in sorted
    /// order. Two schemes with equal keys are the same set of rank-one
    /// tensors.
    pub fn canonical_components(&self) -> Vec<(CoeffVec, CoeffVec, CoeffVec)> {
        let mut triples: Vec<_> = self
            .components
            .iter()
            .map(|c| {
                let mut c = *c;
                if self.ring == Ring::Zt {
                    let (u, flipped) = c.u.sign_canonical();
                    if flipped {
                        c.u = u;
                        c.v = c.v.neg();
                    }
                    let (v, flipped) = c.v.sign_canonical();
                    if flipped {
                        c.v = v;
                        c.w = c.w.neg();
                    }
                }
                (c.u, c.v, c.w)
            })
            .collect();
        triples.sort_unstable();
        triples
    }

    /// Re-expresses the scheme over another ring, mapping each coefficient
    /// through its signed representative in {-1, 0, 1} (the value 2 mod 3
    /// stands for -1). Correctness over `Zt` implies correctness of every
    /// reduction; the converse does not hold.
    pub fn reduce_to(&self, ring: Ring) -> Scheme {
        if ring == self.ring {
            return self.clone();
        }
        let convert = |row: &CoeffVec| {
            let values: Vec<i64> = row
                .decode()
                .iter()
                .map(|&x| {
                    let rep = if self.ring == Ring::Z3 && x == 2 { -1i64 } else { x as i64 };
                    match ring {
                        Ring::Z2 => rep.rem_euclid(2),
                        Ring::Z3 => rep.rem_euclid(3),
                        Ring::Zt => rep,
                    }
                })
                .collect();
            CoeffVec::encode(&values, ring).unwrap()
        };
        let components = self
            .components
            .iter()
            .map(|c| Component { u: convert(&c.u), v: convert(&c.v), w: convert(&c.w) })
            .collect();
        let mut out = Scheme { dims: self.dims, ring, components };
        out.normalize();
        out
    }

    pub fn metrics(&self) -> SchemeMetrics {
        SchemeMetrics {
            rank: self.rank(),
            exponent: self.exponent(),
            zero_count: self.zero_count(),
            flip_potential: self.flip_potential(),
        }
    }
}

/// `3 ln r / ln(mnp)` for a rank-`r` scheme of the given shape.
pub fn exponent(dims: Dims, rank: usize) -> f64 {
    3.0 * (rank as f64).ln() / (dims.volume() as f64).ln()
}

/// Headline quality numbers for one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeMetrics {
    pub rank: usize,
    pub exponent: f64,
    pub zero_count: usize,
    pub flip_potential: usize,
}

fn set_one(row: &mut CoeffVec, pos: usize, value: i8) {
    // encode() is the validated entry point; this helper only places
    // singleton +1 entries for constructors.
    let mut values = vec![0i64; row.len()];
    values[pos] = value as i64;
    *row = CoeffVec::encode(&values, row.ring()).unwrap();
}
