//! Small square matrices over the scheme rings, used by sandwiching.
//!
//! Over `Z2` and `Z3` any invertible matrix is allowed; over `Zt` the group
//! is restricted to signed permutation matrices (exactly one entry of +-1
//! per row and column), the monomial subgroup that keeps coefficients in
//! {-1, 0, 1}.

use rand::seq::SliceRandom;
use rand::{Rng, RngExt};
use thiserror::Error;

use crate::ring::Ring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("matrix is not invertible over {0}")]
    NotInvertible(Ring),
    #[error("entry {0} is not a canonical {1} element")]
    OutOfRing(i64, Ring),
}

/// Dense `k x k` matrix with canonical ring entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    ring: Ring,
    k: usize,
    data: Vec<i8>,
}

impl Mat {
    pub fn from_rows(rows: &[Vec<i64>], ring: Ring) -> Result<Mat, MatError> {
        let k = rows.len();
        let mut data = Vec::with_capacity(k * k);
        for row in rows {
            assert_eq!(row.len(), k, "matrix must be square");
            for &x in row {
                if !ring.contains(x) {
                    return Err(MatError::OutOfRing(x, ring));
                }
                data.push(x as i8);
            }
        }
        Ok(Mat { ring, k, data })
    }

    pub fn identity(k: usize, ring: Ring) -> Mat {
        let mut m = Mat { ring, k, data: vec![0; k * k] };
        for i in 0..k {
            m.data[i * k + i] = 1;
        }
        m
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.k + j]
    }

    fn reduce(&self, x: i32) -> i8 {
        match self.ring {
            Ring::Z2 => x.rem_euclid(2) as i8,
            Ring::Z3 => x.rem_euclid(3) as i8,
            Ring::Zt => {
                debug_assert!((-1..=1).contains(&x), "Zt matrix product left the ring");
                x as i8
            }
        }
    }

    /// `self * other`. Over `Zt` both operands must be signed permutations
    /// so the product stays in the ring.
    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.k, other.k);
        assert_eq!(self.ring, other.ring);
        let k = self.k;
        let mut data = vec![0i8; k * k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0i32;
                for t in 0..k {
                    acc += i32::from(self.get(i, t)) * i32::from(other.get(t, j));
                }
                data[i * k + j] = self.reduce(acc);
            }
        }
        Mat { ring: self.ring, k, data }
    }

    /// Applies the matrix to a flattened `rows x cols` coefficient slice:
    /// `left * X * right`, with `X` read row-major from `flat`.
    pub fn sandwich_slice(left: &Mat, flat: &[i8], right: &Mat) -> Vec<i8> {
        let rows = left.k;
        let cols = right.k;
        debug_assert_eq!(flat.len(), rows * cols);
        let mut tmp = vec![0i32; rows * cols];
        // tmp = left * X
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0i32;
                for t in 0..rows {
                    acc += i32::from(left.get(i, t)) * i32::from(flat[t * cols + j]);
                }
                tmp[i * cols + j] = acc;
            }
        }
        let mut out = vec![0i8; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0i32;
                for t in 0..cols {
                    acc += tmp[i * cols + t] * i32::from(right.get(t, j));
                }
                out[i * cols + j] = left.reduce(acc);
            }
        }
        out
    }

    pub fn is_signed_permutation(&self) -> bool {
        let k = self.k;
        let mut col_seen = vec![false; k];
        for i in 0..k {
            let mut row_nonzero = 0;
            for j in 0..k {
                if self.get(i, j) != 0 {
                    row_nonzero += 1;
                    if col_seen[j] {
                        return false;
                    }
                    col_seen[j] = true;
                }
            }
            if row_nonzero != 1 {
                return false;
            }
        }
        true
    }

    /// Inverse over the ring. For `Zt` the matrix must be a signed
    /// permutation (then the inverse is its transpose); for `Z2`/`Z3`
    /// Gauss-Jordan elimination mod p is used.
    pub fn inverse(&self) -> Result<Mat, MatError> {
        match self.ring {
            Ring::Zt => {
                if !self.is_signed_permutation() {
                    return Err(MatError::NotInvertible(Ring::Zt));
                }
                let k = self.k;
                let mut data = vec![0i8; k * k];
                for i in 0..k {
                    for j in 0..k {
                        data[j * k + i] = self.get(i, j);
                    }
                }
                Ok(Mat { ring: Ring::Zt, k, data })
            }
            Ring::Z2 | Ring::Z3 => self.invert_mod_p(),
        }
    }

    fn invert_mod_p(&self) -> Result<Mat, MatError> {
        let p = i32::from(self.ring.modulus().unwrap());
        let k = self.k;
        let mut a: Vec<i32> = self.data.iter().map(|&x| i32::from(x)).collect();
        let mut inv: Vec<i32> = Mat::identity(k, self.ring).data.iter().map(|&x| i32::from(x)).collect();
        for col in 0..k {
            let pivot = (col..k)
                .find(|&r| a[r * k + col] % p != 0)
                .ok_or(MatError::NotInvertible(self.ring))?;
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
                inv.swap(col * k + j, pivot * k + j);
            }
            // Scale pivot row to 1 (only needed for p = 3, where 2^-1 = 2).
            let scale = if a[col * k + col].rem_euclid(p) == 2 { 2 } else { 1 };
            if scale != 1 {
                for j in 0..k {
                    a[col * k + j] = (a[col * k + j] * scale).rem_euclid(p);
                    inv[col * k + j] = (inv[col * k + j] * scale).rem_euclid(p);
                }
            }
            for r in 0..k {
                if r == col {
                    continue;
                }
                let factor = a[r * k + col].rem_euclid(p);
                if factor == 0 {
                    continue;
                }
                for j in 0..k {
                    a[r * k + j] = (a[r * k + j] + (p - factor) * a[col * k + j]).rem_euclid(p);
                    inv[r * k + j] =
                        (inv[r * k + j] + (p - factor) * inv[col * k + j]).rem_euclid(p);
                }
            }
        }
        Ok(Mat { ring: self.ring, k, data: inv.into_iter().map(|x| x as i8).collect() })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_ok()
    }

    /// Uniform random invertible matrix: rejection sampling over `Z2`/`Z3`,
    /// a uniform signed permutation over `Zt`.
    pub fn random_invertible(k: usize, ring: Ring, rng: &mut impl Rng) -> Mat {
        match ring {
            Ring::Zt => {
                let mut perm: Vec<usize> = (0..k).collect();
                perm.shuffle(rng);
                let mut data = vec![0i8; k * k];
                for (i, &j) in perm.iter().enumerate() {
                    data[i * k + j] = if rng.random::<bool>() { 1 } else { -1 };
                }
                Mat { ring, k, data }
            }
            Ring::Z2 | Ring::Z3 => {
                let p = ring.modulus().unwrap();
                loop {
                    let data: Vec<i8> = (0..k * k).map(|_| rng.random_range(0..p) as i8).collect();
                    let m = Mat { ring, k, data };
                    if m.is_invertible() {
                        return m;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ring in [Ring::Z2, Ring::Z3, Ring::Zt] {
            for k in 1..=6 {
                let m = Mat::random_invertible(k, ring, &mut rng);
                let inv = m.inverse().unwrap();
                assert_eq!(m.mul(&inv), Mat::identity(k, ring), "{ring} k={k}");
                assert_eq!(inv.mul(&m), Mat::identity(k, ring), "{ring} k={k}");
            }
        }
    }

    #[test]
    fn singular_matrices_are_rejected() {
        let m = Mat::from_rows(&[vec![1, 1], vec![1, 1]], Ring::Z2).unwrap();
        assert_eq!(m.inverse(), Err(MatError::NotInvertible(Ring::Z2)));
        let zt = Mat::from_rows(&[vec![1, 1], vec![0, 1]], Ring::Zt).unwrap();
        assert!(zt.inverse().is_err(), "non-monomial Zt matrix");
    }

    #[test]
    fn random_zt_matrices_are_signed_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = Mat::random_invertible(5, Ring::Zt, &mut rng);
            assert!(m.is_signed_permutation());
        }
    }

    #[test]
    fn gl2_f2_has_six_elements() {
        // Exhaustively: 6 of the 16 binary 2x2 matrices are invertible.
        let mut count = 0;
        for bits in 0..16u32 {
            let rows = vec![
                vec![(bits & 1) as i64, (bits >> 1 & 1) as i64],
                vec![(bits >> 2 & 1) as i64, (bits >> 3 & 1) as i64],
            ];
            if Mat::from_rows(&rows, Ring::Z2).unwrap().is_invertible() {
                count += 1;
            }
        }
        assert_eq!(count, 6);
    }
}
