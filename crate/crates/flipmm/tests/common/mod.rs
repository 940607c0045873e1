//! Shared oracles for the integration suites. Everything here recomputes
//! results element-wise or by direct matrix arithmetic, independently of
//! the packed implementations it checks.
#![allow(dead_code)] // each test binary uses its own subset

use flipmm::{Ring, Scheme};
use rand::{Rng, RngExt};

/// Canonical elements of a ring, for sampling.
pub fn ring_elements(ring: Ring) -> &'static [i64] {
    match ring {
        Ring::Z2 => &[0, 1],
        Ring::Z3 => &[0, 1, 2],
        Ring::Zt => &[-1, 0, 1],
    }
}

/// Element-wise reference for the packed vector sum. `None` mirrors the
/// `Zt` out-of-range rejection.
pub fn add_oracle(a: &[i8], b: &[i8], ring: Ring) -> Option<Vec<i8>> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let s = i64::from(x) + i64::from(y);
            match ring {
                Ring::Z2 => Some(s.rem_euclid(2) as i8),
                Ring::Z3 => Some(s.rem_euclid(3) as i8),
                Ring::Zt => {
                    if (-1..=1).contains(&s) {
                        Some(s as i8)
                    } else {
                        None
                    }
                }
            }
        })
        .collect()
}

pub fn neg_oracle(a: &[i8], ring: Ring) -> Vec<i8> {
    a.iter()
        .map(|&x| match ring {
            Ring::Z2 => x,
            Ring::Z3 => (-i64::from(x)).rem_euclid(3) as i8,
            Ring::Zt => -x,
        })
        .collect()
}

pub fn sub_oracle(a: &[i8], b: &[i8], ring: Ring) -> Option<Vec<i8>> {
    add_oracle(a, &neg_oracle(b, ring), ring)
}

/// Multiplies `a` (m x n) by `b` (n x p) through the scheme, element-wise
/// over the integers, and reduces per the ring. The reference path never
/// touches the packed arithmetic.
pub fn multiply_through_scheme(s: &Scheme, a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = s.dims();
    let mut c = vec![vec![0i64; d.p]; d.m];
    for comp in s.components() {
        let ua: i64 = comp
            .u
            .decode()
            .iter()
            .enumerate()
            .map(|(pos, &coef)| i64::from(coef) * a[pos / d.n][pos % d.n])
            .sum();
        let vb: i64 = comp
            .v
            .decode()
            .iter()
            .enumerate()
            .map(|(pos, &coef)| i64::from(coef) * b[pos / d.p][pos % d.p])
            .sum();
        let prod = ua * vb;
        for (pos, &coef) in comp.w.decode().iter().enumerate() {
            // w rows address the transposed result: position = k2 * m + k1
            let (k2, k1) = (pos / d.m, pos % d.m);
            c[k1][k2] += i64::from(coef) * prod;
        }
    }
    c
}

/// Standard matrix multiplication, the independent reference.
pub fn multiply_standard(a: &[Vec<i64>], b: &[Vec<i64>], n: usize, p: usize) -> Vec<Vec<i64>> {
    let m = a.len();
    let mut c = vec![vec![0i64; p]; m];
    for i in 0..m {
        for j in 0..p {
            for k in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Checks the scheme against 20 random matrix products with entries in
/// -3..=3: exact equality over `Zt`, congruence for the modular rings.
pub fn matrix_cross_check(s: &Scheme, rng: &mut impl Rng) -> bool {
    let d = s.dims();
    for _ in 0..20 {
        let a: Vec<Vec<i64>> =
            (0..d.m).map(|_| (0..d.n).map(|_| rng.random_range(-3..=3)).collect()).collect();
        let b: Vec<Vec<i64>> =
            (0..d.n).map(|_| (0..d.p).map(|_| rng.random_range(-3..=3)).collect()).collect();
        let through = multiply_through_scheme(s, &a, &b);
        let standard = multiply_standard(&a, &b, d.n, d.p);
        for i in 0..d.m {
            for j in 0..d.p {
                let ok = match s.ring() {
                    Ring::Zt => through[i][j] == standard[i][j],
                    Ring::Z2 => (through[i][j] - standard[i][j]).rem_euclid(2) == 0,
                    Ring::Z3 => (through[i][j] - standard[i][j]).rem_euclid(3) == 0,
                };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}
