//! Rank arithmetic and correctness preservation of the dimension-changing
//! operations over fuzzed inputs in all three rings.

mod common;

use flipmm::flip::expand;
use flipmm::meta::{extend, merge, product, project, MetaError};
use flipmm::{Dims, Ring, Scheme};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random verifying scheme: naive dims plus a few expansions.
fn fuzz_scheme(rng: &mut ChaCha8Rng, max_dim: usize, ring: Ring) -> Scheme {
    loop {
        let m = rng.random_range(1..=max_dim);
        let n = rng.random_range(1..=max_dim);
        let p = rng.random_range(1..=max_dim);
        let Ok(dims) = Dims::new(m, n, p) else { continue };
        let mut s = Scheme::naive(dims, ring);
        for _ in 0..rng.random_range(0..3u32) {
            if let Ok(t) = expand(&s, rng) {
                s = t;
            }
        }
        return s;
    }
}

#[test]
fn rank_arithmetic_holds_on_fuzzed_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut merges = 0;
    let mut products = 0;
    let mut extends = 0;
    for _ in 0..1_000 {
        let ring = [Ring::Z2, Ring::Z3, Ring::Zt][rng.random_range(0..3usize)];
        let a = fuzz_scheme(&mut rng, 3, ring);
        let b_same_ring = fuzz_scheme(&mut rng, 3, ring);

        let (da, db) = (a.dims(), b_same_ring.dims());
        if da.m == db.m && da.n == db.n {
            match merge(&a, &b_same_ring) {
                Ok(out) => {
                    assert_eq!(out.rank(), a.rank() + b_same_ring.rank());
                    assert_eq!(out.dims(), Dims { m: da.m, n: da.n, p: da.p + db.p });
                    assert!(out.verify());
                    merges += 1;
                }
                Err(MetaError::Scheme(_)) => {} // exceeded the encoding limit
                Err(e) => panic!("merge failed unexpectedly: {e}"),
            }
        }

        match product(&a, &b_same_ring) {
            Ok(out) => {
                assert_eq!(out.rank(), a.rank() * b_same_ring.rank());
                assert_eq!(
                    out.dims(),
                    Dims { m: da.m * db.m, n: da.n * db.n, p: da.p * db.p }
                );
                assert!(out.verify());
                products += 1;
            }
            Err(MetaError::Scheme(_)) => {}
            Err(e) => panic!("product failed unexpectedly: {e}"),
        }

        match extend(&a) {
            Ok(out) => {
                assert_eq!(out.rank(), a.rank() + da.m * da.n);
                assert!(out.verify());
                extends += 1;
            }
            Err(MetaError::Scheme(_)) => {}
            Err(e) => panic!("extend failed unexpectedly: {e}"),
        }

        if da.p >= 2 {
            let slice = rng.random_range(0..da.p);
            let out = project(&a, slice).unwrap();
            assert!(out.rank() <= a.rank());
            assert!(out.verify());
        }
    }
    assert!(merges > 50, "merge fuzz coverage too thin: {merges}");
    assert!(products > 500, "product fuzz coverage too thin: {products}");
    assert!(extends > 500, "extend fuzz coverage too thin: {extends}");
}

#[test]
fn oversized_meta_results_always_error() {
    // 128 entries is a hard cap, never a silent truncation.
    let a = Scheme::naive(Dims::new(4, 4, 8).unwrap(), Ring::Z2);
    let b = Scheme::naive(Dims::new(4, 4, 25).unwrap(), Ring::Z2); // merge: n*p = 132
    match merge(&a, &b) {
        Err(MetaError::Scheme(e)) => assert!(e.to_string().contains("128")),
        other => panic!("expected DimsTooLarge, got {other:?}"),
    }
    match product(&a, &a) {
        Err(MetaError::Scheme(_)) => {}
        other => panic!("expected DimsTooLarge, got {other:?}"),
    }
}
