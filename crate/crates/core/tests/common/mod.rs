//! Helpers shared by the integration tests.
#![allow(dead_code)]

use fracent::numerics::HermitianMatrix;
use fracent::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex(r: &mut ChaCha8Rng) -> Complex64 {
    c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let mut a = vec![c(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = c(r.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = random_complex(r);
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    HermitianMatrix::from_row_major(n, &a)
}

/// Number of eigenvalues of `h` below `x`, from the inertia of h − x·I
/// (Gaussian elimination without pivoting; a zero pivot is nudged).
pub fn count_below(h: &HermitianMatrix, x: f64) -> usize {
    let n = h.dim();
    let mut a: Vec<Complex64> = (0..n * n).map(|k| h.entry(k / n, k % n)).collect();
    for i in 0..n {
        a[i * n + i] -= x;
    }
    let mut negatives = 0;
    for p in 0..n {
        let mut piv = a[p * n + p].re;
        if piv == 0.0 {
            piv = 1e-300;
        }
        if piv < 0.0 {
            negatives += 1;
        }
        for i in p + 1..n {
            let f = a[i * n + p] / piv;
            for j in p + 1..n {
                let t = f * a[p * n + j];
                a[i * n + j] -= t;
            }
        }
    }
    negatives
}

/// Eigenvalues by bisection on the inertia count.
pub fn bisection_eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    let n = h.dim();
    let bound = h.frobenius_norm() + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(h, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// −Σ p log₂ p over entries above the floor.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 1e-14).map(|&x| -x * x.log2()).sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
