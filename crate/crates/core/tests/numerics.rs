mod common;

use common::*;
use fracent::numerics::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn log_binomial_small_and_identity() {
    assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-15);
    for n in [0, 1, 7, 500, 10_000] {
        assert_eq!(log_binomial(n, 0).unwrap(), 0.0);
    }
    assert!(log_binomial(3, 4).is_err());
}

#[test]
fn log_binomial_matches_direct_log_sum() {
    let direct: f64 = (101..=200).map(|m| (m as f64).ln()).sum::<f64>() - (1..=100).map(|m| (m as f64).ln()).sum::<f64>();
    assert!((log_binomial(200, 100).unwrap() - direct).abs() < 1e-12);
    // n up to 10⁴ against the same oracle, summed in pairs to limit rounding.
    for (n, k) in [(10_000usize, 5_000usize), (10_000, 17), (7_777, 3_000)] {
        let direct: f64 = (0..k).map(|i| ((n - i) as f64 / (k - i) as f64).ln()).sum();
        assert!((log_binomial(n, k).unwrap() - direct).abs() < 1e-12 * direct.max(1.0), "n={n} k={k}");
    }
}

#[test]
fn exp_log_binomial_matches_exact_integers() {
    let mut row: Vec<u128> = vec![1];
    for n in 1..=60usize {
        let mut next = vec![1u128; n + 1];
        for k in 1..n {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        for (k, &exact) in row.iter().enumerate() {
            let v = log_binomial(n, k).unwrap().exp();
            assert!((v - exact as f64).abs() <= 1e-12 * exact as f64, "C({n},{k})");
        }
    }
}

#[test]
fn slog_sum_examples() {
    let s = slog_sum(&[SignedLog::from_ln(2f64.ln()), SignedLog::from_ln(3f64.ln())]);
    assert_eq!(s.sign(), 1);
    assert!((s.logmag() - 5f64.ln()).abs() < 1e-15);
    let z = slog_sum(&[SignedLog::new(1, 2f64.ln()), SignedLog::new(-1, 2f64.ln())]);
    assert!(z.is_zero());
}

#[test]
fn slog_sum_matches_direct_summation() {
    let mut r = rng(11);
    for _ in 0..20 {
        let terms: Vec<SignedLog> = (0..100)
            .map(|_| SignedLog::new(if r.gen_bool(0.5) { 1 } else { -1 }, r.gen_range(-5.0..5.0)))
            .collect();
        let direct: f64 = terms.iter().map(|t| t.to_f64()).sum();
        let s = slog_sum(&terms).to_f64();
        let scale: f64 = terms.iter().map(|t| t.to_f64().abs()).sum();
        assert!((s - direct).abs() <= 1e-12 * direct.abs().max(1e-3 * scale), "{s} vs {direct}");
    }
}

#[test]
fn slog_sum_is_permutation_invariant() {
    let mut r = rng(5);
    let mut terms: Vec<SignedLog> = (0..64)
        .map(|_| SignedLog::new(if r.gen_bool(0.3) { -1 } else { 1 }, r.gen_range(-30.0..30.0)))
        .collect();
    let base = slog_sum(&terms).to_f64();
    for _ in 0..20 {
        terms.shuffle(&mut r);
        let v = slog_sum(&terms).to_f64();
        assert!((v - base).abs() <= 1e-12 * base.abs());
    }
}

#[test]
fn eigenvalues_identity_and_pauli_x() {
    let id = HermitianMatrix::from_real_diagonal(&[1.0, 1.0]);
    assert_eq!(hermitian_eigenvalues(&id).unwrap(), vec![1.0, 1.0]);
    let px = HermitianMatrix::from_row_major(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let ev = hermitian_eigenvalues(&px).unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
}

#[test]
fn eigenvalues_match_bisection_oracle() {
    let mut r = rng(2024);
    for trial in 0..10 {
        let h = random_hermitian(&mut r, 6);
        let oracle = bisection_eigenvalues(&h);
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let ev = hermitian_eigenvalues_with(&h, method).unwrap();
            assert!(max_abs_diff(&ev, &oracle) < 1e-10, "trial {trial} {method:?}");
        }
    }
}

#[test]
fn eigenvalues_preserve_trace_and_agree_at_moderate_size() {
    let mut r = rng(7);
    for n in [1, 2, 17, 60, 150] {
        let h = random_hermitian(&mut r, n);
        let jac = hermitian_eigenvalues(&h).unwrap();
        let sum: f64 = jac.iter().sum();
        assert!((sum - h.trace()).abs() <= 1e-10 * n as f64);
        let ql = hermitian_eigenvalues_with(&h, EigenMethod::Tridiagonal).unwrap();
        assert!(max_abs_diff(&jac, &ql) < 1e-12 * (n as f64).max(1.0), "n={n}");
    }
}

#[test]
fn gram_spectrum_matches_dense_gram() {
    let mut r = rng(99);
    for (m, p, rank) in [(9, 4, 4), (5, 12, 3), (30, 30, 7), (40, 8, 8)] {
        // X = U V with inner dimension `rank`.
        let u: Vec<_> = (0..m * rank).map(|_| random_complex(&mut r)).collect();
        let v: Vec<_> = (0..rank * p).map(|_| random_complex(&mut r)).collect();
        let mut x = vec![c(0.0, 0.0); m * p];
        for j in 0..p {
            for i in 0..m {
                x[j * m + i] = (0..rank).map(|t| u[i * rank + t] * v[t * p + j]).sum();
            }
        }
        let g = HermitianMatrix::from_upper_fn(p, |a, b| (0..m).map(|i| x[a * m + i].conj() * x[b * m + i]).sum());
        let dense: Vec<f64> = hermitian_eigenvalues(&g).unwrap().into_iter().filter(|&e| e > 1e-9).collect();
        let mut buf = x.clone();
        let got: Vec<f64> = gram_spectrum(&mut buf, m, p, 1e-16).unwrap().into_iter().filter(|&e| e > 1e-9).collect();
        assert_eq!(got.len(), rank);
        let scale = dense.last().copied().unwrap();
        assert!(max_abs_diff(&got, &dense) < 1e-11 * scale, "{m}x{p}");
    }
}

#[test]
fn fit_examples() {
    let f = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
    assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14 && f.max_abs_residual < 1e-14);
    let f = linear_fit(&[(0.0, 4.2), (1.0, 4.2), (2.0, 4.2)]).unwrap();
    assert!(f.slope.abs() < 1e-15 && (f.intercept - 4.2).abs() < 1e-14);
    assert!(linear_fit(&[(1.0, 0.0), (1.0, 2.0)]).is_err());
    assert!(linear_fit(&[(1.0, 0.0)]).is_err());
}

#[test]
fn fit_synthetic_regression() {
    let mut r = rng(3);
    let pts: Vec<(f64, f64)> = (0..50)
        .map(|i| {
            let x = i as f64 / 5.0;
            (x, 0.5 * x + 0.3 + r.gen_range(-1e-3..1e-3))
        })
        .collect();
    let f = linear_fit(&pts).unwrap();
    assert!((f.slope - 0.5).abs() < 1e-2);
    assert!(f.max_abs_residual <= 2e-3);
}

proptest! {
    #[test]
    fn fit_minimizes_squared_residuals(ys in proptest::collection::vec(-10.0f64..10.0, 3..20), d in -0.1f64..0.1) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
        let f = linear_fit(&pts).unwrap();
        let sse = |a: f64, b: f64| pts.iter().map(|(x, y)| (y - a * x - b).powi(2)).sum::<f64>();
        let best = sse(f.slope, f.intercept);
        prop_assert!(best <= sse(f.slope + d, f.intercept) + 1e-9);
        prop_assert!(best <= sse(f.slope, f.intercept + d) + 1e-9);
    }
}
