mod common;

use common::*;
use fracent::coefficients::{CoefficientProfile, ZeroInjection};
use fracent::entanglement::entanglement_entropy;
use fracent::fractal::{CantorSpec, CantorSupport};
use fracent::numerics::HermitianMatrix;
use fracent::oracle::*;
use fracent::su2::*;
use rand::Rng;
use std::f64::consts::PI;

#[test]
fn basis_state_examples() {
    let r = 0.5f64.sqrt();
    let t = dense_basis_state(2, SpinS::HALF, 1).unwrap();
    let want = [c(0.0, 0.0), c(r, 0.0), c(r, 0.0), c(0.0, 0.0)];
    assert!(t.amps.iter().zip(&want).all(|(a, b)| (a - b).norm() < 1e-15));

    for s in [SpinS::HALF, SpinS::ONE, SpinS::new(3).unwrap()] {
        let hw = dense_basis_state(4, s, 0).unwrap();
        assert_eq!(hw.amps[0], c(1.0, 0.0));
        assert!(hw.amps[1..].iter().all(|z| z.norm() == 0.0));
    }

    let (_, norm) = dense_basis_state_with_norm(3, SpinS::ONE, 2).unwrap();
    assert!((norm - 2.0 * nu(3, 2, SpinS::ONE).to_f64()).abs() < 1e-12);
}

#[test]
fn multi_index_basis_examples() {
    // F₁|11⟩ = |21⟩ + |12⟩ on levels {1, 2, 3} (indices 0, 1, 2).
    let (st, norm) = dense_basis_state_n(2, 2, &[1, 0]).unwrap();
    assert!((norm - 2f64.sqrt()).abs() < 1e-15);
    assert!((st.amps[1].re - 0.5f64.sqrt()).abs() < 1e-15 && (st.amps[3].re - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(dense_basis_state_n(2, 2, &[1]).is_err());
}

#[test]
fn product_state_examples() {
    let e1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let st = dense_product_state(5, &e1).unwrap();
    assert_eq!(st.amps.len(), 243);
    assert_eq!(st.amps[0], c(1.0, 0.0));
    assert!((st.norm() - 1.0).abs() < 1e-15);

    let mut r = rng(3);
    for s in [SpinS::HALF, SpinS::ONE] {
        for l in 1..=6 {
            let (theta, phi) = (r.gen_range(0.0..PI), r.gen_range(0.0..2.0 * PI));
            let prod = dense_product_state(l, &site_amp(s, theta, phi)).unwrap();
            assert!((prod.norm() - 1.0).abs() < 1e-13);
            let a = coherent_amps(l, s, theta, phi).unwrap();
            for m in 0..=s.max_m(l) {
                let ov = overlap(&dense_basis_state(l, s, m).unwrap(), &prod);
                assert!((ov - a.amps()[m]).norm() < 1e-12);
            }
        }
    }
    assert!(matches!(dense_product_state(30, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(fracent::Error::Resource(_))));
}

#[test]
fn entropy_examples() {
    let prod = dense_product_state(6, &site_amp(SpinS::ONE, 1.0, 0.5)).unwrap();
    for n in 1..6 {
        assert!(dense_entropy(&prod, n).unwrap().abs() < 1e-12);
    }
    let t = dense_basis_state(2, SpinS::HALF, 1).unwrap();
    assert!((dense_entropy(&t, 1).unwrap() - 1.0).abs() < 1e-13);

    let l = 6;
    let sup = CantorSupport::new(CantorSpec::spread(2, 3), 1, 4).unwrap();
    let w = assemble_state(l, SpinS::HALF, &Su2Support::CantorPhi { support: sup, theta: EQUATOR }, &CoefficientProfile::Equal, ZeroInjection::none()).unwrap();
    let terms: Vec<_> = [PI / 3.0, 5.0 * PI / 3.0]
        .iter()
        .map(|&phi| (c(1.0, 0.0), dense_product_state(l, &site_amp(SpinS::HALF, EQUATOR, phi)).unwrap()))
        .collect();
    let dense = DenseState::superpose(&terms).unwrap();
    assert!((dense_entropy(&dense, 3).unwrap() - entanglement_entropy(&w, 3).unwrap()).abs() < 1e-10);
    assert!(dense_entropy(&dense, 0).is_err() && dense_entropy(&dense, 6).is_err());
}

#[test]
fn dense_spectrum_matches_bisection_of_explicit_partial_trace() {
    let mut r = rng(8);
    let (l, d) = (5, 2);
    let amps: Vec<_> = (0..32).map(|_| random_complex(&mut r)).collect();
    let st = DenseState { l, d, amps };
    let norm2: f64 = st.amps.iter().map(|z| z.norm_sqr()).sum();
    for n in 1..l {
        let rows = d.pow(n as u32);
        let cols = st.amps.len() / rows;
        let rho = HermitianMatrix::from_upper_fn(rows, |i, j| (0..cols).map(|k| st.amps[i * cols + k] * st.amps[j * cols + k].conj()).sum::<fracent::Complex64>() / norm2);
        let mut want: Vec<f64> = bisection_eigenvalues(&rho).into_iter().filter(|&x| x > 1e-12).collect();
        let normalized = DenseState { amps: st.amps.iter().map(|z| z / norm2.sqrt()).collect(), ..st.clone() };
        let mut got: Vec<f64> = dense_spectrum(&normalized, n).unwrap().into_iter().filter(|&x| x > 1e-12).collect();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        assert!(max_abs_diff(&got, &want) < 1e-10, "n={n}");
    }
}

#[test]
fn dense_entropy_is_bipartition_symmetric() {
    // Holds for permutation-symmetric states, where the first L − n sites
    // are equivalent to the complement of the first n.
    let mut r = rng(9);
    for (l, d) in [(6usize, 2usize), (5, 3), (4, 4)] {
        let terms: Vec<_> = (0..4)
            .map(|_| {
                let v: Vec<_> = (0..d).map(|_| random_complex(&mut r)).collect();
                let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let v: Vec<_> = v.iter().map(|z| z / nv).collect();
                (random_complex(&mut r), dense_product_state(l, &v).unwrap())
            })
            .collect();
        let st = DenseState::superpose(&terms).unwrap();
        for n in 1..l {
            let (a, b) = (dense_entropy(&st, n).unwrap(), dense_entropy(&st, l - n).unwrap());
            assert!((a - b).abs() < 1e-10, "L={l} d={d} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn randomized_suite_passes() {
    let rep = run_oracle_suite(120, 2024).unwrap();
    assert_eq!(rep.cases, 120);
    assert!(rep.entropies_checked >= 120);
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.max_entropy_err <= 1e-10 && rep.max_amp_err <= 1e-10);
}
