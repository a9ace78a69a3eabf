//! Reduced density matrices, entanglement entropy profiles and the
//! finite-size scaling fit S(L, n) = (d_f / 2) log₂(n (L − n) / L) + S₀.
//!
//! For a state Σ_M w_M |L, M⟩ the Schmidt decomposition of each basis state
//! gives the block amplitude matrix A[κ][q] = w_{κ+q} λ(L, n, κ, κ+q) with
//! ρ = A A†. Entropies are computed from the squared singular values of A
//! (pivoted QR plus a small Hermitian eigenproblem); the dense ρ route is
//! kept for validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::{
    gram_spectrum, hermitian_eigenvalues_with, linear_fit, EigenMethod, HermitianMatrix,
};
use crate::su2::{nu_table, WVector};
use crate::Complex64;

/// Eigenvalues below this floor contribute nothing to the entropy.
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Relative residual at which the pivoted QR stops.
pub const QR_TOLERANCE: f64 = 1e-14;

/// Row-major block × environment amplitude matrix of a bipartition.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl AmplitudeMatrix {
    /// ρ = A A† as a dense Hermitian matrix.
    pub fn rdm(&self) -> Result<HermitianMatrix> {
        let (r, c) = (self.rows, self.cols);
        Ok(HermitianMatrix::from_upper_fn(r, |i, j| {
            let a = &self.data[i * c..(i + 1) * c];
            let b = &self.data[j * c..(j + 1) * c];
            a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
        }))
    }

    /// Nonzero eigenvalues of ρ, ascending. All-zero rows and columns are
    /// dropped and the QR runs over the shorter side.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let (r, c) = (self.rows, self.cols);
        let live_rows: Vec<usize> =
            (0..r).filter(|&i| self.data[i * c..(i + 1) * c].iter().any(|z| z.norm_sqr() > 0.0)).collect();
        let live_cols: Vec<usize> =
            (0..c).filter(|&j| live_rows.iter().any(|&i| self.data[i * c + j].norm_sqr() > 0.0)).collect();
        let (m, p) = (live_rows.len(), live_cols.len());
        if m == 0 || p == 0 {
            return Ok(Vec::new());
        }
        let nonzero: Vec<f64> = self.data.iter().map(|z| z.norm_sqr()).filter(|&x| x > 0.0).collect();
        if nonzero.len() == m && m == p {
            // One entry per row and column: the Schmidt form is explicit.
            let mut ev = nonzero;
            ev.sort_by(f64::total_cmp);
            return Ok(ev);
        }
        // Column-major X whose columns run over the shorter side.
        let mut x = Vec::with_capacity(m * p);
        if m <= p {
            for &i in &live_rows {
                x.extend(live_cols.iter().map(|&j| self.data[i * c + j]));
            }
            gram_spectrum(&mut x, p, m, QR_TOLERANCE)
        } else {
            for &j in &live_cols {
                x.extend(live_rows.iter().map(|&i| self.data[i * c + j]));
            }
            gram_spectrum(&mut x, m, p, QR_TOLERANCE)
        }
    }
}

/// A pure state with an exact block/environment amplitude matrix.
pub trait SchmidtSource: Sync {
    fn l(&self) -> usize;
    fn amplitude_matrix(&self, n: usize) -> Result<AmplitudeMatrix>;
}

impl SchmidtSource for WVector {
    fn l(&self) -> usize {
        WVector::l(self)
    }

    fn amplitude_matrix(&self, n: usize) -> Result<AmplitudeMatrix> {
        let l = WVector::l(self);
        if n == 0 || n >= l {
            return Err(Error::domain(format!("block size n = {n} outside [1, {}]", l.saturating_sub(1))));
        }
        let s = self.spin();
        let nu = nu_table(s, l);
        let (rows, cols) = (s.max_m(n) + 1, s.max_m(l - n) + 1);
        let w = self.amps();
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        for kappa in 0..rows {
            let a = nu.ln_nu2(n, kappa);
            for q in 0..cols {
                let wm = w[kappa + q];
                if wm.norm_sqr() == 0.0 {
                    continue;
                }
                let lam = (0.5 * (a + nu.ln_nu2(l - n, q) - nu.ln_nu2(l, kappa + q))).exp();
                data[kappa * cols + q] = wm * lam;
            }
        }
        Ok(AmplitudeMatrix { rows, cols, data })
    }
}

/// Dense ρ_L(n) of an SU(2) state.
pub fn rdm(w: &WVector, n: usize) -> Result<HermitianMatrix> {
    w.amplitude_matrix(n)?.rdm()
}

/// −Σ Λ log₂ Λ over eigenvalues above [`EIGEN_FLOOR`].
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum.iter().filter(|&&x| x >= EIGEN_FLOOR).map(|&x| -x * x.log2()).sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits of a validated density matrix.
pub fn entropy(rho: &HermitianMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("density matrix trace {tr} differs from 1 by more than 1e-8")));
    }
    let method = if rho.dim() <= 128 { EigenMethod::Jacobi } else { EigenMethod::Tridiagonal };
    let ev = hermitian_eigenvalues_with(rho, method)?;
    if ev[0] < -1e-8 {
        return Err(Error::domain(format!("density matrix has negative eigenvalue {:e}", ev[0])));
    }
    Ok(entropy_of_spectrum(&ev))
}

/// Entropy of the n-site block from the Schmidt spectrum.
pub fn entanglement_entropy<S: SchmidtSource + ?Sized>(w: &S, n: usize) -> Result<f64> {
    Ok(entropy_of_spectrum(&w.amplitude_matrix(n)?.spectrum()?))
}

/// S(L, n) over a set of block sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub l: usize,
    /// (n, S in bits), ascending in n.
    pub points: Vec<(usize, f64)>,
}

impl EntropyProfile {
    pub fn get(&self, n: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == n).map(|p| p.1)
    }

    /// CSV with header `n,S_bits`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,S_bits\n");
        for (n, s) in &self.points {
            out.push_str(&format!("{n},{s:.17e}\n"));
        }
        out
    }
}

/// Entropies for every n in `n_set`. The spectra of the n and L − n cuts
/// come from the same matrix (one is the transpose of the other), so each
/// pair is computed once.
pub fn entropy_profile<S: SchmidtSource + ?Sized>(w: &S, n_set: &[usize]) -> Result<EntropyProfile> {
    let l = w.l();
    if let Some(&bad) = n_set.iter().find(|&&n| n == 0 || n >= l) {
        return Err(Error::domain(format!("block size n = {bad} outside [1, {}]", l.saturating_sub(1))));
    }
    let mut distinct: Vec<usize> = n_set.iter().map(|&n| n.min(l - n)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    // Largest cuts first so the pool finishes together.
    let order: Vec<usize> = distinct.iter().rev().copied().collect();
    let values = exec::map_indexed(order.len(), |i| entanglement_entropy(w, order[i]));
    let mut by_cut = vec![f64::NAN; l / 2 + 1];
    for (n, v) in order.iter().zip(values) {
        by_cut[*n] = v?;
    }
    let mut points: Vec<(usize, f64)> = n_set.iter().map(|&n| (n, by_cut[n.min(l - n)])).collect();
    points.sort_by_key(|p| p.0);
    points.dedup_by_key(|p| p.0);
    Ok(EntropyProfile { l, points })
}

/// Every block size 1..L−1.
pub fn full_range(l: usize) -> Vec<usize> {
    (1..l).collect()
}

/// n-window used by the scaling fit.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FitWindow {
    /// Drop n < trim·L and n > (1 − trim)·L.
    pub trim: Option<f64>,
}

impl FitWindow {
    pub fn contains(&self, n: usize, l: usize) -> bool {
        match self.trim {
            None => true,
            Some(t) => {
                let x = n as f64;
                x >= t * l as f64 && x <= (1.0 - t) * l as f64
            }
        }
    }
}

/// Fitted fractal dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfEstimate {
    pub d_f: f64,
    pub s0: f64,
    pub max_abs_residual: f64,
    pub rel_err_vs_target: Option<f64>,
    pub points_used: usize,
}

/// Least squares of S against log₂(n (L − n) / L); d_f = 2 · slope.
pub fn fit_df(profile: &EntropyProfile, window: FitWindow, target: Option<f64>) -> Result<DfEstimate> {
    let l = profile.l as f64;
    let pts: Vec<(f64, f64)> = profile
        .points
        .iter()
        .filter(|(n, _)| window.contains(*n, profile.l))
        .map(|&(n, s)| (((n as f64) * (l - n as f64) / l).log2(), s))
        .collect();
    if pts.len() < 10 {
        return Err(Error::domain(format!("fit needs at least 10 points, got {}", pts.len())));
    }
    let fit = linear_fit(&pts)?;
    let d_f = 2.0 * fit.slope;
    Ok(DfEstimate {
        d_f,
        s0: fit.intercept,
        max_abs_residual: fit.max_abs_residual,
        rel_err_vs_target: target.map(|t| (d_f - t).abs() / t),
        points_used: pts.len(),
    })
}

/// d_f(k) for each step in `k_list`; `experiment` builds the profile at k.
pub fn df_convergence(
    mut experiment: impl FnMut(u32) -> Result<EntropyProfile>,
    k_list: &[u32],
    window: FitWindow,
    target: Option<f64>,
) -> Result<Vec<(u32, DfEstimate)>> {
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("k_list must be strictly ascending"));
    }
    k_list.iter().map(|&k| Ok((k, fit_df(&experiment(k)?, window, target)?))).collect()
}
