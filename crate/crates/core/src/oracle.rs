//! Brute-force reference on the full (2s+1)^L Hilbert space.
//!
//! Nothing here reuses the Schmidt machinery: basis states are built by
//! applying global lowering operators to the highest weight state, and
//! entropies come from an explicit partial trace.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coefficients::{CoefficientProfile, ZeroInjection};
use crate::entanglement::entanglement_entropy;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, HermitianMatrix};
use crate::su2::{assemble_state, coherent_amps, site_amp, SpinS, Su2Support};

/// Largest dense state the oracle will build.
pub const DENSE_BUDGET: usize = 10_000_000;

/// Amplitudes over the product basis, site 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub l: usize,
    pub d: usize,
    pub amps: Vec<Complex64>,
}

fn dense_len(l: usize, d: usize) -> Result<usize> {
    match d.checked_pow(l as u32) {
        Some(n) if n <= DENSE_BUDGET => Ok(n),
        _ => Err(Error::Resource(format!("dense state {d}^{l} exceeds the {DENSE_BUDGET} amplitude budget"))),
    }
}

impl DenseState {
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::numerical("dense state vanished"));
        }
        self.amps.iter_mut().for_each(|z| *z /= n);
        Ok(self)
    }

    /// Σ c_i |state_i⟩, normalized.
    pub fn superpose(terms: &[(Complex64, DenseState)]) -> Result<Self> {
        let first = &terms.first().ok_or_else(|| Error::domain("empty superposition"))?.1;
        let mut amps = vec![Complex64::new(0.0, 0.0); first.amps.len()];
        for (c, s) in terms {
            for (a, x) in amps.iter_mut().zip(&s.amps) {
                *a += c * x;
            }
        }
        DenseState { l: first.l, d: first.d, amps }.normalized()
    }
}

/// ⟨a|b⟩.
pub fn overlap(a: &DenseState, b: &DenseState) -> Complex64 {
    a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum()
}

/// Applies Σ_j op_j where op maps local level `from` to `to` with amplitude
/// `coef(from)`, for every level pair returned by `ladder`.
fn apply_global(state: &[Complex64], l: usize, d: usize, ladder: &dyn Fn(usize) -> Option<(usize, f64)>) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (idx, &a) in state.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let mut stride = 1;
        let mut rest = idx;
        for _ in 0..l {
            let x = rest % d;
            rest /= d;
            if let Some((y, c)) = ladder(x) {
                let target = idx - x * stride + y * stride;
                out[target] += a * c;
            }
            stride *= d;
        }
    }
    out
}

/// |L, M⟩ = S₋^M |s⋯s⟩ / ‖·‖ together with the norm before normalization.
pub fn dense_basis_state_with_norm(l: usize, s: SpinS, m: usize) -> Result<(DenseState, f64)> {
    let d = s.dim();
    let len = dense_len(l, d)?;
    let two_s = s.two_s() as usize;
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    amps[0] = Complex64::new(1.0, 0.0);
    // Level x = s − m; S₋ sends x to x + 1 with √((2s − x)(x + 1)).
    let lower = |x: usize| (x < two_s).then(|| (x + 1, (((two_s - x) * (x + 1)) as f64).sqrt()));
    for _ in 0..m {
        amps = apply_global(&amps, l, d, &lower);
    }
    let st = DenseState { l, d, amps };
    let norm = st.norm();
    Ok((st.normalized()?, norm))
}

pub fn dense_basis_state(l: usize, s: SpinS, m: usize) -> Result<DenseState> {
    Ok(dense_basis_state_with_norm(l, s, m)?.0)
}

/// Π_α F_α^{M_α} |1⋯1⟩ / ‖·‖ with F_α = Σ_j |α+1⟩⟨1|_j, plus the raw norm.
pub fn dense_basis_state_n(l: usize, two_s: usize, m: &[u32]) -> Result<(DenseState, f64)> {
    if m.len() != two_s {
        return Err(Error::domain("multi-index length must equal 2s"));
    }
    let d = two_s + 1;
    let len = dense_len(l, d)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); len];
    amps[0] = Complex64::new(1.0, 0.0);
    for (alpha, &count) in m.iter().enumerate() {
        let f = |x: usize| (x == 0).then_some((alpha + 1, 1.0));
        for _ in 0..count {
            amps = apply_global(&amps, l, d, &f);
        }
    }
    let st = DenseState { l, d, amps };
    let norm = st.norm();
    Ok((st.normalized()?, norm))
}

/// Kronecker power v ⊗ v ⊗ ⋯ ⊗ v.
pub fn dense_product_state(l: usize, v: &[Complex64]) -> Result<DenseState> {
    let d = v.len();
    let len = dense_len(l, d)?;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..l {
        amps = amps.iter().flat_map(|a| v.iter().map(move |x| a * x)).collect();
    }
    debug_assert_eq!(amps.len(), len);
    Ok(DenseState { l, d, amps })
}

/// Eigenvalues of the reduced density matrix of the first n sites.
pub fn dense_spectrum(state: &DenseState, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n >= state.l {
        return Err(Error::domain(format!("block size n = {n} outside [1, {}]", state.l - 1)));
    }
    let rows = state.d.pow(n as u32);
    let cols = state.amps.len() / rows;
    let psi = |r: usize, c: usize| state.amps[r * cols + c];
    // The smaller of Ψ Ψ† and Ψ† Ψ carries the same nonzero spectrum.
    let h = if rows <= cols {
        HermitianMatrix::from_upper_fn(rows, |i, j| (0..cols).map(|c| psi(i, c) * psi(j, c).conj()).sum())
    } else {
        HermitianMatrix::from_upper_fn(cols, |i, j| (0..rows).map(|r| psi(r, j) * psi(r, i).conj()).sum())
    };
    hermitian_eigenvalues(&h)
}

/// −Σ Λ log₂ Λ of the n-site block.
pub fn dense_entropy(state: &DenseState, n: usize) -> Result<f64> {
    Ok(dense_spectrum(state, n)?.iter().filter(|&&x| x > 1e-14).map(|&x| -x * x.log2()).sum())
}

/// Outcome of the randomized pipeline-versus-oracle suite.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub cases: usize,
    pub entropies_checked: usize,
    pub amplitudes_checked: usize,
    pub max_entropy_err: f64,
    pub max_amp_err: f64,
    pub max_coherent_err: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_entropy_err <= 1e-10 && self.max_amp_err <= 1e-12 && self.max_coherent_err <= 1e-12
    }
}

/// Random superpositions of 1 to 4 coherent states for s ∈ {1/2, 1} and
/// L ∈ [2, 8], compared on amplitudes and on every bipartition entropy.
pub fn run_oracle_suite(cases: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = OracleReport { cases, ..Default::default() };
    for case in 0..cases {
        let s = SpinS::new(rng.gen_range(1..=2))?;
        let l = rng.gen_range(2..=8);
        let count = rng.gen_range(1..=4);
        let points: Vec<(f64, f64)> = (0..count)
            .map(|_| (rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let profile = CoefficientProfile::type_i(seed ^ case as u64);
        let w = assemble_state(l, s, &Su2Support::Points(points.clone()), &profile, ZeroInjection::none())?;

        let basis: Vec<DenseState> = (0..=s.max_m(l)).map(|m| dense_basis_state(l, s, m)).collect::<Result<_>>()?;
        let mut terms = Vec::new();
        for (i, &(theta, phi)) in points.iter().enumerate() {
            let prod = dense_product_state(l, &site_amp(s, theta, phi))?;
            let a = coherent_amps(l, s, theta, phi)?;
            for (m, b) in basis.iter().enumerate() {
                let err = (overlap(b, &prod) - a.amps()[m]).norm();
                rep.max_coherent_err = rep.max_coherent_err.max(err);
            }
            terms.push((profile.coefficient(i as u64, phi, 0), prod));
        }
        let psi = DenseState::superpose(&terms)?;
        for (m, b) in basis.iter().enumerate() {
            let err = (overlap(b, &psi) - w.amps()[m]).norm();
            rep.max_amp_err = rep.max_amp_err.max(err);
            rep.amplitudes_checked += 1;
        }
        for n in 1..l {
            let err = (entanglement_entropy(&w, n)? - dense_entropy(&psi, n)?).abs();
            rep.max_entropy_err = rep.max_entropy_err.max(err);
            rep.entropies_checked += 1;
        }
    }
    Ok(rep)
}
