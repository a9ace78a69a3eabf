//! SU(2s+1) chains and the SO(4) spin-orbital model.
//!
//! Basis states |L, M_1, ..., M_2s⟩ are indexed by multi-indices with
//! Σ M_α ≤ L. Their Schmidt coefficients are ratios of multinomials, and a
//! coherent state's amplitudes factor into a θ-dependent magnitude times
//! Π_α exp(i φ_α g_α(M)), g_α = L/2 − Σ_{β<α} M_β/2 − M_α. Product fractals
//! with factorized coefficients therefore assemble from one phase sum per
//! angular pair.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::coefficients::{counter_hash, CoefficientProfile, Sampler, ZeroInjection};
use crate::entanglement::{entanglement_entropy, AmplitudeMatrix, SchmidtSource};
use crate::error::{Error, Result};
use crate::exec;
use crate::fractal::{CantorSupport, TeepeeSpec};
use crate::numerics::{ln_factorial_table, HermitianMatrix};
use crate::phase::{cantor_phase_sum, CantorSource, Grid, PhaseMethod};
use crate::su2::{WVector, MAX_SUPPORT_POINTS};

/// Multi-indices of `dims` nonnegative components with sum at most `l`,
/// in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    l: usize,
    dims: usize,
    flat: Vec<u32>,
    /// count[c][r] = number of c-component tuples with sum ≤ r = C(r + c, c).
    count: Vec<Vec<usize>>,
}

impl Simplex {
    pub fn new(l: usize, dims: usize) -> Self {
        assert!(dims >= 1, "simplex needs at least one component");
        let count: Vec<Vec<usize>> = (0..=dims)
            .map(|c| (0..=l).map(|r| binom_usize(r + c, c)).collect())
            .collect();
        let mut flat = Vec::with_capacity(count[dims][l] * dims);
        let mut cur = vec![0u32; dims];
        Self::fill(&mut flat, &mut cur, 0, l as u32);
        Simplex { l, dims, flat, count }
    }

    fn fill(flat: &mut Vec<u32>, cur: &mut [u32], pos: usize, rem: u32) {
        if pos == cur.len() {
            flat.extend_from_slice(cur);
            return;
        }
        for x in 0..=rem {
            cur[pos] = x;
            Self::fill(flat, cur, pos + 1, rem - x);
        }
        cur[pos] = 0;
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.flat.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u32] {
        &self.flat[i * self.dims..(i + 1) * self.dims]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.flat.chunks(self.dims)
    }

    /// Position of `m`, or `None` when it lies outside the simplex.
    pub fn rank(&self, m: &[u32]) -> Option<usize> {
        debug_assert_eq!(m.len(), self.dims);
        let mut rem = self.l;
        let mut r = 0;
        for (a, &x) in m.iter().enumerate() {
            let x = x as usize;
            if x > rem {
                return None;
            }
            let c = self.dims - a - 1;
            for y in 0..x {
                r += self.count[c][rem - y];
            }
            rem -= x;
        }
        Some(r)
    }
}

fn binom_usize(n: usize, k: usize) -> usize {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

fn ln_multinomial(lf: &[f64], n: usize, k: &[u32]) -> Option<f64> {
    let total: usize = k.iter().map(|&x| x as usize).sum();
    if total > n {
        return None;
    }
    Some(lf[n] - lf[n - total] - k.iter().map(|&x| lf[x as usize]).sum::<f64>())
}

/// λ(L, n, k, M) for SU(2s+1) basis states; zero on constraint violation.
pub fn schmidt_lambda_n(l: usize, n: usize, k: &[u32], m: &[u32]) -> f64 {
    if k.len() != m.len() || n == 0 || n >= l {
        return 0.0;
    }
    if k.iter().zip(m).any(|(a, b)| a > b) {
        return 0.0;
    }
    let lf = ln_factorial_table(l);
    let q: Vec<u32> = m.iter().zip(k).map(|(a, b)| a - b).collect();
    match (ln_multinomial(&lf, n, k), ln_multinomial(&lf, l - n, &q), ln_multinomial(&lf, l, m)) {
        (Some(a), Some(b), Some(c)) => (0.5 * (a + b - c)).exp(),
        _ => 0.0,
    }
}

/// Site vector of an SU(2s+1) coherent state. `angles[α] = (θ_α, φ_α)`
/// rotates the coordinate pair (0, α+1); pair 1 is applied first.
pub fn site_amp_n(two_s: usize, angles: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    if angles.len() != two_s {
        return Err(Error::domain(format!("site_amp_n needs {two_s} angle pairs, got {}", angles.len())));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); two_s + 1];
    v[0] = Complex64::new(1.0, 0.0);
    for (a, &(theta, phi)) in angles.iter().enumerate() {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let (x0, xa) = (v[0], v[a + 1]);
        v[0] = (x0 * c + xa * s) * Complex64::from_polar(1.0, phi / 2.0);
        v[a + 1] = (xa * c - x0 * s) * Complex64::from_polar(1.0, -phi / 2.0);
    }
    Ok(v)
}

/// Phase exponent g_α(M) = L/2 − Σ_{β<α} M_β/2 − M_α, as twice its value
/// subtracted from L: returns t = Σ_{β<α} M_β + 2 M_α so that g = (L − t)/2.
pub fn phase_index(m: &[u32], alpha: usize) -> usize {
    let before: u32 = m[..alpha].iter().sum();
    (before + 2 * m[alpha]) as usize
}

/// Amplitudes over all multi-indices with Σ M_α ≤ L.
#[derive(Clone, Debug, PartialEq)]
pub struct WTensor {
    simplex: Arc<Simplex>,
    amps: Vec<Complex64>,
}

impl WTensor {
    pub fn new(simplex: Arc<Simplex>, mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != simplex.len() {
            return Err(Error::domain(format!(
                "WTensor needs {} amplitudes, got {}",
                simplex.len(),
                amps.len()
            )));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm >= 1e-280) || !norm.is_finite() {
            return Err(Error::numerical(format!(
                "assembled norm {norm:e} is numerically zero: the coefficients cancel"
            )));
        }
        amps.iter_mut().for_each(|z| *z /= norm);
        Ok(WTensor { simplex, amps })
    }

    pub fn basis(l: usize, two_s: usize, m: &[u32]) -> Result<Self> {
        let simplex = Arc::new(Simplex::new(l, two_s));
        let idx = simplex
            .rank(m)
            .filter(|_| m.len() == two_s)
            .ok_or_else(|| Error::domain(format!("multi-index {m:?} outside the L = {l} simplex")))?;
        let mut amps = vec![Complex64::new(0.0, 0.0); simplex.len()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(WTensor { simplex, amps })
    }

    pub fn l(&self) -> usize {
        self.simplex.l
    }

    pub fn two_s(&self) -> usize {
        self.simplex.dims
    }

    pub fn simplex(&self) -> &Simplex {
        &self.simplex
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude at multi-index `m`, zero outside the simplex.
    pub fn amp(&self, m: &[u32]) -> Complex64 {
        self.simplex.rank(m).map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }
}

/// Raw recursion a_ℓ(M) = Σ_k λ(ℓ, 1, k, M) v(k) a_{ℓ−1}(M − k).
fn coherent_raw_n(simplex: &Simplex, v: &[Complex64]) -> Vec<Complex64> {
    let dims = simplex.dims;
    let mut prev = Simplex::new(1, dims);
    let mut a: Vec<Complex64> = prev.iter().map(|m| site_component(m, v)).collect();
    let mut mk = vec![0u32; dims];
    for ell in 2..=simplex.l {
        let cur = Simplex::new(ell, dims);
        let lf = ell as f64;
        let next: Vec<Complex64> = cur
            .iter()
            .map(|m| {
                let total: u32 = m.iter().sum();
                // λ(ℓ,1,0,M)² = (ℓ − ΣM)/ℓ and λ(ℓ,1,e_α,M)² = M_α/ℓ.
                let mut out = Complex64::new(0.0, 0.0);
                if (total as usize) < ell {
                    if let Some(i) = prev.rank(m) {
                        out += v[0] * a[i] * ((ell - total as usize) as f64 / lf).sqrt();
                    }
                }
                for alpha in 0..dims {
                    if m[alpha] == 0 {
                        continue;
                    }
                    mk.copy_from_slice(m);
                    mk[alpha] -= 1;
                    if let Some(i) = prev.rank(&mk) {
                        out += v[alpha + 1] * a[i] * (f64::from(m[alpha]) / lf).sqrt();
                    }
                }
                out
            })
            .collect();
        a = next;
        prev = cur;
    }
    a
}

fn site_component(m: &[u32], v: &[Complex64]) -> Complex64 {
    match m.iter().position(|&x| x == 1) {
        Some(a) => v[a + 1],
        None => v[0],
    }
}

/// Coherent-state amplitudes over the SU(2s+1) basis, with a runtime check
/// that φ-shifts act as Π_α exp(i δ_α g_α(M)).
pub fn coherent_amps_n(l: usize, two_s: usize, angles: &[(f64, f64)]) -> Result<WTensor> {
    if l == 0 {
        return Err(Error::domain("coherent state needs L >= 1"));
    }
    let simplex = Arc::new(Simplex::new(l, two_s));
    let base = coherent_raw_n(&simplex, &site_amp_n(two_s, angles)?);
    check_phase_factorization(&simplex, angles, &base)?;
    Ok(WTensor { simplex, amps: base })
}

fn check_phase_factorization(simplex: &Simplex, angles: &[(f64, f64)], base: &[Complex64]) -> Result<()> {
    let l = simplex.l as f64;
    for trial in 0..10u64 {
        let deltas: Vec<f64> = (0..angles.len())
            .map(|a| (counter_hash(0x7068_6173, trial, a as u64, 0) >> 11) as f64 * (2.0 * PI / (1u64 << 53) as f64))
            .collect();
        let shifted: Vec<(f64, f64)> = angles.iter().zip(&deltas).map(|(&(t, p), d)| (t, p + d)).collect();
        let amps = coherent_raw_n(simplex, &site_amp_n(simplex.dims, &shifted)?);
        for (i, m) in simplex.iter().enumerate() {
            let phase: f64 =
                deltas.iter().enumerate().map(|(a, d)| d * 0.5 * (l - phase_index(m, a) as f64)).sum();
            let expect = base[i] * Complex64::from_polar(1.0, phase);
            if (amps[i] - expect).norm() > 1e-10 {
                return Err(Error::numerical(format!(
                    "phase factorization failed at M = {m:?}: |Δ| = {:e}",
                    (amps[i] - expect).norm()
                )));
            }
        }
    }
    Ok(())
}

/// Support of one angular pair (θ_α, φ_α) of a product fractal.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorSupport {
    Point { theta: f64, phi: f64 },
    CantorPhi { support: CantorSupport, theta: f64 },
    /// Cantor base on φ_α with θ_α integrated by the teepee quadrature.
    Teepee { teepee: TeepeeSpec },
}

impl FactorSupport {
    fn count(&self) -> Result<u64> {
        match self {
            FactorSupport::Point { .. } => Ok(1),
            FactorSupport::CantorPhi { support, .. } => Ok(support.len()),
            FactorSupport::Teepee { teepee } => {
                teepee.validate()?;
                Ok(CantorSupport::new(teepee.base, teepee.k, MAX_SUPPORT_POINTS)?.len())
            }
        }
    }

    fn cantor(&self) -> Option<CantorSupport> {
        match self {
            FactorSupport::Point { .. } => None,
            FactorSupport::CantorPhi { support, .. } => Some(*support),
            FactorSupport::Teepee { teepee } => Some(CantorSupport { spec: teepee.base, k: teepee.k }),
        }
    }

    /// θ nodes and weights for this factor.
    fn theta_nodes(&self) -> Vec<(f64, f64)> {
        match self {
            FactorSupport::Point { theta, .. } | FactorSupport::CantorPhi { theta, .. } => vec![(*theta, 1.0)],
            FactorSupport::Teepee { teepee } => teepee.quadrature(),
        }
    }

    fn sampler(&self, profile: &CoefficientProfile) -> Sampler {
        profile.sampler(self.cantor().map_or(0, |c| c.k))
    }

    /// φ and coefficient of point `idx`.
    fn point(&self, sampler: &Sampler, idx: u64) -> (f64, Complex64) {
        match self.cantor() {
            None => {
                let FactorSupport::Point { phi, .. } = self else { unreachable!() };
                (*phi, sampler.at(0, *phi))
            }
            Some(sup) => {
                let (left, _) = sup.group_interval(sup.k, idx);
                let phi = 2.0 * PI * (left + 0.5 * sup.cell_width());
                (phi, sampler.at(idx, phi))
            }
        }
    }
}

/// Half-integer exponent grid g = (L − t)/2 for t = 0..2L.
fn half_grid(l: usize) -> Grid {
    Grid { start: l as f64 / 2.0, step: -0.5, len: 2 * l + 1 }
}

/// Σ_q w_q a(θ⃗_q, φ⃗ = 0) over the tensor product of per-factor θ nodes.
fn theta_magnitudes(simplex: &Simplex, factors: &[FactorSupport]) -> Result<Vec<Complex64>> {
    let nodes: Vec<Vec<(f64, f64)>> = factors.iter().map(|f| f.theta_nodes()).collect();
    let total: usize = nodes.iter().map(|n| n.len()).product();
    let dims = simplex.dims;
    let combos: Vec<(Vec<(f64, f64)>, f64)> = (0..total)
        .map(|mut c| {
            let mut angles = vec![(0.0, 0.0); dims];
            let mut w = 1.0;
            for a in (0..dims).rev() {
                let (t, wt) = nodes[a][c % nodes[a].len()];
                c /= nodes[a].len();
                angles[a] = (t, 0.0);
                w *= wt;
            }
            (angles, w)
        })
        .collect();
    check_phase_factorization(simplex, &combos[0].0, &coherent_raw_n(simplex, &site_amp_n(dims, &combos[0].0)?))?;
    let parts = exec::map_indexed(combos.len(), |c| -> Result<Vec<Complex64>> {
        let (angles, w) = &combos[c];
        Ok(coherent_raw_n(simplex, &site_amp_n(dims, angles)?).into_iter().map(|x| x * *w).collect())
    });
    let mut out = vec![Complex64::new(0.0, 0.0); simplex.len()];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p?) {
            *o += x;
        }
    }
    Ok(out)
}

/// Factorized assembly w_M ∝ B_M Π_α S_α(g_α(M)) over a product fractal.
///
/// `factors` and `profiles` have one entry per angular pair (exactly 2s).
/// Zeros are drawn over the joint support, indexed in mixed radix with
/// factor 1 most significant, and their terms are subtracted.
pub fn assemble_state_n(
    l: usize,
    two_s: usize,
    factors: &[FactorSupport],
    profiles: &[CoefficientProfile],
    zeros: ZeroInjection,
) -> Result<WTensor> {
    assemble_state_n_with(l, two_s, factors, profiles, zeros, PhaseMethod::Auto)
}

pub fn assemble_state_n_with(
    l: usize,
    two_s: usize,
    factors: &[FactorSupport],
    profiles: &[CoefficientProfile],
    zeros: ZeroInjection,
    method: PhaseMethod,
) -> Result<WTensor> {
    if factors.len() != two_s || profiles.len() != two_s {
        return Err(Error::domain(format!(
            "product assembly needs {two_s} factors and profiles, got {} and {}",
            factors.len(),
            profiles.len()
        )));
    }
    let simplex = Arc::new(Simplex::new(l, two_s));
    let grid = half_grid(l);
    let counts: Vec<u64> = factors.iter().map(|f| f.count()).collect::<Result<_>>()?;
    let joint = counts.iter().try_fold(1u64, |a, &c| a.checked_mul(c)).ok_or_else(|| {
        Error::Resource("joint support size overflows 64 bits".into())
    })?;
    let k_joint = factors.iter().filter_map(|f| f.cantor()).map(|c| c.k).max().unwrap_or(0);
    let zero_at = zeros.positions(joint, k_joint)?;

    let mut sums = Vec::with_capacity(two_s);
    for (f, p) in factors.iter().zip(profiles) {
        p.validate()?;
        let s = match f.cantor() {
            None => {
                let (phi, c) = f.point(&f.sampler(p), 0);
                (0..grid.len).map(|j| c * Complex64::from_polar(1.0, phi * grid.value(j))).collect()
            }
            Some(sup) => {
                let src = CantorSource { support: sup, profile: p, zeros: &[] };
                cantor_phase_sum(&src, grid, method)?
            }
        };
        sums.push(s);
    }
    let b = theta_magnitudes(&simplex, factors)?;
    let mut amps: Vec<Complex64> = simplex
        .iter()
        .zip(&b)
        .map(|(m, b)| (0..two_s).fold(*b, |acc, a| acc * sums[a][phase_index(m, a)]))
        .collect();
    if !zero_at.is_empty() {
        let sub = zero_terms(&simplex, factors, profiles, &counts, &zero_at, grid);
        for ((a, s), b) in amps.iter_mut().zip(sub).zip(&b) {
            *a -= s * b;
        }
    }
    WTensor::new(simplex, amps)
}

/// Σ over zeroed joint points of Π_α c_α exp(i φ_α g_α(M)).
fn zero_terms(
    simplex: &Simplex,
    factors: &[FactorSupport],
    profiles: &[CoefficientProfile],
    counts: &[u64],
    zero_at: &[u64],
    grid: Grid,
) -> Vec<Complex64> {
    let dims = simplex.dims;
    let samplers: Vec<Sampler> = factors.iter().zip(profiles).map(|(f, p)| f.sampler(p)).collect();
    let index_table: Vec<Vec<usize>> =
        simplex.iter().map(|m| (0..dims).map(|a| phase_index(m, a)).collect()).collect();
    let parts = exec::map_chunks(zero_at.len(), 1024, |r| {
        let mut acc = vec![Complex64::new(0.0, 0.0); simplex.len()];
        let mut tables = vec![vec![Complex64::new(0.0, 0.0); grid.len]; dims];
        for &z in &zero_at[r] {
            let mut rest = z;
            for a in (0..dims).rev() {
                let idx = rest % counts[a];
                rest /= counts[a];
                let (phi, c) = factors[a].point(&samplers[a], idx);
                let rot = Complex64::from_polar(1.0, phi * grid.step);
                let mut e = c * Complex64::from_polar(1.0, phi * grid.start);
                for (j, t) in tables[a].iter_mut().enumerate() {
                    if j > 0 && j % 64 == 0 {
                        e = c * Complex64::from_polar(1.0, phi * grid.value(j));
                    }
                    *t = e;
                    e *= rot;
                }
            }
            for (o, idx) in acc.iter_mut().zip(&index_table) {
                let mut p = tables[0][idx[0]];
                for a in 1..dims {
                    p *= tables[a][idx[a]];
                }
                *o += p;
            }
        }
        acc
    });
    let mut out = vec![Complex64::new(0.0, 0.0); simplex.len()];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

/// Reference assembly summing coherent states one joint point at a time.
/// Only meant for small supports in tests.
#[doc(hidden)]
pub fn assemble_state_n_naive(
    l: usize,
    two_s: usize,
    factors: &[FactorSupport],
    profiles: &[CoefficientProfile],
    zeros: ZeroInjection,
) -> Result<WTensor> {
    let simplex = Arc::new(Simplex::new(l, two_s));
    let counts: Vec<u64> = factors.iter().map(|f| f.count()).collect::<Result<_>>()?;
    let joint: u64 = counts.iter().product();
    let k_joint = factors.iter().filter_map(|f| f.cantor()).map(|c| c.k).max().unwrap_or(0);
    let zero_at = zeros.positions(joint, k_joint)?;
    let nodes: Vec<Vec<(f64, f64)>> = factors.iter().map(|f| f.theta_nodes()).collect();
    let samplers: Vec<Sampler> = factors.iter().zip(profiles).map(|(f, p)| f.sampler(p)).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); simplex.len()];
    for z in 0..joint {
        if zero_at.binary_search(&z).is_ok() {
            continue;
        }
        let mut rest = z;
        let mut pts = vec![(0.0, Complex64::new(0.0, 0.0)); two_s];
        for a in (0..two_s).rev() {
            pts[a] = factors[a].point(&samplers[a], rest % counts[a]);
            rest /= counts[a];
        }
        let c: Complex64 = pts.iter().map(|p| p.1).product();
        let combos: usize = nodes.iter().map(|n| n.len()).product();
        for mut q in 0..combos {
            let mut angles = vec![(0.0, 0.0); two_s];
            let mut w = 1.0;
            for a in (0..two_s).rev() {
                let (t, wt) = nodes[a][q % nodes[a].len()];
                q /= nodes[a].len();
                angles[a] = (t, pts[a].0);
                w *= wt;
            }
            for (o, x) in acc.iter_mut().zip(coherent_raw_n(&simplex, &site_amp_n(two_s, &angles)?)) {
                *o += c * w * x;
            }
        }
    }
    WTensor::new(simplex, acc)
}

impl SchmidtSource for WTensor {
    fn l(&self) -> usize {
        self.simplex.l
    }

    fn amplitude_matrix(&self, n: usize) -> Result<AmplitudeMatrix> {
        let l = self.simplex.l;
        if n == 0 || n >= l {
            return Err(Error::domain(format!("block size n = {n} outside [1, {}]", l - 1)));
        }
        let dims = self.simplex.dims;
        let block = Simplex::new(n, dims);
        let env = Simplex::new(l - n, dims);
        let lf = ln_factorial_table(l);
        let ln_env: Vec<f64> = env.iter().map(|q| ln_multinomial(&lf, l - n, q).unwrap()).collect();
        let mut m = vec![0u32; dims];
        let mut data = vec![Complex64::new(0.0, 0.0); block.len() * env.len()];
        for (bi, k) in block.iter().enumerate() {
            let ln_k = ln_multinomial(&lf, n, k).unwrap();
            for (ei, q) in env.iter().enumerate() {
                for a in 0..dims {
                    m[a] = k[a] + q[a];
                }
                let Some(wi) = self.simplex.rank(&m) else { continue };
                let w = self.amps[wi];
                if w.norm_sqr() == 0.0 {
                    continue;
                }
                let lam = (0.5 * (ln_k + ln_env[ei] - ln_multinomial(&lf, l, &m).unwrap())).exp();
                data[bi * env.len() + ei] = w * lam;
            }
        }
        Ok(AmplitudeMatrix { rows: block.len(), cols: env.len(), data })
    }
}

/// Dense reduced density matrix over block multi-indices.
pub fn rdm_n(w: &WTensor, n: usize) -> Result<HermitianMatrix> {
    w.amplitude_matrix(n)?.rdm()
}

/// S_s(n) + S_t(n) for the SO(4) model with |L, M_s, M_t⟩ = |L, M_s⟩|L, M_t⟩.
pub fn so4_entropy(ws: &WVector, wt: &WVector, n: usize) -> Result<f64> {
    if ws.l() != wt.l() {
        return Err(Error::domain(format!("SO(4) chains have different lengths {} and {}", ws.l(), wt.l())));
    }
    if ws.spin().two_s() != 1 || wt.spin().two_s() != 1 {
        return Err(Error::domain("SO(4) chains must be spin-1/2"));
    }
    Ok(entanglement_entropy(ws, n)? + entanglement_entropy(wt, n)?)
}
