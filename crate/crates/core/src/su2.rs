//! Spin-s SU(2): Schmidt coefficients of the orthonormal basis states
//! |L, M⟩, coherent-state amplitudes, and assembly of fractal-supported
//! linear combinations.
//!
//! With ν(ℓ, M)² = Σ' Π_m ε(s, m)^{N_m} / N_m! · ℓ! over occupations of
//! total weight M, the Schmidt coefficient of |L, M⟩ across an n-site cut is
//! λ(L, n, κ, M) = ν(n, κ) ν(L−n, M−κ) / ν(L, M).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientProfile, ZeroInjection};
use crate::error::{Error, Result};
use crate::fractal::{map_angles, Axis, CantorSupport, TeepeeSpec};
use crate::numerics::{ln_factorial_table, slog_sum, SignedLog};
use crate::phase::{cantor_phase_sum, point_phase_sum, CantorSource, Grid, PhaseMethod};

/// Spin quantum number stored as 2s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinS {
    two_s: u32,
}

impl SpinS {
    pub const HALF: SpinS = SpinS { two_s: 1 };
    pub const ONE: SpinS = SpinS { two_s: 2 };

    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::domain("spin needs two_s >= 1"));
        }
        Ok(SpinS { two_s })
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn s(self) -> f64 {
        f64::from(self.two_s) / 2.0
    }

    /// Local Hilbert space dimension 2s + 1.
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }

    /// Largest M = 2sL for L sites.
    pub fn max_m(self, l: usize) -> usize {
        self.two_s as usize * l
    }
}

impl TryFrom<u32> for SpinS {
    type Error = Error;
    fn try_from(v: u32) -> Result<Self> {
        SpinS::new(v)
    }
}

impl From<SpinS> for u32 {
    fn from(s: SpinS) -> u32 {
        s.two_s
    }
}

/// ε(s, u) for u in {−s, ..., s−1}, passed as `two_u` = 2u.
pub fn epsilon(s: SpinS, two_u: i64) -> Result<f64> {
    let ts = i64::from(s.two_s);
    if two_u < -ts || two_u > ts - 2 || (two_u + ts) % 2 != 0 {
        return Err(Error::domain(format!("epsilon: u = {}/2 outside [-s, s-1] for 2s = {ts}", two_u)));
    }
    let mut num = 1.0;
    let mut two_m = two_u + 2;
    while two_m <= ts {
        num *= ((ts + two_m) / 2) as f64 * ((ts - two_m) / 2 + 1) as f64;
        two_m += 2;
    }
    let mut den = 1.0;
    let mut two_m = two_u;
    while two_m <= ts - 2 {
        let x = ((ts - two_m) / 2) as f64;
        den *= x * x;
        two_m += 2;
    }
    Ok(num / den)
}

/// ln ν(ℓ, M)² for all ℓ ≤ lmax and M ≤ 2sℓ.
#[derive(Debug)]
pub struct NuTable {
    spin: SpinS,
    lmax: usize,
    rows: Vec<Vec<f64>>,
}

impl NuTable {
    /// Dynamic programme over spin levels. Level j = s − m carries weight j
    /// and factor ε_j, with ε_0 = 1; the state is (sites used, weight used).
    fn build(spin: SpinS, lmax: usize) -> Self {
        let two_s = spin.two_s as usize;
        let wmax = two_s * lmax;
        let lf = ln_factorial_table(lmax);
        let ln_eps: Vec<f64> = (0..=two_s)
            .map(|j| if j == 0 { 0.0 } else { epsilon(spin, spin.two_s as i64 - 2 * j as i64).unwrap().ln() })
            .collect();
        // g[ℓ][w] = ln Σ Π ε^N / N!, starting from level 0 where g[ℓ][0] = −ln ℓ!.
        let mut g: Vec<Vec<f64>> = (0..=lmax)
            .map(|l| {
                let mut row = vec![f64::NEG_INFINITY; wmax + 1];
                row[0] = -lf[l];
                row
            })
            .collect();
        let mut terms = Vec::with_capacity(lmax + 1);
        for j in 1..=two_s {
            let mut next = vec![vec![f64::NEG_INFINITY; wmax + 1]; lmax + 1];
            for l in 0..=lmax {
                let wl = (two_s * l).min(wmax);
                for w in 0..=wl {
                    terms.clear();
                    let mut nn = 0;
                    while nn <= l && nn * j <= w {
                        let prev = g[l - nn][w - nn * j];
                        if prev > f64::NEG_INFINITY {
                            terms.push(SignedLog::from_ln(prev + nn as f64 * ln_eps[j] - lf[nn]));
                        }
                        nn += 1;
                    }
                    next[l][w] = slog_sum(&terms).logmag();
                }
            }
            g = next;
        }
        let rows = g
            .into_iter()
            .enumerate()
            .map(|(l, row)| row[..=two_s * l].iter().map(|&x| x + lf[l]).collect())
            .collect();
        NuTable { spin, lmax, rows }
    }

    pub fn spin(&self) -> SpinS {
        self.spin
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// ln ν(ℓ, M)²; −∞ outside the valid range.
    pub fn ln_nu2(&self, l: usize, m: usize) -> f64 {
        match self.rows.get(l).and_then(|r| r.get(m)) {
            Some(&x) => x,
            None => f64::NEG_INFINITY,
        }
    }

    /// ln λ(L, n, κ, M); −∞ where λ vanishes.
    pub fn ln_lambda(&self, l: usize, n: usize, kappa: usize, m: usize) -> f64 {
        if kappa > m || n > l {
            return f64::NEG_INFINITY;
        }
        let num = self.ln_nu2(n, kappa) + self.ln_nu2(l - n, m - kappa);
        let den = self.ln_nu2(l, m);
        if num == f64::NEG_INFINITY || den == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        0.5 * (num - den)
    }

    pub fn lambda(&self, l: usize, n: usize, kappa: usize, m: usize) -> f64 {
        self.ln_lambda(l, n, kappa, m).exp()
    }
}

type NuCache = RwLock<HashMap<u32, Arc<NuTable>>>;

fn nu_cache() -> &'static NuCache {
    static CACHE: OnceLock<NuCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared ν table covering at least `lmax` sites.
pub fn nu_table(spin: SpinS, lmax: usize) -> Arc<NuTable> {
    if let Some(t) = nu_cache().read().unwrap().get(&spin.two_s) {
        if t.lmax >= lmax {
            return Arc::clone(t);
        }
    }
    let size = lmax.max(64).next_power_of_two();
    let table = Arc::new(NuTable::build(spin, size));
    let mut cache = nu_cache().write().unwrap();
    let entry = cache.entry(spin.two_s).or_insert_with(|| Arc::clone(&table));
    if entry.lmax < table.lmax {
        *entry = Arc::clone(&table);
    }
    Arc::clone(entry)
}

/// ν(L, M) as a signed log; zero outside 0 ≤ M ≤ 2sL.
pub fn nu(l: usize, m: usize, s: SpinS) -> SignedLog {
    let t = nu_table(s, l);
    SignedLog::from_ln(0.5 * t.ln_nu2(l, m))
}

/// λ(L, n, κ, M); exact zero outside the valid region.
pub fn schmidt_lambda(l: usize, n: usize, kappa: usize, m: usize, s: SpinS) -> f64 {
    if n > l || m > s.max_m(l) || kappa > s.max_m(n) {
        return 0.0;
    }
    nu_table(s, l).lambda(l, n, kappa, m)
}

/// λ(L, n, κ, M) for all κ ∈ [0, 2sn], M ∈ [0, 2sL].
#[derive(Clone, Debug)]
pub struct SchmidtTable {
    pub l: usize,
    pub n: usize,
    pub spin: SpinS,
    values: Vec<SignedLog>,
}

impl SchmidtTable {
    pub fn new(l: usize, n: usize, spin: SpinS) -> Result<Self> {
        if n == 0 || n >= l {
            return Err(Error::domain(format!("Schmidt table needs 1 <= n <= L-1, got n = {n}, L = {l}")));
        }
        let nu = nu_table(spin, l);
        let (kdim, mdim) = (spin.max_m(n) + 1, spin.max_m(l) + 1);
        let mut values = Vec::with_capacity(kdim * mdim);
        for kappa in 0..kdim {
            for m in 0..mdim {
                values.push(SignedLog::from_ln(nu.ln_lambda(l, n, kappa, m)));
            }
        }
        Ok(SchmidtTable { l, n, spin, values })
    }

    pub fn get(&self, kappa: usize, m: usize) -> SignedLog {
        let mdim = self.spin.max_m(self.l) + 1;
        if kappa > self.spin.max_m(self.n) || m >= mdim {
            return SignedLog::ZERO;
        }
        self.values[kappa * mdim + m]
    }

    pub fn lambda(&self, kappa: usize, m: usize) -> f64 {
        self.get(kappa, m).to_f64()
    }
}

/// Site vector exp(iφS^z) exp(iθS^y)|s⟩, indexed by j = s − m.
pub fn site_amp(s: SpinS, theta: f64, phi: f64) -> Vec<Complex64> {
    let d = s.dim();
    let two_s = s.two_s as usize;
    // iθS^y = θ(S+ − S−)/2 is real antisymmetric; S+ maps index j to j−1.
    let mut a = vec![0.0; d * d];
    for j in 1..d {
        let x = 0.5 * theta * ((j * (two_s + 1 - j)) as f64).sqrt();
        a[(j - 1) * d + j] = x;
        a[j * d + j - 1] = -x;
    }
    let col = expm_first_column(&a, d);
    col.iter()
        .enumerate()
        .map(|(j, &x)| Complex64::from_polar(x, phi * (s.s() - j as f64)))
        .collect()
}

/// First column of exp(A) by scaling and squaring a Taylor series.
fn expm_first_column(a: &[f64], d: usize) -> Vec<f64> {
    let norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max) * d as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let mut e = vec![0.0; d * d];
    let mut term = vec![0.0; d * d];
    for i in 0..d {
        e[i * d + i] = 1.0;
        term[i * d + i] = 1.0;
    }
    for k in 1..=18 {
        let mut next = vec![0.0; d * d];
        for i in 0..d {
            for l in 0..d {
                let t = term[i * d + l];
                if t != 0.0 {
                    for j in 0..d {
                        next[i * d + j] += t * a[l * d + j] * scale / k as f64;
                    }
                }
            }
        }
        term = next;
        for (x, t) in e.iter_mut().zip(&term) {
            *x += t;
        }
    }
    for _ in 0..squarings {
        let mut sq = vec![0.0; d * d];
        for i in 0..d {
            for l in 0..d {
                for j in 0..d {
                    sq[i * d + j] += e[i * d + l] * e[l * d + j];
                }
            }
        }
        e = sq;
    }
    (0..d).map(|i| e[i * d]).collect()
}

/// Amplitudes w_M over the orthonormal basis |L, M⟩, M = 0..2sL.
#[derive(Clone, Debug, PartialEq)]
pub struct WVector {
    l: usize,
    spin: SpinS,
    amps: Vec<Complex64>,
}

impl WVector {
    /// Normalizes `amps` to unit 2-norm.
    pub fn new(l: usize, spin: SpinS, mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != spin.max_m(l) + 1 {
            return Err(Error::domain(format!(
                "WVector for L = {l}, 2s = {} needs {} amplitudes, got {}",
                spin.two_s,
                spin.max_m(l) + 1,
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
        Ok(WVector { l, spin, amps })
    }

    /// Basis state |L, M⟩.
    pub fn basis(l: usize, spin: SpinS, m: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); spin.max_m(l) + 1];
        *amps
            .get_mut(m)
            .ok_or_else(|| Error::domain(format!("M = {m} exceeds 2sL = {}", spin.max_m(l))))? =
            Complex64::new(1.0, 0.0);
        Ok(WVector { l, spin, amps })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn spin(&self) -> SpinS {
        self.spin
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }
}

/// Coherent amplitudes a_LM(θ, φ) by the single-site Schmidt recursion.
pub fn coherent_amps(l: usize, s: SpinS, theta: f64, phi: f64) -> Result<WVector> {
    let amps = coherent_raw(l, s, &site_amp(s, theta, phi))?;
    Ok(WVector { l, spin: s, amps })
}

fn coherent_raw(l: usize, s: SpinS, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if l == 0 {
        return Err(Error::domain("coherent state needs L >= 1"));
    }
    let nu = nu_table(s, l);
    let two_s = s.two_s as usize;
    let mut a = v.to_vec();
    for ell in 2..=l {
        let mut next = vec![Complex64::new(0.0, 0.0); two_s * ell + 1];
        for (m, out) in next.iter_mut().enumerate() {
            let lo = m.saturating_sub(two_s * (ell - 1));
            for kappa in lo..=m.min(two_s) {
                let lam = nu.lambda(ell, 1, kappa, m);
                *out += v[kappa] * a[m - kappa] * lam;
            }
        }
        a = next;
    }
    Ok(a)
}

/// b_LM(θ) = a_LM(θ, 0).
pub fn theta_profile(l: usize, s: SpinS, theta: f64) -> Result<Vec<Complex64>> {
    coherent_raw(l, s, &site_amp(s, theta, 0.0))
}

/// Support of a linear combination of SU(2) coherent states.
#[derive(Clone, Debug, PartialEq)]
pub enum Su2Support {
    Point { theta: f64, phi: f64 },
    /// Explicit (θ, φ) points.
    Points(Vec<(f64, f64)>),
    /// Explicit φ-points at a common θ.
    PhiPoints { theta: f64, phis: Vec<f64> },
    /// Cantor set on φ at fixed θ.
    CantorPhi { support: CantorSupport, theta: f64 },
    /// Cantor set on θ at fixed φ.
    CantorTheta { support: CantorSupport, phi: f64 },
    /// Cantor teepee with base on φ.
    Teepee(TeepeeSpec),
}

/// Largest Cantor support accepted by assembly.
pub const MAX_SUPPORT_POINTS: u64 = 1 << 36;

/// Exponent grid g = sL − M for M = 0..2sL.
pub fn su2_grid(l: usize, s: SpinS) -> Grid {
    Grid { start: s.s() * l as f64, step: -1.0, len: s.max_m(l) + 1 }
}

/// Linear combination Σ_γ c_γ |ψ_γ⟩ expanded in |L, M⟩, normalized.
pub fn assemble_state(
    l: usize,
    s: SpinS,
    support: &Su2Support,
    profile: &CoefficientProfile,
    zeros: ZeroInjection,
) -> Result<WVector> {
    let raw = assemble_unnormalized(l, s, support, profile, zeros, PhaseMethod::Auto)?;
    WVector::new(l, s, raw)
}

/// Same as [`assemble_state`] without normalization and with an explicit
/// phase-sum kernel.
pub fn assemble_unnormalized(
    l: usize,
    s: SpinS,
    support: &Su2Support,
    profile: &CoefficientProfile,
    zeros: ZeroInjection,
    method: PhaseMethod,
) -> Result<Vec<Complex64>> {
    profile.validate()?;
    let grid = su2_grid(l, s);
    match support {
        Su2Support::Point { theta, phi } => {
            let c = crate::coefficients::realize(profile, &[*phi], 0, zeros)?[0];
            Ok(coherent_raw(l, s, &site_amp(s, *theta, *phi))?.into_iter().map(|a| a * c).collect())
        }
        Su2Support::Points(points) => {
            let phis: Vec<f64> = points.iter().map(|p| p.1).collect();
            let c = crate::coefficients::realize(profile, &phis, 0, zeros)?;
            let mut acc = vec![Complex64::new(0.0, 0.0); grid.len];
            for (&(theta, phi), c) in points.iter().zip(c) {
                for (a, x) in acc.iter_mut().zip(coherent_raw(l, s, &site_amp(s, theta, phi))?) {
                    *a += c * x;
                }
            }
            Ok(acc)
        }
        Su2Support::PhiPoints { theta, phis } => {
            let c = crate::coefficients::realize(profile, phis, 0, zeros)?;
            let sum = point_phase_sum(phis, &c, grid);
            let b = theta_profile(l, s, *theta)?;
            Ok(b.iter().zip(sum).map(|(b, x)| b * x).collect())
        }
        Su2Support::CantorPhi { support, theta } => {
            let sum = cantor_sum(support, profile, zeros, grid, method)?;
            let b = theta_profile(l, s, *theta)?;
            Ok(b.iter().zip(sum).map(|(b, x)| b * x).collect())
        }
        Su2Support::CantorTheta { support, phi } => {
            let support = CantorSupport::new(support.spec, support.k, 1 << 16)?;
            let zero_at = zeros.positions(support.len(), support.k)?;
            let mut acc = vec![Complex64::new(0.0, 0.0); grid.len];
            let mut err = None;
            let sampler = profile.sampler(support.k);
            support.for_each_in_group(0, 0, |idx, xi| {
                if zero_at.binary_search(&idx).is_ok() || err.is_some() {
                    return;
                }
                let theta = map_angles(xi, Axis::Theta);
                let c = sampler.at(idx, theta);
                match theta_profile(l, s, theta) {
                    Ok(b) => acc.iter_mut().zip(b).for_each(|(a, b)| *a += c * b),
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok((0..grid.len).map(|j| acc[j] * Complex64::from_polar(1.0, phi * grid.value(j))).collect())
        }
        Su2Support::Teepee(tp) => {
            tp.validate()?;
            let base = CantorSupport::new(tp.base, tp.k, MAX_SUPPORT_POINTS)?;
            let sum = cantor_sum(&base, profile, zeros, grid, method)?;
            let b = teepee_profile(l, s, tp)?;
            Ok(b.iter().zip(sum).map(|(b, x)| b * x).collect())
        }
    }
}

/// B_M = Σ_q w_q b_LM(θ_q) over the teepee θ quadrature.
pub fn teepee_profile(l: usize, s: SpinS, tp: &TeepeeSpec) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); s.max_m(l) + 1];
    for (theta, w) in tp.quadrature() {
        for (o, b) in out.iter_mut().zip(theta_profile(l, s, theta)?) {
            *o += b * w;
        }
    }
    Ok(out)
}

fn cantor_sum(
    support: &CantorSupport,
    profile: &CoefficientProfile,
    zeros: ZeroInjection,
    grid: Grid,
    method: PhaseMethod,
) -> Result<Vec<Complex64>> {
    let zero_at = zeros.positions(support.len(), support.k)?;
    let src = CantorSource { support: *support, profile, zeros: &zero_at };
    cantor_phase_sum(&src, grid, method)
}

/// θ = π/2, the default great circle for Cantor sets on φ.
pub const EQUATOR: f64 = PI / 2.0;
