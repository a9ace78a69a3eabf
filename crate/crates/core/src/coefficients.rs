//! Coefficient profiles for linear combinations of coherent states and the
//! polynomial-in-k zero injection.
//!
//! Random draws come from a counter-based hash of (seed, stream, k, index),
//! so a coefficient depends only on its point index and never on evaluation
//! order or thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal::{map_angles, Axis, CantorSpec, CantorSupport};
use crate::numerics::linear_fit;
use crate::su2::{site_amp, SpinS};

const DRAW_STREAM: u64 = 0x6472_6177;
const ZERO_STREAM: u64 = 0x7a65_726f;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stateless 64-bit hash of a (seed, stream, a, b) counter.
pub fn counter_hash(seed: u64, stream: u64, a: u64, b: u64) -> u64 {
    let mut h = splitmix(seed);
    h = splitmix(h ^ stream);
    h = splitmix(h ^ a);
    splitmix(h ^ b)
}

/// The four named continuous functions of φ used for type-ii coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedFn {
    /// cos(2φ + 1) + 2
    #[serde(rename = "cos(2phi+1)+2")]
    Cos2PhiPlus1Plus2,
    /// φ² / (2π)
    #[serde(rename = "phi^2/(2pi)")]
    PhiSquaredOver2Pi,
    /// cos(φ + 1) + 2
    #[serde(rename = "cos(phi+1)+2")]
    CosPhiPlus1Plus2,
    /// φ³ / (4π²)
    #[serde(rename = "phi^3/(4pi^2)")]
    PhiCubedOver4PiSquared,
}

impl NamedFn {
    pub fn eval(self, phi: f64) -> f64 {
        match self {
            NamedFn::Cos2PhiPlus1Plus2 => (2.0 * phi + 1.0).cos() + 2.0,
            NamedFn::PhiSquaredOver2Pi => phi * phi / (2.0 * PI),
            NamedFn::CosPhiPlus1Plus2 => (phi + 1.0).cos() + 2.0,
            NamedFn::PhiCubedOver4PiSquared => phi.powi(3) / (4.0 * PI * PI),
        }
    }

    /// Bound on |f'(φ)| for φ in [0, 2π].
    pub fn lipschitz(self) -> f64 {
        match self {
            NamedFn::Cos2PhiPlus1Plus2 | NamedFn::PhiSquaredOver2Pi => 2.0,
            NamedFn::CosPhiPlus1Plus2 => 1.0,
            NamedFn::PhiCubedOver4PiSquared => 3.0,
        }
    }
}

/// Rule producing one complex coefficient per support point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CoefficientProfile {
    Equal,
    RandomSets { amp_set: Vec<f64>, phase_set: Vec<f64>, seed: u64 },
    Continuous { amp_fn: NamedFn, phase_fn: NamedFn },
}

impl CoefficientProfile {
    /// Amplitudes from {0.1, ..., 1.0} and phases from {π/10, ..., π}.
    pub fn type_i(seed: u64) -> Self {
        CoefficientProfile::RandomSets {
            amp_set: (1..=10).map(|i| f64::from(i) / 10.0).collect(),
            phase_set: (1..=10).map(|i| f64::from(i) * PI / 10.0).collect(),
            seed,
        }
    }

    /// Continuous functions for the given angular factor (0 or 1).
    pub fn type_ii(factor: usize) -> Self {
        if factor == 0 {
            CoefficientProfile::Continuous {
                amp_fn: NamedFn::Cos2PhiPlus1Plus2,
                phase_fn: NamedFn::PhiSquaredOver2Pi,
            }
        } else {
            CoefficientProfile::Continuous {
                amp_fn: NamedFn::CosPhiPlus1Plus2,
                phase_fn: NamedFn::PhiCubedOver4PiSquared,
            }
        }
    }

    pub fn is_equal(&self) -> bool {
        matches!(self, CoefficientProfile::Equal)
    }

    pub fn validate(&self) -> Result<()> {
        if let CoefficientProfile::RandomSets { amp_set, phase_set, .. } = self {
            if amp_set.is_empty() || phase_set.is_empty() {
                return Err(Error::domain("random coefficient sets must be nonempty"));
            }
        }
        Ok(())
    }

    /// Coefficient of point `index` located at angle `phi` in a step-`k` set.
    pub fn coefficient(&self, index: u64, phi: f64, k: u32) -> Complex64 {
        self.sampler(k).at(index, phi)
    }

    /// Per-step evaluator with the random-set products precomputed.
    pub fn sampler(&self, k: u32) -> Sampler {
        match self {
            CoefficientProfile::Equal => Sampler::Equal,
            CoefficientProfile::RandomSets { amp_set, phase_set, seed } => {
                let table = amp_set
                    .iter()
                    .flat_map(|&a| phase_set.iter().map(move |&p| Complex64::from_polar(a, p)))
                    .collect();
                Sampler::Table {
                    table,
                    n_amp: amp_set.len(),
                    n_phase: phase_set.len(),
                    base: counter_hash(*seed, DRAW_STREAM, u64::from(k), 0),
                }
            }
            CoefficientProfile::Continuous { amp_fn, phase_fn } => {
                Sampler::Continuous { amp_fn: *amp_fn, phase_fn: *phase_fn }
            }
        }
    }
}

/// Coefficient evaluator bound to one step k.
#[derive(Clone, Debug)]
pub enum Sampler {
    Equal,
    Table { table: Vec<Complex64>, n_amp: usize, n_phase: usize, base: u64 },
    Continuous { amp_fn: NamedFn, phase_fn: NamedFn },
}

impl Sampler {
    pub fn at(&self, index: u64, phi: f64) -> Complex64 {
        match self {
            Sampler::Equal => Complex64::new(1.0, 0.0),
            Sampler::Table { table, n_amp, n_phase, base } => {
                // SplitMix64 stream: one mix per index; the high and low
                // halves pick the amplitude and the phase independently.
                let h = splitmix(base.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
                let ia = (((h >> 32) * *n_amp as u64) >> 32) as usize;
                let ip = (((h & 0xffff_ffff) * *n_phase as u64) >> 32) as usize;
                table[ia * n_phase + ip]
            }
            Sampler::Continuous { amp_fn, phase_fn } => Complex64::from_polar(amp_fn.eval(phi), phase_fn.eval(phi)),
        }
    }
}

/// How many coefficients are zeroed at step k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroRule {
    #[default]
    None,
    K2,
    K4,
}

impl ZeroRule {
    pub fn count(self, k: u32) -> u64 {
        let k = u64::from(k);
        match self {
            ZeroRule::None => 0,
            ZeroRule::K2 => k * k,
            ZeroRule::K4 => k * k * k * k,
        }
    }

    pub fn injection(self, k: u32, seed: u64) -> ZeroInjection {
        ZeroInjection { count: self.count(k), seed }
    }
}

/// Number of coefficients forced to zero and the seed choosing them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZeroInjection {
    pub count: u64,
    pub seed: u64,
}

impl ZeroInjection {
    pub fn none() -> Self {
        ZeroInjection { count: 0, seed: 0 }
    }

    /// Sorted zero positions among `total` points, sampled without replacement.
    pub fn positions(&self, total: u64, k: u32) -> Result<Vec<u64>> {
        if self.count >= total {
            return Err(Error::domain(format!(
                "zero injection of {} coefficients leaves no support among {} points",
                self.count, total
            )));
        }
        if self.count == 0 {
            return Ok(Vec::new());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(counter_hash(self.seed, ZERO_STREAM, u64::from(k), total));
        let mut pos: Vec<u64> =
            sample(&mut rng, total as usize, self.count as usize).into_iter().map(|i| i as u64).collect();
        pos.sort_unstable();
        Ok(pos)
    }
}

/// Coefficients for explicit φ-points, with zero injection applied.
pub fn realize(
    profile: &CoefficientProfile,
    points: &[f64],
    k: u32,
    zeros: ZeroInjection,
) -> Result<Vec<Complex64>> {
    if points.is_empty() {
        return Err(Error::domain("realize needs at least one point"));
    }
    profile.validate()?;
    let zero_at = zeros.positions(points.len() as u64, k)?;
    let sampler = profile.sampler(k);
    let mut c: Vec<Complex64> = points.iter().enumerate().map(|(i, &phi)| sampler.at(i as u64, phi)).collect();
    for z in zero_at {
        c[z as usize] = Complex64::new(0.0, 0.0);
    }
    Ok(c)
}

/// Geometry used by [`norm_growth_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormGrowthSetup {
    pub spin: SpinS,
    /// System size; may be far beyond what a basis-vector assembly could hold.
    pub l: f64,
    pub theta: f64,
    pub zeros: ZeroRule,
    pub seed: u64,
}

impl Default for NormGrowthSetup {
    fn default() -> Self {
        NormGrowthSetup { spin: SpinS::HALF, l: 1e12, theta: PI / 2.0, zeros: ZeroRule::None, seed: 0 }
    }
}

/// ln‖Σ_γ c_γ |ψ(θ, φ_γ)⟩‖ for each step in `k_range`, for a Cantor set on φ.
///
/// The norm is evaluated as the Gram sum Σ conj(c_γ) c_γ' ⟨ψ_γ|ψ_γ'⟩ with
/// ⟨ψ_γ|ψ_γ'⟩ = ⟨v_γ|v_γ'⟩^L, which equals ‖w‖ of the assembled unnormalized
/// state and stays exact for system sizes no basis vector could hold.
pub fn norm_growth_check(
    profile: &CoefficientProfile,
    spec: CantorSpec,
    k_range: impl IntoIterator<Item = u32>,
    setup: &NormGrowthSetup,
) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::new();
    for k in k_range {
        let support = CantorSupport::new(spec, k, 1 << 14)?;
        let mut phis = Vec::new();
        support.for_each_in_group(0, 0, |_, xi| phis.push(map_angles(xi, Axis::Phi)));
        let c = realize(profile, &phis, k, setup.zeros.injection(k, setup.seed))?;
        let v: Vec<Vec<Complex64>> = phis.iter().map(|&p| site_amp(setup.spin, setup.theta, p)).collect();
        let mut norm2 = 0.0;
        for a in 0..phis.len() {
            if c[a].norm_sqr() == 0.0 {
                continue;
            }
            norm2 += c[a].norm_sqr();
            for b in a + 1..phis.len() {
                let ov: Complex64 = v[a].iter().zip(&v[b]).map(|(x, y)| x.conj() * y).sum();
                let pow = if ov.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { (ov.ln() * setup.l).exp() };
                norm2 += 2.0 * (c[a].conj() * c[b] * pow).re;
            }
        }
        out.push((k, 0.5 * norm2.ln()));
    }
    Ok(out)
}

/// Slope of ln‖w‖ against k ln N.
pub fn norm_growth_slope(spec: CantorSpec, series: &[(u32, f64)]) -> Result<f64> {
    let ln_n = f64::from(spec.n()).ln();
    let pts: Vec<(f64, f64)> = series.iter().map(|&(k, y)| (f64::from(k) * ln_n, y)).collect();
    Ok(linear_fit(&pts)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_is_one() {
        let c = realize(&CoefficientProfile::Equal, &[0.1, 0.2, 0.3], 3, ZeroInjection::none()).unwrap();
        assert!(c.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn continuous_at_zero() {
        let c = CoefficientProfile::type_ii(0).coefficient(0, 0.0, 5);
        assert!((c.re - (1f64.cos() + 2.0)).abs() < 1e-15);
        assert_eq!(c.im, 0.0);
    }

    #[test]
    fn zeros_are_sorted_distinct_and_bounded() {
        let z = ZeroInjection { count: 50, seed: 3 }.positions(200, 4).unwrap();
        assert_eq!(z.len(), 50);
        assert!(z.windows(2).all(|w| w[0] < w[1]));
        assert!(*z.last().unwrap() < 200);
        assert!(ZeroInjection { count: 200, seed: 3 }.positions(200, 4).is_err());
    }

    #[test]
    fn counter_hash_separates_streams() {
        assert_ne!(counter_hash(1, 2, 3, 4), counter_hash(1, 2, 4, 3));
        assert_ne!(counter_hash(1, 2, 3, 4), counter_hash(2, 2, 3, 4));
    }
}
