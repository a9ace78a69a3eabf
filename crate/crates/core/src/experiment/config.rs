//! TOML experiment configuration and its translation into library inputs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coefficients::{counter_hash, CoefficientProfile, ZeroInjection, ZeroRule};
use crate::error::{Error, Result};
use crate::fractal::{Axis, CantorSpec, CantorSupport, KeepPattern, TeepeeSpec};
use crate::su2::{Su2Support, MAX_SUPPORT_POINTS};
use crate::sun::FactorSupport;

const PROFILE_STREAM: u64 = 0x7072_6f66;
const ZERO_SEED_STREAM: u64 = 0x7a73_6565;
const PATTERN_STREAM: u64 = 0x7061_7474;

/// Which ferromagnetic model the state lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Su2,
    /// SU(2s+1); the name follows the two_s = 2 case.
    Su3,
    So4,
}

/// Coefficient prescription.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ProfileKind {
    #[default]
    #[serde(rename = "equal")]
    Equal,
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "type_ii")]
    TypeII,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportKind {
    Cantor,
    Teepee,
    Point,
    Basis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    #[default]
    Spread,
    Random,
}

/// One support entry. SU(2) takes one entry, SO(4) one per chain and
/// SU(2s+1) one per angular pair (or a single `basis` entry).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportConfig {
    pub kind: SupportKind,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inv_r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default)]
    pub pattern: PatternKind,
    /// Seed of a random keep pattern; derived from the run seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_axis")]
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_fixed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_fixed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_nodes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_max: Option<f64>,
    /// Basis label: [M] for SU(2)/SO(4) chains, [M₁, …, M₂ₛ] for SU(2s+1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u32>>,
}

fn default_axis() -> Axis {
    Axis::Phi
}

fn default_two_s() -> u32 {
    1
}

impl SupportConfig {
    fn empty(kind: SupportKind) -> Self {
        SupportConfig {
            kind,
            n: None,
            inv_r: None,
            k: None,
            pattern: PatternKind::Spread,
            seed: None,
            axis: Axis::Phi,
            theta_fixed: None,
            phi_fixed: None,
            quadrature_nodes: None,
            theta_max: None,
            m: None,
        }
    }

    /// Cantor set C[N, 1/inv_r; k] on φ at θ = π/2.
    pub fn cantor(n: u32, inv_r: u32, k: u32) -> Self {
        SupportConfig { n: Some(n), inv_r: Some(inv_r), k: Some(k), ..Self::empty(SupportKind::Cantor) }
    }

    /// Cantor teepee over C[N, 1/inv_r; k].
    pub fn teepee(n: u32, inv_r: u32, k: u32) -> Self {
        SupportConfig { n: Some(n), inv_r: Some(inv_r), k: Some(k), ..Self::empty(SupportKind::Teepee) }
    }

    pub fn point(theta: f64, phi: f64) -> Self {
        SupportConfig { theta_fixed: Some(theta), phi_fixed: Some(phi), ..Self::empty(SupportKind::Point) }
    }

    pub fn basis(m: Vec<u32>) -> Self {
        SupportConfig { m: Some(m), ..Self::empty(SupportKind::Basis) }
    }
}

/// A complete experiment: model, chain, support, coefficients and fit setup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    #[serde(default = "default_two_s")]
    pub two_s: u32,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub profile: ProfileKind,
    #[serde(default)]
    pub zero_count: ZeroRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_dimension: Option<f64>,
    /// Relative tolerance on d_f deciding the pass flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Symmetric n-window trim fraction for the fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trim: Option<f64>,
    /// Steps at which d_f(k) is re-fitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_k: Option<Vec<u32>>,
    pub support: Vec<SupportConfig>,
}

/// Library-level description of the state a config asks for.
#[derive(Clone, Debug)]
pub(crate) enum StatePlan {
    Su2 { spin: u32, support: Su2Support, profile: CoefficientProfile, zeros: ZeroInjection },
    Su2Basis { spin: u32, m: usize },
    So4 { chains: Vec<StatePlan> },
    SuN { factors: Vec<FactorSupport>, profiles: Vec<CoefficientProfile>, zeros: ZeroInjection },
    SuNBasis { m: Vec<u32> },
}

fn field(idx: usize, name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("support[{idx}].{name}: {msg}"))
}

fn top(name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{name}: {msg}"))
}

fn required<T: Copy>(v: Option<T>, idx: usize, name: &str, kind: SupportKind) -> Result<T> {
    v.ok_or_else(|| field(idx, name, format!("required for kind = {}", kind_name(kind))))
}

fn kind_name(kind: SupportKind) -> &'static str {
    match kind {
        SupportKind::Cantor => "cantor",
        SupportKind::Teepee => "teepee",
        SupportKind::Point => "point",
        SupportKind::Basis => "basis",
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Largest Cantor step among the supports (0 when there is none).
    pub fn max_k(&self) -> u32 {
        self.support.iter().filter_map(|s| s.k).max().unwrap_or(0)
    }

    /// All Cantor steps, in support order.
    pub fn ks(&self) -> Vec<u32> {
        self.support.iter().filter_map(|s| s.k).collect()
    }

    /// Copy with every Cantor step replaced by `k`.
    pub fn with_k(&self, k: u32) -> Self {
        let mut c = self.clone();
        for s in &mut c.support {
            if s.k.is_some() {
                s.k = Some(k);
            }
        }
        c.convergence_k = None;
        c
    }

    /// Field-level validation.
    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(top("L", format!("need at least 2 sites, got {}", self.l)));
        }
        if self.two_s < 1 {
            return Err(top("two_s", "must be at least 1"));
        }
        if let Some(t) = self.trim {
            if !(0.0..0.5).contains(&t) {
                return Err(top("trim", format!("must lie in [0, 0.5), got {t}")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(top("tolerance", format!("must be positive, got {t}")));
            }
        }
        if let Some(t) = self.target_dimension {
            if !(t > 0.0 && t.is_finite()) {
                return Err(top("target_dimension", format!("must be positive, got {t}")));
            }
        }
        if let Some(ks) = &self.convergence_k {
            if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) {
                return Err(top("convergence_k", "must be a nonempty strictly ascending list"));
            }
        }
        if self.support.is_empty() {
            return Err(top("support", "at least one [[support]] entry is required"));
        }
        let has_basis = self.support.iter().any(|s| s.kind == SupportKind::Basis);
        if has_basis && self.support.iter().any(|s| s.kind != SupportKind::Basis) {
            return Err(top("support", "basis entries cannot be mixed with other kinds"));
        }
        let expected = match self.model {
            Model::Su2 => 1,
            Model::So4 => {
                if self.two_s != 1 {
                    return Err(top("two_s", "SO(4) chains are spin-1/2 (two_s = 1)"));
                }
                2
            }
            Model::Su3 => {
                if self.two_s < 2 {
                    return Err(top("two_s", "SU(2s+1) needs two_s >= 2"));
                }
                if has_basis {
                    1
                } else {
                    self.two_s as usize
                }
            }
        };
        if self.support.len() != expected {
            return Err(top("support", format!("expected {expected} entries, got {}", self.support.len())));
        }
        for (i, s) in self.support.iter().enumerate() {
            self.validate_entry(i, s)?;
        }
        Ok(())
    }

    fn validate_entry(&self, i: usize, s: &SupportConfig) -> Result<()> {
        match s.kind {
            SupportKind::Cantor | SupportKind::Teepee => {
                let n = required(s.n, i, "N", s.kind)?;
                let r = required(s.inv_r, i, "inv_r", s.kind)?;
                required(s.k, i, "k", s.kind)?;
                if n < 1 || r <= n {
                    return Err(field(i, "inv_r", format!("need inv_r > N >= 1, got N = {n}, inv_r = {r}")));
                }
                if s.kind == SupportKind::Cantor && s.axis == Axis::Theta && self.model != Model::Su2 {
                    return Err(field(i, "axis", "theta-axis Cantor sets are only supported for su2"));
                }
                if let Some(q) = s.quadrature_nodes {
                    if q < 2 {
                        return Err(field(i, "quadrature_nodes", "need at least 2 nodes"));
                    }
                }
                if let Some(t) = s.theta_max {
                    if !(t > 0.0 && t <= PI) {
                        return Err(field(i, "theta_max", format!("must lie in (0, π], got {t}")));
                    }
                }
            }
            SupportKind::Point => {}
            SupportKind::Basis => {
                let m = s.m.as_ref().ok_or_else(|| field(i, "m", "required for kind = basis"))?;
                let want = if self.model == Model::Su3 { self.two_s as usize } else { 1 };
                if m.len() != want {
                    return Err(field(i, "m", format!("expected {want} entries, got {}", m.len())));
                }
                let bound = match self.model {
                    Model::Su3 => self.l,
                    _ => self.two_s as usize * self.l,
                };
                let sum: usize = m.iter().map(|&x| x as usize).sum();
                if sum > bound {
                    return Err(field(i, "m", format!("labels sum to {sum}, above the limit {bound}")));
                }
            }
        }
        if let Some(t) = s.theta_fixed {
            if !(0.0..=PI).contains(&t) {
                return Err(field(i, "theta_fixed", format!("must lie in [0, π], got {t}")));
            }
        }
        if let Some(p) = s.phi_fixed {
            if !p.is_finite() {
                return Err(field(i, "phi_fixed", format!("must be finite, got {p}")));
            }
        }
        Ok(())
    }

    /// Dimension the fitted d_f is compared with, when one is defined.
    pub fn target(&self) -> Option<f64> {
        if self.target_dimension.is_some() {
            return self.target_dimension;
        }
        if self.support.iter().any(|s| s.kind == SupportKind::Basis) {
            return None;
        }
        let total: f64 = self
            .support
            .iter()
            .map(|s| match (s.kind, s.n, s.inv_r) {
                (SupportKind::Cantor, Some(n), Some(r)) => (n as f64).ln() / (r as f64).ln(),
                (SupportKind::Teepee, Some(n), Some(r)) => 1.0 + (n as f64).ln() / (r as f64).ln(),
                _ => 0.0,
            })
            .sum();
        (total > 0.0).then_some(total)
    }

    fn cantor_spec(&self, i: usize, s: &SupportConfig) -> Result<CantorSpec> {
        let pattern = match s.pattern {
            PatternKind::Spread => KeepPattern::Spread,
            PatternKind::Random => {
                KeepPattern::SeededRandom(s.seed.unwrap_or_else(|| counter_hash(self.seed, PATTERN_STREAM, i as u64, 0)))
            }
        };
        CantorSpec::new(s.n.unwrap_or(0), s.inv_r.unwrap_or(0), pattern).map_err(|e| field(i, "inv_r", e))
    }

    fn teepee_spec(&self, i: usize, s: &SupportConfig) -> Result<TeepeeSpec> {
        let mut tp = TeepeeSpec::new(self.cantor_spec(i, s)?, s.k.unwrap_or(0));
        if let Some(t) = s.theta_max {
            tp.theta_max = t;
        }
        if let Some(q) = s.quadrature_nodes {
            tp.quadrature_nodes = q;
        }
        Ok(tp)
    }

    fn profile_for(&self, factor: usize) -> CoefficientProfile {
        match self.profile {
            ProfileKind::Equal => CoefficientProfile::Equal,
            ProfileKind::TypeI => CoefficientProfile::type_i(counter_hash(self.seed, PROFILE_STREAM, factor as u64, 0)),
            ProfileKind::TypeII => CoefficientProfile::type_ii(factor),
        }
    }

    fn zeros_for(&self, factor: usize, k: u32) -> ZeroInjection {
        self.zero_count.injection(k, counter_hash(self.seed, ZERO_SEED_STREAM, factor as u64, 0))
    }

    fn su2_plan(&self, i: usize, s: &SupportConfig, spin: u32) -> Result<StatePlan> {
        let k = s.k.unwrap_or(0);
        let support = match s.kind {
            SupportKind::Basis => {
                let m = s.m.as_ref().map(|m| m[0] as usize).unwrap_or(0);
                return Ok(StatePlan::Su2Basis { spin, m });
            }
            SupportKind::Point => {
                Su2Support::Point { theta: s.theta_fixed.unwrap_or(0.0), phi: s.phi_fixed.unwrap_or(0.0) }
            }
            SupportKind::Cantor => {
                let support = CantorSupport::new(self.cantor_spec(i, s)?, k, MAX_SUPPORT_POINTS)
                    .map_err(|e| field(i, "k", e))?;
                match s.axis {
                    Axis::Phi => Su2Support::CantorPhi { support, theta: s.theta_fixed.unwrap_or(PI / 2.0) },
                    Axis::Theta => Su2Support::CantorTheta { support, phi: s.phi_fixed.unwrap_or(0.0) },
                }
            }
            SupportKind::Teepee => Su2Support::Teepee(self.teepee_spec(i, s)?),
        };
        Ok(StatePlan::Su2 { spin, support, profile: self.profile_for(i), zeros: self.zeros_for(i, k) })
    }

    pub(crate) fn plan(&self) -> Result<StatePlan> {
        self.validate()?;
        match self.model {
            Model::Su2 => self.su2_plan(0, &self.support[0], self.two_s),
            Model::So4 => Ok(StatePlan::So4 {
                chains: self.support.iter().enumerate().map(|(i, s)| self.su2_plan(i, s, 1)).collect::<Result<_>>()?,
            }),
            Model::Su3 => {
                if self.support[0].kind == SupportKind::Basis {
                    return Ok(StatePlan::SuNBasis { m: self.support[0].m.clone().unwrap_or_default() });
                }
                let factors = self
                    .support
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        Ok(match s.kind {
                            SupportKind::Point => FactorSupport::Point {
                                theta: s.theta_fixed.unwrap_or(0.0),
                                phi: s.phi_fixed.unwrap_or(0.0),
                            },
                            SupportKind::Cantor => FactorSupport::CantorPhi {
                                support: CantorSupport::new(self.cantor_spec(i, s)?, s.k.unwrap_or(0), MAX_SUPPORT_POINTS)
                                    .map_err(|e| field(i, "k", e))?,
                                theta: s.theta_fixed.unwrap_or(PI / 2.0),
                            },
                            SupportKind::Teepee => FactorSupport::Teepee { teepee: self.teepee_spec(i, s)? },
                            SupportKind::Basis => unreachable!("validated"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let profiles = (0..factors.len()).map(|a| self.profile_for(a)).collect();
                Ok(StatePlan::SuN { factors, profiles, zeros: self.zeros_for(0, self.max_k()) })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_like() -> ExperimentConfig {
        ExperimentConfig {
            model: Model::Su2,
            two_s: 1,
            l: 200,
            seed: 3,
            profile: ProfileKind::TypeI,
            zero_count: ZeroRule::K2,
            target_dimension: None,
            tolerance: Some(0.03),
            trim: None,
            convergence_k: Some(vec![4, 8]),
            support: vec![SupportConfig::cantor(2, 3, 20)],
        }
    }

    #[test]
    fn toml_round_trip() {
        let c = fig1_like();
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn parses_hand_written_file() {
        let text = r#"
model = "su2"
two_s = 2
L = 100
profile = "type_ii"
zero_count = "k4"

[[support]]
kind = "teepee"
N = 3
inv_r = 5
k = 6
quadrature_nodes = 32
"#;
        let c = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(c.profile, ProfileKind::TypeII);
        assert_eq!(c.zero_count, ZeroRule::K4);
        assert!((c.target().unwrap() - (1.0 + 3f64.ln() / 5f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn field_level_messages() {
        let mut c = fig1_like();
        c.support[0].inv_r = None;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("support[0].inv_r"), "{msg}");
        let mut c = fig1_like();
        c.support[0].n = Some(3);
        c.support[0].inv_r = Some(3);
        assert!(c.validate().unwrap_err().to_string().contains("support[0].inv_r"));
        let mut c = fig1_like();
        c.trim = Some(0.7);
        assert!(c.validate().unwrap_err().to_string().contains("trim"));
        assert!(ExperimentConfig::from_toml("model = \"su2\"\nL = 10\nbogus = 1\nsupport = []").is_err());
    }
}
