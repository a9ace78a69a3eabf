//! Cantor sets, Cantor teepees and product fractals on coset-space angles.
//!
//! A step-k Cantor set is never required in memory by the assembly kernels:
//! [`CantorSupport`] enumerates its points lazily, group by group, while
//! [`cantor_points`] materializes small sets under a memory budget.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::counter_hash;
use crate::error::{Error, Result};

/// Default cap on materialized Cantor points.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

/// Which N of the inv_r subintervals survive each subdivision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeepPattern {
    /// Indices `round(i (inv_r - 1) / (N - 1))`, identical in every interval.
    Spread,
    /// Independent seeded draw per parent interval.
    SeededRandom(u64),
}

/// Parameters of C[N, r; k] with r = 1/inv_r.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorSpec {
    n: u32,
    inv_r: u32,
    pattern: KeepPattern,
}

impl CantorSpec {
    pub fn new(n: u32, inv_r: u32, pattern: KeepPattern) -> Result<Self> {
        if n < 1 || inv_r <= n {
            return Err(Error::domain(format!(
                "Cantor spec needs inv_r > N >= 1, got N = {n}, inv_r = {inv_r}"
            )));
        }
        Ok(CantorSpec { n, inv_r, pattern })
    }

    /// Spread-pattern spec; panics on invalid parameters.
    pub fn spread(n: u32, inv_r: u32) -> Self {
        Self::new(n, inv_r, KeepPattern::Spread).expect("valid Cantor parameters")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn inv_r(&self) -> u32 {
        self.inv_r
    }

    pub fn pattern(&self) -> KeepPattern {
        self.pattern
    }

    pub fn dimension(&self) -> f64 {
        fractal_dimension(self)
    }

    /// Number of points at step `k`, or `None` on overflow.
    pub fn count(&self, k: u32) -> Option<u64> {
        u64::from(self.n).checked_pow(k)
    }

    /// Sorted kept subinterval indices of the parent interval number `parent`
    /// (counted among survivors) at subdivision `level` (1-based).
    pub fn keep_indices(&self, level: u32, parent: u64) -> Vec<u32> {
        match self.pattern {
            KeepPattern::Spread => self.spread_keep(),
            KeepPattern::SeededRandom(seed) => {
                let key = counter_hash(seed, 0x6b65_6570, u64::from(level), parent);
                let mut rng = ChaCha8Rng::seed_from_u64(key);
                let mut kept: Vec<u32> = sample(&mut rng, self.inv_r as usize, self.n as usize)
                    .into_iter()
                    .map(|i| i as u32)
                    .collect();
                kept.sort_unstable();
                kept
            }
        }
    }

    fn spread_keep(&self) -> Vec<u32> {
        if self.n == 1 {
            return vec![0];
        }
        let (n, r) = (f64::from(self.n), f64::from(self.inv_r));
        (0..self.n).map(|i| (f64::from(i) * (r - 1.0) / (n - 1.0)).round() as u32).collect()
    }
}

/// ln N / ln inv_r.
pub fn fractal_dimension(spec: &CantorSpec) -> f64 {
    f64::from(spec.n).ln() / f64::from(spec.inv_r).ln()
}

/// A materialized step-k Cantor set.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSet {
    pub spec: CantorSpec,
    pub k: u32,
    pub points: Vec<f64>,
}

impl CantorSet {
    pub fn dimension(&self) -> f64 {
        self.spec.dimension()
    }
}

/// Midpoints of the N^k surviving subintervals after k subdivisions.
pub fn cantor_points(spec: CantorSpec, k: u32) -> Result<CantorSet> {
    cantor_points_with_budget(spec, k, DEFAULT_POINT_BUDGET)
}

pub fn cantor_points_with_budget(spec: CantorSpec, k: u32, budget: usize) -> Result<CantorSet> {
    let support = CantorSupport::new(spec, k, budget as u64)?;
    let mut points = Vec::with_capacity(support.len() as usize);
    support.for_each_in_group(0, 0, |_, xi| points.push(xi));
    Ok(CantorSet { spec, k, points })
}

/// Lazy view of a step-k Cantor set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CantorSupport {
    pub spec: CantorSpec,
    pub k: u32,
}

impl CantorSupport {
    /// Fails when N^k exceeds `max_points`.
    pub fn new(spec: CantorSpec, k: u32, max_points: u64) -> Result<Self> {
        match spec.count(k) {
            Some(c) if c <= max_points => Ok(CantorSupport { spec, k }),
            _ => Err(Error::Resource(format!(
                "Cantor set C[{}, 1/{}; {}] exceeds the budget of {} points",
                spec.n, spec.inv_r, k, max_points
            ))),
        }
    }

    pub fn len(&self) -> u64 {
        self.spec.count(self.k).expect("checked at construction")
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dimension(&self) -> f64 {
        self.spec.dimension()
    }

    /// Width of one step-k subinterval.
    pub fn cell_width(&self) -> f64 {
        f64::from(self.spec.inv_r).powi(-(self.k as i32))
    }

    /// Left edge and width of group `g` at depth `d` (one surviving interval
    /// after `d` subdivisions).
    pub fn group_interval(&self, d: u32, g: u64) -> (f64, f64) {
        let n = u64::from(self.spec.n);
        let r = f64::from(self.spec.inv_r);
        let mut digits = Vec::with_capacity(d as usize);
        let mut rest = g;
        for _ in 0..d {
            digits.push(rest % n);
            rest /= n;
        }
        let mut left = 0.0;
        let mut width = 1.0;
        let mut parent = 0u64;
        for level in 1..=d {
            let pos = digits[(d - level) as usize];
            let keep = self.spec.keep_indices(level, parent);
            width /= r;
            left += f64::from(keep[pos as usize]) * width;
            parent = parent * n + pos;
        }
        (left, width)
    }

    /// Calls `f(index, xi)` for every point of group `g` at depth `d`, in
    /// increasing order. Group members occupy the index range
    /// `g·N^(k-d) .. (g+1)·N^(k-d)`.
    pub fn for_each_in_group(&self, d: u32, g: u64, mut f: impl FnMut(u64, f64)) {
        assert!(d <= self.k, "group depth exceeds k");
        let (left, width) = self.group_interval(d, g);
        let half_cell = 0.5 * self.cell_width();
        if let KeepPattern::Spread = self.spec.pattern {
            let offsets = self.spread_offsets(self.k - d);
            let base = g * offsets.len() as u64;
            for (i, u) in offsets.iter().enumerate() {
                f(base + i as u64, left + width * u + half_cell);
            }
            return;
        }
        self.walk(d, g, left, width, half_cell, &mut f);
    }

    fn walk(&self, level: u32, idx: u64, left: f64, width: f64, half: f64, f: &mut impl FnMut(u64, f64)) {
        if level == self.k {
            f(idx, left + half);
            return;
        }
        let w = width / f64::from(self.spec.inv_r);
        let n = u64::from(self.spec.n);
        for (pos, &c) in self.spec.keep_indices(level + 1, idx).iter().enumerate() {
            self.walk(level + 1, idx * n + pos as u64, left + f64::from(c) * w, w, half, f);
        }
    }

    /// Left-edge offsets, in units of the group width, of the step-`depth`
    /// subintervals inside one interval (Spread pattern only).
    pub fn spread_offsets(&self, depth: u32) -> Vec<f64> {
        let keep = self.spec.spread_keep();
        let r = f64::from(self.spec.inv_r);
        let mut out = vec![0.0];
        let mut w = 1.0;
        for _ in 0..depth {
            w /= r;
            out = out.iter().flat_map(|&x| keep.iter().map(move |&c| x + f64::from(c) * w)).collect();
        }
        out
    }
}

/// Cantor teepee: segments joining a Cantor base on the θ = π/2 circle to
/// the apex at θ = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeepeeSpec {
    pub base: CantorSpec,
    pub k: u32,
    pub theta_max: f64,
    pub quadrature_nodes: u32,
}

impl TeepeeSpec {
    pub fn new(base: CantorSpec, k: u32) -> Self {
        TeepeeSpec { base, k, theta_max: PI / 2.0, quadrature_nodes: 64 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_max > 0.0 && self.theta_max <= PI) {
            return Err(Error::domain(format!("theta_max must lie in (0, π], got {}", self.theta_max)));
        }
        if self.quadrature_nodes < 2 {
            return Err(Error::domain("teepee quadrature needs at least 2 nodes"));
        }
        Ok(())
    }

    /// Composite trapezoid nodes and weights on [0, theta_max].
    pub fn quadrature(&self) -> Vec<(f64, f64)> {
        trapezoid(self.theta_max, self.quadrature_nodes as usize)
    }

    pub fn dimension(&self) -> f64 {
        teepee_dimension(self)
    }
}

pub(crate) fn trapezoid(upper: f64, nodes: usize) -> Vec<(f64, f64)> {
    let h = upper / (nodes - 1) as f64;
    (0..nodes)
        .map(|q| {
            let w = if q == 0 || q == nodes - 1 { 0.5 * h } else { h };
            (q as f64 * h, w)
        })
        .collect()
}

/// 1 + ln N / ln inv_r.
pub fn teepee_dimension(spec: &TeepeeSpec) -> f64 {
    1.0 + fractal_dimension(&spec.base)
}

/// One factor of a product fractal: a Cantor set on φ_α at fixed θ_α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFactor {
    pub spec: CantorSpec,
    pub k: u32,
    pub theta_fixed: f64,
}

/// Product of Cantor sets on distinct angular pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFractal {
    pub factors: Vec<ProductFactor>,
}

impl ProductFractal {
    pub fn dimension(&self) -> f64 {
        self.factors.iter().map(|f| f.spec.dimension()).sum()
    }
}

/// Finds a Cantor spec whose dimension is within `eps` of `target`.
pub fn approximate_dimension(target: f64, eps: f64) -> Result<CantorSpec> {
    if !(target > 0.0 && target < 1.0) || !(eps > 0.0) {
        return Err(Error::domain(format!(
            "approximate_dimension needs 0 < target < 1 and eps > 0, got {target}, {eps}"
        )));
    }
    let limit: u64 = 1 << 31;
    let mut inv_r: u64 = 2;
    while inv_r <= limit {
        let r = inv_r as f64;
        let n = r.powf(target).round().clamp(1.0, r - 1.0);
        if ((n.ln() / r.ln()) - target).abs() <= eps {
            return CantorSpec::new(n as u32, inv_r as u32, KeepPattern::Spread);
        }
        inv_r += 1;
    }
    Err(Error::Resource(format!("no Cantor spec with inv_r <= 2^31 meets eps = {eps}")))
}

/// Coset-space coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Phi,
    Theta,
}

/// φ = 2π ξ or θ = (π/2) ξ.
pub fn map_angles(xi: f64, axis: Axis) -> f64 {
    match axis {
        Axis::Phi => 2.0 * PI * xi,
        Axis::Theta => 0.5 * PI * xi,
    }
}
