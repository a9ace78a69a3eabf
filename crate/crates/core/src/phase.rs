//! Phase sums S(g) = Σ_γ c_γ exp(i φ_γ g) over a Cantor set on φ.
//!
//! Every assembly routine reduces to these sums evaluated on a uniform grid
//! of exponents g. Three kernels are provided:
//! - `Direct`: one pass per point, O(|C| · G).
//! - `Product`: equal coefficients on a Spread set factorize level by level,
//!   O(k · N · G), independent of |C|.
//! - `Moments`: points are grouped at a depth d where every group is narrow
//!   compared with the grid's shortest period; each group is summarized by
//!   a truncated Taylor expansion of exp(i g u) about its center, giving
//!   O(|C| · P + N^d · P · G).
//!
//! Zeroed coefficients are skipped (`Direct`, `Moments`) or subtracted
//! (`Product`). All kernels agree to roughly 1e-15 relative to Σ|c_γ|.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientProfile;
use crate::error::{Error, Result};
use crate::exec;
use crate::fractal::{CantorSupport, KeepPattern};

/// Exponents g_j = start + j · step for j in 0..len.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid {
    pub fn value(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn max_abs(&self) -> f64 {
        if self.len == 0 {
            return 0.0;
        }
        self.start.abs().max(self.value(self.len - 1).abs())
    }
}

/// Phase-sum algorithm selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMethod {
    #[default]
    Auto,
    Direct,
    Product,
    Moments,
}

/// Coefficients of a Cantor set on φ together with its zeroed positions.
#[derive(Clone, Copy, Debug)]
pub struct CantorSource<'a> {
    pub support: CantorSupport,
    pub profile: &'a CoefficientProfile,
    /// Sorted indices of zeroed coefficients.
    pub zeros: &'a [u64],
}

impl CantorSource<'_> {
    /// Point ξ of a given index.
    fn point(&self, index: u64) -> f64 {
        let (left, _) = self.support.group_interval(self.support.k, index);
        left + 0.5 * self.support.cell_width()
    }
}

/// S(g) on `grid` for the Cantor source.
pub fn cantor_phase_sum(src: &CantorSource, grid: Grid, method: PhaseMethod) -> Result<Vec<Complex64>> {
    let product_ok = src.profile.is_equal() && src.support.spec.pattern() == KeepPattern::Spread;
    match method {
        PhaseMethod::Product if !product_ok => Err(Error::domain(
            "product phase-sum kernel needs equal coefficients on a Spread Cantor set",
        )),
        PhaseMethod::Product => Ok(product_kernel(src, grid)),
        PhaseMethod::Auto if product_ok => Ok(product_kernel(src, grid)),
        PhaseMethod::Auto | PhaseMethod::Moments => Ok(moments_kernel(src, grid)),
        PhaseMethod::Direct => Ok(direct_cantor(src, grid)),
    }
}

/// S(g) for explicit points and coefficients.
pub fn point_phase_sum(phis: &[f64], coeffs: &[Complex64], grid: Grid) -> Vec<Complex64> {
    assert_eq!(phis.len(), coeffs.len(), "one coefficient per point");
    let chunk = 256;
    let parts = exec::map_chunks(phis.len(), chunk, |r| {
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len];
        for i in r {
            accumulate_point(&mut acc, coeffs[i], phis[i], grid);
        }
        acc
    });
    sum_in_order(parts, grid.len)
}

/// acc_j += c · exp(i φ g_j), with the rotation refreshed every 64 steps.
fn accumulate_point(acc: &mut [Complex64], c: Complex64, phi: f64, grid: Grid) {
    if c.norm_sqr() == 0.0 {
        return;
    }
    let rot = Complex64::from_polar(1.0, phi * grid.step);
    let mut z = Complex64::new(0.0, 0.0);
    for (j, a) in acc.iter_mut().enumerate() {
        if j % 64 == 0 {
            z = c * Complex64::from_polar(1.0, phi * grid.value(j));
        } else {
            z *= rot;
        }
        *a += z;
    }
}

fn sum_in_order(parts: Vec<Vec<Complex64>>, len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

fn direct_cantor(src: &CantorSource, grid: Grid) -> Vec<Complex64> {
    let sup = src.support;
    let depth = sup.k.min(6);
    let groups = u64::from(sup.spec.n()).pow(depth);
    let sampler = src.profile.sampler(sup.k);
    let parts = exec::map_chunks(groups as usize, 1, |r| {
        let mut acc = vec![Complex64::new(0.0, 0.0); grid.len];
        for g in r {
            sup.for_each_in_group(depth, g as u64, |idx, xi| {
                if src.zeros.binary_search(&idx).is_err() {
                    let phi = 2.0 * PI * xi;
                    accumulate_point(&mut acc, sampler.at(idx, phi), phi, grid);
                }
            });
        }
        acc
    });
    sum_in_order(parts, grid.len)
}

fn product_kernel(src: &CantorSource, grid: Grid) -> Vec<Complex64> {
    let sup = src.support;
    let keep = sup.spec.keep_indices(1, 0);
    let r = f64::from(sup.spec.inv_r());
    let half = 0.5 * sup.cell_width();
    let mut out: Vec<Complex64> = (0..grid.len)
        .map(|j| {
            let g = grid.value(j);
            let mut s = Complex64::from_polar(1.0, 2.0 * PI * g * half);
            let mut w = 1.0;
            for _ in 0..sup.k {
                w /= r;
                let f: Complex64 =
                    keep.iter().map(|&d| Complex64::from_polar(1.0, 2.0 * PI * g * f64::from(d) * w)).sum();
                s *= f;
            }
            s
        })
        .collect();
    if !src.zeros.is_empty() {
        let zphis: Vec<f64> = src.zeros.iter().map(|&z| 2.0 * PI * src.point(z)).collect();
        let ones = vec![Complex64::new(1.0, 0.0); zphis.len()];
        let sub = point_phase_sum(&zphis, &ones, grid);
        for (o, s) in out.iter_mut().zip(sub) {
            *o -= s;
        }
    }
    out
}

/// Depth and Taylor order minimizing the moments-kernel cost.
fn choose_depth(sup: &CantorSupport, gmax: f64, glen: usize) -> (u32, usize) {
    let n = f64::from(sup.spec.n());
    let r = f64::from(sup.spec.inv_r());
    let total = n.powi(sup.k as i32);
    let mut best = (sup.k, 1usize, f64::INFINITY);
    for d in 0..=sup.k {
        let x = gmax * PI * r.powi(-(d as i32));
        if x > 2.0 {
            continue;
        }
        let p = taylor_order(x);
        let cost = total * p as f64 + n.powi(d as i32) * (p as f64 + 4.0) * glen as f64;
        if cost < best.2 {
            best = (d, p, cost);
        }
    }
    (best.0, best.1)
}

/// Smallest P with x^P / P! below 1e-17.
fn taylor_order(x: f64) -> usize {
    if x == 0.0 {
        return 1;
    }
    let mut term = 1.0;
    let mut p = 0;
    while term >= 1e-17 || p == 0 {
        p += 1;
        term *= x / p as f64;
    }
    p
}

fn moments_kernel(src: &CantorSource, grid: Grid) -> Vec<Complex64> {
    let sup = src.support;
    let (d, p) = choose_depth(&sup, grid.max_abs(), grid.len);
    let groups = u64::from(sup.spec.n()).pow(d);
    let per = u64::from(sup.spec.n()).pow(sup.k - d);
    let offsets = match sup.spec.pattern() {
        KeepPattern::Spread => Some(sup.spread_offsets(sup.k - d)),
        KeepPattern::SeededRandom(_) => None,
    };
    let inv_fact: Vec<f64> = (0..p).scan(1.0, |f, i| {
        let out = *f;
        *f /= (i + 1) as f64;
        Some(out)
    }).collect();
    let half_cell = 0.5 * sup.cell_width();
    let sampler = src.profile.sampler(sup.k);
    let chunk = (groups as usize).div_ceil(64).max(1);
    let parts = exec::map_chunks(groups as usize, chunk, |range| {
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = vec![zero; grid.len];
        let mut m = vec![zero; p];
        for g in range {
            let g = g as u64;
            let (left, width) = sup.group_interval(d, g);
            let center = left + 0.5 * width;
            m.iter_mut().for_each(|x| *x = zero);
            let first = g * per;
            let mut zi = src.zeros.partition_point(|&z| z < first);
            let mut add = |idx: u64, xi: f64| {
                while zi < src.zeros.len() && src.zeros[zi] < idx {
                    zi += 1;
                }
                if zi < src.zeros.len() && src.zeros[zi] == idx {
                    return;
                }
                let c = sampler.at(idx, 2.0 * PI * xi);
                let u = 2.0 * PI * (xi - center);
                let mut pw = c;
                for (mk, f) in m.iter_mut().zip(&inv_fact) {
                    *mk += pw * f;
                    pw *= u;
                }
            };
            match &offsets {
                Some(off) => {
                    for (i, o) in off.iter().enumerate() {
                        add(first + i as u64, left + width * o + half_cell);
                    }
                }
                None => sup.for_each_in_group(d, g, &mut add),
            }
            if m.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            let phi_c = 2.0 * PI * center;
            let rot = Complex64::from_polar(1.0, phi_c * grid.step);
            let mut e = Complex64::new(1.0, 0.0);
            for (j, a) in acc.iter_mut().enumerate() {
                let gv = grid.value(j);
                if j % 64 == 0 {
                    e = Complex64::from_polar(1.0, phi_c * gv);
                } else {
                    e *= rot;
                }
                let t = Complex64::new(0.0, gv);
                let mut h = m[p - 1];
                for mk in m[..p - 1].iter().rev() {
                    h = h * t + mk;
                }
                *a += h * e;
            }
        }
        acc
    });
    sum_in_order(parts, grid.len)
}
