use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;

/// Dense Hermitian matrix in row-major order.
///
/// Only the upper triangle is taken from the caller; the lower triangle is
/// filled with conjugates and the diagonal is made real, so the matrix is
/// Hermitian exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds the matrix from `f(i, j)` evaluated for `i <= j`.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "HermitianMatrix needs dim >= 1");
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(f(i, i).re, 0.0);
            for j in i + 1..dim {
                let z = f(i, j);
                data[i * dim + j] = z;
                data[j * dim + i] = z.conj();
            }
        }
        HermitianMatrix { dim, data }
    }

    /// Builds the matrix from a full row-major array, reading the upper triangle.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Self::from_upper_fn(dim, |i, j| entries[i * dim + j])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_upper_fn(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigenvalue algorithm selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMethod {
    /// Cyclic Jacobi on the real symmetric embedding.
    Jacobi,
    /// Householder tridiagonalization followed by implicit QL.
    Tridiagonal,
}

const JACOBI_MAX_SWEEPS: usize = 50;

/// Eigenvalues in ascending order by cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues_with(h, EigenMethod::Jacobi)
}

pub fn hermitian_eigenvalues_with(h: &HermitianMatrix, method: EigenMethod) -> Result<Vec<f64>> {
    match method {
        EigenMethod::Jacobi => jacobi_hermitian(h),
        EigenMethod::Tridiagonal => {
            let mut a = h.data.clone();
            let (d, e) = tridiagonalize(&mut a, h.dim);
            tridiagonal_eigenvalues(d, e)
        }
    }
}

fn jacobi_hermitian(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = h.dim;
    let m = 2 * n;
    // [[Re, -Im], [Im, Re]] has every eigenvalue of H twice.
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.entry(i, j);
            a[i * m + j] = z.re;
            a[(i + n) * m + j + n] = z.re;
            a[i * m + j + n] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let mut evals = jacobi_symmetric(&mut a, m)?;
    evals.sort_by(f64::total_cmp);
    Ok(evals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn jacobi_symmetric(a: &mut [f64], m: usize) -> Result<Vec<f64>> {
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = 1e-13 * total;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    s += a[i * m + j] * a[i * m + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweep = 0;
    loop {
        let off_norm = off(a);
        if off_norm <= threshold || total == 0.0 {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::numerical(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps: off-diagonal norm {off_norm:e}, target {threshold:e}"
            )));
        }
        sweep += 1;
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Ok((0..m).map(|i| a[i * m + i]).collect())
}

/// Reduces a full row-major Hermitian matrix to real symmetric tridiagonal
/// form, returning the diagonal and the off-diagonal magnitudes.
fn tridiagonalize(a: &mut [Complex64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut e = vec![0.0; n];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let norm2: f64 = (lo..n).map(|i| a[i * n + k].norm_sqr()).sum();
        let norm = norm2.sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[lo * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        for i in lo..n {
            v[i] = a[i * n + k];
        }
        v[lo] -= alpha;
        let tau = 1.0 / (norm * (norm + x0.norm()));
        e[k] = norm;
        // p = tau * A22 v
        for i in lo..n {
            let row = &a[i * n + lo..i * n + n];
            let mut s = zero;
            for (aij, vj) in row.iter().zip(&v[lo..n]) {
                s += aij * vj;
            }
            p[i] = s * tau;
        }
        let mut vp = zero;
        for i in lo..n {
            vp += v[i].conj() * p[i];
        }
        let kfac = vp * (0.5 * tau);
        for i in lo..n {
            p[i] -= kfac * v[i];
        }
        for i in lo..n {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[i * n + lo..i * n + n];
            for (j, aij) in row.iter_mut().enumerate() {
                let j = j + lo;
                *aij -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        for i in lo..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + n - 2].norm();
    }
    let d = (0..n).map(|i| a[i * n + i].re).collect();
    (d, e)
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL.
///
/// `e[i]` couples rows `i` and `i + 1`; `e[n - 1]` is ignored.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    assert_eq!(e.len(), n, "off-diagonal buffer must have length n");
    if n == 0 {
        return Ok(d);
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::numerical("tridiagonal QL did not converge in 60 iterations"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Nonzero eigenvalues of `X^† X` for a column-major `m × p` matrix `X`.
///
/// Runs column-pivoted Householder QR until the unprocessed column mass
/// falls to `rel_tol` of the total, then diagonalizes `R R^†`. The returned
/// eigenvalues are ascending; the discarded part of the spectrum sums to at
/// most `rel_tol · ‖X‖_F²`. `x` is overwritten.
pub fn gram_spectrum(x: &mut [Complex64], m: usize, p: usize, rel_tol: f64) -> Result<Vec<f64>> {
    assert_eq!(x.len(), m * p, "buffer must hold m * p entries");
    let zero = Complex64::new(0.0, 0.0);
    let mut norms: Vec<f64> = x.chunks(m.max(1)).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    let total: f64 = norms.iter().sum();
    if total == 0.0 || m == 0 || p == 0 {
        return Ok(Vec::new());
    }
    let steps = m.min(p);
    let mut r: Vec<Vec<Complex64>> = Vec::new();
    let mut v = vec![zero; m];
    for t in 0..steps {
        let resid: f64 = norms[t..].iter().sum();
        if resid <= rel_tol * total {
            break;
        }
        let jp = (t..p).max_by(|&a, &b| norms[a].total_cmp(&norms[b])).unwrap();
        if jp != t {
            for i in 0..m {
                x.swap(t * m + i, jp * m + i);
            }
            norms.swap(t, jp);
            for row in r.iter_mut() {
                row.swap(t, jp);
            }
        }
        let col = &x[t * m..t * m + m];
        let normx = col[t..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut row = vec![zero; p];
        if normx == 0.0 {
            r.push(row);
            continue;
        }
        let x0 = col[t];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * normx;
        v[t..m].copy_from_slice(&col[t..m]);
        v[t] -= alpha;
        let tau = 1.0 / (normx * (normx + x0.norm()));
        row[t] = alpha;
        let vt = &v[t..];
        let (_, tail) = x.split_at_mut((t + 1) * m);
        let mut updates = vec![(zero, 0.0); p - t - 1];
        let mut cols: Vec<(&mut [Complex64], &mut (Complex64, f64))> = tail.chunks_mut(m).zip(updates.iter_mut()).collect();
        let min_cols = (1 << 15) / (m - t);
        exec::for_each_chunk_mut(&mut cols, 16, min_cols, |_, part| {
            for (cj, out) in part.iter_mut() {
                let mut dot = zero;
                for (vi, xi) in vt.iter().zip(&cj[t..]) {
                    dot += vi.conj() * xi;
                }
                let f = dot * tau;
                let mut rest = 0.0;
                for (idx, (vi, xi)) in vt.iter().zip(cj[t..].iter_mut()).enumerate() {
                    *xi -= f * vi;
                    if idx > 0 {
                        rest += xi.norm_sqr();
                    }
                }
                **out = (cj[t], rest);
            }
        });
        for (j, (top, rest)) in (t + 1..p).zip(updates) {
            row[j] = top;
            norms[j] = rest;
        }
        norms[t] = 0.0;
        r.push(row);
    }
    let k = r.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut g = vec![zero; k * k];
    for a in 0..k {
        for b in a..k {
            let mut s = zero;
            for j in b..p {
                s += r[a][j] * r[b][j].conj();
            }
            g[a * k + b] = s;
        }
    }
    let gm = HermitianMatrix::from_row_major(k, &g);
    hermitian_eigenvalues_with(&gm, EigenMethod::Tridiagonal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_pauli_x() {
        let id = HermitianMatrix::from_real_diagonal(&[1.0, 1.0]);
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let ev = hermitian_eigenvalues_with(&id, method).unwrap();
            assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
        }
        let x = HermitianMatrix::from_row_major(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        for method in [EigenMethod::Jacobi, EigenMethod::Tridiagonal] {
            let ev = hermitian_eigenvalues_with(&x, method).unwrap();
            assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_y_is_complex() {
        let y = HermitianMatrix::from_row_major(2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let ev = hermitian_eigenvalues(&y).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lower_triangle_is_conjugate() {
        let h = HermitianMatrix::from_upper_fn(3, |i, j| c((i + j) as f64, (j as f64) - (i as f64)));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.entry(i, j), h.entry(j, i).conj());
            }
        }
    }

    #[test]
    fn tridiagonal_small() {
        let ev = tridiagonal_eigenvalues(vec![2.0, 2.0], vec![1.0, 0.0]).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn gram_matches_dense_with_pivoting() {
        // Column norms chosen so that pivoting reorders columns repeatedly.
        let (m, p) = (7, 5);
        let mut x: Vec<Complex64> = (0..m * p)
            .map(|i| c(((i * 37 % 11) as f64 - 5.0) * (1.0 + (i / m) as f64), ((i * 13 % 7) as f64) - 3.0))
            .collect();
        let gram = HermitianMatrix::from_upper_fn(p, |a, b| {
            (0..m).map(|i| x[a * m + i].conj() * x[b * m + i]).sum()
        });
        let dense = hermitian_eigenvalues(&gram).unwrap();
        let qr = gram_spectrum(&mut x, m, p, 1e-16).unwrap();
        assert_eq!(qr.len(), p);
        for (a, b) in dense.iter().zip(&qr) {
            assert!((a - b).abs() < 1e-10 * dense[p - 1]);
        }
    }

    #[test]
    fn gram_of_rank_one() {
        // X = u v^T with ‖u‖² = 2, ‖v‖² = 5.
        let u = [c(1.0, 0.0), c(0.0, 1.0)];
        let w = [1.0, 2.0];
        let mut x: Vec<Complex64> = w.iter().flat_map(|&wj| u.iter().map(move |&ui| ui * wj)).collect();
        let ev = gram_spectrum(&mut x, 2, 2, 1e-15).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - 10.0).abs() < 1e-13);
    }
}
