//! Dense symmetric eigendecomposition.
//!
//! Small matrices (every reduced model and the usual oracle instances) go through
//! cyclic Jacobi rotations. Above [`JACOBI_MAX_DIM`] the full-space oracle switches to
//! Householder tridiagonalization followed by implicit QL, which is several times
//! faster at a few thousand rows. Both return eigenvalues in ascending order.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Stop Jacobi once the off-diagonal Frobenius norm is below this fraction of ‖M‖_F.
pub const JACOBI_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_MAX_DIM: usize = 256;

/// Eigenvalues in ascending order with orthonormal eigenvectors as the columns of a
/// row-major `dim × dim` array.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomp {
    pub values: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigDecomp {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Component `i` of eigenvector `j`.
    #[inline]
    pub fn component(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.dim() + j]
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.dim()).map(|i| self.component(i, j)).collect()
    }

    /// Row `i` of V, i.e. component `i` of every eigenvector.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[i * n..(i + 1) * n]
    }

    /// Vᵀx: coordinates of `x` in the eigenbasis.
    pub fn to_eigenbasis(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v * xi;
            }
        }
        out
    }

    /// max |VᵀV − I|
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let s: f64 = (0..n).map(|i| self.component(i, a) * self.component(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// max |MV − VΛ|
    pub fn residual(&self, m: &SymMatrix) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            let v = self.vector(j);
            let mv = m.mul_vec(&v);
            for (a, b) in mv.iter().zip(&v) {
                worst = worst.max((a - self.values[j] * b).abs());
            }
        }
        worst
    }

    /// V·diag(values)·Vᵀ
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.dim();
        SymMatrix::from_upper_fn(n, |i, j| {
            (0..n).map(|l| self.component(i, l) * self.values[l] * self.component(j, l)).sum()
        })
    }

    /// Sorts eigenpairs by ascending eigenvalue; `vectors_by_row[j]` is eigenvector j.
    fn from_unsorted(values: Vec<f64>, vectors_by_row: &[f64]) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut vectors = vec![0.0; n * n];
        for (col, &j) in order.iter().enumerate() {
            for i in 0..n {
                vectors[i * n + col] = vectors_by_row[j * n + i];
            }
        }
        EigDecomp { values: order.iter().map(|&j| values[j]).collect(), vectors }
    }
}

/// Eigendecomposition of a symmetric matrix, dispatching on size.
pub fn sym_eig(m: &SymMatrix) -> Result<EigDecomp> {
    if m.dim() <= JACOBI_MAX_DIM {
        jacobi_eig(m)
    } else {
        tridiagonal_eig(m)
    }
}

/// Cyclic Jacobi rotations, row by row over the strict upper triangle.
pub fn jacobi_eig(m: &SymMatrix) -> Result<EigDecomp> {
    let n = m.dim();
    let mut a = m.as_slice().to_vec();
    // v holds eigenvectors as rows so the rotation touches contiguous memory
    let mut v = SymMatrix::identity(n).as_slice().to_vec();
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];
    let threshold = JACOBI_TOL * m.frobenius_norm();

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };

    for sweep in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            return Ok(EigDecomp::from_unsorted(d, &v));
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                let rotate = |a: &mut [f64], i: usize, j: usize| {
                    let (g, h) = (a[i], a[j]);
                    a[i] = g - s * (h + g * tau);
                    a[j] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, j * n + p, j * n + q);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p * n + j, j * n + q);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p * n + j, q * n + j);
                }
                for j in 0..n {
                    rotate(&mut v, p * n + j, q * n + j);
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    let residual = off_norm(&a);
    if residual <= threshold {
        return Ok(EigDecomp::from_unsorted(d, &v));
    }
    Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS, residual })
}

/// Householder reduction to tridiagonal form and implicit QL with shifts.
pub fn tridiagonal_eig(m: &SymMatrix) -> Result<EigDecomp> {
    let n = m.dim();
    if n == 0 {
        return Ok(EigDecomp { values: Vec::new(), vectors: Vec::new() });
    }
    let mut v = m.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e, n);
    // transpose so eigenvector j sits in row j during the QL sweeps
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[j * n + i] = v[i * n + j];
        }
    }
    implicit_ql(&mut w, &mut d, &mut e, n)?;
    Ok(EigDecomp::from_unsorted(d, &w))
}

fn tridiagonalize(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for x in d[..i].iter_mut() {
                *x /= scale;
                h += *x * *x;
            }
            let f = d[i - 1];
            let g = if f > 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);
            for j in 0..i {
                let f = d[j];
                v[at(j, i)] = f;
                let mut g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let g: f64 = (0..=i).map(|k| v[at(k, i + 1)] * v[at(k, j)]).sum();
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// `w` holds the accumulated transformation transposed (row j = column j).
fn implicit_ql(w: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    const MAX_ITER: usize = 60;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NoConvergence { sweeps: iter, residual: e[l].abs() });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for x in d[(l + 2)..n].iter_mut() {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let row_i = &mut lo[i * n..];
                    let row_i1 = &mut hi[..n];
                    for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
