//! Small dense linear algebra kit: complex matrices, Cholesky, tridiagonal
//! solves, a Sturm-sequence eigensolver for symmetric tridiagonal matrices,
//! and power iteration for the largest singular value.

use num_complex::Complex64;

use crate::error::{KgError, Result};
use crate::par;

/// Dense row-major complex matrix.
#[derive(Debug, Clone)]
pub struct CMat {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, f: impl Fn(usize, usize) -> Complex64 + Sync) -> Self {
        let rows = par::map_range(n_rows, |i| {
            (0..n_cols).map(|j| f(i, j)).collect::<Vec<_>>()
        });
        Self {
            n_rows,
            n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_cols);
        par::map_range(self.n_rows, |i| {
            self.row(i)
                .iter()
                .zip(x)
                .map(|(&a, &b)| a * b)
                .sum::<Complex64>()
        })
    }

    /// `A^H x` (conjugate transpose applied to x).
    pub fn adj_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_rows);
        let cols = par::map_range(self.n_cols, |j| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..self.n_rows {
                s += self.get(i, j).conj() * x[i];
            }
            s
        });
        cols
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n_cols, other.n_rows);
        let n_cols = other.n_cols;
        let rows = par::map_range(self.n_rows, |i| {
            let mut row = vec![Complex64::new(0.0, 0.0); n_cols];
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                for (r, &b) in row.iter_mut().zip(orow) {
                    *r += a * b;
                }
            }
            row
        });
        CMat {
            n_rows: self.n_rows,
            n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i).conj())
    }

    /// Scale row `i` by `r[i]` and column `j` by `c[j]` (real diagonals).
    pub fn scale_rows_cols(&self, r: &[f64], c: &[f64]) -> CMat {
        assert_eq!(r.len(), self.n_rows);
        assert_eq!(c.len(), self.n_cols);
        CMat::from_fn(self.n_rows, self.n_cols, |i, j| self.get(i, j) * (r[i] * c[j]))
    }
}

/// Cholesky factor `A = L L^H` of a Hermitian positive definite matrix.
pub struct Cholesky {
    l: CMat,
}

impl Cholesky {
    pub fn factor(a: &CMat) -> Result<Cholesky> {
        assert_eq!(a.n_rows(), a.n_cols());
        let n = a.n_rows();
        let mut l = CMat::zeros(n, n);
        for j in 0..n {
            let mut d = a.get(j, j).re;
            for k in 0..j {
                d -= l.get(j, k).norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(KgError::NotPositiveDefinite { pivot: d, index: j });
            }
            let djj = d.sqrt();
            l.set(j, j, Complex64::new(djj, 0.0));
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k).conj();
                }
                l.set(i, j, s / djj);
            }
        }
        Ok(Cholesky { l })
    }

    pub fn n(&self) -> usize {
        self.l.n_rows()
    }

    /// Solve `L y = b` (forward substitution).
    pub fn solve_lower(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l.get(i, k);
                y[i] = y[i] - lik * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }

    /// Solve `L^H y = b` (back substitution).
    pub fn solve_lower_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let mut y = b.to_vec();
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self.l.get(k, i).conj();
                y[i] = y[i] - lki * y[k];
            }
            y[i] /= self.l.get(i, i);
        }
        y
    }

    /// Apply `L^H x` (used as the "square root" of A in weighted norms).
    pub fn apply_lower_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.l.get(i, i).conj() * x[i];
                for k in i + 1..n {
                    s += self.l.get(k, i).conj() * x[k];
                }
                s
            })
            .collect()
    }

    /// Apply `L x`.
    pub fn apply_lower(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..=i {
                    s += self.l.get(i, k) * x[k];
                }
                s
            })
            .collect()
    }
}

/// Solve a general complex tridiagonal system by LU with partial pivoting.
///
/// `lower[i]` couples row `i+1` to `i`, `upper[i]` couples row `i` to `i+1`.
pub fn tridiag_solve(
    diag: &[Complex64],
    lower: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    assert_eq!(lower.len(), n - 1);
    assert_eq!(upper.len(), n - 1);
    assert_eq!(rhs.len(), n);

    // Banded LU with partial pivoting needs one extra superdiagonal.
    let mut d = diag.to_vec();
    let mut u1 = upper.to_vec();
    let mut u2 = vec![Complex64::new(0.0, 0.0); n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    let mut l = lower.to_vec();

    for i in 0..n - 1 {
        if l[i].norm() > d[i].norm() {
            // swap rows i and i+1 (entries at columns i, i+1, i+2)
            std::mem::swap(&mut d[i], &mut l[i]);
            {
                let (u1i, di1) = (u1[i], d[i + 1]);
                u1[i] = di1;
                d[i + 1] = u1i;
            }
            if i + 2 < n {
                std::mem::swap(&mut u2[i], &mut u1[i + 1]);
            }
            b.swap(i, i + 1);
        }
        if d[i].norm() == 0.0 {
            return Err(KgError::Invalid("singular tridiagonal system".into()));
        }
        let m = l[i] / d[i];
        d[i + 1] -= m * u1[i];
        if i + 2 < n {
            u1[i + 1] -= m * u2[i];
        }
        let bi = b[i];
        b[i + 1] -= m * bi;
        l[i] = m;
    }
    if d[n - 1].norm() == 0.0 {
        return Err(KgError::Invalid("singular tridiagonal system".into()));
    }
    // back substitution
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// Number of eigenvalues of the symmetric tridiagonal matrix
/// `(diag, off)` strictly below `shift` (Sturm count).
fn sturm_count(diag: &[f64], off: &[f64], shift: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut q = diag[0] - shift;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = diag[i] - shift - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues below `upper_bound` of a symmetric tridiagonal matrix,
/// with eigenvectors by inverse iteration. Eigenvalues are bisected to
/// near machine precision; eigenvectors are normalized in the Euclidean norm.
pub fn tridiag_eigen_below(
    diag: &[f64],
    off: &[f64],
    upper_bound: f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = diag.len();
    assert_eq!(off.len(), n - 1);
    // Gershgorin lower bound
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let mut r = diag[i];
        if i > 0 {
            r -= off[i - 1].abs();
        }
        if i + 1 < n {
            r -= off[i].abs();
        }
        lo = lo.min(r);
    }
    let lo = lo - 1.0;
    let n_below = sturm_count(diag, off, upper_bound);
    let mut pairs = Vec::with_capacity(n_below);
    for idx in 0..n_below {
        // bisect for the (idx+1)-th eigenvalue from below
        let mut a = lo;
        let mut b = upper_bound;
        for _ in 0..120 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) > idx {
                b = mid;
            } else {
                a = mid;
            }
            if (b - a).abs() < 1e-14 * (1.0 + b.abs()) {
                break;
            }
        }
        let lambda = 0.5 * (a + b);
        let v = tridiag_inverse_iteration(diag, off, lambda)?;
        pairs.push((lambda, v));
    }
    Ok(pairs)
}

fn tridiag_inverse_iteration(diag: &[f64], off: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = diag.len();
    let shift = lambda + 1e-11 * (1.0 + lambda.abs());
    let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x - shift, 0.0)).collect();
    let e: Vec<Complex64> = off.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 1e-3 * ((i * 2654435761) % 97) as f64, 0.0))
        .collect();
    for _ in 0..4 {
        let w = tridiag_solve(&d, &e, &e, &v)?;
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / norm).collect();
    }
    // fix overall sign: make the largest-magnitude entry positive
    let mut best = 0;
    for i in 0..n {
        if v[i].norm() > v[best].norm() {
            best = i;
        }
    }
    let sign = if v[best].re < 0.0 { -1.0 } else { 1.0 };
    Ok(v.into_iter().map(|z| sign * z.re).collect())
}

/// Largest singular value of the operator given by `apply`/`apply_adj`,
/// by power iteration on `A^H A` from the all-ones vector.
pub fn power_iteration_largest_sv(
    n: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    apply_adj: impl Fn(&[Complex64]) -> Vec<Complex64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    let norm0 = (n as f64).sqrt();
    for x in v.iter_mut() {
        *x /= norm0;
    }
    let mut sigma_prev = -1.0;
    for it in 0..max_iter {
        let av = apply(&v);
        let sigma = av.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if sigma == 0.0 {
            return Ok(0.0);
        }
        let mut w = apply_adj(&av);
        let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if wn == 0.0 {
            return Ok(sigma);
        }
        for x in w.iter_mut() {
            *x /= wn;
        }
        v = w;
        if (sigma - sigma_prev).abs() <= rel_tol * sigma.max(1e-300) && it > 1 {
            return Ok(sigma);
        }
        sigma_prev = sigma;
    }
    Err(KgError::NoConvergence { iters: max_iter })
}
