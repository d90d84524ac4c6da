//! Small dense linear algebra used by the estimators and oracles.
//!
//! Matrices are row-major `f64`. The routines here cover what the model
//! needs: Householder QR with column pivoting for least squares (including
//! the minimum-norm solution of rank-deficient problems), Cholesky and LU
//! solves, Kronecker products, and the eigenvalues of a general real matrix
//! via balancing, Hessenberg reduction and the shifted QR algorithm.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use libm::sqrt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = out.row_mut(i);
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (p, q) = (other.rows, other.cols);
        let mut out = Matrix::zeros(self.rows * p, self.cols * q);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == 0.0 {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Column-stacking vectorisation.
    pub fn vec_cols(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Largest absolute row sum (the induced infinity norm).
    pub fn max_row_abs_sum(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solution of a linear least-squares problem `min ||A x - b||`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coef: Vec<f64>,
    pub rank: usize,
    /// Columns judged linearly dependent on earlier pivots, ascending.
    pub aliased: Vec<usize>,
    /// Diagonal of `(AᵀA)⁻¹` over the non-aliased columns; NaN for aliased ones.
    pub unscaled_var: Vec<f64>,
}

/// Relative threshold on `|R_kk| / |R_00|` below which a pivot counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Least squares through Householder QR with column pivoting.
///
/// Full-rank problems are solved by back substitution. Rank-deficient ones
/// get the minimum-norm solution from a complete orthogonal decomposition.
pub fn lstsq(a: &Matrix, b: &[f64]) -> Result<LeastSquares> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch("least squares right-hand side".into()));
    }
    if a.as_slice().iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("least squares input"));
    }
    if n == 0 {
        return Ok(LeastSquares { coef: Vec::new(), rank: 0, aliased: Vec::new(), unscaled_var: Vec::new() });
    }

    // Column-major working copy; columns are swapped as pivots are chosen.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut qtb = b.to_vec();
    let steps = m.min(n);
    let mut diag_r = vec![0.0; steps];

    for k in 0..steps {
        // Pivot: remaining column with the largest trailing norm.
        let mut best = k;
        let mut best_norm = -1.0;
        for (j, col) in cols.iter().enumerate().skip(k) {
            let nrm: f64 = col[k..].iter().map(|x| x * x).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        cols.swap(k, best);
        perm.swap(k, best);

        let norm = sqrt(best_norm.max(0.0));
        if norm == 0.0 {
            diag_r[k] = 0.0;
            continue;
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        cols[k][k] = alpha;
        for x in cols[k][k + 1..].iter_mut() {
            *x = 0.0;
        }
        diag_r[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for col in cols.iter_mut().skip(k + 1) {
            let s = 2.0 * dot(&v, &col[k..]) / vnorm2;
            for (c, vi) in col[k..].iter_mut().zip(&v) {
                *c -= s * vi;
            }
        }
        let s = 2.0 * dot(&v, &qtb[k..]) / vnorm2;
        for (c, vi) in qtb[k..].iter_mut().zip(&v) {
            *c -= s * vi;
        }
    }

    let lead = diag_r.first().map_or(0.0, |x| x.abs());
    let rank = if lead == 0.0 {
        0
    } else {
        diag_r.iter().take_while(|d| d.abs() > RANK_TOL * lead).count()
    };

    // R is stored in cols: R[i][j] = cols[j][i] for i <= j.
    let r_at = |i: usize, j: usize| cols[j][i];

    let mut y = vec![0.0; n];
    if rank == n {
        for i in (0..n).rev() {
            let mut s = qtb[i];
            for j in i + 1..n {
                s -= r_at(i, j) * y[j];
            }
            y[i] = s / r_at(i, i);
        }
    } else if rank > 0 {
        // Complete orthogonal decomposition: Tᵀ = Z S for T = [R11 R12].
        let mut tt: Vec<Vec<f64>> = (0..rank).map(|i| (0..n).map(|j| if j >= i { r_at(i, j) } else { 0.0 }).collect()).collect();
        // tt[i] is row i of T, i.e. column i of Tᵀ (length n).
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(rank);
        for k in 0..rank {
            let norm = sqrt(tt[k][k..].iter().map(|x| x * x).sum::<f64>());
            let alpha = if tt[k][k] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = tt[k][k..].to_vec();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            tt[k][k] = alpha;
            for x in tt[k][k + 1..].iter_mut() {
                *x = 0.0;
            }
            if vnorm2 > 0.0 {
                for col in tt.iter_mut().skip(k + 1) {
                    let s = 2.0 * dot(&v, &col[k..]) / vnorm2;
                    for (c, vi) in col[k..].iter_mut().zip(&v) {
                        *c -= s * vi;
                    }
                }
            }
            reflectors.push(v);
        }
        // S upper triangular with S[i][j] = tt[j][i]; solve Sᵀ w = c.
        let mut w = vec![0.0; n];
        for i in 0..rank {
            let mut s = qtb[i];
            for j in 0..i {
                s -= tt[i][j] * w[j];
            }
            w[i] = s / tt[i][i];
        }
        // y = Z [w; 0], applying reflectors in reverse.
        for k in (0..rank).rev() {
            let v = &reflectors[k];
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let s = 2.0 * dot(v, &w[k..]) / vnorm2;
            for (c, vi) in w[k..].iter_mut().zip(v) {
                *c -= s * vi;
            }
        }
        y = w;
    }

    // Diagonal of R11⁻¹ R11⁻ᵀ by inverting the leading triangle.
    let mut rinv = Matrix::zeros(rank, rank);
    for j in 0..rank {
        rinv[(j, j)] = 1.0 / r_at(j, j);
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += r_at(i, k) * rinv[(k, j)];
            }
            rinv[(i, j)] = -s / r_at(i, i);
        }
    }
    let mut coef = vec![0.0; n];
    let mut unscaled_var = vec![f64::NAN; n];
    for (k, &orig) in perm.iter().enumerate() {
        coef[orig] = y[k];
        if k < rank {
            unscaled_var[orig] = rinv.row(k).iter().map(|x| x * x).sum();
        }
    }
    let mut aliased: Vec<usize> = perm[rank..].to_vec();
    aliased.sort_unstable();
    Ok(LeastSquares { coef, rank, aliased, unscaled_var })
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Singular("matrix is not positive definite"));
        }
        let djj = sqrt(d);
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let l = cholesky(a)?;
    let n = l.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch("cholesky right-hand side".into()));
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s = b[i] - dot(&l.row(i)[..i], &z[..i]);
        z[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Ok(x)
}

/// `ln det A` for symmetric positive definite `A`.
pub fn log_det_spd(a: &Matrix) -> Result<f64> {
    let l = cholesky(a)?;
    Ok((0..l.rows()).map(|i| 2.0 * libm::log(l[(i, i)])).sum())
}

struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

fn lu_decompose(a: &Matrix) -> Result<Lu> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs()))
            .unwrap_or(k);
        if lu[(p, k)].abs() <= f64::EPSILON * scale * n as f64 || lu[(p, k)] == 0.0 {
            return Err(Error::Singular("LU pivot vanished"));
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        for i in k + 1..n {
            let f = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = f;
            for j in k + 1..n {
                lu[(i, j)] -= f * lu[(k, j)];
            }
        }
    }
    Ok(Lu { lu, perm })
}

/// Solves a general square system by LU with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let Lu { lu, perm } = lu_decompose(a)?;
    let n = lu.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch("solve right-hand side".into()));
    }
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for k in 0..i {
            x[i] -= lu[(i, k)] * x[k];
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= lu[(i, k)] * x[k];
        }
        x[i] /= lu[(i, i)];
    }
    Ok(x)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Iteration limits for the eigenvalue solver.
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Cap on the total number of QR sweeps.
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { max_iter: 10_000 }
    }
}

/// Eigenvalues `(re, im)` of a general real square matrix.
pub fn eigenvalues(a: &Matrix, opts: EigenOptions) -> Result<Vec<(f64, f64)>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eigenvalue input"));
    }
    let mut h: Vec<Vec<f64>> = a.to_rows();
    balance(&mut h);
    to_hessenberg(&mut h);
    hessenberg_qr(&mut h, opts.max_iter)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    spectral_radius_with(a, EigenOptions::default())
}

pub fn spectral_radius_with(a: &Matrix, opts: EigenOptions) -> Result<f64> {
    Ok(eigenvalues(a, opts)?
        .into_iter()
        .map(|(re, im)| libm::hypot(re, im))
        .fold(0.0, f64::max))
}

fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.len();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for x in a[i].iter_mut() {
                        *x *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Similarity reduction to upper Hessenberg form by stabilised elimination.
fn to_hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x: f64 = 0.0;
        let mut piv = m;
        for (j, row) in a.iter().enumerate().skip(m) {
            if row[m - 1].abs() > x.abs() {
                x = row[m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut() {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        for x in row.iter_mut().take(i.saturating_sub(1)) {
            *x = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hessenberg_qr(a: &mut [Vec<f64>], max_iter: usize) -> Result<Vec<(f64, f64)>> {
    let n = a.len();
    let mut w = vec![(0.0, 0.0); n];
    if n == 0 {
        return Ok(w);
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut total = 0usize;
    let (mut p, mut q, mut r, mut s, mut x, mut y, mut z);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = a[nu][nu];
            if l == nu {
                w[nu] = (x + t, 0.0);
                nn -= 1;
                break;
            }
            y = a[nu - 1][nu - 1];
            let ww = a[nu][nu - 1] * a[nu - 1][nu];
            if l + 1 == nu {
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = sqrt(q.abs());
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    w[nu - 1] = (x + z, 0.0);
                    w[nu] = (x + z, 0.0);
                    if z != 0.0 {
                        w[nu] = (x - ww / z, 0.0);
                    }
                } else {
                    w[nu] = (x + p, -z);
                    w[nu - 1] = (x + p, z);
                }
                nn -= 2;
                break;
            }
            total += 1;
            if total > max_iter {
                return Err(Error::NoConvergence(max_iter));
            }
            let mut wsh = ww;
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                wsh = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            loop {
                z = a[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - wsh) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k + 1 != nu {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = sqrt(p * p + q * q + r * r).copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        p = x * row[k] + y * row[k + 1];
                        if k + 1 != nu {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k + 1] -= p * q;
                        row[k] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(w)
}
