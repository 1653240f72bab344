//! Dense complex and real matrices with the operations the laboratory needs.
//!
//! Matrices are stored row-major in a flat `Vec`, so row operations are
//! contiguous. The centerpiece is an LU factorization with partial pivoting
//! used to invert shifted Hermitian matrices `H − z` with `Im z > 0`; at
//! desk scale (`N ≤ 4096`) the O(N³) dense path is both simplest and fast
//! enough, and backward stability gives max-norm residuals well below the
//! `1e−10·N` contract the resolvent module demands.
//!
//! Only square matrices are supported: every matrix in the pipeline is
//! `N×N` over the torus.

use num_complex::Complex64;

use crate::error::{Error, Result};

// ─────────────────────────────── complex matrix ───────────────────────────────

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    /// Zero matrix of size `n`.
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix entrywise from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMat { n, data }
    }

    /// Wraps an existing row-major buffer.
    ///
    /// Fails unless `data.len() == n²`.
    pub fn from_vec(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "buffer of length {} cannot form a {n}×{n} matrix",
                data.len()
            )));
        }
        Ok(CMat { n, data })
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Row `i` as a contiguous slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Mutable row `i`.
    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    /// Underlying flat buffer.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable flat buffer.
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Main diagonal as a vector.
    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.at(i, i)).collect()
    }

    /// Trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self.at(j, i).conj())
    }

    /// In-place transpose (no conjugation).
    pub fn transpose_in_place(&mut self) {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                self.data.swap(i * self.n + j, j * self.n + i);
            }
        }
    }

    /// Matrix product `self · rhs` (naive ikj loop; used at test scale and
    /// for residual checks, not in inner Monte-Carlo loops).
    pub fn mul(&self, rhs: &CMat) -> Result<CMat> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.n, self.n, rhs.n, rhs.n
            )));
        }
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product `self · v`.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against matrix of size {}",
                v.len(),
                self.n
            )));
        }
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &x)| a * x)
                    .sum::<Complex64>()
            })
            .collect())
    }

    /// Vector–matrix product `v · self` (row vector times matrix).
    pub fn vecmat(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against matrix of size {}",
                v.len(),
                self.n
            )));
        }
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = &self.data[i * n..(i + 1) * n];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += vi * a;
            }
        }
        Ok(out)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |self − rhs|`.
    pub fn max_abs_diff(&self, rhs: &CMat) -> Result<f64> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch(
                "size mismatch in max_abs_diff".into(),
            ));
        }
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest magnitude among imaginary parts (used to assert that
    /// provably-real quantities stored as complex really are real).
    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Hermitian defect `max |A − A†|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                let d = (self.at(i, j) - self.at(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Real parts as an [`RMat`].
    pub fn real_part(&self) -> RMat {
        RMat {
            n: self.n,
            data: self.data.iter().map(|c| c.re).collect(),
        }
    }
}

/// Max-norm residual `‖a·b − I‖_max`, computed one row at a time so no
/// third N×N buffer is needed.
pub fn product_identity_residual(a: &CMat, b: &CMat) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(
            "size mismatch in product_identity_residual".into(),
        ));
    }
    let n = a.n;
    let mut worst = 0.0f64;
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        row.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            for (o, &v) in row.iter_mut().zip(brow) {
                *o += aik * v;
            }
        }
        row[i] -= Complex64::new(1.0, 0.0);
        for c in &row {
            worst = worst.max(c.norm());
        }
    }
    Ok(worst)
}

// ──────────────────────── LU factorization and inverse ────────────────────────

/// Inverts a dense complex matrix by LU factorization with partial pivoting
/// followed by forward/back substitution on the permuted identity.
///
/// All row operations are contiguous (row-major layout), giving roughly
/// `(4/3)N³` complex multiply-adds in total. Fails with
/// [`Error::NumericalFailure`] on an exactly zero pivot column, which cannot
/// occur for the shifted Hermitian matrices this crate inverts (`Im z > 0`
/// keeps them nonsingular) but is guarded regardless.
pub fn invert(a: &CMat) -> Result<CMat> {
    let n = a.n;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    // Factorize PA = LU, right-looking with row swaps.
    for k in 0..n {
        let mut piv = k;
        let mut best = lu.data[k * n + k].norm_sqr();
        for i in (k + 1)..n {
            let cand = lu.data[i * n + k].norm_sqr();
            if cand > best {
                best = cand;
                piv = i;
            }
        }
        if best == 0.0 {
            return Err(Error::NumericalFailure(format!(
                "LU factorization hit a zero pivot in column {k}"
            )));
        }
        if piv != k {
            for j in 0..n {
                lu.data.swap(k * n + j, piv * n + j);
            }
            perm.swap(k, piv);
        }
        let inv_pivot = Complex64::new(1.0, 0.0) / lu.data[k * n + k];
        for i in (k + 1)..n {
            let factor = lu.data[i * n + k] * inv_pivot;
            lu.data[i * n + k] = factor;
            // Split the buffer so row k (read) and row i (written) can be
            // borrowed simultaneously.
            let (head, tail) = lu.data.split_at_mut(i * n);
            let row_k = &head[k * n + k + 1..k * n + n];
            let row_i = &mut tail[k + 1..n];
            for (ri, &rk) in row_i.iter_mut().zip(row_k) {
                *ri -= factor * rk;
            }
        }
    }

    // Right-hand side: permuted identity, B = P·I.
    let mut b = CMat::zeros(n);
    for (i, &p) in perm.iter().enumerate() {
        b.data[i * n + p] = Complex64::new(1.0, 0.0);
    }

    // Forward substitution L·Y = B (unit lower triangle), all columns at once.
    for k in 0..n {
        for i in (k + 1)..n {
            let factor = lu.data[i * n + k];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (head, tail) = b.data.split_at_mut(i * n);
            let row_k = &head[k * n..k * n + n];
            let row_i = &mut tail[..n];
            for (ri, &rk) in row_i.iter_mut().zip(row_k) {
                *ri -= factor * rk;
            }
        }
    }

    // Back substitution U·X = Y.
    for k in (0..n).rev() {
        for j in (k + 1)..n {
            let factor = lu.data[k * n + j];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (head, tail) = b.data.split_at_mut(j * n);
            let row_k = &mut head[k * n..k * n + n];
            let row_j = &tail[..n];
            for (rk, &rj) in row_k.iter_mut().zip(row_j) {
                *rk -= factor * rj;
            }
        }
        let inv_pivot = Complex64::new(1.0, 0.0) / lu.data[k * n + k];
        for v in b.row_mut(k) {
            *v *= inv_pivot;
        }
    }

    Ok(b)
}

// ──────────────────────────────── real matrix ────────────────────────────────

/// Dense square real matrix, row-major. Used for variance profiles and the
/// nonnegative observables built from squared resolvent entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RMat {
    n: usize,
    data: Vec<f64>,
}

impl RMat {
    /// Zero matrix of size `n`.
    pub fn zeros(n: usize) -> Self {
        RMat {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds a matrix entrywise from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        RMat { n, data }
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Row `i` as a contiguous slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Underlying flat buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable flat buffer.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |self − rhs|`.
    pub fn max_abs_diff(&self, rhs: &RMat) -> Result<f64> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch(
                "size mismatch in max_abs_diff".into(),
            ));
        }
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Promotes to a complex matrix with zero imaginary parts.
    pub fn to_cmat(&self) -> CMat {
        CMat {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }
}
