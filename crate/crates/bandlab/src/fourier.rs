//! Discrete Fourier analysis on the torus and fast circulant arithmetic.
//!
//! ## Transform conventions
//!
//! For a function `f` on the torus with `N = L^d` sites,
//!
//! ```text
//! f̂(p) = Σ_x e^{−i p·x} f_x        (forward)
//! f_x  = (1/N) Σ_p e^{+i p·x} f̂(p) (inverse)
//! ```
//!
//! with momenta `p = (2π/L)·k`, `k` an integer vector mod `L`. These match
//! the unnormalized FFT pair, so [`TorusFft::forward`] is the plain FFT and
//! [`TorusFft::inverse`] divides by `N` once at the end. Momentum index `k`
//! and site index `x` share the same row-major flat layout.
//!
//! ## Circulant arithmetic
//!
//! A kernel `k_x` on the torus induces the circulant matrix
//! `K[x][y] = k[x−y]`. Multiplying by `K` is diagonal in Fourier space:
//! each column transforms as `(K·M)̂_col = k̂ ∘ M̂_col`. Right
//! multiplication `M·K` equals `(K_refl·Mᵀ)ᵀ` with the reflected kernel
//! `k_refl[x] = k[−x]`, whose symbol is `k̂(−p)`. All the variance-profile
//! kernels in this crate are even, so the reflection is a no-op for them,
//! but the reflected path is implemented generally.
//!
//! The symbol of a multiplier need not come from a kernel: any vector over
//! momentum space can be applied diagonally (used by the Fourier-mode
//! filters).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::torus::Torus;

// ──────────────────────────────── planner type ────────────────────────────────

/// FFT plans for one torus geometry, reusable across calls and threads.
pub struct TorusFft {
    torus: Torus,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl TorusFft {
    /// Plans forward and inverse length-`L` transforms for the given torus.
    pub fn new(torus: Torus) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(torus.side());
        let inv = planner.plan_fft_inverse(torus.side());
        TorusFft { torus, fwd, inv }
    }

    /// The torus this plan belongs to.
    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.torus.volume() {
            return Err(Error::DimensionMismatch(format!(
                "buffer of length {len} does not cover the torus volume {}",
                self.torus.volume()
            )));
        }
        Ok(())
    }

    /// Applies the planned 1-d transform along every axis of one flattened
    /// torus array.
    fn transform_nd(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let l = self.torus.side();
        let d = self.torus.dim();
        let n = data.len();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); l];
        for axis in 0..d {
            let stride = l.pow((d - 1 - axis) as u32);
            if stride == 1 {
                // Contiguous lines: transform chunks in place.
                for chunk in data.chunks_exact_mut(l) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
            } else {
                // Strided lines: gather, transform, scatter.
                let block = stride * l;
                let mut start = 0;
                while start < n {
                    for off in 0..stride {
                        for (t, slot) in line.iter_mut().enumerate() {
                            *slot = data[start + off + t * stride];
                        }
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for (t, &v) in line.iter().enumerate() {
                            data[start + off + t * stride] = v;
                        }
                    }
                    start += block;
                }
            }
        }
    }

    /// Forward transform in place: `f̂(p) = Σ_x e^{−ipx} f_x`.
    pub fn forward(&self, data: &mut [Complex64]) -> Result<()> {
        self.check_len(data.len())?;
        self.transform_nd(data, &self.fwd);
        Ok(())
    }

    /// Inverse transform in place: `f_x = (1/N) Σ_p e^{ipx} f̂(p)`.
    pub fn inverse(&self, data: &mut [Complex64]) -> Result<()> {
        self.check_len(data.len())?;
        self.transform_nd(data, &self.inv);
        let scale = 1.0 / self.torus.volume() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
        Ok(())
    }

    /// Forward transform of a real vector into a fresh complex buffer.
    pub fn forward_real(&self, src: &[f64]) -> Result<Vec<Complex64>> {
        self.check_len(src.len())?;
        let mut out: Vec<Complex64> = src.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut out)?;
        Ok(out)
    }

    /// Symbol index map for reflection: entry `p` of the result is entry
    /// `−p (mod L)` of the input, i.e. the symbol of the reflected kernel.
    pub fn reflect_symbol(&self, symbol: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(symbol.len())?;
        let mut out = vec![Complex64::new(0.0, 0.0); symbol.len()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let coords = self.torus.coords_of(idx)?;
            let neg: Vec<i64> = coords.iter().map(|&c| -c).collect();
            *slot = symbol[self.torus.index_of(&neg)?];
        }
        Ok(out)
    }

    /// Applies a diagonal-in-Fourier multiplier to a vector in place:
    /// `v ← IFFT(symbol ∘ FFT(v))`. With `symbol = k̂` this is circulant
    /// multiplication `v ← K·v`.
    pub fn apply_symbol_vec(&self, symbol: &[Complex64], v: &mut [Complex64]) -> Result<()> {
        self.check_len(symbol.len())?;
        self.forward(v)?;
        for (x, &s) in v.iter_mut().zip(symbol) {
            *x *= s;
        }
        self.inverse(v)?;
        Ok(())
    }

    /// Left circulant multiplication `M ← K·M` for the kernel with the
    /// given symbol, column by column in Fourier space.
    ///
    /// Internally transposes so each former column is contiguous, costing
    /// `O(N² log L)` total.
    pub fn apply_symbol_columns(&self, symbol: &[Complex64], mat: &mut CMat) -> Result<()> {
        self.check_len(symbol.len())?;
        if mat.n() != self.torus.volume() {
            return Err(Error::DimensionMismatch(format!(
                "matrix of size {} against torus volume {}",
                mat.n(),
                self.torus.volume()
            )));
        }
        mat.transpose_in_place();
        {
            let n = mat.n();
            let data = mat.data_mut();
            for c in 0..n {
                let row = &mut data[c * n..(c + 1) * n];
                self.forward(row)?;
                for (x, &s) in row.iter_mut().zip(symbol) {
                    *x *= s;
                }
                self.inverse(row)?;
            }
        }
        mat.transpose_in_place();
        Ok(())
    }

    /// Forward transform of every column in place (the first index becomes
    /// a momentum index): `M ← FFT_x M_{xy}` for each fixed `y`.
    pub fn forward_columns(&self, mat: &mut CMat) -> Result<()> {
        if mat.n() != self.torus.volume() {
            return Err(Error::DimensionMismatch(format!(
                "matrix of size {} against torus volume {}",
                mat.n(),
                self.torus.volume()
            )));
        }
        mat.transpose_in_place();
        {
            let n = mat.n();
            let data = mat.data_mut();
            for c in 0..n {
                self.forward(&mut data[c * n..(c + 1) * n])?;
            }
        }
        mat.transpose_in_place();
        Ok(())
    }

    /// Right circulant multiplication `M ← M·K`: equals
    /// `(K_refl · Mᵀ)ᵀ`, so the rows are processed with the reflected
    /// symbol — no transpose needed since rows are already contiguous.
    pub fn apply_symbol_rows(&self, symbol: &[Complex64], mat: &mut CMat) -> Result<()> {
        let reflected = self.reflect_symbol(symbol)?;
        if mat.n() != self.torus.volume() {
            return Err(Error::DimensionMismatch(format!(
                "matrix of size {} against torus volume {}",
                mat.n(),
                self.torus.volume()
            )));
        }
        let n = mat.n();
        let data = mat.data_mut();
        for r in 0..n {
            let row = &mut data[r * n..(r + 1) * n];
            self.forward(row)?;
            for (x, &s) in row.iter_mut().zip(&reflected) {
                *x *= s;
            }
            self.inverse(row)?;
        }
        Ok(())
    }
}

// ─────────────────────────────── kernel helpers ───────────────────────────────

/// Builds the dense circulant matrix `K[x][y] = kernel[x−y]` (test scale).
pub fn circulant_dense(torus: &Torus, kernel: &[f64]) -> Result<CMat> {
    if kernel.len() != torus.volume() {
        return Err(Error::DimensionMismatch(
            "kernel length does not match torus volume".into(),
        ));
    }
    let n = torus.volume();
    let mut out = CMat::zeros(n);
    for x in 0..n {
        for y in 0..n {
            let k = torus.diff_index(x, y)?;
            out.set(x, y, Complex64::new(kernel[k], 0.0));
        }
    }
    Ok(out)
}
