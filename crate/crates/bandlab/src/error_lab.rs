//! The self-consistent-equation error and its Fourier-space anatomy.
//!
//! With `T = S·|G|²` the smoothed resolvent observable, the error of its
//! self-consistent equation is
//!
//! ```text
//! E_xy = T_xy − |m|² Σ_i S_xi T_iy − |m|² S_xy.
//! ```
//!
//! Two decompositions of `E` are provided:
//!
//! 1. **Fluctuation/recentring split** `E = 𝒫 + ℛ`, where
//!
//!    ```text
//!    𝒫_xy = −mzT_xy − m Σ_{ij} S_xi S_ij G_jj |G_iy|²
//!           − m Σ_{ij} S_xi S_ij Ḡ_ii |G_jy|² − m S_xy Ḡ_yy,
//!    ℛ_xy =  m Σ_{ij} S_xi S_ij (G_jj − m)|G_iy|²
//!           + m Σ_{ij} S_xi S_ij (Ḡ_ii − m̄)|G_jy|² + m S_xy (Ḡ_yy − m̄),
//!    ```
//!
//!    summing to `E` through the quadratic relation `m² + zm + 1 = 0`.
//!    For circularly symmetric Gaussian entries `𝒫` has mean zero
//!    entrywise, which is the property the Monte-Carlo drivers test.
//!
//! 2. **Zero/low/high-mode split.** With `Π = 𝐢𝐢*` the projector on the
//!    flat vector and `Π̄ = I − Π`, the projected error
//!    `Ẽ = (I − |m|²S)^{−1} Π̄E` reconstructs `T` exactly:
//!    `T = T̄_y + |m|²((S−Π)(I−|m|²S)^{−1})_xy + Ẽ_xy` with `T̄` the
//!    column average of `T`. `Ẽ` is further filtered into low and high
//!    Fourier modes by a smoothed indicator `q̂(p) = 1 − χ(pW)`, where `χ`
//!    is a `C^∞` bump equal to 1 on `|r|² ≤ 1` and 0 on `|r|² ≥ 2`.
//!
//! Everything translation invariant is handled through Fourier symbols;
//! the dense matrices only carry the stochastic factors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::TorusFft;
use crate::linalg::{CMat, RMat};
use crate::model::BandModel;
use crate::resolvent::ResolventBundle;
use crate::semicircle::msc;
use crate::tolerances::REAL_DUST_TOL;
use crate::torus::{canonical_rep, Torus};

// ─────────────────────────────── fourier table ───────────────────────────────

/// Momentum-space data for a model: the variance symbol and the high-mode
/// filter.
#[derive(Debug, Clone)]
pub struct FourierTable {
    /// `|p|` for each flat momentum index (Euclidean norm of the
    /// canonical momentum vector `2π·[k]_L/L` per axis).
    pub momentum_norms: Vec<f64>,
    /// `ŝ(p) = Σ_x e^{−ipx} s_x`, real and even, `ŝ(0) = 1`.
    pub s_hat: Vec<f64>,
    /// High-mode filter `q̂(p) ∈ [0,1]`.
    pub q_hat: Vec<f64>,
    /// Position-space filter kernel `q_x` (inverse transform of `q̂`).
    pub q_profile: Vec<f64>,
    /// `‖q‖₁ = Σ_x |q_x|`, the `ℓ^∞→ℓ^∞` norm of the filter operator.
    pub q_l1: f64,
}

/// Euclidean norms of the canonical momenta `p(k) = (2π/L)·[k]_L` on the
/// dual torus, one entry per flat index.
pub fn momentum_norms(torus: &Torus) -> Result<Vec<f64>> {
    let l = torus.side() as f64;
    let mut out = Vec::with_capacity(torus.volume());
    for k in 0..torus.volume() {
        let coords = torus.coords_of(k)?;
        let sq: f64 = coords
            .iter()
            .map(|&c| {
                let p = 2.0 * std::f64::consts::PI * canonical_rep(c, torus.side()) as f64 / l;
                p * p
            })
            .sum();
        out.push(sq.sqrt());
    }
    Ok(out)
}

/// The variance symbol `ŝ(p)`, validated to be real (even kernel) with
/// `ŝ(0) = 1` (double stochasticity).
pub fn fourier_s(model: &BandModel, fft: &TorusFft) -> Result<Vec<f64>> {
    let hat = fft.forward_real(model.s_kernel())?;
    let max_im = hat.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
    if max_im > REAL_DUST_TOL {
        return Err(Error::NumericalFailure(format!(
            "variance symbol has imaginary part {max_im:.3e}"
        )));
    }
    if (hat[0].re - 1.0).abs() > REAL_DUST_TOL {
        return Err(Error::NumericalFailure(format!(
            "variance symbol at zero momentum is {} instead of 1",
            hat[0].re
        )));
    }
    Ok(hat.iter().map(|v| v.re).collect())
}

/// `C^∞` bump: `χ(r) = 1` for `|r|² ≤ 1`, `χ(r) = 0` for `|r|² ≥ 2`,
/// glued by the standard `e^{−1/t}` construction in between; smooth,
/// even, and monotone on the transition.
pub fn bump_chi(r: f64) -> f64 {
    fn glue(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    let rsq = r * r;
    let inner = glue(2.0 - rsq);
    let outer = glue(rsq - 1.0);
    // inner + outer > 0 everywhere: the supports of the two glue factors
    // overlap on the transition annulus.
    inner / (inner + outer)
}

fn assemble_table(
    model: &BandModel,
    fft: &TorusFft,
    q_hat_of: impl Fn(f64) -> f64,
) -> Result<FourierTable> {
    let torus = model.torus();
    let norms = momentum_norms(torus)?;
    let s_hat = fourier_s(model, fft)?;
    let q_hat: Vec<f64> = norms.iter().map(|&p| q_hat_of(p)).collect();
    let mut q_cplx: Vec<Complex64> = q_hat.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.inverse(&mut q_cplx)?;
    let q_profile: Vec<f64> = q_cplx.iter().map(|v| v.re).collect();
    let dust = q_cplx.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
    if dust > REAL_DUST_TOL {
        return Err(Error::NumericalFailure(format!(
            "filter kernel has imaginary part {dust:.3e}"
        )));
    }
    let q_l1 = q_profile.iter().map(|v| v.abs()).sum();
    Ok(FourierTable {
        momentum_norms: norms,
        s_hat,
        q_hat,
        q_profile,
        q_l1,
    })
}

/// Builds the mode table with the one-dimensional high-pass filter
/// `q̂(p) = 1 − χ(pW)`, which vanishes for `|p| ≤ 1/W` and equals 1 for
/// `|p| ≥ √2/W`.
pub fn build_q(model: &BandModel, fft: &TorusFft) -> Result<FourierTable> {
    if model.torus().dim() != 1 {
        return Err(Error::invalid(
            "the plain W-scale filter is one-dimensional; use build_q_alpha",
        ));
    }
    let w = model.w() as f64;
    assemble_table(model, fft, |p| 1.0 - bump_chi(p * w))
}

/// Builds the interpolated filter `q̂(p) = 1 − χ(p·W^{1−α}L^{α})` used in
/// dimensions `d ≥ 2`; `α ∈ [0, 1)` trades the cutoff scale between the
/// band width and the side length (`α = 0` recovers [`build_q`]).
pub fn build_q_alpha(model: &BandModel, fft: &TorusFft, alpha_knob: f64) -> Result<FourierTable> {
    if !(0.0..1.0).contains(&alpha_knob) {
        return Err(Error::invalid(format!(
            "filter exponent {alpha_knob} outside [0, 1)"
        )));
    }
    let scale =
        (model.w() as f64).powf(1.0 - alpha_knob) * (model.torus().side() as f64).powf(alpha_knob);
    assemble_table(model, fft, |p| 1.0 - bump_chi(p * scale))
}

// ───────────────────────────── the error matrix ───────────────────────────────

/// The self-consistent-equation error `E = T − |m|²ST − |m|²S`.
pub fn error_e(t: &RMat, model: &BandModel, z: Complex64, fft: &TorusFft) -> Result<RMat> {
    let n = model.n();
    if t.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "T of size {} against model size {n}",
            t.n()
        )));
    }
    let msq = msc(z)?.norm_sqr();
    let s_hat = fft.forward_real(model.s_kernel())?;
    let mut st = t.to_cmat();
    fft.apply_symbol_columns(&s_hat, &mut st)?;
    if st.max_imag() > REAL_DUST_TOL {
        return Err(Error::NumericalFailure(format!(
            "S·T acquired imaginary part {:.3e}",
            st.max_imag()
        )));
    }
    let kernel = model.s_kernel();
    let mut e = RMat::zeros(n);
    for x in 0..n {
        for y in 0..n {
            let v = t.at(x, y) - msq * st.at(x, y).re - msq * kernel[model.diff_index(x, y)];
            e.set(x, y, v);
        }
    }
    Ok(e)
}

// ──────────────────────────── fluctuation split ───────────────────────────────

/// The pair `𝒫`, `ℛ` with `𝒫 + ℛ = E`.
#[derive(Debug, Clone)]
pub struct PrSplit {
    pub p: CMat,
    pub r: CMat,
}

fn row_scale(mat: &mut CMat, weights: &[Complex64]) {
    let n = mat.n();
    for i in 0..n {
        let w = weights[i];
        for v in mat.row_mut(i) {
            *v *= w;
        }
    }
}

/// Computes the fluctuation part `𝒫` and recentring part `ℛ` of the
/// error from a resolvent bundle and its `T = S·|G|²`.
///
/// The shared double-convolution terms are built once via circulant
/// multiplications, so the cost is a handful of `O(N² log L)` passes.
pub fn split_pr(
    bundle: &ResolventBundle,
    model: &BandModel,
    t: &RMat,
    fft: &TorusFft,
) -> Result<PrSplit> {
    let n = model.n();
    if bundle.g().n() != n || t.n() != n {
        return Err(Error::DimensionMismatch(
            "bundle, T, and model sizes disagree".into(),
        ));
    }
    let m = bundle.m();
    let mbar = m.conj();
    let z = bundle.z();
    let s_hat = fft.forward_real(model.s_kernel())?;

    let g_diag = bundle.g_diag();
    let gbar: Vec<Complex64> = g_diag.iter().map(|v| v.conj()).collect();
    // u = S·g, the locally averaged resolvent diagonal
    let mut u: Vec<Complex64> = g_diag.clone();
    fft.apply_symbol_vec(&s_hat, &mut u)?;

    let t_c = t.to_cmat();

    // core₁ = S·(u ∘ A) with A = |G|², realizing Σ_{ij}S_xi S_ij G_jj |G_iy|²
    let mut core1 = bundle.abs_squared().to_cmat();
    row_scale(&mut core1, &u);
    fft.apply_symbol_columns(&s_hat, &mut core1)?;

    // core₂ = S·(ḡ ∘ T), realizing Σ_{ij}S_xi S_ij Ḡ_ii |G_jy|²
    let mut core2 = t_c.clone();
    row_scale(&mut core2, &gbar);
    fft.apply_symbol_columns(&s_hat, &mut core2)?;

    // S·T for the recentred second term
    let mut st = t_c.clone();
    fft.apply_symbol_columns(&s_hat, &mut st)?;

    let kernel = model.s_kernel();
    let mut p = CMat::zeros(n);
    let mut r = CMat::zeros(n);
    for x in 0..n {
        for y in 0..n {
            let s_xy = kernel[model.diff_index(x, y)];
            let tail = s_xy * gbar[y];
            p.set(
                x,
                y,
                -m * (z * t_c.at(x, y) + core1.at(x, y) + core2.at(x, y) + tail),
            );
            r.set(
                x,
                y,
                m * (core1.at(x, y) - m * t_c.at(x, y) + core2.at(x, y)
                    - mbar * st.at(x, y)
                    + tail
                    - mbar * s_xy),
            );
        }
    }
    Ok(PrSplit { p, r })
}

// ───────────────────────────── zero-mode projection ───────────────────────────

/// The zero-mode removal of the error and the exact reconstruction test
/// it affords.
#[derive(Debug, Clone)]
pub struct ProjectedError {
    /// `T̄_y = (ΠT)_xy`, the column average of `T` (independent of `x`).
    pub t_bar: Vec<f64>,
    /// `Ẽ = (I − |m|²S)^{−1} Π̄E`.
    pub tilde_e: RMat,
    /// `max_xy |T − (T̄ + deterministic circulant + Ẽ)|`.
    pub reconstruction_residual: f64,
}

fn column_means(mat: &RMat) -> Vec<f64> {
    let n = mat.n();
    let mut means = vec![0.0f64; n];
    for x in 0..n {
        for (y, &v) in mat.row(x).iter().enumerate() {
            means[y] += v;
        }
    }
    for v in means.iter_mut() {
        *v /= n as f64;
    }
    means
}

/// Subtracts from every entry the mean of its column over the first
/// index: `(Π̄E)_xy = E_xy − (1/N)Σ_{x'}E_{x'y}`.
pub fn project_out_zero_mode(e: &RMat) -> RMat {
    let n = e.n();
    let means = column_means(e);
    let mut out = RMat::zeros(n);
    for x in 0..n {
        for y in 0..n {
            out.set(x, y, e.at(x, y) - means[y]);
        }
    }
    out
}

/// Removes the zero mode of `E`, inverts the stability factor, and
/// verifies the exact reconstruction of `T` from its three pieces.
pub fn project_decompose(
    t: &RMat,
    e: &RMat,
    model: &BandModel,
    z: Complex64,
    fft: &TorusFft,
) -> Result<ProjectedError> {
    let n = model.n();
    if t.n() != n || e.n() != n {
        return Err(Error::DimensionMismatch(
            "T, E, and model sizes disagree".into(),
        ));
    }
    let msq = msc(z)?.norm_sqr();
    if msq >= 1.0 {
        return Err(Error::DomainError(format!(
            "stability inverse requires |m| < 1, got |m|² = {msq}"
        )));
    }
    let s_hat = fft.forward_real(model.s_kernel())?;

    // Ẽ = (I − |m|²S)^{−1} Π̄E via the symbol 1/(1−|m|²ŝ) on columns.
    let stability: Vec<Complex64> = s_hat
        .iter()
        .map(|sh| Complex64::new(1.0 / (1.0 - msq * sh.re), 0.0))
        .collect();
    let mut tilde = project_out_zero_mode(e).to_cmat();
    fft.apply_symbol_columns(&stability, &mut tilde)?;
    if tilde.max_imag() > REAL_DUST_TOL {
        return Err(Error::NumericalFailure(format!(
            "projected error acquired imaginary part {:.3e}",
            tilde.max_imag()
        )));
    }
    let tilde_e = tilde.real_part();

    let t_bar = column_means(t);

    // Deterministic circulant |m|²(S − Π)(I − |m|²S)^{−1}: symbol 0 at
    // p = 0 and |m|²ŝ/(1 − |m|²ŝ) elsewhere.
    let mut det_hat: Vec<Complex64> = s_hat
        .iter()
        .map(|sh| Complex64::new(msq * sh.re / (1.0 - msq * sh.re), 0.0))
        .collect();
    det_hat[0] = Complex64::new(0.0, 0.0);
    fft.inverse(&mut det_hat)?;
    let det_kernel: Vec<f64> = det_hat.iter().map(|v| v.re).collect();

    let mut reconstruction_residual = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let assembled = t_bar[y] + det_kernel[model.diff_index(x, y)] + tilde_e.at(x, y);
            reconstruction_residual = reconstruction_residual.max((t.at(x, y) - assembled).abs());
        }
    }

    Ok(ProjectedError {
        t_bar,
        tilde_e,
        reconstruction_residual,
    })
}

// ─────────────────────────────── mode filtering ───────────────────────────────

/// Low/high-mode parts of the projected error; they sum to `Ẽ`.
#[derive(Debug, Clone)]
pub struct ModeSplit {
    /// Modes with `q̂ < 1` weight (supported on `|p| ≤ √2/W` for the
    /// plain filter).
    pub low: RMat,
    /// Complementary high-mode part.
    pub high: RMat,
    /// `max |low + high − Ẽ|` against an independently computed `Ẽ`.
    pub partition_residual: f64,
}

/// Splits `Ẽ = (I−|m|²S)^{−1}Π̄E` into the low-mode part (filter `1−q̂`)
/// and high-mode part (filter `q̂`), diagonally in Fourier space.
pub fn mode_split(
    e: &RMat,
    table: &FourierTable,
    model: &BandModel,
    z: Complex64,
    fft: &TorusFft,
) -> Result<ModeSplit> {
    let n = model.n();
    if e.n() != n || table.s_hat.len() != n {
        return Err(Error::DimensionMismatch(
            "E, table, and model sizes disagree".into(),
        ));
    }
    let msq = msc(z)?.norm_sqr();
    let pibar_e = project_out_zero_mode(e);

    let filtered = |mode_weight: &dyn Fn(usize) -> f64| -> Result<CMat> {
        let symbol: Vec<Complex64> = table
            .s_hat
            .iter()
            .enumerate()
            .map(|(k, sh)| Complex64::new(mode_weight(k) / (1.0 - msq * sh), 0.0))
            .collect();
        let mut out = pibar_e.to_cmat();
        fft.apply_symbol_columns(&symbol, &mut out)?;
        Ok(out)
    };

    let low_c = filtered(&|k| 1.0 - table.q_hat[k])?;
    let high_c = filtered(&|k| table.q_hat[k])?;
    let tilde_c = filtered(&|_| 1.0)?;

    let mut partition_residual = 0.0f64;
    for (idx, tv) in tilde_c.data().iter().enumerate() {
        let sum = low_c.data()[idx] + high_c.data()[idx];
        partition_residual = partition_residual.max((sum - tv).norm());
    }
    Ok(ModeSplit {
        low: low_c.real_part(),
        high: high_c.real_part(),
        partition_residual,
    })
}

/// Fourier-mode amplitudes of an error matrix: entry `(k, y)` is
/// `⟨e(p_k), E⟩_y = L^{−1/2} Σ_x e^{−ip_k x} E_xy`.
pub fn mode_amplitudes(e: &RMat, fft: &TorusFft) -> Result<CMat> {
    let mut out = e.to_cmat();
    fft.forward_columns(&mut out)?;
    let scale = 1.0 / (e.n() as f64).sqrt();
    for v in out.data_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Contracts a test vector against the first index of a matrix:
/// `(v, A)_y = Σ_x v_x A_xy` (no conjugation). The vector must be
/// normalized to unit Euclidean length within `1e−6`.
pub fn isotropic_contract(a: &CMat, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "contraction vector has norm {norm}, expected 1"
        )));
    }
    a.vecmat(v)
}

// ─────────────────────────────── stability operator ───────────────────────────

/// The stability operator `𝓛 = −m(I − m²S)^{−1}` (note the complex `m²`,
/// unlike the `|m|²` in `Θ`), stored as a circulant kernel.
#[derive(Debug, Clone)]
pub struct OperatorL {
    /// Column kernel: `𝓛_xy = kernel[x − y]`.
    pub kernel: Vec<Complex64>,
    /// `‖𝓛‖_{∞→∞}`, the (shared) row `ℓ¹` norm.
    pub norm_inf_to_inf: f64,
    /// `max_p |((z+m) + mŝ(p))·𝓛̂(p) − 1|`, verifying the defining
    /// inverse identity through `z + m = −1/m`.
    pub inverse_residual: f64,
}

impl OperatorL {
    /// Dense realization (test scale).
    pub fn to_dense(&self, model: &BandModel) -> Result<CMat> {
        let n = model.n();
        if self.kernel.len() != n {
            return Err(Error::DimensionMismatch(
                "kernel length does not match model".into(),
            ));
        }
        Ok(CMat::from_fn(n, |x, y| self.kernel[model.diff_index(x, y)]))
    }
}

/// Builds the stability operator for a model at `z`.
pub fn operator_l(model: &BandModel, z: Complex64, fft: &TorusFft) -> Result<OperatorL> {
    let m = msc(z)?;
    if m.norm() >= 1.0 {
        return Err(Error::DomainError(format!(
            "stability operator requires |m| < 1, got |m| = {}",
            m.norm()
        )));
    }
    let s_hat = fourier_s(model, fft)?;
    let msq = m * m;
    let l_hat: Vec<Complex64> = s_hat
        .iter()
        .map(|&sh| -m / (Complex64::new(1.0, 0.0) - msq * sh))
        .collect();

    let mut inverse_residual = 0.0f64;
    let zm = z + m;
    for (k, &sh) in s_hat.iter().enumerate() {
        let defect = (zm + m * sh) * l_hat[k] - 1.0;
        inverse_residual = inverse_residual.max(defect.norm());
    }

    let mut kernel = l_hat;
    fft.inverse(&mut kernel)?;
    let norm_inf_to_inf = kernel.iter().map(|v| v.norm()).sum();
    Ok(OperatorL {
        kernel,
        norm_inf_to_inf,
        inverse_residual,
    })
}
