//! The Stieltjes transform of the semicircle law and its scalar identities.
//!
//! For `Im z > 0`, `m(z)` is the unique solution of
//!
//! ```text
//! m² + z·m + 1 = 0    with    Im m > 0,
//! ```
//!
//! equivalently `m + 1/m + z = 0`. Uniqueness: the two roots multiply to 1,
//! so exactly one lies in the open unit disk, and for `Im z > 0` the roots
//! cannot be unimodular — the one with positive imaginary part is the
//! Stieltjes transform of the semicircle density.
//!
//! Exact scalar identities used throughout the crate (`z = E + iη`):
//!
//! - `1 − |m|² = η·|m|²/Im m` (from the defining equation),
//! - `|m|² = 1 − α(E)·η + O(η²)` with `α(E) = 2/√(4−E²)`,
//! - `c ≤ |m| ≤ 1` uniformly on the bulk spectral domain.
//!
//! Root selection is done by evaluating both quadratic roots and testing
//! the sign of the imaginary part directly, which avoids branch-cut
//! surprises of a closed-form square root near the spectral edges `E = ±2`.

use num_complex::Complex64;

use crate::error::{Error, Result};

// ─────────────────────────────── spectral points ──────────────────────────────

/// A spectral parameter `z = E + iη` together with the bulk-domain
/// constants `κ` (edge distance) and `γ` (lower η exponent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    /// Energy `E`.
    pub e: f64,
    /// Imaginary part `η > 0`.
    pub eta: f64,
    /// Distance-to-edge parameter: the bulk window is `[−2+κ, 2−κ]`.
    pub kappa: f64,
    /// Exponent in the lower spectral cutoff `η ≥ M^{−1+γ}`.
    pub gamma: f64,
}

impl SpectralPoint {
    /// Builds a spectral point; requires `η > 0` and `κ, γ ∈ (0, 1)`.
    pub fn new(e: f64, eta: f64, kappa: f64, gamma: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!(
                "spectral eta must be positive, got {eta}"
            )));
        }
        if !(0.0..1.0).contains(&kappa) || kappa == 0.0 {
            return Err(Error::invalid(format!(
                "kappa must lie in (0, 1), got {kappa}"
            )));
        }
        if !(0.0..1.0).contains(&gamma) || gamma == 0.0 {
            return Err(Error::invalid(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        Ok(SpectralPoint {
            e,
            eta,
            kappa,
            gamma,
        })
    }

    /// The complex point `z = E + iη`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.e, self.eta)
    }

    /// Membership in the bulk spectral domain for effective bandwidth `M`:
    /// `−2+κ ≤ E ≤ 2−κ` and `M^{−1+γ} ≤ η ≤ 10`.
    pub fn in_domain(&self, m_param: f64) -> bool {
        let eta_floor = m_param.powf(-1.0 + self.gamma);
        self.e >= -2.0 + self.kappa
            && self.e <= 2.0 - self.kappa
            && self.eta >= eta_floor
            && self.eta <= 10.0
    }
}

// ──────────────────────────── the transform itself ────────────────────────────

/// Solves `m² + zm + 1 = 0` and returns the root with `Im m > 0`.
///
/// Fails unless `Im z > 0`.
pub fn msc(z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::invalid(format!(
            "msc requires Im z > 0, got z = {z}"
        )));
    }
    Ok(msc_signed(z))
}

/// Root selection for either half-plane: returns the root of
/// `m² + zm + 1 = 0` whose imaginary part has the sign of `Im z`. This is
/// the analytic continuation convention under which `m(z̄) = conj(m(z))`.
pub fn msc_signed(z: Complex64) -> Complex64 {
    let disc = (z * z - Complex64::new(4.0, 0.0)).sqrt();
    let r1 = (-z + disc) / 2.0;
    let r2 = (-z - disc) / 2.0;
    let want_positive = z.im > 0.0;
    if (r1.im > 0.0) == want_positive {
        r1
    } else {
        r2
    }
}

/// Residual of the defining equation, `|m + 1/m + z|`.
pub fn msc_residual(m: Complex64, z: Complex64) -> f64 {
    (m + 1.0 / m + z).norm()
}

/// The bulk density factor `α(E) = 2/√(4−E²)`; requires `|E| < 2`.
pub fn alpha(e: f64) -> Result<f64> {
    if !(e.abs() < 2.0) {
        return Err(Error::invalid(format!(
            "alpha is defined for |E| < 2, got E = {e}"
        )));
    }
    Ok(2.0 / (4.0 - e * e).sqrt())
}

// ───────────────────────────── identity reporting ─────────────────────────────

/// Residuals of the exact and asymptotic scalar identities at one point.
#[derive(Debug, Clone, Copy)]
pub struct MscIdentityReport {
    /// `|1 − |m|² − η|m|²/Im m|` — exact identity, machine-precision small.
    pub norm_identity_residual: f64,
    /// `|m|` itself (must lie in `(c, 1]` on the bulk domain).
    pub modulus: f64,
    /// `||m|² − (1 − α(E)η)|` — defect of the first-order expansion,
    /// `O(η²)` in the bulk.
    pub quadratic_defect: f64,
}

/// Evaluates the scalar identities at `z = E + iη` (requires `|E| < 2`).
pub fn msc_identities(z: Complex64) -> Result<MscIdentityReport> {
    let m = msc(z)?;
    let a = alpha(z.re)?;
    let eta = z.im;
    let norm_sq = m.norm_sqr();
    let norm_identity_residual = (1.0 - norm_sq - eta * norm_sq / m.im).abs();
    let quadratic_defect = (norm_sq - (1.0 - a * eta)).abs();
    Ok(MscIdentityReport {
        norm_identity_residual,
        modulus: m.norm(),
        quadratic_defect,
    })
}
