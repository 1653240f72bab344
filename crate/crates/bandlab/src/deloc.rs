//! Eigenvector delocalization metrics.
//!
//! For a unit vector `u` on the torus and a scale `ℓ`, let `P_{x,ℓ}`
//! project onto the complement of the ball of radius `ℓ` around `x`:
//! `(P_{x,ℓ}u)(y) = u(y)·𝟙{|x−y| ≥ ℓ}`.  The **delocalization metric**
//!
//! ```text
//! 𝒟_ℓ(u) = Σ_x |u(x)| · ‖P_{x,ℓ}u‖₂
//! ```
//!
//! is tiny exactly when `u` concentrates on a single region of diameter
//! `≲ ℓ`: each heavy site `x` then sees almost no mass outside its own
//! ball.  A perfectly localized basis vector scores `0`; the flat vector
//! in one dimension scores `√(N − 2ℓ + 1)` (each of the `N` terms is
//! `N^{−1/2}·√((N−2ℓ+1)/N)`), close to the universal ceiling `√N`.
//!
//! The **localized set** of an eigensystem collects the bulk indices
//! whose eigenvectors score below a threshold `ε`:
//!
//! ```text
//! 𝒜_{ε,ℓ} = { α : λ_α ∈ [−2+κ, 2−κ],  𝒟_ℓ(u_α) ≤ ε }.
//! ```
//!
//! Delocalization predicts this set stays a vanishing fraction of the
//! spectrum; the Monte-Carlo drivers measure that fraction.
//!
//! Distance on the torus is periodic by default; a plain (non-wrapping)
//! Euclidean convention is available behind a flag since the two differ
//! for windows straddling the seam.

use num_complex::Complex64;

use crate::eigh::EigenSystem;
use crate::error::{Error, Result};
use crate::torus::Torus;

/// How `|x − y|` is measured when carving out the ball around `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceConvention {
    /// Wrap around the torus (canonical representative per axis).
    #[default]
    Periodic,
    /// Plain coordinate differences, no wraparound.
    Euclidean,
}

/// Squared distance between sites under the chosen convention, in exact
/// integer arithmetic.
fn dist_sq(torus: &Torus, x: usize, y: usize, convention: DistanceConvention) -> Result<i64> {
    let d = match convention {
        DistanceConvention::Periodic => torus.canonical_diff(x, y)?,
        DistanceConvention::Euclidean => {
            let cx = torus.coords_of(x)?;
            let cy = torus.coords_of(y)?;
            cx.iter().zip(&cy).map(|(&a, &b)| a - b).collect()
        }
    };
    Ok(d.iter().map(|&c| c * c).sum())
}

fn validate_unit(u: &[Complex64]) -> Result<Vec<f64>> {
    let weights: Vec<f64> = u.iter().map(|v| v.norm_sqr()).collect();
    let norm_sq: f64 = weights.iter().sum();
    if (norm_sq.sqrt() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!(
            "vector norm {} is not 1 within 1e-10",
            norm_sq.sqrt()
        )));
    }
    Ok(weights)
}

/// `Σ_x |u(x)|·‖P_{x,ℓ}u‖₂` for a unit vector on the torus.
///
/// Requires `1 ≤ ℓ ≤ L/2` and `‖u‖₂ = 1` within `1e−10`.  The
/// one-dimensional path slides a prefix-summed window in `O(N)`; higher
/// dimensions enumerate balls directly.
pub fn deloc_metric(
    u: &[Complex64],
    ell: usize,
    torus: &Torus,
    convention: DistanceConvention,
) -> Result<f64> {
    let n = torus.volume();
    if u.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} against torus volume {n}",
            u.len()
        )));
    }
    if ell < 1 || 2 * ell > torus.side() {
        return Err(Error::invalid(format!(
            "scale ℓ = {ell} outside 1..=L/2 for L = {}",
            torus.side()
        )));
    }
    let weights = validate_unit(u)?;
    let norm_sq: f64 = weights.iter().sum();

    // ball mass around every x: Σ_{y: |x−y| < ℓ} |u(y)|²
    let ball_mass: Vec<f64> = if torus.dim() == 1 {
        let mut prefix = vec![0.0f64; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            prefix[i + 1] = prefix[i] + w;
        }
        let range_sum = |lo: i64, hi: i64| -> f64 {
            // clamped sum over [lo, hi] in plain coordinates
            let lo = lo.max(0);
            let hi = hi.min(n as i64 - 1);
            if lo > hi {
                0.0
            } else {
                prefix[(hi + 1) as usize] - prefix[lo as usize]
            }
        };
        (0..n as i64)
            .map(|x| {
                let (lo, hi) = (x - ell as i64 + 1, x + ell as i64 - 1);
                match convention {
                    DistanceConvention::Euclidean => range_sum(lo, hi),
                    DistanceConvention::Periodic => {
                        // circular window of width 2ℓ−1 ≤ L
                        range_sum(lo, hi)
                            + range_sum(lo + n as i64, n as i64 - 1 + ell as i64)
                            + range_sum(1 - ell as i64, hi - n as i64)
                    }
                }
            })
            .collect()
    } else {
        let ell_sq = (ell * ell) as i64;
        let mut out = vec![0.0f64; n];
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (y, &w) in weights.iter().enumerate() {
                if dist_sq(torus, x, y, convention)? < ell_sq {
                    acc += w;
                }
            }
            *slot = acc;
        }
        out
    };

    let mut metric = 0.0f64;
    for (x, &w) in weights.iter().enumerate() {
        let tail = (norm_sq - ball_mass[x]).max(0.0);
        metric += w.sqrt() * tail.sqrt();
    }
    Ok(metric)
}

/// The localized set of an eigensystem and its spectral fraction.
#[derive(Debug, Clone)]
pub struct DelocReport {
    /// `[−2+κ, 2−κ]`, the bulk window the census is restricted to.
    pub bulk_interval: (f64, f64),
    /// Metric threshold.
    pub epsilon: f64,
    /// Localization scale.
    pub ell: usize,
    /// Metric value per eigenvector (index-aligned with the spectrum).
    pub metrics: Vec<f64>,
    /// Indices `α` with `λ_α` in the bulk and metric `≤ ε`.
    pub localized_indices: Vec<usize>,
    /// `|𝒜|/N`.
    pub fraction: f64,
}

/// Computes the localized set `𝒜_{ε,ℓ}` over the bulk `[−2+κ, 2−κ]`.
pub fn localized_set(
    system: &EigenSystem,
    torus: &Torus,
    kappa: f64,
    epsilon: f64,
    ell: usize,
    convention: DistanceConvention,
) -> Result<DelocReport> {
    if !(0.0..2.0).contains(&kappa) {
        return Err(Error::invalid(format!(
            "bulk margin κ = {kappa} outside [0, 2)"
        )));
    }
    if epsilon < 0.0 {
        return Err(Error::invalid("threshold ε must be nonnegative"));
    }
    let n = system.eigenvalues().len();
    if torus.volume() != n {
        return Err(Error::DimensionMismatch(
            "eigensystem size does not match torus volume".into(),
        ));
    }
    let (lo, hi) = (-2.0 + kappa, 2.0 - kappa);
    let mut metrics = Vec::with_capacity(n);
    let mut localized_indices = Vec::new();
    for alpha in 0..n {
        let metric = deloc_metric(&system.eigenvector(alpha), ell, torus, convention)?;
        metrics.push(metric);
        let lam = system.eigenvalues()[alpha];
        if (lo..=hi).contains(&lam) && metric <= epsilon {
            localized_indices.push(alpha);
        }
    }
    let fraction = localized_indices.len() as f64 / n as f64;
    Ok(DelocReport {
        bulk_interval: (lo, hi),
        epsilon,
        ell,
        metrics,
        localized_indices,
        fraction,
    })
}
