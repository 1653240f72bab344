//! Central registry of numerical tolerances and statistical thresholds.
//!
//! Every magic number that decides a pass/fail anywhere in the crate lives
//! here as a documented constant. Each entry records *why* the value is what
//! it is — which identities are exact in exact arithmetic (tolerance only
//! absorbs floating-point roundoff), which are asymptotic statements tested
//! at finite size (tolerance includes a finite-size allowance), and which
//! are statistical (threshold set by the acceptance probability we accept).
//!
//! ## Conventions
//!
//! - `*_TOL` — absolute or relative numerical tolerance on a deterministic
//!   quantity; failing it indicates a bug, not bad luck.
//! - `*_REL` — relative tolerance; multiply by the natural scale at the
//!   call site (documented per constant).
//! - Statistical thresholds (slopes, probabilities, band factors) are sized
//!   so that a correct implementation fails with negligible probability at
//!   the sample counts used by the test suite.

// ───────────────────────── exact algebraic identities ─────────────────────────

/// Relative tolerance for the Ward identity sum_i |G_xi|^2 = Im G_xx / eta.
///
/// The identity is exact in exact arithmetic; 1e-9 absorbs the O(N eps)
/// accumulation of rounding errors in the row sum at desk scale (N <= 4096),
/// with two orders of magnitude of headroom.
pub const WARD_IDENTITY_REL_TOL: f64 = 1e-9;

/// Per-size residual tolerance for the resolvent: ||(H - z)G - I||_max <= N * this.
///
/// An LU solve with partial pivoting delivers a backward-stable inverse;
/// the max-norm residual grows at most linearly in N for well-conditioned
/// shifts (Im z bounded away from 0).
pub const RESOLVENT_RESIDUAL_PER_SIZE_TOL: f64 = 1e-10;

/// Max-norm tolerance for the diffusion-kernel fixed point
/// Theta = |m|^2 S Theta + |m|^2 S and for agreement between the direct
/// Fourier-diagonal formula and the fixed-point identity.
pub const THETA_FIXED_POINT_TOL: f64 = 1e-10;

/// Max-norm tolerance for the exact split of the self-consistent-equation
/// error into its fluctuation and recentering parts.
///
/// The split is an algebraic identity that follows from -mz - m^2 = 1;
/// the tolerance absorbs roundoff in the FFT-based circulant products.
pub const ERROR_SPLIT_TOL: f64 = 1e-10;

/// Max-norm tolerance for reconstructing a vector from its low-mode and
/// high-mode parts (the two filters sum to the identity in Fourier space).
pub const MODE_SPLIT_TOL: f64 = 1e-10;

/// Ceiling on the imaginary part of quantities that are provably real in
/// exact arithmetic but travel through complex FFT arithmetic.
pub const REAL_DUST_TOL: f64 = 1e-12;

/// Residual tolerance for the self-consistent scalar equation m^2 + zm + 1 = 0.
///
/// The root is produced by a closed-form solve; only a handful of flops
/// separate it from the residual, so we demand near machine precision.
pub const SELF_CONSISTENT_EQ_TOL: f64 = 1e-12;

/// Max-norm tolerance for the projector identities Pi S = S Pi = Pi
/// (S is doubly stochastic, Pi projects onto the constant vector).
pub const PROJECTOR_IDENTITY_TOL: f64 = 1e-12;

/// Max-norm tolerance for reconstructing the two-point observable from its
/// column-mean part, the deterministic zero-mode-removed kernel, and the
/// transformed error term.
///
/// Looser than the component identities because the reconstruction chains a
/// resolvent solve, two circulant inversions, and an FFT round trip.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

// ──────────────────────── deterministic profile formulas ──────────────────────

/// Absolute tolerance for agreement between the spectral-sum and
/// image-sum closed forms of the idealized diffusion profile.
///
/// Both series are summed to a 1e-12 relative truncation budget; 1e-8
/// leaves room for the residual modelling difference at the parameters
/// used in tests (side >= 512, width >= 32, eta = 0.05).
pub const PROFILE_EQUIVALENCE_TOL: f64 = 1e-8;

/// Relative truncation budget for infinite series in profile evaluation:
/// extend until the next term falls below this fraction of the accumulated
/// sum, then stop.
pub const SERIES_TRUNCATION_REL: f64 = 1e-12;

/// Hard cap on series terms, so a mis-parameterized call fails loudly
/// instead of spinning.
pub const SERIES_MAX_TERMS: usize = 1_000_000;

/// Relative budget for the total-mass check of the diffusion profile:
/// the lattice mass must match |m|^2/(alpha eta) to within this fraction
/// at the parameter ranges the tests use (the correction is of order
/// alpha eta / (width^2 D)).
pub const PROFILE_MASS_REL_BUDGET: f64 = 1e-2;

/// Positivity floor for diffusion-kernel entries, relative to the maximum
/// entry: FFT roundoff can drive exponentially small entries slightly
/// negative, so we demand theta_x >= -this * max(theta) instead of >= 0.
pub const THETA_POSITIVITY_FLOOR_REL: f64 = 1e-12;

/// Relative tolerance on the quadratic coefficient of the low-momentum
/// expansion 1 - s_hat(p) ~ width^2 D p^2 at width 32.
pub const S_HAT_QUADRATIC_REL_TOL: f64 = 2e-2;

// ─────────────────────────── spectral decomposition ───────────────────────────

/// Eigendecomposition residual: ||H v - lambda v||_2 <= this * ||H||_2 per pair.
pub const EIG_RESIDUAL_REL_TOL: f64 = 1e-8;

/// Eigendecomposition orthonormality: ||U* U - I||_max <= this.
pub const EIG_ORTHONORMALITY_TOL: f64 = 1e-8;

/// Eigendecomposition trace check: |sum lambda - tr H| <= this * N.
pub const EIG_TRACE_PER_SIZE_TOL: f64 = 1e-8;

/// Lower bound enforced on |m(z)| inside the test spectral domain.
///
/// Theory gives c <= |m| <= 1 with c uniform over the bulk domain; 0.3 is a
/// conservative floor (at the domain corner E = 2 - kappa, eta -> 0 one has
/// |m| -> 1 - kappa'/2 ~ 0.7 for the kappas we use).
pub const MSC_MODULUS_LOWER_BOUND: f64 = 0.3;

// ───────────────────────────── cumulant machinery ─────────────────────────────

/// Absolute tolerance for the terminating cumulant expansion on polynomial
/// test functions: with the expansion order at least the polynomial degree,
/// the remainder vanishes identically and only roundoff is left.
pub const CUMULANT_EXPANSION_EXACT_TOL: f64 = 1e-12;

// ─────────────────────────── statistical thresholds ───────────────────────────

/// Target slope for the local-law scaling of the resolvent fluctuation
/// against (effective bandwidth x eta), with the allowed deviation below.
pub const LOCAL_LAW_SLOPE: f64 = -0.5;

/// Allowed deviation of the fitted local-law slope from its target.
pub const LOCAL_LAW_SLOPE_TOL: f64 = 0.15;

/// Maximum empirical tail probability for the squared fluctuation to exceed
/// its size-corrected control parameter.
pub const LOCAL_LAW_TAIL_PROB_MAX: f64 = 0.05;

/// Multiplicative band for the diffusion-approximation check: the median of
/// sup|T - Theta| x (side x eta) must lie within this factor of its center.
pub const DIFFUSION_BAND_FACTOR: f64 = 3.0;

/// Number of standard errors within which the mean of the fluctuation part
/// of the error decomposition must sit around zero (Gaussian ensembles).
pub const MEAN_ZERO_STDERR_FACTOR: f64 = 4.0;

/// Admissible weight matrices must have entries no larger than this factor
/// over the inverse band width.
pub const WEIGHT_CLASS_SUP_FACTOR: f64 = 10.0;

/// Admissible weight matrices must have row and column ℓ¹ norms below this.
pub const WEIGHT_CLASS_L1_BOUND: f64 = 10.0;

/// Target slope for the off-diagonal chain observable against the effective
/// bandwidth, with the allowed deviation below.
pub const CHAIN_OFFDIAG_SLOPE: f64 = -1.5;

/// Allowed deviation of the fitted chain slope from its target.
pub const CHAIN_SLOPE_TOL: f64 = 0.25;

/// Target slope of the diagonal/off-diagonal chain ratio against the
/// effective bandwidth, with the allowed deviation below.
pub const CHAIN_RATIO_SLOPE: f64 = 0.5;

/// Allowed deviation of the fitted chain-ratio slope from its target.
pub const CHAIN_RATIO_SLOPE_TOL: f64 = 0.25;

/// Minimum R^2 demanded of the logarithmic fits (filter l1 norm and
/// stability-operator norm against log side).
pub const LOG_FIT_R2_MIN: f64 = 0.9;

/// Delocalization acceptance: the fraction of bulk eigenvectors whose
/// localization metric exceeds epsilon must stay below 3 sqrt(epsilon).
pub const DELOC_FRACTION_FACTOR: f64 = 3.0;

/// Normal quantile used for Wilson score intervals (95% two-sided).
pub const WILSON_Z: f64 = 1.96;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebraic_tolerances_are_tighter_than_statistical_ones() {
        assert!(SELF_CONSISTENT_EQ_TOL < WARD_IDENTITY_REL_TOL);
        assert!(PROJECTOR_IDENTITY_TOL < ERROR_SPLIT_TOL);
        assert!(ERROR_SPLIT_TOL <= RECONSTRUCTION_TOL);
        assert!(PROFILE_EQUIVALENCE_TOL < PROFILE_MASS_REL_BUDGET);
    }

    #[test]
    fn all_tolerances_are_positive() {
        for t in [
            WARD_IDENTITY_REL_TOL,
            RESOLVENT_RESIDUAL_PER_SIZE_TOL,
            THETA_FIXED_POINT_TOL,
            ERROR_SPLIT_TOL,
            MODE_SPLIT_TOL,
            SELF_CONSISTENT_EQ_TOL,
            PROJECTOR_IDENTITY_TOL,
            RECONSTRUCTION_TOL,
            PROFILE_EQUIVALENCE_TOL,
            SERIES_TRUNCATION_REL,
            PROFILE_MASS_REL_BUDGET,
            THETA_POSITIVITY_FLOOR_REL,
            S_HAT_QUADRATIC_REL_TOL,
            EIG_RESIDUAL_REL_TOL,
            EIG_ORTHONORMALITY_TOL,
            EIG_TRACE_PER_SIZE_TOL,
            MSC_MODULUS_LOWER_BOUND,
            CUMULANT_EXPANSION_EXACT_TOL,
            LOCAL_LAW_SLOPE_TOL,
            LOCAL_LAW_TAIL_PROB_MAX,
            DIFFUSION_BAND_FACTOR,
            MEAN_ZERO_STDERR_FACTOR,
            CHAIN_SLOPE_TOL,
            CHAIN_RATIO_SLOPE_TOL,
            LOG_FIT_R2_MIN,
            DELOC_FRACTION_FACTOR,
            WILSON_Z,
        ] {
            assert!(t > 0.0);
        }
    }

    #[test]
    fn slope_targets_have_expected_signs() {
        assert!(LOCAL_LAW_SLOPE < 0.0);
        assert!(CHAIN_OFFDIAG_SLOPE < 0.0);
        assert!(CHAIN_RATIO_SLOPE > 0.0);
    }
}
