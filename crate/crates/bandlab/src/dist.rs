//! Entry distributions for the matrix ensemble.
//!
//! Off-diagonal entries are centred complex random variables `ζ` with unit
//! second absolute moment `𝔼|ζ|² = 1`; diagonal entries are real standard
//! normals. The four supported kinds differ in the pair moment `𝔼ζ²`:
//!
//! | kind                         | `𝔼ζ²` | notes                               |
//! |------------------------------|-------|-------------------------------------|
//! | complex Gaussian, circular   | 0     | `(ξ₁ + iξ₂)/√2`                     |
//! | real Gaussian                | 1     | real entries, GOE-like symmetry     |
//! | fourth roots of unity        | 0     | uniform on `{1, i, −1, −i}`, `|ζ|=1`|
//! | complex Gaussian, correlated | ρ     | `aξ₁ + ibξ₂`, `a²−b² = ρ`, `a²+b²=1`|
//!
//! Each kind also carries a table of absolute-moment bounds
//! `μ_p ≥ 𝔼|ζ|^p`, finite for every `p` (all four kinds have Gaussian or
//! bounded tails). The bounds are exact Gamma-function expressions at
//! half-integer arguments, so no special-function machinery is needed.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ────────────────────────────── distribution kinds ────────────────────────────

/// The supported entry-distribution families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DistributionSpec {
    /// Circular complex Gaussian: `ζ = (ξ₁ + iξ₂)/√2`, `𝔼ζ² = 0`.
    ComplexGaussianCircular,
    /// Real standard Gaussian viewed as a complex variable, `𝔼ζ² = 1`.
    RealGaussian,
    /// Uniform on the fourth roots of unity `{1, i, −1, −i}`; `|ζ| = 1`
    /// exactly and `𝔼ζ² = 0`.
    ComplexFourthRoots,
    /// Complex Gaussian with prescribed pair correlation `𝔼ζ² = ρ`,
    /// realized as `ζ = aξ₁ + ibξ₂` with `a² = (1+ρ)/2`, `b² = (1−ρ)/2`.
    ComplexGaussianCorrelated {
        /// Pair moment `ρ = 𝔼ζ²`, real with `|ρ| < 1`.
        rho: f64,
    },
}

impl DistributionSpec {
    /// Default correlated Gaussian with `ρ = 1/2`.
    pub fn correlated_default() -> Self {
        DistributionSpec::ComplexGaussianCorrelated { rho: 0.5 }
    }

    /// Validates the distribution parameters.
    pub fn validate(&self) -> Result<()> {
        if let DistributionSpec::ComplexGaussianCorrelated { rho } = self {
            if !rho.is_finite() || rho.abs() >= 1.0 {
                return Err(Error::invalid(format!(
                    "pair correlation rho must satisfy |rho| < 1, got {rho}"
                )));
            }
        }
        Ok(())
    }

    /// Draws one off-diagonal entry variable `ζ`.
    pub fn sample_offdiag(&self, rng: &mut impl Rng) -> Complex64 {
        match self {
            DistributionSpec::ComplexGaussianCircular => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            DistributionSpec::RealGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                Complex64::new(re, 0.0)
            }
            DistributionSpec::ComplexFourthRoots => match rng.gen_range(0u8..4) {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
            DistributionSpec::ComplexGaussianCorrelated { rho } => {
                let a = ((1.0 + rho) / 2.0).sqrt();
                let b = ((1.0 - rho) / 2.0).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(a * re, b * im)
            }
        }
    }

    /// Draws one diagonal entry variable (real standard normal for every
    /// kind; the ensemble only requires the diagonal to be real, centred,
    /// with unit variance).
    pub fn sample_diag(&self, rng: &mut impl Rng) -> f64 {
        rng.sample(StandardNormal)
    }

    /// The pair moment `𝔼ζ²` of the off-diagonal variable.
    pub fn pair_moment(&self) -> Complex64 {
        match self {
            DistributionSpec::ComplexGaussianCircular => Complex64::new(0.0, 0.0),
            DistributionSpec::RealGaussian => Complex64::new(1.0, 0.0),
            DistributionSpec::ComplexFourthRoots => Complex64::new(0.0, 0.0),
            DistributionSpec::ComplexGaussianCorrelated { rho } => Complex64::new(*rho, 0.0),
        }
    }

    /// Absolute-moment bound `μ_p ≥ 𝔼|ζ|^p` for integer `p ≥ 1`.
    ///
    /// Closed forms: circular `Γ(p/2+1)`; real Gaussian
    /// `2^{p/2}Γ((p+1)/2)/√π`; fourth roots `1` (exact equality);
    /// correlated `(1+|ρ|)^{p/2}Γ(p/2+1)` from
    /// `|ζ|² ≤ max(a²,b²)(ξ₁²+ξ₂²)` and the chi-square moment
    /// `𝔼(ξ₁²+ξ₂²)^{p/2} = 2^{p/2}Γ(p/2+1)`.
    pub fn moment_bound(&self, p: u32) -> f64 {
        match self {
            DistributionSpec::ComplexGaussianCircular => gamma_half(p as u64 + 2),
            DistributionSpec::RealGaussian => {
                2f64.powf(p as f64 / 2.0) * gamma_half(p as u64 + 1)
                    / std::f64::consts::PI.sqrt()
            }
            DistributionSpec::ComplexFourthRoots => 1.0,
            DistributionSpec::ComplexGaussianCorrelated { rho } => {
                (1.0 + rho.abs()).powf(p as f64 / 2.0) * gamma_half(p as u64 + 2)
            }
        }
    }
}

/// `Γ(t/2)` for positive integer `t`, i.e. the Gamma function at integer
/// and half-integer arguments, by the recurrence `Γ(x+1) = xΓ(x)` from
/// `Γ(1) = 1` and `Γ(1/2) = √π`.
fn gamma_half(t: u64) -> f64 {
    debug_assert!(t >= 1);
    let mut acc = if t % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if t % 2 == 0 { 2 } else { 1 }; // current argument ×2
    while x + 2 <= t {
        acc *= x as f64 / 2.0;
        x += 2;
    }
    acc
}
