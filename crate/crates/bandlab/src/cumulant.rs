//! Joint cumulants of complex random variables: estimation, exact
//! providers, the cumulant expansion identity, and band homogeneity.
//!
//! For a centred complex variable `h`, the `(p,q)`-cumulant `C^{(p,q)}`
//! is the joint cumulant of `p` copies of `h` and `q` copies of `h̄`.
//! Moments and cumulants are linked by the partition sum
//! `𝔼[X₁⋯Xₙ] = Σ_π Π_{B∈π} cum(X_B)`; fixing one variable and grouping
//! partitions by its block gives the bivariate recursion
//!
//! ```text
//! m_{a,b} = Σ_{j≤a−1, k≤b} C(a−1,j)·C(b,k)·c_{j+1,k}·m_{a−1−j,b−k}
//! ```
//!
//! which this module inverts to compute `c` from `m` — numerically for
//! sampled data (with standard errors from batching) and symbolically
//! for distributions whose moments are known in closed form.
//!
//! The **expansion identity** expresses weighted expectations through
//! cumulants: for polynomial `f` of joint degree at most `ℓ`,
//!
//! ```text
//! 𝔼 f(h,h̄)·h̄ = Σ_{p+q≤ℓ} C^{(p,q+1)}/(p!q!) · 𝔼 f^{(p,q)}(h,h̄)
//! ```
//!
//! exactly (the remainder carries only derivatives of order `ℓ+1`).
//!
//! **Band homogeneity:** matrix entries `H = √s·ζ` scale every moment by
//! `s^{(a+b)/2}`, hence every cumulant by the same power — the log-log
//! slope of `|C^{(p,q)}(√s·ζ)|` against `s` is exactly `(p+q)/2`.

use num_complex::Complex64;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::model::BandModel;
use crate::stats::linear_fit;
use crate::tolerances::CUMULANT_EXPANSION_EXACT_TOL;

/// Largest supported joint order `p + q`.
pub const MAX_ORDER: usize = 6;

/// Number of batches used for standard errors.
const BATCHES: usize = 16;

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

// ─────────────────────────── exact moment providers ───────────────────────────

/// Distributions whose joint moments `𝔼h^a h̄^b` are available in closed
/// form, enabling exact (non-Monte-Carlo) cumulant work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactDistribution {
    /// `h = (ξ₁+iξ₂)/√2`: moments `δ_{ab}·a!`.
    CircularGaussian,
    /// Real standard normal: moments `(a+b−1)!!` for even order.
    RealGaussian,
    /// Centred complex Gaussian with `𝔼h² = ρ`, `𝔼|h|² = 1`.
    CorrelatedGaussian {
        /// Pair moment `ρ`, real with `|ρ| < 1`.
        rho: f64,
    },
    /// Uniform on `{1, i, −1, −i}`: moments `𝟙{a ≡ b mod 4}`.
    FourthRoots,
    /// Uniform on `{−1, +1}`: moments `𝟙{a+b even}`.
    Rademacher,
}

impl ExactDistribution {
    /// The exact provider matching an ensemble entry distribution.
    pub fn from_spec(spec: &DistributionSpec) -> Self {
        match spec {
            DistributionSpec::ComplexGaussianCircular => ExactDistribution::CircularGaussian,
            DistributionSpec::RealGaussian => ExactDistribution::RealGaussian,
            DistributionSpec::ComplexFourthRoots => ExactDistribution::FourthRoots,
            DistributionSpec::ComplexGaussianCorrelated { rho } => {
                ExactDistribution::CorrelatedGaussian { rho: *rho }
            }
        }
    }

    /// Exact joint moment `𝔼 h^a h̄^b`.
    pub fn moment(&self, a: usize, b: usize) -> Complex64 {
        match self {
            ExactDistribution::CircularGaussian => gaussian_moment(a, b, 0.0),
            ExactDistribution::RealGaussian => gaussian_moment(a, b, 1.0),
            ExactDistribution::CorrelatedGaussian { rho } => gaussian_moment(a, b, *rho),
            ExactDistribution::FourthRoots => {
                if (a as i64 - b as i64).rem_euclid(4) == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            ExactDistribution::Rademacher => {
                if (a + b) % 2 == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Atom list `(value, probability)` for discrete members, `None` for
    /// the continuous ones.
    pub fn atoms(&self) -> Option<Vec<(Complex64, f64)>> {
        match self {
            ExactDistribution::FourthRoots => Some(vec![
                (Complex64::new(1.0, 0.0), 0.25),
                (Complex64::new(0.0, 1.0), 0.25),
                (Complex64::new(-1.0, 0.0), 0.25),
                (Complex64::new(0.0, -1.0), 0.25),
            ]),
            ExactDistribution::Rademacher => Some(vec![
                (Complex64::new(1.0, 0.0), 0.5),
                (Complex64::new(-1.0, 0.0), 0.5),
            ]),
            _ => None,
        }
    }

    /// Exact cumulant grid up to joint order `k_max`.
    pub fn cumulants(&self, k_max: usize) -> Result<CumulantGrid> {
        moments_to_cumulants(&|a, b| self.moment(a, b), k_max)
    }
}

/// Wick recursion for centred jointly-Gaussian `h` with `𝔼|h|² = 1`,
/// `𝔼h² = ρ` (real): pair the leading factor with each partner.
fn gaussian_moment(a: usize, b: usize, rho: f64) -> Complex64 {
    if (a + b) % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    if a == 0 && b == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if a >= 1 {
        let mut acc = Complex64::new(0.0, 0.0);
        if a >= 2 {
            acc += (a - 1) as f64 * rho * gaussian_moment(a - 2, b, rho);
        }
        if b >= 1 {
            acc += b as f64 * gaussian_moment(a - 1, b - 1, rho);
        }
        acc
    } else {
        (b - 1) as f64 * rho * gaussian_moment(0, b - 2, rho)
    }
}

// ───────────────────────── moment→cumulant recursion ──────────────────────────

/// Dense triangular grid of values indexed by `(a, b)` with
/// `1 ≤ a + b ≤ k_max`.
#[derive(Debug, Clone)]
pub struct CumulantGrid {
    k_max: usize,
    values: Vec<Vec<Complex64>>,
}

impl CumulantGrid {
    /// Largest stored joint order.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// The cumulant `C^{(a,b)}`; errors outside the triangle.
    pub fn get(&self, a: usize, b: usize) -> Result<Complex64> {
        if a + b == 0 || a + b > self.k_max {
            return Err(Error::invalid(format!(
                "order ({a},{b}) outside 1..={}",
                self.k_max
            )));
        }
        Ok(self.values[a][b])
    }
}

/// Converts joint moments to joint cumulants by the bivariate recursion,
/// ascending in total order.
pub fn moments_to_cumulants(
    moment: &dyn Fn(usize, usize) -> Complex64,
    k_max: usize,
) -> Result<CumulantGrid> {
    if k_max == 0 || k_max > MAX_ORDER {
        return Err(Error::invalid(format!(
            "order cap {k_max} outside 1..={MAX_ORDER}"
        )));
    }
    let mut c = vec![vec![Complex64::new(0.0, 0.0); k_max + 1]; k_max + 1];
    for total in 1..=k_max {
        for a in 0..=total {
            let b = total - a;
            if a >= 1 {
                let mut acc = moment(a, b);
                for j in 0..a {
                    for k in 0..=b {
                        if (j, k) == (a - 1, b) {
                            continue;
                        }
                        acc -= binom(a - 1, j)
                            * binom(b, k)
                            * c[j + 1][k]
                            * moment(a - 1 - j, b - k);
                    }
                }
                c[a][b] = acc;
            } else {
                let mut acc = moment(0, b);
                for k in 0..b.saturating_sub(1) {
                    acc -= binom(b - 1, k) * c[0][k + 1] * moment(0, b - 1 - k);
                }
                c[0][b] = acc;
            }
        }
    }
    Ok(CumulantGrid {
        k_max,
        values: c,
    })
}

// ───────────────────────────── sampled estimation ─────────────────────────────

/// One estimated cumulant with its batched standard error.
#[derive(Debug, Clone, Copy)]
pub struct CumulantEntry {
    pub p: usize,
    pub q: usize,
    pub estimate: Complex64,
    pub stderr: f64,
}

/// Estimated cumulants `C^{(p,q)}`, `1 ≤ p+q ≤ k_max`, with standard
/// errors from a fixed batch split.
#[derive(Debug, Clone)]
pub struct CumulantTable {
    k_max: usize,
    entries: Vec<CumulantEntry>,
}

impl CumulantTable {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn entries(&self) -> &[CumulantEntry] {
        &self.entries
    }

    pub fn get(&self, p: usize, q: usize) -> Result<&CumulantEntry> {
        self.entries
            .iter()
            .find(|e| e.p == p && e.q == q)
            .ok_or_else(|| Error::invalid(format!("order ({p},{q}) not tabulated")))
    }
}

/// Estimates all joint cumulants up to order `k_max` from samples.
///
/// The sample list is split into 16 contiguous batches; each batch's
/// moments run through the recursion independently, and the estimate and
/// standard error are the mean and spread of the batch values.
pub fn joint_cumulants(samples: &[Complex64], k_max: usize) -> Result<CumulantTable> {
    if k_max == 0 || k_max > MAX_ORDER {
        return Err(Error::invalid(format!(
            "order cap {k_max} outside 1..={MAX_ORDER}"
        )));
    }
    if samples.len() < 1000 {
        return Err(Error::invalid(format!(
            "need at least 1000 samples, got {}",
            samples.len()
        )));
    }

    // per-batch cumulant grids
    let mut grids: Vec<CumulantGrid> = Vec::with_capacity(BATCHES);
    let base = samples.len() / BATCHES;
    let extra = samples.len() % BATCHES;
    let mut start = 0usize;
    for b in 0..BATCHES {
        let len = base + usize::from(b < extra);
        let chunk = &samples[start..start + len];
        start += len;
        // chunk moments: m_{a,b} = ⟨h^a h̄^b⟩
        let mut moments = vec![vec![Complex64::new(0.0, 0.0); k_max + 1]; k_max + 1];
        for &h in chunk {
            let mut pow_h = vec![Complex64::new(1.0, 0.0); k_max + 1];
            for a in 1..=k_max {
                pow_h[a] = pow_h[a - 1] * h;
            }
            let hbar = h.conj();
            let mut pow_hbar = vec![Complex64::new(1.0, 0.0); k_max + 1];
            for bq in 1..=k_max {
                pow_hbar[bq] = pow_hbar[bq - 1] * hbar;
            }
            for (a, row) in moments.iter_mut().enumerate() {
                for (bq, slot) in row.iter_mut().enumerate() {
                    if a + bq <= k_max {
                        *slot += pow_h[a] * pow_hbar[bq];
                    }
                }
            }
        }
        let scale = 1.0 / len as f64;
        for row in moments.iter_mut() {
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        grids.push(moments_to_cumulants(&|a, b| moments[a][b], k_max)?);
    }

    let nb = BATCHES as f64;
    let mut entries = Vec::new();
    for total in 1..=k_max {
        for p in 0..=total {
            let q = total - p;
            let vals: Vec<Complex64> = grids.iter().map(|g| g.values[p][q]).collect();
            let mean = vals.iter().sum::<Complex64>() / nb;
            let var: f64 = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (nb - 1.0);
            entries.push(CumulantEntry {
                p,
                q,
                estimate: mean,
                stderr: (var / nb).sqrt(),
            });
        }
    }
    Ok(CumulantTable { k_max, entries })
}

// ───────────────────────────── bivariate polynomials ──────────────────────────

/// A polynomial `f(z, z̄) = Σ coeff_{jk}·z^j z̄^k` with `j + k ≤ 4`,
/// treating `z` and `z̄` as independent for differentiation.
#[derive(Debug, Clone)]
pub struct BivariatePoly {
    coeffs: Vec<Vec<Complex64>>,
}

/// Degree cap for expansion-check polynomials.
pub const MAX_POLY_DEGREE: usize = 4;

impl BivariatePoly {
    /// Builds from `coeffs[j][k]`; rejects joint degree above 4.
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        for (j, row) in coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if j + k > MAX_POLY_DEGREE && v.norm() > 0.0 {
                    return Err(Error::invalid(format!(
                        "monomial z^{j} z̄^{k} exceeds joint degree {MAX_POLY_DEGREE}"
                    )));
                }
            }
        }
        Ok(Self { coeffs })
    }

    /// The monomial `z^j z̄^k`.
    pub fn monomial(j: usize, k: usize) -> Result<Self> {
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); k + 1]; j + 1];
        coeffs[j][k] = Complex64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    /// Largest `j + k` carrying a nonzero coefficient.
    pub fn joint_degree(&self) -> usize {
        let mut deg = 0;
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if v.norm() > 0.0 {
                    deg = deg.max(j + k);
                }
            }
        }
        deg
    }

    /// Evaluates at `z` (with `z̄` the honest conjugate).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zbar = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if v.norm() > 0.0 {
                    acc += v * z.powu(j as u32) * zbar.powu(k as u32);
                }
            }
        }
        acc
    }

    /// The formal derivative `∂_z^p ∂_{z̄}^q f`.
    pub fn deriv(&self, p: usize, q: usize) -> Self {
        let mut out: Vec<Vec<Complex64>> = Vec::new();
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if j < p || k < q || v.norm() == 0.0 {
                    continue;
                }
                let factor = factorial(j) / factorial(j - p) * factorial(k) / factorial(k - q);
                let (nj, nk) = (j - p, k - q);
                if out.len() <= nj {
                    out.resize(nj + 1, Vec::new());
                }
                if out[nj].len() <= nk {
                    out[nj].resize(nk + 1, Complex64::new(0.0, 0.0));
                }
                out[nj][nk] += factor * v;
            }
        }
        Self { coeffs: out }
    }

    /// Multiplies by `z̄` (used for the left side of the expansion).
    pub fn times_conj(&self) -> Self {
        let mut out: Vec<Vec<Complex64>> = Vec::new();
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if v.norm() == 0.0 {
                    continue;
                }
                if out.len() <= j {
                    out.resize(j + 1, Vec::new());
                }
                if out[j].len() <= k + 1 {
                    out[j].resize(k + 2, Complex64::new(0.0, 0.0));
                }
                out[j][k + 1] += v;
            }
        }
        Self { coeffs: out }
    }

    /// `𝔼 f(h, h̄)` under an exact-moment provider.
    pub fn expectation(&self, dist: &ExactDistribution) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                if v.norm() > 0.0 {
                    acc += v * dist.moment(j, k);
                }
            }
        }
        acc
    }
}

// ───────────────────────────── expansion identity ─────────────────────────────

/// Both sides of the cumulant expansion and their difference.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionReport {
    /// `𝔼 f(h,h̄)·h̄`.
    pub lhs: Complex64,
    /// `Σ_{p+q≤ℓ} C^{(p,q+1)}/(p!q!)·𝔼 f^{(p,q)}`.
    pub rhs: Complex64,
    /// `|lhs − rhs|`.
    pub residual: f64,
}

impl ExpansionReport {
    /// Whether the identity held to the exact-arithmetic tolerance.
    pub fn is_exact(&self) -> bool {
        self.residual <= CUMULANT_EXPANSION_EXACT_TOL
    }
}

/// Evaluates the cumulant expansion of `𝔼 f(h,h̄)h̄` truncated at
/// derivative order `ell`; exact whenever `ell ≥ joint_degree(f)`.
pub fn expansion_check(
    dist: &ExactDistribution,
    f: &BivariatePoly,
    ell: usize,
) -> Result<ExpansionReport> {
    if ell + 1 > MAX_ORDER {
        return Err(Error::invalid(format!(
            "truncation {ell} needs cumulants beyond order {MAX_ORDER}"
        )));
    }
    let lhs = f.times_conj().expectation(dist);
    let cumulants = dist.cumulants(ell + 1)?;
    let mut rhs = Complex64::new(0.0, 0.0);
    for p in 0..=ell {
        for q in 0..=(ell - p) {
            let weight = cumulants.get(p, q + 1)? / (factorial(p) * factorial(q));
            rhs += weight * f.deriv(p, q).expectation(dist);
        }
    }
    Ok(ExpansionReport {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

// ───────────────────────────── band homogeneity ───────────────────────────────

/// Scaling fit of one cumulant order against the variance parameter.
#[derive(Debug, Clone, Copy)]
pub struct HomogeneityFit {
    pub p: usize,
    pub q: usize,
    /// Fitted log-log slope of `|C^{(p,q)}(√s·ζ)|` against `s`.
    pub slope: f64,
    /// `|C^{(p,q)}(ζ)|` of the unscaled entry variable.
    pub base_magnitude: f64,
}

/// Cumulants of the scaled variable `√s·ζ` over a grid of variance
/// values, fitted per order; the slope is exactly `(p+q)/2`.
pub fn scaling_homogeneity(
    dist: &ExactDistribution,
    s_values: &[f64],
    k_max: usize,
) -> Result<Vec<HomogeneityFit>> {
    if s_values.len() < 4 {
        return Err(Error::invalid("need at least 4 variance values"));
    }
    if s_values.iter().any(|&s| s <= 0.0) {
        return Err(Error::invalid("variance values must be positive"));
    }
    let base = dist.cumulants(k_max)?;
    let log_s: Vec<f64> = s_values.iter().map(|s| s.ln()).collect();
    let mut fits = Vec::new();
    for total in 1..=k_max {
        for p in 0..=total {
            let q = total - p;
            let base_magnitude = base.get(p, q)?.norm();
            if base_magnitude < 1e-13 {
                continue;
            }
            let mut log_c = Vec::with_capacity(s_values.len());
            for &s in s_values {
                // scaled moments m_{a,b}(√s·ζ) = s^{(a+b)/2}·m_{a,b}(ζ)
                let grid = moments_to_cumulants(
                    &|a, b| s.powf((a + b) as f64 / 2.0) * dist.moment(a, b),
                    k_max,
                )?;
                log_c.push(grid.get(p, q)?.norm().ln());
            }
            let fit = linear_fit(&log_s, &log_c)?;
            fits.push(HomogeneityFit {
                p,
                q,
                slope: fit.slope,
                base_magnitude,
            });
        }
    }
    Ok(fits)
}

/// Homogeneity fits for a band model: variance values are read off one
/// row of the model's profile, the entry distribution from its spec.
pub fn band_cumulant_scaling(model: &BandModel, k_max: usize) -> Result<Vec<HomogeneityFit>> {
    let dist = ExactDistribution::from_spec(model.dist());
    // distinct positive variances along a row, thinned to a handful
    let mut values: Vec<f64> = Vec::new();
    for y in 0..model.n() {
        let s = model.s(0, y);
        if s > 1e-12 && values.iter().all(|v| (v - s).abs() > 1e-15 * s) {
            values.push(s);
        }
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values.truncate(8);
    scaling_homogeneity(&dist, &values, k_max)
}
