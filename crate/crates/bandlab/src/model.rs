//! The band-matrix ensemble: variance profile on the torus and sampling.
//!
//! A model is determined by the torus (`d`, `L`), the band width `W`, a
//! profile shape `f`, and an entry distribution. The variance matrix is
//!
//! ```text
//! S_xy = f([x−y]_L / W) / Z,   Z chosen so every row sums to 1,
//! ```
//!
//! a symmetric doubly stochastic circulant. Its translation kernel
//! `s_u = S_{u,0}` is the only stored representation; dense `S` is
//! materialized only at test scale. The effective bandwidth is
//! `M = 1/max_xy S_xy = Z/f(0) ≈ W^d/‖f‖_∞`.
//!
//! A sample is the Hermitian matrix `H_ij = (S_ij)^{1/2} ζ_ij` with
//! independent entries above the diagonal, real standard-normal diagonal,
//! and `H_ji = conj(H_ij)`. Sampling is a pure function of
//! `(model, seed)`: the upper triangle is drawn in fixed row-major order
//! from a dedicated ChaCha stream, so equal seeds give bit-identical
//! matrices regardless of threading.

use num_complex::Complex64;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::linalg::{CMat, RMat};
use crate::profile::ProfileSpec;
use crate::rng::stream_from_seed;
use crate::torus::{canonical_rep, Torus};

// ──────────────────────────────── model type ─────────────────────────────────

/// A fully constructed band-matrix ensemble.
#[derive(Debug, Clone)]
pub struct BandModel {
    torus: Torus,
    w: usize,
    profile: ProfileSpec,
    dist: DistributionSpec,
    /// Translation kernel `s_u = S_{u,0}`, indexed by flat torus index.
    s_kernel: Vec<f64>,
    /// Normalization `Z = Σ_x f([x]_L/W)`.
    z_norm: f64,
    /// Effective bandwidth `M = 1/max_u s_u`.
    m_param: f64,
    /// Cached coordinates of every site (flattened `n × d`), for fast
    /// difference-index arithmetic in inner loops.
    coords: Vec<i64>,
}

impl BandModel {
    /// Builds the model; validates `1 ≤ W ≤ L` and the profile, computes
    /// the normalized kernel, and caches site coordinates.
    pub fn build(
        dim: usize,
        side: usize,
        w: usize,
        profile: ProfileSpec,
        dist: DistributionSpec,
    ) -> Result<Self> {
        profile.validate()?;
        dist.validate()?;
        if w == 0 || w > side {
            return Err(Error::invalid(format!(
                "band width must satisfy 1 <= W <= L, got W = {w}, L = {side}"
            )));
        }
        let torus = Torus::new(side, dim)?;
        if (w as f64) < (side as f64).powf(0.1) {
            log::warn!(
                "band width W = {w} is below L^0.1 = {:.2}; the banded regime \
                 assumptions are weak here",
                (side as f64).powf(0.1)
            );
        }

        let n = torus.volume();
        let mut coords = Vec::with_capacity(n * dim);
        for x in 0..n {
            coords.extend(torus.coords_of(x)?);
        }

        // Raw profile values f([x]_L / W) over the torus (product density
        // across coordinates in d ≥ 2).
        let mut s_kernel = Vec::with_capacity(n);
        let mut canon = vec![0.0f64; dim];
        for x in 0..n {
            for (k, c) in canon.iter_mut().enumerate() {
                *c = canonical_rep(coords[x * dim + k], side) as f64 / w as f64;
            }
            s_kernel.push(profile.eval_point(&canon));
        }
        let z_norm: f64 = s_kernel.iter().sum();
        if z_norm <= 0.0 {
            return Err(Error::DegenerateProfile(format!(
                "profile has zero total mass on the torus (L = {side}, W = {w})"
            )));
        }
        let mut max_s = 0.0f64;
        for v in s_kernel.iter_mut() {
            *v /= z_norm;
            max_s = max_s.max(*v);
        }
        let m_param = 1.0 / max_s;

        Ok(BandModel {
            torus,
            w,
            profile,
            dist,
            s_kernel,
            z_norm,
            m_param,
            coords,
        })
    }

    /// The underlying torus.
    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    /// Number of sites `N = L^d`.
    pub fn n(&self) -> usize {
        self.torus.volume()
    }

    /// Side length `L`.
    pub fn side(&self) -> usize {
        self.torus.side()
    }

    /// Dimension `d`.
    pub fn dim(&self) -> usize {
        self.torus.dim()
    }

    /// Band width `W`.
    pub fn w(&self) -> usize {
        self.w
    }

    /// Profile shape.
    pub fn profile(&self) -> &ProfileSpec {
        &self.profile
    }

    /// Entry distribution.
    pub fn dist(&self) -> &DistributionSpec {
        &self.dist
    }

    /// Normalization constant `Z`.
    pub fn z_norm(&self) -> f64 {
        self.z_norm
    }

    /// Effective bandwidth `M = 1/max S_xy`.
    pub fn m_param(&self) -> f64 {
        self.m_param
    }

    /// Translation kernel `s_u = S_{u,0}` over flat torus indices.
    pub fn s_kernel(&self) -> &[f64] {
        &self.s_kernel
    }

    /// Flat index of the coordinate difference `x − y`, via the cached
    /// coordinate table (no allocation).
    #[inline]
    pub fn diff_index(&self, x: usize, y: usize) -> usize {
        let d = self.torus.dim();
        let l = self.torus.side() as i64;
        let mut idx = 0usize;
        for k in 0..d {
            let diff = (self.coords[x * d + k] - self.coords[y * d + k]).rem_euclid(l);
            idx = idx * l as usize + diff as usize;
        }
        idx
    }

    /// Variance entry `S_xy`.
    #[inline]
    pub fn s(&self, x: usize, y: usize) -> f64 {
        self.s_kernel[self.diff_index(x, y)]
    }

    /// Dense `S` (test scale only; the kernel is the working form).
    pub fn s_dense(&self) -> RMat {
        let n = self.n();
        RMat::from_fn(n, |x, y| self.s(x, y))
    }

    /// Draws one Hermitian sample deterministically from `seed`.
    pub fn sample(&self, seed: u64) -> HermitianSample {
        let n = self.n();
        let mut rng = stream_from_seed(seed);
        let mut h = CMat::zeros(n);
        let s_diag = self.s_kernel[0].sqrt();
        for i in 0..n {
            let diag = self.dist.sample_diag(&mut rng) * s_diag;
            h.set(i, i, Complex64::new(diag, 0.0));
            for j in (i + 1)..n {
                let zeta = self.dist.sample_offdiag(&mut rng);
                let entry = zeta * self.s_kernel[self.diff_index(i, j)].sqrt();
                h.set(i, j, entry);
                h.set(j, i, entry.conj());
            }
        }
        HermitianSample { h, seed }
    }
}

// ─────────────────────────────── sample type ─────────────────────────────────

/// One Hermitian draw from the ensemble.
#[derive(Debug, Clone)]
pub struct HermitianSample {
    h: CMat,
    seed: u64,
}

impl HermitianSample {
    /// The matrix itself.
    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    /// Seed this sample was drawn from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Wraps an externally built Hermitian matrix (used by deterministic
    /// test fixtures). Fails if the matrix is not Hermitian to 1e−12.
    pub fn from_matrix(h: CMat, seed: u64) -> Result<Self> {
        let defect = h.hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian: defect {defect:.3e}"
            )));
        }
        Ok(HermitianSample { h, seed })
    }
}

// ───────────────────────────── convenience builder ────────────────────────────

/// Shorthand for the most common test configuration: one-dimensional torus,
/// Gaussian profile, circular Gaussian entries.
pub fn standard_model_1d(side: usize, w: usize) -> Result<BandModel> {
    BandModel::build(
        1,
        side,
        w,
        ProfileSpec::new(crate::profile::ProfileKind::GaussianDensity),
        DistributionSpec::ComplexGaussianCircular,
    )
}
