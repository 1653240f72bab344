//! # bandlab
//!
//! A numerical laboratory for Hermitian random band matrices on the
//! discrete torus `(ℤ/Lℤ)^d`. The crate samples the ensemble
//! `H_ij = (S_ij)^{1/2} ζ_ij` with a translation-invariant variance
//! profile of band width `W`, computes resolvent observables, evaluates
//! deterministic diffusion-profile predictions, decomposes the
//! self-consistent-equation error in Fourier space, and provides the
//! statistical machinery (exceedance tables, scaling-exponent fits,
//! cumulant estimators) to test local-law, delocalization, and diffusion
//! claims at desk scale (`N = L^d ≤ 4096`).
//!
//! ## Module map
//!
//! - [`torus`] — lattice geometry, canonical representatives, periodic
//!   distances.
//! - [`profile`] / [`dist`] — variance-profile shapes and entry
//!   distributions.
//! - [`model`] — the band ensemble: stochastic variance matrix `S`,
//!   effective bandwidth `M`, Hermitian sampling.
//! - [`semicircle`] — the Stieltjes transform `m(z)` and its identities.
//! - [`linalg`] / [`fourier`] — dense complex LU, torus FFT, circulant
//!   arithmetic.
//! - [`resolvent`] — `G = (H−z)^{−1}`, the fluctuation statistic `Λ`, the
//!   smoothed observables `T`, `T′`, and the exact Ward identities.
//! - [`diffusion`] — deterministic predictions: the kernel `Θ`, explicit
//!   profile closed forms, envelopes, control parameters, diffusion
//!   constants.
//! - [`error_lab`] — the self-consistent-equation error, its
//!   fluctuation/recentering split, zero-mode projections, Fourier-mode
//!   filters, and the stability operator.
//! - [`observables`] — banded weight class, multi-resolvent chain and loop
//!   contractions, centred diagonal statistics.
//! - [`eigh`] — self-contained Hermitian eigendecomposition
//!   (Householder + implicit-shift QL).
//! - [`deloc`] — eigenvector localization metrics and bulk reports.
//! - [`cumulant`] — joint cumulants of complex variables, exact expansion
//!   checks, homogeneity of band-entry cumulants.
//! - [`domination`] — finite-size exceedance tables and scaling-exponent
//!   regressions.
//! - [`stats`] — medians, linear fits, bootstrap utilities.
//! - [`rng`] — reproducible splittable sample streams.
//! - [`tolerances`] — every numerical threshold, documented in one place.
//!
//! ## Conventions
//!
//! Sites are flat row-major indices over the torus; all kernels are
//! translation invariant and handled via their Fourier symbols where
//! possible. Complex matrices are dense row-major. All randomness flows
//! through per-sample ChaCha streams keyed by `(baseSeed, sampleIndex)`,
//! making every computation a pure function of its inputs.

pub mod cumulant;
pub mod deloc;
pub mod diffusion;
pub mod dist;
pub mod domination;
pub mod eigh;
pub mod error;
pub mod error_lab;
pub mod fourier;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod profile;
pub mod resolvent;
pub mod rng;
pub mod semicircle;
pub mod stats;
pub mod tolerances;
pub mod torus;

pub use cumulant::{
    band_cumulant_scaling, expansion_check, joint_cumulants, BivariatePoly, CumulantTable,
    ExactDistribution,
};
pub use deloc::{deloc_metric, localized_set, DelocReport, DistanceConvention};
pub use diffusion::{control_phi, diffusion_constant, theta_exact, upsilon, ThetaKernel};
pub use dist::DistributionSpec;
pub use domination::{exceedance, scaling_fit, DominationProbe, ExceedanceRow, ScalingFit};
pub use eigh::{eigh, EigenSystem};
pub use error::{Error, Result};
pub use error_lab::{error_e, mode_split, operator_l, split_pr, FourierTable, OperatorL};
pub use fourier::TorusFft;
pub use linalg::{CMat, RMat};
pub use model::{BandModel, HermitianSample};
pub use observables::{chain_y, loop_z, psi_control, x_stat, XStats};
pub use profile::{ProfileKind, ProfileSpec};
pub use resolvent::{resolvent, ResolventBundle, TMatrices};
pub use semicircle::{alpha, msc, SpectralPoint};
pub use torus::Torus;
