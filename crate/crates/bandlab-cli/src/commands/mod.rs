//! Subcommand implementations.
//!
//! Every command follows the same shape: build the model from the
//! validated configuration, walk the `(E, η)` grid, run sample-level work
//! in a dedicated thread pool (results collected in ascending sample
//! order so thread count never changes any output), write tables, and
//! finish with a manifest.

pub mod cumulants;
pub mod diffusion;
pub mod errorlab;
pub mod locallaw;
pub mod profile;
pub mod spectrum;
pub mod sweep;

use std::path::PathBuf;
use std::time::{Instant, SystemTime};

use anyhow::{Context, Result};
use bandlab::rng::sample_seed;
use bandlab::{BandModel, HermitianSample};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::manifest;

/// Everything a subcommand needs: the validated configuration, the
/// resolved output directory, and the configuration hash.
pub struct RunContext {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub hash: String,
}

/// One cell of the spectral grid with its position in the config lists.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    /// Index into `spectral.E`.
    pub ie: usize,
    /// Index into `spectral.eta`.
    pub ih: usize,
    pub energy: f64,
    pub eta: f64,
}

impl GridCell {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.energy, self.eta)
    }
}

impl RunContext {
    /// Builds the band model described by the `model` block.
    pub fn model(&self) -> Result<BandModel> {
        let m = &self.config.model;
        BandModel::build(m.d, m.side, m.w, m.profile, m.dist)
            .context("model block rejected by the ensemble constructor")
    }

    /// The full `E × η` grid in configuration order (energies outer).
    pub fn grid(&self) -> Vec<GridCell> {
        let s = &self.config.spectral;
        let mut cells = Vec::with_capacity(s.energies.len() * s.eta.len());
        for (ie, &energy) in s.energies.iter().enumerate() {
            for (ih, &eta) in s.eta.iter().enumerate() {
                cells.push(GridCell {
                    ie,
                    ih,
                    energy,
                    eta,
                });
            }
        }
        cells
    }

    /// Per-sample stream keys in ascending sample order.
    pub fn seeds(&self) -> Vec<u64> {
        let base = self.config.run.base_seed;
        (0..self.config.run.samples)
            .map(|k| sample_seed(base, k as u64))
            .collect()
    }

    /// Runs `work` once per sample on a pool of `run.threads` workers.
    ///
    /// Results come back indexed by sample, so any later reduction is a
    /// fixed-order fold and the thread count cannot affect a single
    /// output bit.
    pub fn map_samples<T, F>(&self, work: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &HermitianSample) -> bandlab::Result<T> + Sync,
    {
        let model = self.model()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.run.threads)
            .build()
            .context("cannot build the worker pool")?;
        let seeds = self.seeds();
        let results: bandlab::Result<Vec<T>> = pool.install(|| {
            seeds
                .par_iter()
                .enumerate()
                .map(|(k, &seed)| work(k, &model.sample(seed)))
                .collect()
        });
        results.context("sample-level computation failed")
    }

    /// Writes the run manifest; call last with the full file inventory.
    pub fn finish(
        &self,
        command: &str,
        seeds: &[u64],
        files: &[String],
        started: SystemTime,
        clock: Instant,
    ) -> Result<()> {
        manifest::write(
            &self.out_dir,
            command,
            &self.config,
            &self.hash,
            seeds,
            files,
            started,
            clock.elapsed(),
        )
    }
}

/// Median of a slice (copies, sorts, midpoint convention).
pub fn median_of(values: &[f64]) -> Result<f64> {
    bandlab::stats::median(values).context("median of an aggregation group")
}
