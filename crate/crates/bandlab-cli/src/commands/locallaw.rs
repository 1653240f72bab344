//! `locallaw`: the resolvent fluctuation `Λ` against the deterministic
//! control parameter `Φ²`.
//!
//! Outputs:
//! - `locallaw_samples.csv` — one row per `(E, η, sample)` with `Λ`,
//!   `Φ²`, and the Ward-identity residual (row count is
//!   `|E|·|η|·samples`).
//! - `locallaw_exceedance.csv` — per cell and per slack exponent `ε`,
//!   the frequency of `Λ² > N^ε·Φ²` with a 95% Wilson interval.
//! - `locallaw_fits.json` — when the grid has at least four cells, a
//!   log-log fit of the per-cell `Λ` median against `M·η` with a
//!   bootstrap slope interval.

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::diffusion::control_phi_model;
use bandlab::domination::DEFAULT_BOOTSTRAP_ROUNDS;
use bandlab::{exceedance, resolvent, scaling_fit, DominationProbe};
use serde::Serialize;

use crate::output::{write_json, Cell, CsvFile};

use super::{median_of, RunContext};

/// Offset mixed into the base seed for the bootstrap resampler, so fit
/// intervals are reproducible without reusing a sample stream.
pub const BOOTSTRAP_SEED_SALT: u64 = 0xB007_57EA;

/// Fit export schema: `{observable, abscissa, medians, slope, ci_lo, ci_hi}`.
#[derive(Debug, Serialize)]
pub struct FitRecord {
    pub observable: String,
    pub abscissa: Vec<f64>,
    pub medians: Vec<f64>,
    pub slope: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let model = ctx.model()?;
    let grid = ctx.grid();
    let n = model.n();

    // Λ and the Ward residual per (sample, cell); ascending sample order.
    let per_sample: Vec<Vec<(f64, f64)>> = ctx.map_samples(|_, sample| {
        grid.iter()
            .map(|cell| {
                let bundle = resolvent(sample, cell.z())?;
                Ok((bundle.lambda(), bundle.ward_residual()))
            })
            .collect()
    })?;
    let phi_sq: Vec<f64> = grid
        .iter()
        .map(|cell| control_phi_model(&model, cell.eta))
        .collect::<bandlab::Result<_>>()?;

    let mut files = Vec::new();
    if ctx.config.wants_csv() {
        let mut samples_csv = CsvFile::create(
            &ctx.out_dir,
            "locallaw_samples.csv",
            &["E", "eta", "sample", "lambda", "phi_sq", "ward_residual"],
        )?;
        for (ic, cell) in grid.iter().enumerate() {
            for (k, row) in per_sample.iter().enumerate() {
                let (lambda, ward) = row[ic];
                samples_csv.row(&[
                    Cell::F(cell.energy),
                    Cell::F(cell.eta),
                    Cell::U(k as u64),
                    Cell::F(lambda),
                    Cell::F(phi_sq[ic]),
                    Cell::F(ward),
                ])?;
            }
        }
        files.push(samples_csv.finish()?);

        let mut exc_csv = CsvFile::create(
            &ctx.out_dir,
            "locallaw_exceedance.csv",
            &[
                "E",
                "eta",
                "epsilon",
                "threshold",
                "count",
                "frequency",
                "ci_low",
                "ci_high",
            ],
        )?;
        for (ic, cell) in grid.iter().enumerate() {
            let lambda_sq: Vec<f64> = per_sample.iter().map(|row| row[ic].0.powi(2)).collect();
            let probe = DominationProbe::new(
                format!("lambda_sq_E{}_eta{}", cell.ie, cell.ih),
                lambda_sq,
                phi_sq[ic],
                n,
            )?;
            for row in exceedance(&probe)? {
                exc_csv.row(&[
                    Cell::F(cell.energy),
                    Cell::F(cell.eta),
                    Cell::F(row.epsilon),
                    Cell::F(row.threshold),
                    Cell::U(row.count as u64),
                    Cell::F(row.frequency),
                    Cell::F(row.ci_low),
                    Cell::F(row.ci_high),
                ])?;
            }
        }
        files.push(exc_csv.finish()?);
    }

    if ctx.config.wants_json() {
        let mut fits = Vec::new();
        if grid.len() >= 4 {
            let abscissa: Vec<f64> = grid.iter().map(|c| model.m_param() * c.eta).collect();
            let groups: Vec<Vec<f64>> = (0..grid.len())
                .map(|ic| per_sample.iter().map(|row| row[ic].0).collect())
                .collect();
            let fit = scaling_fit(
                &abscissa,
                &groups,
                DEFAULT_BOOTSTRAP_ROUNDS,
                ctx.config.run.base_seed ^ BOOTSTRAP_SEED_SALT,
            )?;
            fits.push(FitRecord {
                observable: "lambda_median".to_string(),
                abscissa: fit.abscissa,
                medians: fit.medians,
                slope: fit.slope,
                ci_lo: fit.slope_ci.0,
                ci_hi: fit.slope_ci.1,
            });
        } else {
            log::warn!(
                "scaling fit skipped: {} grid cells, need at least 4",
                grid.len()
            );
        }
        files.push(write_json(&ctx.out_dir, "locallaw_fits.json", &fits)?);
    }

    // cheap sanity: medians are finite (surfaces NaN poisoning early)
    for (ic, _) in grid.iter().enumerate() {
        let lambdas: Vec<f64> = per_sample.iter().map(|row| row[ic].0).collect();
        anyhow::ensure!(median_of(&lambdas)?.is_finite(), "non-finite lambda median");
    }

    ctx.finish("locallaw", &ctx.seeds(), &files, started, clock)
}
