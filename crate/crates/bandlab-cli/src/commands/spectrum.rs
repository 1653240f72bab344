//! `spectrum`: full eigendecomposition census with localization metrics.
//!
//! Per sample this writes `spectrum_s{k}.csv` with one row per
//! eigenvalue index `α`:
//!
//! `alpha, lambda, deloc_metric, in_bulk`
//!
//! where `deloc_metric` is the ball-mass localization statistic at scale
//! `ℓ = max(1, L/4)` with threshold `ε = 0.1` (periodic distances), and
//! `in_bulk` flags `λ_α ∈ [−2+κ, 2−κ]` with `κ` from the spectral block.
//! `spectrum_summary.json` aggregates the localized fraction per sample.
//!
//! The spectral `E`/`η` grid plays no role here — the census is a
//! fixed-matrix computation.

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::{eigh, localized_set, DistanceConvention};
use serde::Serialize;

use crate::output::{write_json, Cell, CsvFile};

use super::RunContext;

/// Localization threshold for the ball-mass metric.
pub const EPSILON: f64 = 0.1;

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SpectrumSummary {
    kappa: f64,
    epsilon: f64,
    ell: usize,
    /// Localized fraction `|𝒜|/N` per sample, ascending sample order.
    fractions: Vec<f64>,
    mean_fraction: f64,
}

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let model = ctx.model()?;
    let kappa = ctx.config.spectral.kappa;
    let ell = (model.side() / 4).max(1);

    struct SampleCensus {
        eigenvalues: Vec<f64>,
        metrics: Vec<f64>,
        bulk: (f64, f64),
        fraction: f64,
    }

    let torus = *model.torus();
    let per_sample: Vec<SampleCensus> = ctx.map_samples(|_, sample| {
        let system = eigh(sample.matrix())?;
        let report = localized_set(
            &system,
            &torus,
            kappa,
            EPSILON,
            ell,
            DistanceConvention::Periodic,
        )?;
        Ok(SampleCensus {
            eigenvalues: system.eigenvalues().to_vec(),
            metrics: report.metrics,
            bulk: report.bulk_interval,
            fraction: report.fraction,
        })
    })?;

    let mut files = Vec::new();
    if ctx.config.wants_csv() {
        for (k, census) in per_sample.iter().enumerate() {
            let name = format!("spectrum_s{k}.csv");
            let mut csv = CsvFile::create(
                &ctx.out_dir,
                &name,
                &["alpha", "lambda", "deloc_metric", "in_bulk"],
            )?;
            let (lo, hi) = census.bulk;
            for (alpha, (&lambda, &metric)) in
                census.eigenvalues.iter().zip(&census.metrics).enumerate()
            {
                let in_bulk = u64::from((lo..=hi).contains(&lambda));
                csv.row(&[
                    Cell::U(alpha as u64),
                    Cell::F(lambda),
                    Cell::F(metric),
                    Cell::U(in_bulk),
                ])?;
            }
            files.push(csv.finish()?);
        }
    }

    if ctx.config.wants_json() {
        let fractions: Vec<f64> = per_sample.iter().map(|c| c.fraction).collect();
        let mean_fraction = fractions.iter().sum::<f64>() / fractions.len() as f64;
        let summary = SpectrumSummary {
            kappa,
            epsilon: EPSILON,
            ell,
            fractions,
            mean_fraction,
        };
        files.push(write_json(&ctx.out_dir, "spectrum_summary.json", &summary)?);
    }

    ctx.finish("spectrum", &ctx.seeds(), &files, started, clock)
}
