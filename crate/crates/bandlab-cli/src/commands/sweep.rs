//! `sweep`: scaling-exponent fits of median observables across the
//! spectral grid.
//!
//! For every cell the command measures the resolvent fluctuation `Λ` and
//! the kernel distance `sup|T − Θ|` per sample, then fits the per-cell
//! medians on log-log axes:
//!
//! - `lambda_median` against `M·η` (rough-bound exponent `−1/2`),
//! - `t_minus_theta_sup_median` against `1/(N·η)` (the claimed bound
//!   corresponds to exponent `+1`; steeper measured slopes mean the
//!   bound is conservative at the large-`η` end of the window),
//!
//! with percentile-bootstrap slope intervals. Outputs:
//! `sweep_medians.csv` (per-cell medians) and `sweep_fits.json`
//! (`{observable, abscissa, medians, slope, ci_lo, ci_hi}` records).
//! The fit needs at least four grid cells.

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::domination::DEFAULT_BOOTSTRAP_ROUNDS;
use bandlab::resolvent::t_matrices;
use bandlab::{resolvent, scaling_fit, theta_exact, TorusFft};

use crate::config::ConfigError;
use crate::output::{write_json, Cell, CsvFile};

use super::locallaw::{FitRecord, BOOTSTRAP_SEED_SALT};
use super::{median_of, RunContext};

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let model = ctx.model()?;
    let fft = TorusFft::new(*model.torus());
    let grid = ctx.grid();
    if grid.len() < 4 {
        return Err(ConfigError::new(
            "spectral.eta",
            format!(
                "scaling fits need at least 4 grid cells (E × eta), got {}",
                grid.len()
            ),
        )
        .into());
    }
    let n = model.n();

    let thetas: Vec<Vec<f64>> = grid
        .iter()
        .map(|cell| Ok(theta_exact(&model, cell.z(), &fft)?.column))
        .collect::<bandlab::Result<_>>()?;

    // (Λ, sup|T−Θ|) per (sample, cell)
    let per_sample: Vec<Vec<(f64, f64)>> = ctx.map_samples(|_, sample| {
        grid.iter()
            .enumerate()
            .map(|(ic, cell)| {
                let bundle = resolvent(sample, cell.z())?;
                let t = t_matrices(&bundle, &model, &fft)?.t;
                let theta = &thetas[ic];
                let mut sup = 0.0f64;
                for x in 0..n {
                    for y in 0..n {
                        sup = sup.max((t.at(x, y) - theta[model.diff_index(x, y)]).abs());
                    }
                }
                Ok((bundle.lambda(), sup))
            })
            .collect()
    })?;

    let lambda_groups: Vec<Vec<f64>> = (0..grid.len())
        .map(|ic| per_sample.iter().map(|row| row[ic].0).collect())
        .collect();
    let sup_groups: Vec<Vec<f64>> = (0..grid.len())
        .map(|ic| per_sample.iter().map(|row| row[ic].1).collect())
        .collect();
    let m_eta: Vec<f64> = grid.iter().map(|c| model.m_param() * c.eta).collect();
    let inv_n_eta: Vec<f64> = grid.iter().map(|c| 1.0 / (n as f64 * c.eta)).collect();

    let seed = ctx.config.run.base_seed ^ BOOTSTRAP_SEED_SALT;
    let lambda_fit = scaling_fit(&m_eta, &lambda_groups, DEFAULT_BOOTSTRAP_ROUNDS, seed)?;
    let sup_fit = scaling_fit(
        &inv_n_eta,
        &sup_groups,
        DEFAULT_BOOTSTRAP_ROUNDS,
        seed.wrapping_add(1),
    )?;

    let mut files = Vec::new();
    if ctx.config.wants_csv() {
        let mut csv = CsvFile::create(
            &ctx.out_dir,
            "sweep_medians.csv",
            &["E", "eta", "m_eta", "lambda_median", "sup_median"],
        )?;
        for (ic, cell) in grid.iter().enumerate() {
            csv.row(&[
                Cell::F(cell.energy),
                Cell::F(cell.eta),
                Cell::F(m_eta[ic]),
                Cell::F(median_of(&lambda_groups[ic])?),
                Cell::F(median_of(&sup_groups[ic])?),
            ])?;
        }
        files.push(csv.finish()?);
    }

    if ctx.config.wants_json() {
        let fits = vec![
            FitRecord {
                observable: "lambda_median".to_string(),
                abscissa: lambda_fit.abscissa,
                medians: lambda_fit.medians,
                slope: lambda_fit.slope,
                ci_lo: lambda_fit.slope_ci.0,
                ci_hi: lambda_fit.slope_ci.1,
            },
            FitRecord {
                observable: "t_minus_theta_sup_median".to_string(),
                abscissa: sup_fit.abscissa,
                medians: sup_fit.medians,
                slope: sup_fit.slope,
                ci_lo: sup_fit.slope_ci.0,
                ci_hi: sup_fit.slope_ci.1,
            },
        ];
        files.push(write_json(&ctx.out_dir, "sweep_fits.json", &fits)?);
    }

    ctx.finish("sweep", &ctx.seeds(), &files, started, clock)
}
