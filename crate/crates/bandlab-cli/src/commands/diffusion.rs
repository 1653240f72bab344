//! `diffusion`: the smoothed square observable `T` against the
//! deterministic kernel `Θ`.
//!
//! Outputs:
//! - `diffusion_samples.csv` — per `(E, η, sample)`: `sup|T − Θ|` and the
//!   same rescaled by `N·η` (the predicted size is `O(1/(Nη))` in the
//!   diffusive window).
//! - `diffusion_summary.csv` — per cell medians of both columns.
//! - `diffusion_profile_E{i}_eta{j}.csv` — `L` rows per cell: the
//!   across-sample mean of `T_x0` along the first torus axis next to the
//!   deterministic `Θ_x0` and the envelope `Υ_x0` (envelope in `d = 1`
//!   only; higher dimensions write NaN for that column).
//!
//! Cells with `η` outside `[(W/L)², 1]` — the diffusive window — are
//! computed anyway but logged as warnings.

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::{diffusion_constant, resolvent, theta_exact, upsilon, TorusFft};

use crate::output::{Cell, CsvFile};

use super::{median_of, RunContext};

/// Power of the far-field envelope tail (matches the `profile` command).
const ENVELOPE_POWER: u32 = 4;

struct CellResult {
    /// `sup_{x,y} |T_xy − Θ_xy|` per sample.
    sups: Vec<f64>,
    /// Across-sample mean of the first-axis column `T_x0`, length `L`.
    t_column_mean: Vec<f64>,
    /// Deterministic `Θ_x0` along the first axis, length `L`.
    theta_column: Vec<f64>,
}

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let model = ctx.model()?;
    let fft = TorusFft::new(*model.torus());
    let grid = ctx.grid();
    let (side, w, n) = (model.side(), model.w(), model.n());
    let d_const = if model.dim() == 1 {
        Some(diffusion_constant(&model)?.0)
    } else {
        None
    };

    let eta_floor = (w as f64 / side as f64).powi(2);
    for cell in &grid {
        if cell.eta < eta_floor || cell.eta > 1.0 {
            log::warn!(
                "eta = {} outside the diffusive window [(W/L)², 1] = [{eta_floor:.3e}, 1]; \
                 computing anyway",
                cell.eta
            );
        }
    }

    // flat indices of the first-axis cross-section (x, 0, …, 0)
    let axis_sites: Vec<usize> = (0..side)
        .map(|x| {
            let mut coords = vec![0i64; model.dim()];
            coords[0] = x as i64;
            model.torus().index_of(&coords)
        })
        .collect::<bandlab::Result<_>>()?;

    let thetas: Vec<Vec<f64>> = grid
        .iter()
        .map(|cell| Ok(theta_exact(&model, cell.z(), &fft)?.column))
        .collect::<bandlab::Result<_>>()?;

    // per sample, per cell: (sup distance, T column on the first axis)
    let per_sample: Vec<Vec<(f64, Vec<f64>)>> = ctx.map_samples(|_, sample| {
        grid.iter()
            .enumerate()
            .map(|(ic, cell)| {
                let bundle = resolvent(sample, cell.z())?;
                let t = bandlab::resolvent::t_matrices(&bundle, &model, &fft)?.t;
                let theta = &thetas[ic];
                let mut sup = 0.0f64;
                for x in 0..n {
                    for y in 0..n {
                        let gap = (t.at(x, y) - theta[model.diff_index(x, y)]).abs();
                        sup = sup.max(gap);
                    }
                }
                let column: Vec<f64> = axis_sites.iter().map(|&x| t.at(x, 0)).collect();
                Ok((sup, column))
            })
            .collect()
    })?;

    let samples = ctx.config.run.samples as f64;
    let cells: Vec<CellResult> = grid
        .iter()
        .enumerate()
        .map(|(ic, _)| {
            let sups: Vec<f64> = per_sample.iter().map(|row| row[ic].0).collect();
            let mut t_column_mean = vec![0.0f64; side];
            for row in &per_sample {
                for (acc, v) in t_column_mean.iter_mut().zip(&row[ic].1) {
                    *acc += v / samples;
                }
            }
            let theta_column: Vec<f64> = axis_sites
                .iter()
                .map(|&x| thetas[ic][model.diff_index(x, 0)])
                .collect();
            CellResult {
                sups,
                t_column_mean,
                theta_column,
            }
        })
        .collect();

    let mut files = Vec::new();
    if ctx.config.wants_csv() {
        let mut samples_csv = CsvFile::create(
            &ctx.out_dir,
            "diffusion_samples.csv",
            &["E", "eta", "sample", "sup_abs", "sup_scaled"],
        )?;
        for (ic, cell) in grid.iter().enumerate() {
            let scale = n as f64 * cell.eta;
            for (k, &sup) in cells[ic].sups.iter().enumerate() {
                samples_csv.row(&[
                    Cell::F(cell.energy),
                    Cell::F(cell.eta),
                    Cell::U(k as u64),
                    Cell::F(sup),
                    Cell::F(sup * scale),
                ])?;
            }
        }
        files.push(samples_csv.finish()?);

        let mut summary_csv = CsvFile::create(
            &ctx.out_dir,
            "diffusion_summary.csv",
            &["E", "eta", "median_sup", "median_scaled"],
        )?;
        for (ic, cell) in grid.iter().enumerate() {
            let med = median_of(&cells[ic].sups)?;
            summary_csv.row(&[
                Cell::F(cell.energy),
                Cell::F(cell.eta),
                Cell::F(med),
                Cell::F(med * n as f64 * cell.eta),
            ])?;
        }
        files.push(summary_csv.finish()?);

        for (ic, cell) in grid.iter().enumerate() {
            let name = format!("diffusion_profile_E{}_eta{}.csv", cell.ie, cell.ih);
            let mut csv =
                CsvFile::create(&ctx.out_dir, &name, &["x", "t_mean", "theta", "upsilon"])?;
            for x in 0..side {
                let envelope = match d_const {
                    Some(d) => upsilon(x, 0, cell.z(), side, w, d, ENVELOPE_POWER)?,
                    None => f64::NAN,
                };
                csv.row(&[
                    Cell::U(x as u64),
                    Cell::F(cells[ic].t_column_mean[x]),
                    Cell::F(cells[ic].theta_column[x]),
                    Cell::F(envelope),
                ])?;
            }
            files.push(csv.finish()?);
        }
    }

    ctx.finish("diffusion", &ctx.seeds(), &files, started, clock)
}
