//! `errorlab`: Fourier-mode structure of the self-consistent-equation
//! error plus multi-resolvent chain and loop observables.
//!
//! Outputs per grid cell:
//! - `errorlab_modes_E{i}_eta{j}.csv` — one row per flat momentum index:
//!   `p, sHat, qHat, absEHat`, where `absEHat` is the across-sample mean
//!   of `max_y |Ê(p)_y|` (the largest column amplitude of the mode).
//! - `errorlab_observables_E{i}_eta{j}.csv` — one row per (sample,
//!   observable): `sample, name, n, a, b, value_re, value_im`, covering
//!   the chains `Y⁽¹⁾`, `Y⁽²⁾` and the loop `Z⁽²⁾` with the variance
//!   matrix itself as the banded weight. Anchors sit a quarter band
//!   apart (`a = 0`, `b = site at W/4 on the first axis`), inside the
//!   band where the fluctuation scales are visible.

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::error_lab::{build_q, mode_amplitudes};
use bandlab::resolvent::t_matrices;
use bandlab::{chain_y, error_e, loop_z, resolvent, TorusFft};
use num_complex::Complex64;

use crate::output::{Cell, CsvFile};

use super::RunContext;

struct SampleValues {
    /// Per flat momentum index: `max_y |Ê(p)_y|`.
    mode_amplitude: Vec<f64>,
    /// `(name, order, value)` triples for the observable table.
    observables: Vec<(&'static str, usize, Complex64)>,
}

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let model = ctx.model()?;
    let fft = TorusFft::new(*model.torus());
    let grid = ctx.grid();
    let table = build_q(&model, &fft)?;
    let sigma = model.s_dense().to_cmat();
    let w = model.w();

    // in-band anchor pair on the first axis
    let a = 0usize;
    let b = {
        let mut coords = vec![0i64; model.dim()];
        coords[0] = (w as i64 / 4).max(1);
        model.torus().index_of(&coords)?
    };

    let per_sample: Vec<Vec<SampleValues>> = ctx.map_samples(|_, sample| {
        grid.iter()
            .map(|cell| {
                let bundle = resolvent(sample, cell.z())?;
                let t = t_matrices(&bundle, &model, &fft)?.t;
                let e = error_e(&t, &model, cell.z(), &fft)?;
                let amplitudes = mode_amplitudes(&e, &fft)?;
                let n = model.n();
                let mode_amplitude: Vec<f64> = (0..n)
                    .map(|k| (0..n).map(|y| amplitudes.at(k, y).norm()).fold(0.0, f64::max))
                    .collect();
                let observables = vec![
                    ("Y1", 1, chain_y(&bundle, &[&sigma], w, a, b, &[a])?),
                    ("Y2", 2, chain_y(&bundle, &[&sigma, &sigma], w, a, b, &[a, b])?),
                    ("Z2", 2, loop_z(&bundle, &[&sigma, &sigma], w, a, b, &[])?),
                ];
                Ok(SampleValues {
                    mode_amplitude,
                    observables,
                })
            })
            .collect()
    })?;

    let mut files = Vec::new();
    if ctx.config.wants_csv() {
        let samples = ctx.config.run.samples as f64;
        for (ic, cell) in grid.iter().enumerate() {
            let name = format!("errorlab_modes_E{}_eta{}.csv", cell.ie, cell.ih);
            let mut csv =
                CsvFile::create(&ctx.out_dir, &name, &["p", "sHat", "qHat", "absEHat"])?;
            for k in 0..model.n() {
                let mean_amp: f64 = per_sample
                    .iter()
                    .map(|row| row[ic].mode_amplitude[k])
                    .sum::<f64>()
                    / samples;
                csv.row(&[
                    Cell::F(table.momentum_norms[k]),
                    Cell::F(table.s_hat[k]),
                    Cell::F(table.q_hat[k]),
                    Cell::F(mean_amp),
                ])?;
            }
            files.push(csv.finish()?);

            let name = format!("errorlab_observables_E{}_eta{}.csv", cell.ie, cell.ih);
            let mut csv = CsvFile::create(
                &ctx.out_dir,
                &name,
                &["sample", "name", "n", "a", "b", "value_re", "value_im"],
            )?;
            for (k, row) in per_sample.iter().enumerate() {
                for (obs_name, order, value) in &row[ic].observables {
                    csv.row(&[
                        Cell::U(k as u64),
                        Cell::S(obs_name.to_string()),
                        Cell::U(*order as u64),
                        Cell::U(a as u64),
                        Cell::U(b as u64),
                        Cell::F(value.re),
                        Cell::F(value.im),
                    ])?;
                }
            }
            files.push(csv.finish()?);
        }
    }

    ctx.finish("errorlab", &ctx.seeds(), &files, started, clock)
}
