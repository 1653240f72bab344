//! `profile`: deterministic diffusion-profile tables.
//!
//! For each grid cell `(E, η)` this writes one CSV with `L` rows — the
//! exact kernel column `Θ_x0` next to its two closed-form approximations
//! and the pointwise envelope `Υ_x0`:
//!
//! `x, theta_fourier, theta_exp, theta_exact, upsilon`
//!
//! No sampling is involved, so the manifest carries an empty seed list.
//! The closed forms are one-dimensional; the command rejects `d > 1`.

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::diffusion::{theta_profile_exponential, theta_profile_fourier};
use bandlab::{diffusion_constant, theta_exact, upsilon, TorusFft};

use crate::config::ConfigError;
use crate::output::{Cell, CsvFile};

use super::RunContext;

/// Truncation order for the exponential-sum profile form.
const EXP_TERMS: usize = 64;
/// Power of the far-field envelope tail.
const ENVELOPE_POWER: u32 = 4;

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    if ctx.config.model.d != 1 {
        return Err(ConfigError::new(
            "model.d",
            "profile closed forms are one-dimensional; use d = 1",
        )
        .into());
    }
    let model = ctx.model()?;
    let fft = TorusFft::new(*model.torus());
    let (d_const, _) = diffusion_constant(&model)?;
    let (side, w) = (model.side(), model.w());

    let mut files = Vec::new();
    if ctx.config.wants_csv() {
        for cell in ctx.grid() {
            let z = cell.z();
            let theta = theta_exact(&model, z, &fft)?;
            let name = format!("profile_E{}_eta{}.csv", cell.ie, cell.ih);
            let mut csv = CsvFile::create(
                &ctx.out_dir,
                &name,
                &["x", "theta_fourier", "theta_exp", "theta_exact", "upsilon"],
            )?;
            for x in 0..side {
                let fourier = theta_profile_fourier(x as i64, z, side, w, d_const, side)?;
                let exp = theta_profile_exponential(x as i64, z, side, w, d_const, EXP_TERMS)?;
                let envelope = upsilon(x, 0, z, side, w, d_const, ENVELOPE_POWER)?;
                csv.row(&[
                    Cell::U(x as u64),
                    Cell::F(fourier),
                    Cell::F(exp),
                    Cell::F(theta.column[x]),
                    Cell::F(envelope),
                ])?;
            }
            files.push(csv.finish()?);
        }
    }

    ctx.finish("profile", &[], &files, started, clock)
}
