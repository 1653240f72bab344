//! `cumulants`: exact joint cumulants of the configured entry
//! distribution against batched Monte-Carlo estimates.
//!
//! Each of the `run.samples` draws uses its own per-sample stream, so
//! the manifest seed list fully describes the randomness. The estimator
//! needs at least 1000 draws. Output is a single JSON document:
//!
//! ```json
//! {
//!   "kMax": 4,
//!   "estimates": [ { "p": 1, "q": 1, "estimate_re": …, "estimate_im": …,
//!                    "stderr": … }, … ],
//!   "exact":     [ { "p": 1, "q": 1, "value_re": …, "value_im": … }, … ]
//! }
//! ```

use std::time::{Instant, SystemTime};

use anyhow::Result;
use bandlab::rng::sample_stream;
use bandlab::{joint_cumulants, ExactDistribution};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::ConfigError;
use crate::output::write_json;

use super::RunContext;

/// Largest joint order `p + q` in the table.
pub const K_MAX: usize = 4;

#[derive(Debug, Serialize)]
struct EstimateRecord {
    p: usize,
    q: usize,
    estimate_re: f64,
    estimate_im: f64,
    stderr: f64,
}

#[derive(Debug, Serialize)]
struct ExactRecord {
    p: usize,
    q: usize,
    value_re: f64,
    value_im: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct CumulantDocument {
    k_max: usize,
    estimates: Vec<EstimateRecord>,
    exact: Vec<ExactRecord>,
}

pub fn run(ctx: &RunContext) -> Result<()> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let run = &ctx.config.run;
    if run.samples < 1000 {
        return Err(ConfigError::new(
            "run.samples",
            "cumulant estimation needs at least 1000 samples",
        )
        .into());
    }
    let dist = ctx.config.model.dist;

    // One draw per sample stream; cheap enough that this never needs the
    // thread pool, and trivially identical across thread counts.
    let draws: Vec<Complex64> = (0..run.samples)
        .map(|k| dist.sample_offdiag(&mut sample_stream(run.base_seed, k as u64)))
        .collect();

    let estimated = joint_cumulants(&draws, K_MAX)?;
    let exact_grid = ExactDistribution::from_spec(&dist).cumulants(K_MAX)?;

    let estimates = estimated
        .entries()
        .iter()
        .map(|e| EstimateRecord {
            p: e.p,
            q: e.q,
            estimate_re: e.estimate.re,
            estimate_im: e.estimate.im,
            stderr: e.stderr,
        })
        .collect();
    let exact = estimated
        .entries()
        .iter()
        .map(|e| {
            let v = exact_grid.get(e.p, e.q)?;
            Ok(ExactRecord {
                p: e.p,
                q: e.q,
                value_re: v.re,
                value_im: v.im,
            })
        })
        .collect::<bandlab::Result<Vec<_>>>()?;

    let mut files = Vec::new();
    if ctx.config.wants_json() {
        let doc = CumulantDocument {
            k_max: K_MAX,
            estimates,
            exact,
        };
        files.push(write_json(&ctx.out_dir, "cumulants.json", &doc)?);
    } else {
        log::warn!("cumulants exports JSON only; outputs.formats has no \"json\" entry");
    }

    ctx.finish("cumulants", &ctx.seeds(), &files, started, clock)
}
