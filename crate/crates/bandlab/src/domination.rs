//! Finite-size proxies for high-probability domination bounds, and
//! scaling-exponent regressions across parameter grids.
//!
//! An asymptotic statement "X is dominated by Y" promises
//! `P(|X| > N^ε·Y) → 0` for every `ε > 0`. At a fixed desk-scale `N`
//! the honest surrogate is a table: for each `ε` on a small grid,
//! the observed frequency of `|X| > N^ε·Y` with a Wilson confidence
//! interval around it. No asymptotic claim is made — the tables are
//! meant to be compared across two system sizes.
//!
//! Exponent content of bounds like `Λ ≺ (Mη)^{−1/2}` is extracted by
//! the **scaling fit**: the log-log least-squares slope of per-point
//! medians (medians, not means — resolvent statistics are heavy-tailed)
//! with a percentile-bootstrap confidence interval.

use crate::error::{Error, Result};
use crate::stats::{bootstrap_ci, log_log_fit, median};
use crate::tolerances::WILSON_Z;

/// Default exceedance grid.
pub const DEFAULT_EPSILON_GRID: [f64; 3] = [0.05, 0.1, 0.2];

/// Bootstrap resampling rounds used when none are specified.
pub const DEFAULT_BOOTSTRAP_ROUNDS: usize = 1000;

// ────────────────────────────── exceedance tables ─────────────────────────────

/// Observed magnitudes of one statistic against one control value.
#[derive(Debug, Clone)]
pub struct DominationProbe {
    /// Label carried into reports.
    pub name: String,
    /// Sample magnitudes `|X|`.
    pub samples: Vec<f64>,
    /// Control value `Y > 0`.
    pub bound: f64,
    /// System size `N` entering the `N^ε` slack.
    pub n: usize,
    /// Slack exponents to tabulate.
    pub epsilon_grid: Vec<f64>,
}

impl DominationProbe {
    /// Probe with the default `ε` grid.
    pub fn new(
        name: impl Into<String>,
        samples: Vec<f64>,
        bound: f64,
        n: usize,
    ) -> Result<Self> {
        Self::with_grid(name, samples, bound, n, DEFAULT_EPSILON_GRID.to_vec())
    }

    /// Probe with a caller-chosen `ε` grid.
    pub fn with_grid(
        name: impl Into<String>,
        samples: Vec<f64>,
        bound: f64,
        n: usize,
        epsilon_grid: Vec<f64>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("probe needs at least one sample"));
        }
        if !(bound > 0.0) {
            return Err(Error::invalid(format!("control value {bound} must be positive")));
        }
        if n <= 1 {
            return Err(Error::invalid("system size must exceed 1"));
        }
        if epsilon_grid.is_empty() || epsilon_grid.iter().any(|&e| e < 0.0) {
            return Err(Error::invalid("ε grid must be nonempty and nonnegative"));
        }
        Ok(Self {
            name: name.into(),
            samples,
            bound,
            n,
            epsilon_grid,
        })
    }
}

/// One row of an exceedance table.
#[derive(Debug, Clone, Copy)]
pub struct ExceedanceRow {
    pub epsilon: f64,
    /// `N^ε · bound`.
    pub threshold: f64,
    pub count: usize,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval for a binomial proportion.
///
/// Always contains the sample proportion; at the degenerate corners
/// `p̂ ∈ {0, 1}` the matching endpoint is exactly `0` or `1` (the score
/// inequality is tight there, so rounding must not be allowed to detach
/// the endpoint from the observation).
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let zsq = z * z;
    let denom = 1.0 + zsq / n;
    let center = (p + zsq / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + zsq / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Frequency of `|X| > N^ε·bound` for each `ε` on the probe's grid, with
/// Wilson confidence intervals.
pub fn exceedance(probe: &DominationProbe) -> Result<Vec<ExceedanceRow>> {
    let trials = probe.samples.len();
    let mut rows = Vec::with_capacity(probe.epsilon_grid.len());
    for &eps in &probe.epsilon_grid {
        let threshold = (probe.n as f64).powf(eps) * probe.bound;
        let count = probe
            .samples
            .iter()
            .filter(|&&x| x.abs() > threshold)
            .count();
        let frequency = count as f64 / trials as f64;
        let (ci_low, ci_high) = wilson_interval(count, trials, WILSON_Z);
        rows.push(ExceedanceRow {
            epsilon: eps,
            threshold,
            count,
            frequency,
            ci_low,
            ci_high,
        });
    }
    Ok(rows)
}

// ─────────────────────────────── scaling fits ─────────────────────────────────

/// Log-log regression of per-point medians with a bootstrap interval on
/// the slope.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub abscissa: Vec<f64>,
    pub medians: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Percentile-bootstrap interval for the slope.
    pub slope_ci: (f64, f64),
}

/// Fits `median(samples_i) ≈ c·x_i^slope` on log-log axes.
///
/// Needs at least 4 abscissa points; every group must produce a strictly
/// positive median. The confidence interval resamples each group with
/// replacement `rounds` times at the 95% level, deterministically from
/// `seed`.
pub fn scaling_fit(
    abscissa: &[f64],
    groups: &[Vec<f64>],
    rounds: usize,
    seed: u64,
) -> Result<ScalingFit> {
    if abscissa.len() != groups.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} abscissae against {} groups",
            abscissa.len(),
            groups.len()
        )));
    }
    if abscissa.len() < 4 {
        return Err(Error::invalid("need at least 4 abscissa points"));
    }
    if abscissa.iter().any(|&x| x <= 0.0) {
        return Err(Error::invalid("abscissa values must be positive"));
    }
    let mut medians = Vec::with_capacity(groups.len());
    for group in groups {
        let m = median(group)?;
        if m <= 0.0 {
            return Err(Error::invalid(format!("nonpositive median {m} in a group")));
        }
        medians.push(m);
    }
    let fit = log_log_fit(abscissa, &medians)?;
    let xs = abscissa.to_vec();
    let slope_of = move |resampled: &[Vec<f64>]| -> Result<f64> {
        let meds: Result<Vec<f64>> = resampled.iter().map(|g| median(g)).collect();
        let meds = meds?;
        if meds.iter().any(|&m| m <= 0.0) {
            return Err(Error::invalid("nonpositive bootstrap median"));
        }
        Ok(log_log_fit(&xs, &meds)?.slope)
    };
    let slope_ci = bootstrap_ci(groups, slope_of, rounds, 0.95, seed)?;
    Ok(ScalingFit {
        abscissa: abscissa.to_vec(),
        medians,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        slope_ci,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_from_seed;
    use rand::Rng;

    // ── exceedance ──

    #[test]
    fn zero_samples_never_exceed() {
        let probe = DominationProbe::new("zeros", vec![0.0; 50], 1.0, 100).unwrap();
        for row in exceedance(&probe).unwrap() {
            assert_eq!(row.count, 0);
            assert_eq!(row.frequency, 0.0);
        }
    }

    #[test]
    fn samples_at_the_bound_never_exceed_for_positive_epsilon() {
        let probe = DominationProbe::new("at-bound", vec![2.5; 80], 2.5, 64).unwrap();
        for row in exceedance(&probe).unwrap() {
            assert!(row.threshold > 2.5, "N^ε > 1 pushes the threshold up");
            assert_eq!(row.frequency, 0.0);
        }
    }

    #[test]
    fn uniform_tail_frequency_matches_computation() {
        // |X| = bound·u, u ~ uniform(0,2): P(|X| > 1.5·bound) = 0.25;
        // pick ε with N^ε = 1.5 at N = 100
        let eps = 1.5f64.ln() / 100f64.ln();
        let mut rng = stream_from_seed(52);
        let samples: Vec<f64> = (0..4000).map(|_| 3.0 * rng.gen_range(0.0..2.0)).collect();
        let probe = DominationProbe::with_grid("uniform", samples, 3.0, 100, vec![eps]).unwrap();
        let rows = exceedance(&probe).unwrap();
        assert!((rows[0].frequency - 0.25).abs() < 0.03, "{}", rows[0].frequency);
        assert!(rows[0].ci_low <= 0.25 && 0.25 <= rows[0].ci_high);
    }

    #[test]
    fn frequency_is_monotone_in_epsilon_and_bound() {
        let mut rng = stream_from_seed(63);
        let samples: Vec<f64> = (0..500).map(|_| rng.gen_range(0.0..4.0)).collect();
        let probe = DominationProbe::with_grid(
            "mono",
            samples.clone(),
            1.0,
            128,
            vec![0.0, 0.05, 0.1, 0.2, 0.4],
        )
        .unwrap();
        let rows = exceedance(&probe).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].frequency <= pair[0].frequency);
        }
        // doubling the bound can only lower every frequency
        let probe2 = DominationProbe::with_grid("mono2", samples, 2.0, 128, vec![0.0, 0.05, 0.1, 0.2, 0.4])
            .unwrap();
        for (a, b) in exceedance(&probe2).unwrap().iter().zip(&rows) {
            assert!(a.frequency <= b.frequency);
        }
    }

    #[test]
    fn wilson_interval_oracle() {
        // 3 successes in 10 trials at z = 1.96
        let (lo, hi) = wilson_interval(3, 10, 1.96);
        assert!((lo - 0.107789287486).abs() < 1e-9, "lo {lo}");
        assert!((hi - 0.603226780020).abs() < 1e-9, "hi {hi}");
        // degenerate corners stay inside [0,1]
        let (lo, hi) = wilson_interval(0, 20, 1.96);
        assert!(lo == 0.0 && hi > 0.0 && hi < 0.3);
        let (lo, hi) = wilson_interval(20, 20, 1.96);
        assert!(hi == 1.0 && lo > 0.7);
    }

    #[test]
    fn interval_brackets_the_frequency() {
        let mut rng = stream_from_seed(3);
        let samples: Vec<f64> = (0..300).map(|_| rng.gen_range(0.0..2.0)).collect();
        let probe = DominationProbe::new("bracket", samples, 0.8, 32).unwrap();
        for row in exceedance(&probe).unwrap() {
            assert!((0.0..=1.0).contains(&row.frequency));
            assert!(row.ci_low <= row.frequency && row.frequency <= row.ci_high);
        }
    }

    #[test]
    fn probe_preconditions() {
        assert!(DominationProbe::new("e", vec![], 1.0, 10).is_err());
        assert!(DominationProbe::new("b", vec![1.0], 0.0, 10).is_err());
        assert!(DominationProbe::new("n", vec![1.0], 1.0, 1).is_err());
        assert!(DominationProbe::with_grid("g", vec![1.0], 1.0, 10, vec![]).is_err());
        assert!(DominationProbe::with_grid("g", vec![1.0], 1.0, 10, vec![-0.1]).is_err());
        let p = DominationProbe::new("d", vec![1.0], 1.0, 10).unwrap();
        assert_eq!(p.epsilon_grid, DEFAULT_EPSILON_GRID.to_vec());
    }

    // ── scaling fits ──

    #[test]
    fn exact_power_law_recovered_to_machine_precision() {
        let abscissa: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];
        let groups: Vec<Vec<f64>> = abscissa
            .iter()
            .map(|&x| vec![x.powf(-1.5); 100])
            .collect();
        let fit = scaling_fit(&abscissa, &groups, 50, 7).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.slope_ci.0 + 1.5).abs() < 1e-12 && (fit.slope_ci.1 + 1.5).abs() < 1e-12);
    }

    #[test]
    fn constant_data_fits_slope_zero() {
        let abscissa = [1.0, 2.0, 4.0, 8.0];
        let groups: Vec<Vec<f64>> = (0..4).map(|_| vec![3.7; 100]).collect();
        let fit = scaling_fit(&abscissa, &groups, 50, 9).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law_ci_brackets_truth() {
        let mut rng = stream_from_seed(12);
        let abscissa: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];
        let groups: Vec<Vec<f64>> = abscissa
            .iter()
            .map(|&x| {
                (0..200)
                    .map(|_| x.powf(-0.5) * rng.gen_range(0.5..1.5))
                    .collect()
            })
            .collect();
        let fit = scaling_fit(&abscissa, &groups, 400, 99).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.1, "slope {}", fit.slope);
        assert!(fit.slope_ci.0 <= -0.5 && -0.5 <= fit.slope_ci.1);
        assert!(fit.slope_ci.0 < fit.slope_ci.1);
    }

    #[test]
    fn bootstrap_coverage_on_synthetic_power_laws() {
        // nominal 95% intervals should cover the true slope in at least
        // 90% of repetitions
        let abscissa: [f64; 4] = [8.0, 16.0, 32.0, 64.0];
        let mut covered = 0;
        let trials = 20;
        for t in 0..trials {
            let mut rng = stream_from_seed(1000 + t);
            let groups: Vec<Vec<f64>> = abscissa
                .iter()
                .map(|&x| {
                    (0..100)
                        .map(|_| x.powf(-1.5) * rng.gen_range(0.7..1.3))
                        .collect()
                })
                .collect();
            let fit = scaling_fit(&abscissa, &groups, 200, 2000 + t).unwrap();
            if fit.slope_ci.0 <= -1.5 && -1.5 <= fit.slope_ci.1 {
                covered += 1;
            }
        }
        assert!(covered >= 17, "covered {covered}/{trials}");
    }

    #[test]
    fn scaling_fit_preconditions() {
        let groups3: Vec<Vec<f64>> = (0..3).map(|_| vec![1.0; 10]).collect();
        assert!(scaling_fit(&[1.0, 2.0, 3.0], &groups3, 10, 0).is_err(), "too few points");
        let groups4: Vec<Vec<f64>> = (0..4).map(|_| vec![0.0; 10]).collect();
        assert!(
            scaling_fit(&[1.0, 2.0, 3.0, 4.0], &groups4, 10, 0).is_err(),
            "zero medians"
        );
        let ok: Vec<Vec<f64>> = (0..4).map(|_| vec![1.0; 10]).collect();
        assert!(scaling_fit(&[1.0, 2.0, 3.0], &ok, 10, 0).is_err(), "length mismatch");
        assert!(scaling_fit(&[-1.0, 2.0, 3.0, 4.0], &ok, 10, 0).is_err(), "negative abscissa");
    }
}
