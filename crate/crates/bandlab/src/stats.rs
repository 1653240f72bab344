//! Small statistical utilities shared by the experiment drivers.
//!
//! Everything here is deterministic given its inputs (the bootstrap takes
//! an explicit seed), and deliberately simple: medians by sorting,
//! ordinary least squares for two-parameter fits, percentile bootstrap
//! for confidence intervals.

use crate::error::{Error, Result};
use crate::rng::stream_from_seed;
use rand::Rng;

// ───────────────────────────── location summaries ────────────────────────────

/// Sample mean.
pub fn mean(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("mean of empty sample"));
    }
    Ok(data.iter().sum::<f64>() / data.len() as f64)
}

/// Sample mean and its standard error `s/√n` (unbiased variance).
///
/// Requires at least two points.
pub fn mean_stderr(data: &[f64]) -> Result<(f64, f64)> {
    if data.len() < 2 {
        return Err(Error::invalid("standard error needs at least two points"));
    }
    let n = data.len() as f64;
    let mu = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mu, (var / n).sqrt()))
}

/// Median by sorting; the even-length convention is the midpoint of the
/// two central order statistics.
pub fn median(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("median of empty sample"));
    }
    let mut v = data.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("median input contains NaN"));
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Empirical `q`-quantile (`0 ≤ q ≤ 1`) by linear interpolation between
/// order statistics.
pub fn quantile(data: &[f64], q: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("quantile of empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("quantile level {q} outside [0,1]")));
    }
    let mut v = data.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("quantile input contains NaN"));
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(v[lo] * (1.0 - frac) + v[hi] * frac)
}

// ─────────────────────────────── least squares ───────────────────────────────

/// Result of an ordinary least-squares line fit `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination `R² = 1 − SS_res/SS_tot`; equals 1 for
    /// an exact linear relation and is reported as 1 when the responses are
    /// constant and exactly fitted.
    pub r_squared: f64,
}

/// Ordinary least squares for a straight line. Requires at least two
/// points and at least two distinct abscissae.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "fit needs matching lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid("fit needs at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit abscissae are all identical"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(u, v)| (v - intercept - slope * u).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Least-squares fit of `log y` against `log x` — the workhorse for
/// power-law exponents. All inputs must be strictly positive.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::invalid("log-log fit needs strictly positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

// ──────────────────────────────── bootstrap ──────────────────────────────────

/// Percentile-bootstrap confidence interval for a statistic of grouped
/// data.
///
/// `groups[k]` holds the raw replicates at abscissa `k`; each bootstrap
/// round resamples every group with replacement (deterministically from
/// `seed`), recomputes `statistic` on the resampled groups, and the
/// interval is the `[lo, hi]` percentile range of the `rounds` replicate
/// statistics.
pub fn bootstrap_ci<F>(
    groups: &[Vec<f64>],
    statistic: F,
    rounds: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)>
where
    F: Fn(&[Vec<f64>]) -> Result<f64>,
{
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::invalid("bootstrap group is empty"));
    }
    if rounds == 0 {
        return Err(Error::invalid("bootstrap needs at least one round"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::invalid(format!(
            "confidence level {level} outside (0,1)"
        )));
    }
    let mut rng = stream_from_seed(seed);
    let mut replicates = Vec::with_capacity(rounds);
    let mut resampled: Vec<Vec<f64>> = groups.iter().map(|g| vec![0.0; g.len()]).collect();
    for _ in 0..rounds {
        for (dst, src) in resampled.iter_mut().zip(groups) {
            for slot in dst.iter_mut() {
                *slot = src[rng.gen_range(0..src.len())];
            }
        }
        replicates.push(statistic(&resampled)?);
    }
    let tail = (1.0 - level) / 2.0;
    Ok((
        quantile(&replicates, tail)?,
        quantile(&replicates, 1.0 - tail)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_stderr_match_hand_computation() {
        // data {1,2,3,4}: mean 2.5, var 5/3, stderr √(5/12)
        let data = [1.0, 2.0, 3.0, 4.0];
        let (mu, se) = mean_stderr(&data).unwrap();
        assert!((mu - 2.5).abs() < 1e-15);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn median_handles_both_parities() {
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]).unwrap(), 2.5);
        assert_eq!(median(&[7.0]).unwrap(), 7.0);
    }

    #[test]
    fn quantile_endpoints_are_min_and_max() {
        let data = [5.0, -1.0, 3.0, 9.0];
        assert_eq!(quantile(&data, 0.0).unwrap(), -1.0);
        assert_eq!(quantile(&data, 1.0).unwrap(), 9.0);
        assert_eq!(quantile(&data, 0.5).unwrap(), median(&data).unwrap());
    }

    #[test]
    fn exact_line_is_recovered_with_unit_r_squared() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 4.0 - 2.5 * v).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope + 2.5).abs() < 1e-12);
        assert!((fit.intercept - 4.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_line_has_r_squared_below_one() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.1, 1.9, 3.2, 3.8];
        let fit = linear_fit(&x, &y).unwrap();
        assert!(fit.r_squared < 1.0);
        assert!(fit.r_squared > 0.97);
        assert!((fit.slope - 0.94).abs() < 1e-12);
    }

    #[test]
    fn power_law_exponent_comes_out_of_log_log_fit() {
        let x = [2.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        let fit = log_log_fit(&x, &y).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_rejected_immediately() {
        assert!(mean(&[]).is_err());
        assert!(mean_stderr(&[1.0]).is_err());
        assert!(median(&[]).is_err());
        assert!(quantile(&[1.0], 1.5).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
        assert!(log_log_fit(&[1.0, -2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn bootstrap_is_deterministic_and_brackets_the_plug_in_value() {
        // statistic: slope of medians against fixed abscissae
        let xs = [1.0f64, 2.0, 3.0];
        let groups: Vec<Vec<f64>> = xs
            .iter()
            .map(|&x| (0..200).map(|i| 2.0 * x + 0.01 * ((i * 37 % 101) as f64 - 50.0)).collect())
            .collect();
        let stat = |g: &[Vec<f64>]| {
            let med: Vec<f64> = g
                .iter()
                .map(|v| median(v))
                .collect::<Result<_>>()?;
            let lxs: Vec<f64> = xs.to_vec();
            Ok(linear_fit(&lxs, &med)?.slope)
        };
        let (lo, hi) = bootstrap_ci(&groups, stat, 300, 0.95, 42).unwrap();
        let (lo2, hi2) = bootstrap_ci(&groups, stat, 300, 0.95, 42).unwrap();
        assert_eq!((lo, hi), (lo2, hi2));
        assert!(lo <= 2.0 && 2.0 <= hi, "CI [{lo}, {hi}] misses true slope");
        let (lo3, _) = bootstrap_ci(&groups, stat, 300, 0.95, 43).unwrap();
        assert_ne!(lo, lo3, "different seeds should reshuffle the interval");
    }
}
