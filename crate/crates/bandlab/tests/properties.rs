//! Randomized structural invariants.
//!
//! Each property here is a statement that must hold for *every* admissible
//! input, not just the fixtures exercised by the unit tests: torus
//! difference arithmetic, kernel stochasticity, the self-consistent
//! function's algebra, kernel mass identities, Ward identities of sampled
//! resolvents, binomial interval coverage of the sample proportion, and
//! exactness of log-log regression on noiseless power laws.

use bandlab::deloc::DistanceConvention;
use bandlab::domination::{exceedance, wilson_interval, DominationProbe};
use bandlab::profile::{ProfileKind, ProfileSpec};
use bandlab::semicircle::msc;
use bandlab::stats::log_log_fit;
use bandlab::{
    deloc_metric, resolvent, theta_exact, BandModel, DistributionSpec, Torus, TorusFft,
};
use num_complex::Complex64;
use proptest::prelude::*;

/// A torus small enough that exhaustive walks stay cheap.
fn small_torus() -> impl Strategy<Value = Torus> {
    prop_oneof![
        (3usize..=64).prop_map(|l| Torus::new(l, 1).unwrap()),
        (3usize..=16).prop_map(|l| Torus::new(l, 2).unwrap()),
        (3usize..=8).prop_map(|l| Torus::new(l, 3).unwrap()),
    ]
}

fn profile_kind() -> impl Strategy<Value = ProfileKind> {
    prop_oneof![
        Just(ProfileKind::GaussianDensity),
        Just(ProfileKind::SmoothCompactBump),
        Just(ProfileKind::ExponentialDecay),
    ]
}

fn entry_distribution() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        Just(DistributionSpec::ComplexGaussianCircular),
        Just(DistributionSpec::RealGaussian),
        Just(DistributionSpec::ComplexFourthRoots),
        (-0.9f64..0.9).prop_map(|rho| DistributionSpec::ComplexGaussianCorrelated { rho }),
    ]
}

proptest! {
    // ── torus difference arithmetic ──

    #[test]
    fn canonical_differences_are_reduced_and_consistent(
        torus in small_torus(),
        xr in 0usize..4096,
        yr in 0usize..4096,
    ) {
        let n = torus.volume();
        let (x, y) = (xr % n, yr % n);
        let l = torus.side() as i64;

        let diff = torus.canonical_diff(x, y).unwrap();
        let cx = torus.coords_of(x).unwrap();
        let cy = torus.coords_of(y).unwrap();
        for k in 0..torus.dim() {
            // representative lies in the canonical window ...
            prop_assert!(2 * diff[k].abs() <= l);
            // ... and agrees with the raw coordinate difference mod L
            prop_assert_eq!((diff[k] - (cx[k] - cy[k])).rem_euclid(l), 0);
        }
        // zero difference on the diagonal
        prop_assert!(torus.canonical_diff(x, x).unwrap().iter().all(|&v| v == 0));
        // squared distance is symmetric even when the window is asymmetric
        let back = torus.canonical_diff(y, x).unwrap();
        let d2: i64 = diff.iter().map(|v| v * v).sum();
        let b2: i64 = back.iter().map(|v| v * v).sum();
        prop_assert_eq!(d2, b2);
    }

    // ── variance kernels ──

    #[test]
    fn variance_kernel_is_symmetric_doubly_stochastic(
        side in 6usize..=48,
        w in 1usize..=12,
        kind in profile_kind(),
        dist in entry_distribution(),
    ) {
        prop_assume!(w <= side);
        let model = BandModel::build(1, side, w, ProfileSpec::new(kind), dist).unwrap();
        let s = model.s_dense();
        let n = model.n();
        for x in 0..n {
            let mut row = 0.0;
            for y in 0..n {
                prop_assert!(s.at(x, y) >= 0.0);
                prop_assert!((s.at(x, y) - s.at(y, x)).abs() < 1e-15);
                row += s.at(x, y);
            }
            prop_assert!((row - 1.0).abs() < 1e-12, "row sum {row}");
        }
        // 1/M is the largest entry, so M·S_xy ≤ 1 everywhere
        let m_param = model.m_param();
        for v in s.data() {
            prop_assert!(m_param * v <= 1.0 + 1e-12);
        }
    }

    // ── self-consistent function ──

    #[test]
    fn msc_solves_its_quadratic_in_the_upper_half_plane(
        e in -2.2f64..2.2,
        eta in 1e-3f64..5.0,
    ) {
        let z = Complex64::new(e, eta);
        let m = msc(z).unwrap();
        prop_assert!(m.im > 0.0);
        prop_assert!(m.norm() < 1.0);
        prop_assert!((m * m + z * m + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // modulus identity 1 − |m|² = η|m|²/Im m
        let lhs = 1.0 - m.norm_sqr();
        let rhs = eta * m.norm_sqr() / m.im;
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
    }

    // ── binomial intervals ──

    #[test]
    fn wilson_interval_contains_the_sample_proportion(
        successes in 0usize..=5000,
        trials in 1usize..=5000,
        z in 0.5f64..4.0,
    ) {
        prop_assume!(successes <= trials);
        let p_hat = successes as f64 / trials as f64;
        let (lo, hi) = wilson_interval(successes, trials, z);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p_hat + 1e-15 && p_hat <= hi + 1e-15);
        // widening the critical value can only widen the interval
        let (lo2, hi2) = wilson_interval(successes, trials, z + 0.5);
        prop_assert!(lo2 <= lo + 1e-15 && hi <= hi2 + 1e-15);
    }

    #[test]
    fn exceedance_frequencies_decrease_along_a_sorted_grid(
        samples in prop::collection::vec(0.0f64..10.0, 1..120),
        mut grid in prop::collection::vec(0.0f64..1.0, 1..6),
        bound in 0.1f64..5.0,
        n in 2usize..=1000,
    ) {
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let probe =
            DominationProbe::with_grid("prop", samples.clone(), bound, n, grid.clone()).unwrap();
        let rows = exceedance(&probe).unwrap();
        for pair in rows.windows(2) {
            prop_assert!(pair[1].frequency <= pair[0].frequency + 1e-15);
        }
        for row in &rows {
            prop_assert!(row.ci_low <= row.frequency && row.frequency <= row.ci_high);
            let manual = samples.iter().filter(|&&s| s > row.threshold).count();
            prop_assert_eq!(manual, row.count);
        }
    }

    // ── regression exactness ──

    #[test]
    fn log_log_fit_is_exact_on_noiseless_power_laws(
        c in 0.1f64..10.0,
        slope in -3.0f64..3.0,
        npts in 4usize..=10,
    ) {
        prop_assume!(slope.abs() > 0.05);
        let xs: Vec<f64> = (0..npts).map(|k| 2f64.powi(k as i32 + 1)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| c * x.powf(slope)).collect();
        let fit = log_log_fit(&xs, &ys).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-8, "slope {}", fit.slope);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-8);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // ── diffusion-kernel mass ──

    #[test]
    fn theta_mass_equals_imaginary_part_over_eta(
        side in 16usize..=96,
        w in 2usize..=8,
        e in -1.5f64..1.5,
        eta in 0.02f64..1.0,
        kind in profile_kind(),
    ) {
        let model = BandModel::build(
            1,
            side,
            w,
            ProfileSpec::new(kind),
            DistributionSpec::ComplexGaussianCircular,
        )
        .unwrap();
        let fft = TorusFft::new(model.torus().clone());
        let z = Complex64::new(e, eta);
        let theta = theta_exact(&model, z, &fft).unwrap();
        let m = msc(z).unwrap();
        let expected = m.im / eta;
        prop_assert!(
            (theta.mass - expected).abs() < 1e-10 * (1.0 + expected),
            "mass {} vs {}",
            theta.mass,
            expected
        );
        // positivity up to the documented dust floor, relative to the peak
        let peak = theta.column.iter().cloned().fold(0.0f64, f64::max);
        let floor = -bandlab::tolerances::THETA_POSITIVITY_FLOOR_REL * peak;
        prop_assert!(theta.column.iter().all(|&v| v >= floor));
    }

    // ── delocalization metric ──

    #[test]
    fn deloc_metric_is_bounded_and_symmetry_invariant(
        side in 8usize..=48,
        ell_frac in 1usize..=4,
        phase in 0.0f64..std::f64::consts::TAU,
        shift in 0usize..48,
        seed in 0u64..1000,
    ) {
        use rand::Rng;
        let torus = Torus::new(side, 1).unwrap();
        let ell = (side / 2 / ell_frac).max(1);
        let mut rng = bandlab::rng::stream_from_seed(seed);
        let mut u: Vec<Complex64> = (0..side)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        for v in u.iter_mut() {
            *v /= norm;
        }

        let metric = deloc_metric(&u, ell, &torus, DistanceConvention::Periodic).unwrap();
        prop_assert!(metric >= 0.0);
        prop_assert!(metric <= (side as f64).sqrt() + 1e-9, "metric {metric}");

        // global phases are invisible
        let rotated: Vec<Complex64> =
            u.iter().map(|v| v * Complex64::from_polar(1.0, phase)).collect();
        let metric_rot =
            deloc_metric(&rotated, ell, &torus, DistanceConvention::Periodic).unwrap();
        prop_assert!((metric - metric_rot).abs() < 1e-9);

        // so are torus translations, under the periodic convention
        let translated: Vec<Complex64> =
            (0..side).map(|x| u[(x + shift) % side]).collect();
        let metric_shift =
            deloc_metric(&translated, ell, &torus, DistanceConvention::Periodic).unwrap();
        prop_assert!((metric - metric_shift).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    // ── sampled resolvents ──

    #[test]
    fn sampled_resolvents_satisfy_exact_identities(
        side in 16usize..=40,
        w in 2usize..=5,
        e in -1.0f64..1.0,
        eta in 0.05f64..1.0,
        seed in 0u64..10_000,
        dist in entry_distribution(),
    ) {
        let model = BandModel::build(
            1,
            side,
            w,
            ProfileSpec::new(ProfileKind::GaussianDensity),
            dist,
        )
        .unwrap();
        let sample = model.sample(seed);
        let bundle = resolvent(&sample, Complex64::new(e, eta)).unwrap();
        prop_assert!(bundle.ward_residual() < 1e-9, "ward {}", bundle.ward_residual());
        prop_assert!(
            bundle.solve_residual() < 1e-10 * model.n() as f64,
            "solve {}",
            bundle.solve_residual()
        );
        // trace of the imaginary part is positive (spectral measure)
        let tr_im: f64 = bundle.g_diag().iter().map(|g| g.im).sum();
        prop_assert!(tr_im > 0.0);
    }
}
