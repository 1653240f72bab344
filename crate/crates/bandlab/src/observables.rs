//! Multi-resolvent chain, loop, and diagonal-fluctuation observables.
//!
//! The fluctuation machinery is quantified through contractions of
//! resolvent entries against *admissible weight matrices*: matrices `σ`
//! with `sup|σ_xy| = O(1/W)` and row/column `ℓ¹` norms `O(1)` — the
//! variance profile `S` is the prototype, and the class is closed under
//! sums and products.
//!
//! For weights `σ⁽¹⁾ … σ⁽ⁿ⁾` and anchor sites `a, b, u₁ … uₙ`:
//!
//! ```text
//! Y⁽ⁿ⁾ = Σ_{i₁…iₙ} σ⁽¹⁾_{u₁i₁}···σ⁽ⁿ⁾_{uₙiₙ} G_{ai₁}G_{i₁i₂}···G_{iₙb}   (open chain)
//! Z⁽ⁿ⁾ = Σ_{i₁…iₙ} σ⁽¹⁾_{ai₁}σ⁽²⁾_{bi₂}σ⁽³⁾_{u₃i₃}··· G_{i₁i₂}···G_{iₙi₁}  (loop)
//! X_i  = Σ_j σ_ij (G_jj − m),      X_ij = Σ_k σ_ik G_kj
//! ```
//!
//! Chains fold left-to-right with `n` vector–matrix products, `O(nN²)`.
//! The order-2 loop is a weighted sum over `G ∘ Gᵀ`; the order-3 loop
//! performs one dense matrix product to close the triangle.
//!
//! The natural fluctuation scale against which these are measured is the
//! control parameter `Ψ = (Mη)^{−1/2}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::resolvent::ResolventBundle;
use crate::tolerances::{WEIGHT_CLASS_L1_BOUND, WEIGHT_CLASS_SUP_FACTOR};

// ───────────────────────────── admissible weights ─────────────────────────────

/// Size report for a candidate weight matrix.
#[derive(Debug, Clone, Copy)]
pub struct WeightReport {
    /// Largest entry modulus.
    pub sup_entry: f64,
    /// Largest row `ℓ¹` norm.
    pub max_row_l1: f64,
    /// Largest column `ℓ¹` norm.
    pub max_col_l1: f64,
}

/// Measures a weight matrix without judging it.
pub fn weight_report(sigma: &CMat) -> WeightReport {
    let n = sigma.n();
    let mut sup_entry = 0.0f64;
    let mut row_l1 = vec![0.0f64; n];
    let mut col_l1 = vec![0.0f64; n];
    for x in 0..n {
        for (y, v) in sigma.row(x).iter().enumerate() {
            let a = v.norm();
            sup_entry = sup_entry.max(a);
            row_l1[x] += a;
            col_l1[y] += a;
        }
    }
    WeightReport {
        sup_entry,
        max_row_l1: row_l1.iter().fold(0.0f64, |acc, &v| acc.max(v)),
        max_col_l1: col_l1.iter().fold(0.0f64, |acc, &v| acc.max(v)),
    }
}

/// Checks membership in the admissible class at band width `w`:
/// entries at most `10/W`, row and column `ℓ¹` norms at most `10`.
pub fn check_weight(sigma: &CMat, w: usize) -> Result<WeightReport> {
    if w == 0 {
        return Err(Error::invalid("band width must be positive"));
    }
    let report = weight_report(sigma);
    let sup_cap = WEIGHT_CLASS_SUP_FACTOR / w as f64;
    if report.sup_entry > sup_cap {
        return Err(Error::invalid(format!(
            "weight entry {:.3e} exceeds the admissible cap {:.3e}",
            report.sup_entry, sup_cap
        )));
    }
    if report.max_row_l1 > WEIGHT_CLASS_L1_BOUND || report.max_col_l1 > WEIGHT_CLASS_L1_BOUND {
        return Err(Error::invalid(format!(
            "weight row/col ℓ¹ norms ({:.3}, {:.3}) exceed {}",
            report.max_row_l1, report.max_col_l1, WEIGHT_CLASS_L1_BOUND
        )));
    }
    Ok(report)
}

fn validate_anchor(name: &str, idx: usize, n: usize) -> Result<()> {
    if idx >= n {
        return Err(Error::invalid(format!(
            "anchor {name} = {idx} outside matrix of size {n}"
        )));
    }
    Ok(())
}

// ──────────────────────────────── open chains ─────────────────────────────────

/// Order-`n` open chain `Y⁽ⁿ⁾_{ab;u₁…uₙ}`; `n = sigmas.len()` must lie in
/// `1..=4` and `us` supplies one anchor per weight.
pub fn chain_y(
    bundle: &ResolventBundle,
    sigmas: &[&CMat],
    w: usize,
    a: usize,
    b: usize,
    us: &[usize],
) -> Result<Complex64> {
    let n_sites = bundle.g().n();
    let order = sigmas.len();
    if !(1..=4).contains(&order) {
        return Err(Error::invalid(format!(
            "chain order {order} outside the supported range 1..=4"
        )));
    }
    if us.len() != order {
        return Err(Error::invalid(format!(
            "{order} weights but {} anchors",
            us.len()
        )));
    }
    validate_anchor("a", a, n_sites)?;
    validate_anchor("b", b, n_sites)?;
    for (sigma, &u) in sigmas.iter().zip(us) {
        check_weight(sigma, w)?;
        if sigma.n() != n_sites {
            return Err(Error::DimensionMismatch(
                "weight size does not match the sample".into(),
            ));
        }
        validate_anchor("u", u, n_sites)?;
    }

    let g = bundle.g();
    // fold: v ← row_a(G); then n times v ← (v ∘ σ-row) · G; answer v_b
    let mut v: Vec<Complex64> = g.row(a).to_vec();
    for (sigma, &u) in sigmas.iter().zip(us) {
        let weights = sigma.row(u);
        for (vi, wi) in v.iter_mut().zip(weights) {
            *vi *= wi;
        }
        v = g.vecmat(&v)?;
    }
    Ok(v[b])
}

// ─────────────────────────────────── loops ────────────────────────────────────

/// Order-`n` loop `Z⁽ⁿ⁾_{ab;u₃…uₙ}` for `n = sigmas.len() ∈ {2, 3}`;
/// the first two weights anchor at `a` and `b`, the rest at `us`.
pub fn loop_z(
    bundle: &ResolventBundle,
    sigmas: &[&CMat],
    w: usize,
    a: usize,
    b: usize,
    us: &[usize],
) -> Result<Complex64> {
    let n_sites = bundle.g().n();
    let order = sigmas.len();
    if !(2..=3).contains(&order) {
        return Err(Error::invalid(format!(
            "loop order {order} outside the supported range 2..=3"
        )));
    }
    if us.len() != order - 2 {
        return Err(Error::invalid(format!(
            "loop of order {order} needs {} extra anchors, got {}",
            order - 2,
            us.len()
        )));
    }
    validate_anchor("a", a, n_sites)?;
    validate_anchor("b", b, n_sites)?;
    for sigma in sigmas {
        check_weight(sigma, w)?;
        if sigma.n() != n_sites {
            return Err(Error::DimensionMismatch(
                "weight size does not match the sample".into(),
            ));
        }
    }
    for &u in us {
        validate_anchor("u", u, n_sites)?;
    }

    let g = bundle.g();
    let r = sigmas[0].row(a);
    let s = sigmas[1].row(b);
    if order == 2 {
        // Σ_{ij} r_i s_j G_ij G_ji
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n_sites {
            let gi = g.row(i);
            let mut inner = Complex64::new(0.0, 0.0);
            for j in 0..n_sites {
                inner += s[j] * gi[j] * g.at(j, i);
            }
            acc += r[i] * inner;
        }
        Ok(acc)
    } else {
        // close the triangle: P = G·(t ∘ G), then Σ_{ij} r_i s_j G_ij P_ji
        let t = sigmas[2].row(us[0]);
        let mut tg = g.clone();
        for i in 0..n_sites {
            let ti = t[i];
            for v in tg.row_mut(i) {
                *v *= ti;
            }
        }
        let p = g.mul(&tg)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n_sites {
            let gi = g.row(i);
            let mut inner = Complex64::new(0.0, 0.0);
            for j in 0..n_sites {
                inner += s[j] * gi[j] * p.at(j, i);
            }
            acc += r[i] * inner;
        }
        Ok(acc)
    }
}

// ────────────────────────── diagonal fluctuation stats ────────────────────────

/// The pair of weighted fluctuation statistics derived from one weight:
/// the vector `X_i = Σ_j σ_ij (G_jj − m)` and the matrix `X_ij = (σG)_ij`.
#[derive(Debug, Clone)]
pub struct XStats {
    pub x_vec: Vec<Complex64>,
    pub x_mat: CMat,
}

/// Core computation on an explicit resolvent; exposed so the exact
/// substitution `G = m·I` can be tested deterministically.
pub fn x_stat_from_g(g: &CMat, m: Complex64, sigma: &CMat) -> Result<XStats> {
    if g.n() != sigma.n() {
        return Err(Error::DimensionMismatch(
            "weight size does not match the resolvent".into(),
        ));
    }
    let centred: Vec<Complex64> = g.diag().iter().map(|&d| d - m).collect();
    let x_vec = sigma.matvec(&centred)?;
    let x_mat = sigma.mul(g)?;
    Ok(XStats { x_vec, x_mat })
}

/// Weighted diagonal fluctuations of a sampled resolvent.
pub fn x_stat(bundle: &ResolventBundle, sigma: &CMat, w: usize) -> Result<XStats> {
    check_weight(sigma, w)?;
    x_stat_from_g(bundle.g(), bundle.m(), sigma)
}

/// The fluctuation control scale `Ψ = (Mη)^{−1/2}` at effective bandwidth
/// `M` and spectral distance `η`.
pub fn psi_control(m_eff: f64, eta: f64) -> Result<f64> {
    if m_eff <= 0.0 || eta <= 0.0 {
        return Err(Error::invalid(
            "control scale needs positive bandwidth and spectral distance",
        ));
    }
    Ok(1.0 / (m_eff * eta).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{standard_model_1d, HermitianSample};
    use crate::resolvent::resolvent;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// The dense variance profile of a standard model, as a complex weight.
    fn s_weight(side: usize, w: usize) -> CMat {
        standard_model_1d(side, w).unwrap().s_dense().to_cmat()
    }

    fn zero_sample(n: usize) -> HermitianSample {
        HermitianSample::from_matrix(CMat::zeros(n), 0).unwrap()
    }

    // ── admissible class ──

    #[test]
    fn variance_profile_is_admissible() {
        let sigma = s_weight(64, 8);
        let report = check_weight(&sigma, 8).unwrap();
        assert!(report.sup_entry <= 10.0 / 8.0);
        assert!((report.max_row_l1 - 1.0).abs() < 1e-12, "rows sum to one");
        assert!((report.max_col_l1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn class_closed_under_sum_and_product() {
        let sigma = s_weight(64, 8);
        let product = sigma.mul(&sigma).unwrap();
        check_weight(&product, 8).unwrap();
        let mut sum = sigma.clone();
        for (dst, src) in sum.data_mut().iter_mut().zip(product.data()) {
            *dst = 0.5 * (*dst + src);
        }
        check_weight(&sum, 8).unwrap();
    }

    #[test]
    fn identity_matrix_rejected_at_wide_band() {
        let eye = CMat::from_fn(32, |x, y| if x == y { cx(1.0, 0.0) } else { cx(0.0, 0.0) });
        assert!(check_weight(&eye, 16).is_err(), "unit entries exceed 10/16");
        check_weight(&eye, 8).unwrap();
    }

    #[test]
    fn heavy_rows_rejected() {
        let n = 64;
        let heavy = CMat::from_fn(n, |_, _| cx(0.5, 0.0));
        // entries 0.5 ≤ 10/8 but each row sums to 32
        assert!(check_weight(&heavy, 8).is_err());
    }

    // ── chains ──

    #[test]
    fn free_resolvent_pins_the_chain() {
        // H = 0 ⇒ G = −I/z and every chain index is pinned to a = b
        let side = 16;
        let z = cx(0.3, 0.7);
        let bundle = resolvent(&zero_sample(side), z).unwrap();
        let sigma = s_weight(side, 2);
        let (a, u) = (5usize, 11usize);
        let y = chain_y(&bundle, &[&sigma], 2, a, a, &[u]).unwrap();
        let expect = sigma.at(u, a) / (z * z);
        assert!((y - expect).norm() < 1e-13, "{y} vs {expect}");
        // off-diagonal anchors give exactly zero
        let y_off = chain_y(&bundle, &[&sigma], 2, a, a + 1, &[u]).unwrap();
        assert!(y_off.norm() < 1e-15);
    }

    #[test]
    fn free_resolvent_order_three_chain() {
        let side = 12;
        let z = cx(-0.4, 0.5);
        let bundle = resolvent(&zero_sample(side), z).unwrap();
        let sigma = s_weight(side, 2);
        let (a, us) = (3usize, [1usize, 7, 9]);
        let y = chain_y(&bundle, &[&sigma, &sigma, &sigma], 2, a, a, &us).unwrap();
        let pinned: Complex64 = us.iter().map(|&u| sigma.at(u, a)).product();
        let expect = pinned * (-1.0 / z).powi(4);
        assert!((y - expect).norm() < 1e-14);
    }

    #[test]
    fn chain_matches_literal_double_sum() {
        let side = 12;
        let model = standard_model_1d(side, 2).unwrap();
        let bundle = resolvent(&model.sample(21), cx(0.1, 0.6)).unwrap();
        let sigma = model.s_dense().to_cmat();
        let g = bundle.g();
        let (a, b, us) = (2usize, 9usize, [4usize, 10]);
        let fast = chain_y(&bundle, &[&sigma, &sigma], 2, a, b, &us).unwrap();
        let mut literal = cx(0.0, 0.0);
        for i1 in 0..side {
            for i2 in 0..side {
                literal += sigma.at(us[0], i1)
                    * sigma.at(us[1], i2)
                    * g.at(a, i1)
                    * g.at(i1, i2)
                    * g.at(i2, b);
            }
        }
        assert!((fast - literal).norm() < 1e-12, "{fast} vs {literal}");
    }

    #[test]
    fn chain_rejects_bad_arguments() {
        let side = 8;
        let bundle = resolvent(&zero_sample(side), cx(0.0, 1.0)).unwrap();
        let sigma = s_weight(side, 2);
        assert!(chain_y(&bundle, &[], 2, 0, 0, &[]).is_err(), "order zero");
        assert!(
            chain_y(&bundle, &[&sigma, &sigma, &sigma, &sigma, &sigma], 2, 0, 0, &[0; 5]).is_err(),
            "order five"
        );
        assert!(chain_y(&bundle, &[&sigma], 2, 0, 0, &[]).is_err(), "anchor count");
        assert!(chain_y(&bundle, &[&sigma], 2, 99, 0, &[0]).is_err(), "anchor range");
    }

    // ── loops ──

    #[test]
    fn free_resolvent_order_two_loop_is_weight_product() {
        let side = 16;
        let z = cx(0.2, 0.4);
        let bundle = resolvent(&zero_sample(side), z).unwrap();
        let model = standard_model_1d(side, 2).unwrap();
        let sigma = model.s_dense().to_cmat();
        let tau = sigma.mul(&sigma).unwrap();
        let (a, b) = (3usize, 12usize);
        let zval = loop_z(&bundle, &[&sigma, &tau], 2, a, b, &[]).unwrap();
        // Σ_i σ_ai τ_bi / z²
        let mut expect = cx(0.0, 0.0);
        for i in 0..side {
            expect += sigma.at(a, i) * tau.at(b, i);
        }
        expect /= z * z;
        assert!((zval - expect).norm() < 1e-13);
    }

    #[test]
    fn order_three_loop_matches_literal_triple_sum() {
        let side = 10;
        let model = standard_model_1d(side, 2).unwrap();
        let bundle = resolvent(&model.sample(31), cx(-0.2, 0.5)).unwrap();
        let sigma = model.s_dense().to_cmat();
        let g = bundle.g();
        let (a, b, u) = (1usize, 6usize, 8usize);
        let fast = loop_z(&bundle, &[&sigma, &sigma, &sigma], 2, a, b, &[u]).unwrap();
        let mut literal = cx(0.0, 0.0);
        for i1 in 0..side {
            for i2 in 0..side {
                for i3 in 0..side {
                    literal += sigma.at(a, i1)
                        * sigma.at(b, i2)
                        * sigma.at(u, i3)
                        * g.at(i1, i2)
                        * g.at(i2, i3)
                        * g.at(i3, i1);
                }
            }
        }
        assert!((fast - literal).norm() < 1e-12, "{fast} vs {literal}");
    }

    #[test]
    fn loop_invariant_under_cyclic_relabeling() {
        let side = 12;
        let model = standard_model_1d(side, 2).unwrap();
        let bundle = resolvent(&model.sample(7), cx(0.3, 0.4)).unwrap();
        let s1 = model.s_dense().to_cmat();
        let s2 = s1.mul(&s1).unwrap();
        let s3 = s1.mul(&s2).unwrap();
        let (a, b, u) = (2usize, 7usize, 10usize);
        let direct = loop_z(&bundle, &[&s1, &s2, &s3], 2, a, b, &[u]).unwrap();
        let rotated = loop_z(&bundle, &[&s3, &s1, &s2], 2, u, a, &[b]).unwrap();
        assert!((direct - rotated).norm() < 1e-12);
    }

    #[test]
    fn loop_rejects_bad_orders() {
        let side = 8;
        let bundle = resolvent(&zero_sample(side), cx(0.0, 1.0)).unwrap();
        let sigma = s_weight(side, 2);
        assert!(loop_z(&bundle, &[&sigma], 2, 0, 0, &[]).is_err());
        assert!(loop_z(&bundle, &[&sigma, &sigma, &sigma, &sigma], 2, 0, 0, &[0, 0]).is_err());
        assert!(loop_z(&bundle, &[&sigma, &sigma, &sigma], 2, 0, 0, &[]).is_err(), "missing anchor");
    }

    // ── X statistics ──

    #[test]
    fn deterministic_substitution_annihilates_x() {
        let side = 24;
        let m = cx(0.1, 0.8);
        let g = CMat::from_fn(side, |x, y| if x == y { m } else { cx(0.0, 0.0) });
        let sigma = s_weight(side, 4);
        let stats = x_stat_from_g(&g, m, &sigma).unwrap();
        for v in &stats.x_vec {
            assert!(v.norm() < 1e-15);
        }
        // X_ij = m·σ_ij under the substitution
        for x in 0..side {
            for y in 0..side {
                assert!((stats.x_mat.at(x, y) - m * sigma.at(x, y)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn x_vector_obeys_triangle_bound() {
        let side = 48;
        let model = standard_model_1d(side, 6).unwrap();
        let bundle = resolvent(&model.sample(5), cx(0.0, 0.5)).unwrap();
        let sigma = model.s_dense().to_cmat();
        let stats = x_stat(&bundle, &sigma, 6).unwrap();
        for i in 0..side {
            let row_l1: f64 = sigma.row(i).iter().map(|v| v.norm()).sum();
            assert!(
                stats.x_vec[i].norm() <= row_l1 * bundle.lambda() + 1e-12,
                "row {i}"
            );
        }
    }

    #[test]
    fn x_matrix_is_the_weighted_resolvent() {
        let side = 16;
        let model = standard_model_1d(side, 2).unwrap();
        let bundle = resolvent(&model.sample(9), cx(0.2, 0.3)).unwrap();
        let sigma = model.s_dense().to_cmat();
        let stats = x_stat(&bundle, &sigma, 2).unwrap();
        let g = bundle.g();
        for &(x, y) in &[(0usize, 0usize), (3, 14), (11, 2)] {
            let literal: Complex64 = (0..side).map(|k| sigma.at(x, k) * g.at(k, y)).sum();
            assert!((stats.x_mat.at(x, y) - literal).norm() < 1e-13);
        }
    }

    #[test]
    fn control_scale_matches_hand_value() {
        assert!((psi_control(100.0, 0.01).unwrap() - 1.0).abs() < 1e-15);
        assert!((psi_control(400.0, 1.0).unwrap() - 0.05).abs() < 1e-15);
        assert!(psi_control(0.0, 0.1).is_err());
        assert!(psi_control(10.0, -0.1).is_err());
    }
}
