//! Property suites over randomized instances: quadrature-level inequalities,
//! solver-path equivalences, fit symmetries, and serialization identities.

use proptest::prelude::*;

use pfr_core::diagnostics::{effective_dimension, SpectrumView};
use pfr_core::filters::{filter_value, residual_value, FilterSpec};
use pfr_core::funcdata::{gram, l2_inner, l2_norm, Curve, Grid};
use pfr_core::groundtruth::{cosine_projection, model_truth_error, TruthSpec};
use pfr_core::linalg::{sym_eigen, Mat};
use pfr_core::simulate::{draw_process, make_dataset, NoiseSpec, ProcessSpec};
use pfr_core::solver::{
    fit_iterated, fit_spectral, fit_tikhonov_direct, fit_tikhonov_reduced, load_model, predict,
    save_model, training_residual,
};

/// A small grid keeps each case cheap without losing quadrature exactness
/// for frequencies up to 10.
fn test_grid() -> Grid {
    Grid::new(0.0, 2.0 * std::f64::consts::PI, 256).unwrap()
}

fn curves(seed: u64, n: usize, bound: f64) -> Vec<Curve> {
    let process = ProcessSpec::new(5, bound, test_grid()).unwrap();
    draw_process(&process, n, seed).unwrap().0
}

fn responses(seed: u64, curves: &[Curve]) -> Vec<f64> {
    // bounded responses tied to the curves through the standard target
    let truth = TruthSpec::standard_quadratic();
    curves
        .iter()
        .map(|c| pfr_core::groundtruth::response_from_truth(&truth, c))
        .collect()
}

/// Relative disagreement between two (b0, b) coefficient sets.
fn coeff_gap(a: (f64, &[f64]), b: (f64, &[f64])) -> f64 {
    let scale = 1.0
        + b.1
            .iter()
            .chain(std::iter::once(&b.0))
            .fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut worst: f64 = (a.0 - b.0).abs();
    for (x, y) in a.1.iter().zip(b.1) {
        worst = worst.max((x - y).abs());
    }
    worst / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cauchy_schwarz_holds(seed in 0u64..1000, n in 2usize..5) {
        let cs = curves(seed, n, 1.0);
        for a in &cs {
            for b in &cs {
                let inner = l2_inner(a, b).unwrap().abs();
                let bound = l2_norm(a) * l2_norm(b);
                prop_assert!(inner <= bound * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn gram_is_bitwise_symmetric_and_psd(seed in 0u64..1000, n in 1usize..7) {
        let cs = curves(seed, n, 1.0);
        let g = gram(&cs).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(g.get(i, j).to_bits(), g.get(j, i).to_bits());
            }
        }
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = g.get(i, j);
            }
        }
        let eig = sym_eigen(&m).unwrap();
        let max = eig.values.first().copied().unwrap_or(0.0);
        let min = eig.values.last().copied().unwrap_or(0.0);
        prop_assert!(min >= -1e-8 * max.max(1e-300));
    }

    #[test]
    fn fit_paths_agree(seed in 0u64..500, n in 1usize..8, p in 1u32..4, lam_idx in 0usize..3) {
        let lambda = [1e-1, 1e-3, 1e-6][lam_idx];
        let cs = curves(seed, n, 0.6);
        let ys = responses(seed, &cs);
        let direct = fit_tikhonov_direct(&cs, &ys, lambda, p).unwrap();
        let reduced = fit_tikhonov_reduced(&cs, &ys, lambda, p).unwrap();
        let spectral = fit_spectral(&cs, &ys, &FilterSpec::tikhonov(lambda), p).unwrap();
        let d = (direct.model.intercept(), direct.model.coefficients());
        prop_assert!(coeff_gap((reduced.model.intercept(), reduced.model.coefficients()), d) < 1e-8);
        prop_assert!(coeff_gap((spectral.model.intercept(), spectral.model.coefficients()), d) < 1e-8);
        // intercept identity in the direct solve
        let sum_b: f64 = direct.model.coefficients().iter().sum();
        prop_assert!((direct.model.intercept() - sum_b).abs() <= 1e-8 * (1.0 + direct.model.intercept().abs()));
    }

    #[test]
    fn permutation_equivariance(seed in 0u64..500, n in 2usize..7, shift in 1usize..6) {
        let lambda = 1e-1;
        let cs = curves(seed, n, 1.0);
        let ys = responses(seed, &cs);
        let base = fit_tikhonov_reduced(&cs, &ys, lambda, 2).unwrap();
        let shift = shift % n;
        let perm_cs: Vec<Curve> = (0..n).map(|i| cs[(i + shift) % n].clone()).collect();
        let perm_ys: Vec<f64> = (0..n).map(|i| ys[(i + shift) % n]).collect();
        let permuted = fit_tikhonov_reduced(&perm_cs, &perm_ys, lambda, 2).unwrap();
        prop_assert!((base.model.intercept() - permuted.model.intercept()).abs() < 1e-12);
        for i in 0..n {
            let a = base.model.coefficients()[(i + shift) % n];
            let b = permuted.model.coefficients()[i];
            prop_assert!((a - b).abs() < 1e-12);
        }
        let probe = test_grid().sample(|t| 0.4 * t.cos() - 0.1 * (3.0 * t).cos());
        let pa = predict(&base.model, &probe).unwrap();
        let pb = predict(&permuted.model, &probe).unwrap();
        prop_assert!((pa - pb).abs() < 1e-12 * (1.0 + pa.abs()));
    }

    #[test]
    fn training_residual_monotone_in_lambda(seed in 0u64..500, n in 2usize..7) {
        let cs = curves(seed, n, 1.0);
        let ys = responses(seed, &cs);
        let mut prev = -1.0;
        for lambda in [1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0] {
            let rep = fit_tikhonov_reduced(&cs, &ys, lambda, 2).unwrap();
            let res = training_residual(&rep.model, &ys).unwrap();
            prop_assert!(res >= prev - 1e-12 * (1.0 + res.abs()), "residual {res} fell below {prev} at lambda {lambda}");
            prev = res;
        }
    }

    #[test]
    fn iterated_residual_shrinks_with_q(seed in 0u64..500, n in 2usize..7) {
        let cs = curves(seed, n, 1.0);
        let ys = responses(seed, &cs);
        let mut prev = f64::INFINITY;
        for q in 1..=5 {
            let rep = fit_iterated(&cs, &ys, 1e-2, 2, q).unwrap();
            let res = training_residual(&rep.model, &ys).unwrap();
            prop_assert!(res <= prev + 1e-12, "residual grew from {prev} to {res} at q = {q}");
            prev = res;
        }
    }

    #[test]
    fn iterated_recurrence_matches_closed_form_filter(
        seed in 0u64..500,
        n in 2usize..8,
        p in 1u32..3,
        lam_idx in 0usize..3,
        q in 1u32..6,
    ) {
        let lambda = [1e-1, 1e-2, 1e-3][lam_idx];
        let cs = curves(seed, n, 1.0);
        let ys = responses(seed, &cs);
        let rec = fit_iterated(&cs, &ys, lambda, p, q).unwrap();
        let spec = fit_spectral(&cs, &ys, &FilterSpec::iterated_tikhonov(lambda, q), p).unwrap();
        let gap = coeff_gap(
            (rec.model.intercept(), rec.model.coefficients()),
            (spec.model.intercept(), spec.model.coefficients()),
        );
        prop_assert!(gap < 1e-10, "recurrence vs filter gap {gap}");
    }

    #[test]
    fn filter_identity_residual_plus_sigma_g(lam_exp in -6.0f64..0.0, sigma_exp in -12.0f64..1.0, q in 1u32..8) {
        let lambda = 10f64.powf(lam_exp);
        let sigma = 10f64.powf(sigma_exp);
        for spec in [FilterSpec::tikhonov(lambda), FilterSpec::iterated_tikhonov(lambda, q), FilterSpec::tsvd(lambda)] {
            let g = filter_value(&spec, sigma).unwrap();
            let r = residual_value(&spec, sigma).unwrap();
            prop_assert!((r + sigma * g - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn model_save_load_roundtrip(seed in 0u64..500, n in 1usize..6) {
        let cs = curves(seed, n, 1.0);
        let ys = responses(seed, &cs);
        let rep = fit_iterated(&cs, &ys, 1e-3, 2, 4).unwrap();
        let back = load_model(&save_model(&rep.model)).unwrap();
        prop_assert_eq!(back.intercept().to_bits(), rep.model.intercept().to_bits());
        for (a, b) in back.coefficients().iter().zip(rep.model.coefficients()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        let probe = test_grid().sample(|t| 0.2 + 0.3 * (2.0 * t).cos());
        let pa = predict(&rep.model, &probe).unwrap();
        let pb = predict(&back, &probe).unwrap();
        prop_assert!((pa - pb).abs() <= 1e-15 * (1.0 + pa.abs()));
    }

    #[test]
    fn truth_error_permutation_invariant_and_bounded_below(seed in 0u64..500, n in 2usize..6) {
        let cs = curves(seed, n, 1.0);
        let ys = responses(seed, &cs);
        let truth = TruthSpec::standard_quadratic();
        let rep = fit_tikhonov_reduced(&cs, &ys, 1e-2, 2).unwrap();
        let err = model_truth_error(&rep.model, &truth).unwrap();
        // degree-0 gap alone is a lower bound
        prop_assert!(err >= (rep.model.intercept() - 2.0).abs() - 1e-12);
        // joint permutation leaves the error unchanged
        let shift = 1;
        let perm_cs: Vec<Curve> = (0..n).map(|i| cs[(i + shift) % n].clone()).collect();
        let perm_ys: Vec<f64> = (0..n).map(|i| ys[(i + shift) % n]).collect();
        let perm = fit_tikhonov_reduced(&perm_cs, &perm_ys, 1e-2, 2).unwrap();
        let perm_err = model_truth_error(&perm.model, &truth).unwrap();
        prop_assert!((err - perm_err).abs() <= 1e-12 * (1.0 + err));
    }

    #[test]
    fn cosine_projection_linear_in_coefficients(seed in 0u64..500, n in 1usize..5) {
        let cs = curves(seed, n, 1.0);
        let grid = cs[0].grid();
        let make = |b: &[f64]| {
            let b0: f64 = b.iter().sum();
            let file = serde_json::json!({
                "version": 1,
                "p": 2,
                "filter": {"scheme": "tikhonov", "lambda": 1e-3, "iterations": 1},
                "b0": b0,
                "b": b,
                "grid": grid,
                "curves": cs.iter().map(|c| c.values().to_vec()).collect::<Vec<_>>(),
            });
            load_model(file.to_string().as_bytes()).unwrap()
        };
        let b1: Vec<f64> = (0..n).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        let b2: Vec<f64> = (0..n).map(|i| -0.2 * (i as f64) + 0.05).collect();
        let sum: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| a + b).collect();
        for freqs in [[1u32, 1], [2, 2], [2, 3]] {
            let pa = cosine_projection(&make(&b1), 2, &freqs).unwrap();
            let pb = cosine_projection(&make(&b2), 2, &freqs).unwrap();
            let ps = cosine_projection(&make(&sum), 2, &freqs).unwrap();
            prop_assert!((pa + pb - ps).abs() <= 1e-10 * (1.0 + ps.abs()));
        }
    }

    #[test]
    fn effective_dimension_monotonicity(seed in 0u64..500, n in 2usize..8) {
        let cs = curves(seed, n, 1.0);
        let g = gram(&cs).unwrap();
        let view = SpectrumView::from_gram(&g, 2, None).unwrap();
        let positive = view.eigenvalues().iter().filter(|&&v| v > 0.0).count() as f64;
        let mut prev_eff = f64::INFINITY;
        let mut prev_ratio = f64::INFINITY;
        for k in 0..30 {
            let lambda = 1e-8 * 2.5f64.powi(k);
            let eff = effective_dimension(&view, lambda).unwrap();
            prop_assert!(eff <= positive);
            prop_assert!(eff < prev_eff);
            let ratio = eff / lambda;
            prop_assert!(ratio < prev_ratio);
            prev_eff = eff;
            prev_ratio = ratio;
        }
    }
}

#[test]
fn iterated_q1_matches_tikhonov_bitwise_on_probe_grid() {
    // the stable geometric form makes the single-iteration filter literally
    // the Tikhonov filter
    for lam_exp in [-9, -6, -3, -1, 0] {
        let lambda = 10f64.powi(lam_exp);
        let it = FilterSpec::iterated_tikhonov(lambda, 1);
        let tk = FilterSpec::tikhonov(lambda);
        for i in 0..2000 {
            let sigma = 4.0 * 10f64.powf(-15.0 * (1.0 - i as f64 / 1999.0));
            let a = filter_value(&it, sigma).unwrap();
            let b = filter_value(&tk, sigma).unwrap();
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }
}

#[test]
fn curve_csv_roundtrip_via_dataset() {
    let process = ProcessSpec::new(5, 1.0, test_grid()).unwrap();
    let ds = make_dataset(
        &process,
        &TruthSpec::standard_quadratic(),
        &NoiseSpec::none(),
        4,
        99,
    )
    .unwrap();
    let mut buf = Vec::new();
    pfr_core::funcdata::write_curves_csv(&mut buf, &ds.curves).unwrap();
    let back = pfr_core::funcdata::read_curves_csv(&buf[..]).unwrap();
    assert_eq!(ds.curves, back);
}
