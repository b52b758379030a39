//! Property tests for the invariants of each module.

mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use common::{constant_forcing_bound, lyapunov_oracle, max_abs_entry, quad_features};
use gradflow::certificate::{
    compute_constants, evaluate_bound, kernel_weights, BoundInputs, PlantNorms, RestartPolicy,
};
use gradflow::config::{dump_config, parse_config};
use gradflow::cost::{
    pack_quadratic, quadratic_basis, unpack_quadratic, BasisSet, SmoothnessConstants,
};
use gradflow::experiment::{preset, PRESET_NAMES};
use gradflow::learning::{
    fit_ls, fit_ridge, rls_init, rls_update, soft_threshold, Dataset, Estimator, EvaluationRecord,
    Learner,
};
use gradflow::plant::{lyapunov_residual, solve_lyapunov};
use gradflow::sim::sample_arrivals;

fn vec_strategy(n: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-3.0f64..3.0, n).prop_map(DVector::from_vec)
}

fn mat_strategy(r: usize, c: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0f64..2.0, r * c).prop_map(move |v| DMatrix::from_vec(r, c, v))
}

fn quad_dataset(points: &[DVector<f64>], values: &[f64]) -> Dataset {
    let basis: Arc<dyn BasisSet> = Arc::new(quadratic_basis(points[0].len()).unwrap());
    let mut d = Dataset::new(basis);
    for (p, v) in points.iter().zip(values) {
        d.push(EvaluationRecord::new(0.0, p.clone(), *v).unwrap())
            .unwrap();
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lyapunov_matches_elimination(m in mat_strategy(4, 4), skew in mat_strategy(4, 4), l in mat_strategy(4, 4)) {
        // A = −(MᵀM + I) + (S − Sᵀ) is Hurwitz; Q = LᵀL + I is SPD.
        let a = -(m.transpose() * &m + DMatrix::identity(4, 4)) + (&skew - skew.transpose());
        let q = l.transpose() * &l + DMatrix::identity(4, 4);
        let p = solve_lyapunov(&a, &q).unwrap();
        let scale = max_abs_entry(&p).max(1.0);
        prop_assert!(lyapunov_residual(&a, &p, &q) <= 1e-9 * scale * max_abs_entry(&a).max(1.0));
        prop_assert!(max_abs_entry(&(&p - lyapunov_oracle(&a, &q))) <= 1e-9 * scale);
        prop_assert!(p.clone().cholesky().is_some());
    }

    #[test]
    fn pack_unpack_round_trip(m in mat_strategy(3, 3), lin in vec_strategy(3), r in -5.0f64..5.0, u in vec_strategy(3)) {
        let ups = &m + m.transpose();
        let q = gradflow::cost::QuadraticCost::new(ups, lin, r).unwrap();
        let alpha = pack_quadratic(&q).unwrap();
        prop_assert_eq!(alpha.len(), quadratic_basis(3).unwrap().len());
        let back = unpack_quadratic(&alpha, 3).unwrap();
        prop_assert!(max_abs_entry(&(&back.upsilon - &q.upsilon)) <= 1e-14);
        // α·b(u) reproduces ½uᵀΥu + υᵀu + r.
        assert_relative_eq!(quad_features(&u).dot(&alpha), q.value(&u), epsilon = 1e-10, max_relative = 1e-12);
    }

    #[test]
    fn ls_min_norm_when_underdetermined(
        pts in prop::collection::vec(vec_strategy(3), 3..9),
        vals in prop::collection::vec(-5.0f64..5.0, 9),
    ) {
        // 10 basis functions, fewer records: the fit interpolates and lies in
        // the row space of B (orthogonal to its null space).
        let vals = &vals[..pts.len()];
        let data = quad_dataset(&pts, vals);
        let fit = fit_ls(&data).unwrap();
        let b = data.regression_matrix();
        let svd = b.clone().svd(true, true);
        let v_t = svd.v_t.unwrap();
        let smax = svd.singular_values.max();
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-12 * smax).count();
        if rank == pts.len() {
            prop_assert!((&b * &fit.alpha - DVector::from_row_slice(vals)).amax() <= 1e-8);
        }
        // Components along right singular vectors beyond the rank vanish.
        let full = b.ncols();
        let mut basis_null = DMatrix::<f64>::identity(full, full);
        let rowspace = v_t.rows(0, rank).transpose();
        basis_null -= &rowspace * rowspace.transpose();
        prop_assert!((basis_null * &fit.alpha).amax() <= 1e-8 * fit.alpha.amax().max(1.0));
    }

    #[test]
    fn ridge_first_order_condition(
        pts in prop::collection::vec(vec_strategy(2), 2..20),
        vals in prop::collection::vec(-5.0f64..5.0, 20),
        lambda in 1e-4f64..100.0,
    ) {
        let vals = &vals[..pts.len()];
        let data = quad_dataset(&pts, vals);
        let a = fit_ridge(&data, lambda).unwrap();
        let b = data.regression_matrix();
        let foc = b.transpose() * (&b * &a - DVector::from_row_slice(vals)) + &a * lambda;
        let scale = (b.transpose() * DVector::from_row_slice(vals)).amax().max(1.0);
        prop_assert!(foc.amax() <= 1e-10 * scale);
    }

    #[test]
    fn soft_threshold_sign_and_magnitude(z in vec_strategy(8), lambda in 0.0f64..4.0) {
        let s = soft_threshold(&z, lambda);
        for (zi, si) in z.iter().zip(s.iter()) {
            prop_assert_eq!(si.abs(), (zi.abs() - lambda).max(0.0));
            prop_assert!(*si == 0.0 || si.signum() == zi.signum());
        }
    }

    #[test]
    fn estimators_are_deterministic(pts in prop::collection::vec(vec_strategy(2), 6..15), seed in any::<u64>()) {
        let vals: Vec<f64> = pts.iter().enumerate().map(|(i, p)| p.norm() + (seed % 7) as f64 + i as f64).collect();
        let basis: Arc<dyn BasisSet> = Arc::new(quadratic_basis(2).unwrap());
        for est in [
            Estimator::Ls,
            Estimator::Ridge { lambda: 0.1 },
            Estimator::Lasso { lambda: 0.01 },
            Estimator::Rls { cov_scale: 1e4 },
        ] {
            let fit = || {
                let mut l = Learner::new(basis.clone(), est).unwrap();
                for (p, v) in pts.iter().zip(&vals) {
                    l.observe(EvaluationRecord::new(0.0, p.clone(), *v).unwrap()).unwrap();
                }
                l.fit().map_err(|e| e.to_string())
            };
            prop_assert_eq!(fit(), fit());
        }
    }

    #[test]
    fn rls_tracks_batch_ls(pts in prop::collection::vec(vec_strategy(2), 12..30)) {
        let vals: Vec<f64> = pts.iter().map(|p| 1.0 + p[0] - 2.0 * p[1] + 0.5 * p[0] * p[1]).collect();
        let data = quad_dataset(&pts, &vals);
        prop_assume!(fit_ls(&data).unwrap().rank == 6);
        let basis = quadratic_basis(2).unwrap();
        let mut st = rls_init(DVector::zeros(6), 1e8).unwrap();
        for (p, v) in pts.iter().zip(&vals) {
            st = rls_update(&st, &EvaluationRecord::new(0.0, p.clone(), *v).unwrap(), &basis).unwrap();
            prop_assert!(st.cov.clone().cholesky().is_some());
        }
        prop_assert!((&st.alpha - fit_ls(&data).unwrap().alpha).amax() <= 1e-3);
    }

    #[test]
    fn certificate_constant_ordering(
        pab in 0.05f64..5.0, pae in 0.05f64..5.0, c in 0.1f64..3.0,
        pmin in 0.05f64..2.0, pspread in 1.0f64..10.0, lq in 0.1f64..5.0,
        lun in 0.5f64..10.0, mu_frac in 0.05f64..1.0, g in 0.1f64..3.0,
        eta_frac in 0.01f64..0.99, s in 0.05f64..0.95,
    ) {
        let norms = PlantNorms {
            pa_inv_b: pab, pt_a_inv_e: pae, c_norm: c,
            lambda_min_p: pmin, lambda_max_p: pmin * pspread, lambda_min_q: lq,
        };
        let smooth = SmoothnessConstants::user(lun, 1.0, 0.0, 0.0, mu_frac * lun, g).unwrap();
        let probe = compute_constants(&norms, &smooth, 1e-3, s).unwrap();
        let cert = compute_constants(&norms, &smooth, eta_frac * probe.eta_max, s).unwrap();
        prop_assert!(cert.gain_ok);
        prop_assert!(cert.c1 <= cert.c2);
        prop_assert!(cert.kappa1 >= 1.0);
        prop_assert!(cert.theta > 0.0 && cert.theta < 1.0);
        prop_assert!(cert.c0 > 0.0 && cert.epsilon_threshold() > 0.0);
    }

    #[test]
    fn kernel_weights_exact_for_linear_forcing(lambda in 1e-6f64..5.0, h in 1e-4f64..0.5, f0 in -2.0f64..2.0, f1 in -2.0f64..2.0) {
        // ∫₀ʰ e^{−λ(h−s)}(f0 + (f1 − f0)s/h) ds by 2000-point Simpson.
        let n = 2000;
        let f = |s: f64| (-lambda * (h - s)).exp() * (f0 + (f1 - f0) * s / h);
        let dx = h / n as f64;
        let simpson: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * f(i as f64 * dx)
            })
            .sum::<f64>() * dx / 3.0;
        let (decay, w0, w1) = kernel_weights(lambda, h);
        assert_relative_eq!(decay, (-lambda * h).exp(), max_relative = 1e-14);
        prop_assert!((w0 * f0 + w1 * f1 - simpson).abs() <= 1e-12 * h.max(1e-3));
    }

    #[test]
    fn bound_monotone_in_forcing(
        deltas in prop::collection::vec(0.0f64..1.0, 50),
        bump in prop::collection::vec(0.0f64..0.5, 50),
        z0 in 0.0f64..3.0,
    ) {
        let norms = PlantNorms {
            pa_inv_b: 0.5, pt_a_inv_e: 0.5, c_norm: 1.0,
            lambda_min_p: 0.5, lambda_max_p: 1.0, lambda_min_q: 1.0,
        };
        let smooth = SmoothnessConstants::user(1.0, 1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        let cert = compute_constants(&norms, &smooth, 0.02, 0.5).unwrap();
        let inputs = |delta: Vec<f64>| BoundInputs {
            t: (0..50).map(|i| i as f64 * 0.1).collect(),
            z: vec![z0; 50],
            restart: vec![false; 50],
            alpha_err: vec![0.0; 50],
            rho_err: vec![0.0; 50],
            delta,
            w_dot: vec![0.0; 50],
        };
        let bigger: Vec<f64> = deltas.iter().zip(&bump).map(|(d, b)| d + b).collect();
        let lo = evaluate_bound(&inputs(deltas), &cert, RestartPolicy::PerArrival).unwrap();
        let hi = evaluate_bound(&inputs(bigger), &cert, RestartPolicy::PerArrival).unwrap();
        for (l, h) in lo.values.iter().zip(&hi.values) {
            prop_assert!(h.unwrap() >= l.unwrap());
        }
        // Constant forcing reduces to the closed form at the last sample.
        let flat = evaluate_bound(&inputs(vec![0.3; 50]), &cert, RestartPolicy::Global).unwrap();
        let want = constant_forcing_bound([cert.kappa1, cert.kappa2, cert.kappa3], cert.c0, z0, 0.3, 0.0, 4.9);
        assert_relative_eq!(flat.values[49].unwrap(), want, max_relative = 1e-10);
    }

    #[test]
    fn arrivals_sorted_and_reproducible(rate in 0.01f64..5.0, horizon in 0.1f64..100.0, seed in any::<u64>()) {
        let a = sample_arrivals(rate, horizon, seed).unwrap();
        prop_assert_eq!(&a, &sample_arrivals(rate, horizon, seed).unwrap());
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(a.iter().all(|&t| t > 0.0 && t < horizon));
    }
}

#[test]
fn presets_survive_dump_and_parse() {
    for name in PRESET_NAMES {
        let cfg = preset(name).unwrap();
        let text = dump_config(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg, "{name}");
    }
}
