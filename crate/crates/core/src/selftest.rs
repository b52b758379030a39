//! Runtime invariant suite behind the `selftest` command. Every check uses an
//! independent oracle (finite differences, coordinate descent, closed forms,
//! Richardson extrapolation) rather than the code path it tests.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::certificate::{
    compute_constants, eta_star, evaluate_bound, gain_bound, BoundInputs, Certificate, PlantNorms,
    RestartPolicy,
};
use crate::cost::{
    check_pl, quadratic_basis, smoothness_constants, BasisSet, LinearBasis, LogCoshBasis,
    OptimizerOracle,
};
use crate::error::Result;
use crate::experiment::{exact_config, fig2a_config, run_experiment};
use crate::learning::{
    fit_lasso, fit_ls, fit_ridge, rls_init, rls_update, Dataset, EvaluationRecord,
};
use crate::linalg::max_abs;
use crate::plant::{lyapunov_residual, LyapunovCertificate};
use crate::presets::benchmark4;
use crate::sim::{ClosedLoop, DisturbanceSignal};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn randn(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Max relative error of the analytic Jacobian against central differences.
pub fn jacobian_fd_error(basis: &dyn BasisSet, u: &DVector<f64>) -> f64 {
    let jac = basis.jacobian(u);
    let step = 1e-6;
    let mut worst = 0.0f64;
    for j in 0..basis.input_dim() {
        let mut up = u.clone();
        let mut dn = u.clone();
        up[j] += step;
        dn[j] -= step;
        let col = (basis.eval(&up) - basis.eval(&dn)) / (2.0 * step);
        let diff = (&col - jac.column(j)).norm();
        worst = worst.max(diff / jac.column(j).norm().max(1.0));
    }
    worst
}

/// Coordinate descent on `½‖Φ − Bα‖² + λ‖α‖₁`.
pub fn lasso_coordinate_descent(b: &DMatrix<f64>, phi: &DVector<f64>, lambda: f64) -> DVector<f64> {
    let n = b.ncols();
    let mut alpha = DVector::zeros(n);
    for _ in 0..10_000 {
        let mut change = 0.0f64;
        for j in 0..n {
            let col = b.column(j);
            let resid = phi - b * &alpha + col * alpha[j];
            let rho = col.dot(&resid);
            let new = (rho.abs() - lambda).max(0.0) * rho.signum() / col.norm_squared();
            change = change.max((new - alpha[j]).abs());
            alpha[j] = new;
        }
        if change < 1e-15 {
            break;
        }
    }
    alpha
}

fn dataset_from(
    basis: Arc<dyn BasisSet>,
    points: &[DVector<f64>],
    values: &[f64],
) -> Result<Dataset> {
    let mut d = Dataset::new(basis);
    for (p, v) in points.iter().zip(values) {
        d.push(EvaluationRecord::new(0.0, p.clone(), *v)?)?;
    }
    Ok(d)
}

fn lyapunov_check() -> Check {
    match LyapunovCertificate::solve(&benchmark4::a(), &benchmark4::q()) {
        Ok(c) => {
            let r = lyapunov_residual(&benchmark4::a(), &c.p, &c.q);
            check(
                "lyapunov residual",
                r < 1e-9 && c.lambda_min_p > 0.0,
                format!("residual {r:.2e}"),
            )
        }
        Err(e) => check("lyapunov residual", false, e.to_string()),
    }
}

fn jacobian_check(rng: &mut ChaCha8Rng) -> Check {
    let q4 = quadratic_basis(4).expect("m > 0");
    let lc = LogCoshBasis::new(4).expect("m > 0");
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let u = DVector::from_fn(4, |_, _| rng.sample::<f64, _>(StandardNormal));
        worst = worst
            .max(jacobian_fd_error(&q4, &u))
            .max(jacobian_fd_error(&lc, &u));
    }
    check(
        "basis jacobians vs finite differences",
        worst <= 1e-5,
        format!("max rel err {worst:.2e}"),
    )
}

fn gain_identity_check(rng: &mut ChaCha8Rng) -> Check {
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let s: f64 = rng.random_range(0.01..0.99);
        let lq: f64 = rng.random_range(0.1..10.0);
        let pab: f64 = rng.random_range(0.1..10.0);
        let ly: f64 = rng.random_range(0.1..10.0);
        let g: f64 = rng.random_range(0.1..10.0);
        let c: f64 = rng.random_range(0.1..10.0);
        let a = gain_bound(s, lq, pab, ly, g, c).expect("valid inputs");
        let b = eta_star(1.0 - s, (1.0 - s) * lq, ly * g * c, 2.0 * pab);
        worst = worst.max((a - b).abs() / b.abs());
    }
    check(
        "gain bound identity",
        worst <= 1e-12,
        format!("max rel err {worst:.2e}"),
    )
}

fn unit_certificate() -> Certificate {
    let norms = PlantNorms {
        pa_inv_b: 0.5,
        pt_a_inv_e: 0.5,
        c_norm: 1.0,
        lambda_min_p: 0.5,
        lambda_max_p: 0.5,
        lambda_min_q: 1.0,
    };
    let smooth =
        crate::cost::SmoothnessConstants::user(1.0, 1.0, 0.0, 0.0, 1.0, 1.0).expect("valid");
    compute_constants(&norms, &smooth, 0.05, 0.5).expect("valid")
}

fn bound_closed_form_check() -> Check {
    let cert = unit_certificate();
    let n = 2001;
    let h = 0.01;
    let dbar = 0.3;
    let inp = BoundInputs {
        t: (0..n).map(|i| i as f64 * h).collect(),
        z: vec![1.0; n],
        restart: vec![false; n],
        alpha_err: vec![0.0; n],
        rho_err: vec![0.0; n],
        delta: vec![dbar; n],
        w_dot: vec![0.0; n],
    };
    let b = match evaluate_bound(&inp, &cert, RestartPolicy::PerArrival) {
        Ok(b) => b,
        Err(e) => return check("bound recursion vs closed form", false, e.to_string()),
    };
    let a = cert.c0;
    let worst = inp
        .t
        .iter()
        .zip(&b.values)
        .map(|(&t, v)| {
            let decay = (-0.5 * a * t).exp();
            let exact = cert.kappa1 * decay + 2.0 * cert.kappa2 / a * dbar * (1.0 - decay);
            (v.unwrap_or(f64::NAN) - exact).abs()
        })
        .fold(0.0, f64::max);
    check(
        "bound recursion vs closed form",
        worst <= 1e-8,
        format!("max abs err {worst:.2e}"),
    )
}

fn estimator_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut out = Vec::new();
    // LS exact recovery on the benchmark quadratic.
    let qb: Arc<dyn BasisSet> = Arc::new(quadratic_basis(4).expect("m > 0"));
    let alpha = crate::cost::pack_quadratic(
        &crate::cost::QuadraticCost::new(
            benchmark4::upsilon(),
            benchmark4::upsilon_lin(),
            benchmark4::R,
        )
        .expect("preset"),
    )
    .expect("preset");
    let pts: Vec<DVector<f64>> = (0..30)
        .map(|_| DVector::from_fn(4, |_, _| rng.sample(StandardNormal)))
        .collect();
    let vals: Vec<f64> = pts.iter().map(|p| qb.eval(p).dot(&alpha)).collect();
    let ls_err = dataset_from(qb.clone(), &pts, &vals)
        .and_then(|d| fit_ls(&d))
        .map(|f| (f.alpha - &alpha).norm())
        .unwrap_or(f64::INFINITY);
    out.push(check(
        "least squares recovery",
        ls_err <= 1e-8,
        format!("error {ls_err:.2e}"),
    ));

    // Ridge first-order condition.
    let lambda = 0.3;
    let foc = dataset_from(qb.clone(), &pts[..10], &vals[..10])
        .and_then(|d| {
            let a = fit_ridge(&d, lambda)?;
            let b = d.regression_matrix();
            Ok((b.tr_mul(&(&b * &a - d.targets())) + &a * lambda).amax())
        })
        .unwrap_or(f64::INFINITY);
    out.push(check(
        "ridge first-order condition",
        foc <= 1e-10,
        format!("residual {foc:.2e}"),
    ));

    // Lasso closed form vs coordinate descent on an orthonormal design.
    let lin: Arc<dyn BasisSet> = Arc::new(LinearBasis::new(5).expect("m > 0"));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let qmat = randn(rng, 5, 5).qr().q();
        let phi = DVector::from_fn(5, |_, _| rng.sample::<f64, _>(StandardNormal));
        let rows: Vec<DVector<f64>> = (0..5).map(|i| qmat.row(i).transpose()).collect();
        let lam: f64 = rng.random_range(0.0..1.0);
        let err = dataset_from(lin.clone(), &rows, phi.as_slice())
            .and_then(|d| fit_lasso(&d, lam))
            .map(|a| (a - lasso_coordinate_descent(&qmat, &phi, lam)).amax())
            .unwrap_or(f64::INFINITY);
        worst = worst.max(err);
    }
    out.push(check(
        "lasso vs coordinate descent",
        worst <= 1e-8,
        format!("max err {worst:.2e}"),
    ));

    // RLS against batch LS after a full-rank pass.
    let rls_err = (|| -> Result<f64> {
        let mut st = rls_init(DVector::zeros(qb.len()), 1e8)?;
        for (p, v) in pts.iter().zip(&vals) {
            st = rls_update(
                &st,
                &EvaluationRecord::new(0.0, p.clone(), *v)?,
                qb.as_ref(),
            )?;
        }
        let ls = fit_ls(&dataset_from(qb.clone(), &pts, &vals)?)?.alpha;
        Ok((st.alpha - ls).norm())
    })()
    .unwrap_or(f64::INFINITY);
    out.push(check(
        "rls vs batch least squares",
        rls_err <= 1e-4,
        format!("error {rls_err:.2e}"),
    ));
    out
}

fn pl_check(rng: &mut ChaCha8Rng) -> Check {
    let built = match exact_config().build() {
        Ok(b) => b,
        Err(e) => return check("PL inequality", false, e.to_string()),
    };
    let consts = match smoothness_constants(&built.cost) {
        Ok(c) => c,
        Err(e) => return check("PL inequality", false, e.to_string()),
    };
    let w = built.disturbance.eval(0.0);
    let mut fails = 0;
    for _ in 0..1000 {
        let u = DVector::from_fn(4, |_, _| 3.0 * rng.sample::<f64, _>(StandardNormal));
        if !check_pl(&built.cost, &consts, &w, &u, 1e-9).unwrap_or(false) {
            fails += 1;
        }
    }
    check(
        "PL inequality",
        fails == 0,
        format!("{fails} of 1000 points fail"),
    )
}

/// Endpoint error ratio `‖y_h − y_{h/2}‖ / ‖y_{h/2} − y_{h/4}‖` of RK4 on the
/// benchmark closed loop with exact parameters.
pub fn rk4_richardson_ratio(h: f64, horizon: f64) -> Result<f64> {
    let built = exact_config().build()?;
    let oracle = OptimizerOracle::new(&built.cost)?;
    let cost = oracle.cost();
    let d = DisturbanceSignal::Sinusoidal {
        offset: built.disturbance.eval(0.0),
        amplitude: DVector::from_element(4, 0.3),
        omega: 1.0,
        phase: 0.0,
    };
    let cl = ClosedLoop {
        plant: &built.plant,
        g: &cost.g,
        phi_basis: cost.phi.basis.as_ref(),
        psi_basis: cost.psi.basis.as_ref(),
        alpha_hat: &cost.phi.coeffs,
        rho_hat: &cost.psi.coeffs,
        eta: built.sim.eta,
        disturbance: &d,
    };
    let run = |h: f64| -> Result<DVector<f64>> {
        let steps = (horizon / h).round() as usize;
        let mut s = DVector::from_element(8, 1.0);
        for i in 0..steps {
            s = cl.step(i as f64 * h, &s, h)?;
        }
        Ok(s)
    };
    let (a, b, c) = (run(h)?, run(h / 2.0)?, run(h / 4.0)?);
    Ok((&a - &b).norm() / (&b - &c).norm())
}

fn rk4_check() -> Check {
    match rk4_richardson_ratio(0.1, 4.0) {
        Ok(r) => check(
            "rk4 order (Richardson ratio)",
            (12.0..=20.0).contains(&r),
            format!("ratio {r:.3}"),
        ),
        Err(e) => check("rk4 order (Richardson ratio)", false, e.to_string()),
    }
}

fn determinism_check() -> Check {
    let mut cfg = fig2a_config();
    cfg.simulation.horizon = 10.0;
    let once = || run_experiment(&cfg, None).and_then(|r| r.csv_bytes());
    match (once(), once()) {
        (Ok(a), Ok(b)) => check(
            "determinism (byte-identical CSV)",
            a == b,
            format!("{} bytes", a.len()),
        ),
        (Err(e), _) | (_, Err(e)) => {
            check("determinism (byte-identical CSV)", false, e.to_string())
        }
    }
}

fn steady_state_check() -> Check {
    let a = benchmark4::a();
    let a_inv = a
        .clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::zeros(4, 4));
    let b = benchmark4::identity();
    let r = max_abs(&(&a * (-(&a_inv * &b)) + &b));
    check(
        "steady-state map identity",
        r <= 1e-10,
        format!("residual {r:.2e}"),
    )
}

/// Runs every check with a fixed seed.
pub fn run_selftest() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = vec![
        lyapunov_check(),
        steady_state_check(),
        jacobian_check(&mut rng),
        gain_identity_check(&mut rng),
        bound_closed_form_check(),
    ];
    out.extend(estimator_checks(&mut rng));
    out.push(pl_check(&mut rng));
    out.push(rk4_check());
    out.push(determinism_check());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_descent_on_identity_is_soft_threshold() {
        let b = DMatrix::identity(2, 2);
        let a = lasso_coordinate_descent(&b, &DVector::from_row_slice(&[2.0, -0.3]), 0.5);
        assert!((a - DVector::from_row_slice(&[1.5, 0.0])).amax() < 1e-15);
    }

    #[test]
    fn fd_catches_a_wrong_jacobian() {
        #[derive(Debug)]
        struct Wrong;
        impl BasisSet for Wrong {
            fn input_dim(&self) -> usize {
                1
            }
            fn len(&self) -> usize {
                1
            }
            fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
                u.map(|x| x * x)
            }
            fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
                DMatrix::from_element(1, 1, u[0])
            }
        }
        assert!(jacobian_fd_error(&Wrong, &DVector::from_element(1, 1.0)) > 0.1);
    }
}
