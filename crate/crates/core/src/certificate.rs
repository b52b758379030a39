//! Tracking certificates: gain condition, decay constants, learning-error
//! condition and the error envelope evaluated along a trajectory.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cost::{CompositeCost, SmoothnessConstants};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::plant::{LyapunovCertificate, PlantModel};
use crate::sim::ClosedLoopTrajectory;

pub const DEFAULT_S: f64 = 0.5;

/// Plant quantities entering the constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantNorms {
    /// `‖PA⁻¹B‖`
    pub pa_inv_b: f64,
    /// `‖PᵀA⁻¹E‖`
    pub pt_a_inv_e: f64,
    pub c_norm: f64,
    pub lambda_min_p: f64,
    pub lambda_max_p: f64,
    pub lambda_min_q: f64,
}

impl PlantNorms {
    pub fn new(plant: &PlantModel, lyap: &LyapunovCertificate) -> Self {
        let a_inv = plant.a_inv();
        Self {
            pa_inv_b: spectral_norm(&(&lyap.p * a_inv * &plant.b)),
            pt_a_inv_e: spectral_norm(&(lyap.p.transpose() * a_inv * &plant.e)),
            c_norm: spectral_norm(&plant.c),
            lambda_min_p: lyap.lambda_min_p,
            lambda_max_p: lyap.lambda_max_p,
            lambda_min_q: lyap.lambda_min_q,
        }
    }
}

/// `θ = ℓ_y‖G‖‖C‖ / (ℓ_y‖G‖‖C‖ + 2‖PA⁻¹B‖)`.
pub fn compute_theta(l_y: f64, g_norm: f64, c_norm: f64, pa_inv_b: f64) -> Result<f64> {
    let beta1 = l_y * g_norm * c_norm;
    let beta2 = 2.0 * pa_inv_b;
    if !(beta1 > 0.0) {
        return Err(Error::DegenerateCoupling);
    }
    if !(beta2 > 0.0) {
        return Err(Error::Precondition(format!(
            "‖PA⁻¹B‖ = {pa_inv_b} must be positive"
        )));
    }
    Ok(beta1 / (beta1 + beta2))
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("s = {s} must lie in (0, 1)")));
    }
    Ok(())
}

/// `η_max = (1−s)²λ_min(Q) / ((2−s)·2‖PA⁻¹B‖ℓ_y‖G‖‖C‖)`.
pub fn gain_bound(
    s: f64,
    lambda_min_q: f64,
    pa_inv_b: f64,
    l_y: f64,
    g_norm: f64,
    c_norm: f64,
) -> Result<f64> {
    check_s(s)?;
    let coupling = l_y * g_norm * c_norm;
    if !(coupling > 0.0) {
        return Err(Error::DegenerateCoupling);
    }
    if !(pa_inv_b > 0.0) || !(lambda_min_q > 0.0) {
        return Err(Error::Precondition(
            "‖PA⁻¹B‖ and λ_min(Q) must be positive".into(),
        ));
    }
    Ok((1.0 - s).powi(2) * lambda_min_q / ((2.0 - s) * 2.0 * pa_inv_b * coupling))
}

/// Gain bound from the quadratic-form analysis: `α₁α₂ / (β₁β₂(1 + α₁))`.
pub fn eta_star(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> f64 {
    alpha1 * alpha2 / (beta1 * beta2 * (1.0 + alpha1))
}

/// Strict `0 < η < η_max`.
pub fn check_gain(eta: f64, eta_max: f64) -> bool {
    eta > 0.0 && eta < eta_max
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub s: f64,
    pub eta: f64,
    pub theta: f64,
    pub eta_max: f64,
    pub gain_ok: bool,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub norms: PlantNorms,
    pub smooth: SmoothnessConstants,
}

impl Certificate {
    /// Largest admissible learning error `c₀/c₃`.
    pub fn epsilon_threshold(&self) -> f64 {
        self.c0 / self.c3
    }
}

pub fn compute_constants(
    norms: &PlantNorms,
    smooth: &SmoothnessConstants,
    eta: f64,
    s: f64,
) -> Result<Certificate> {
    check_s(s)?;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Precondition(format!("eta = {eta} must be positive")));
    }
    if !(norms.lambda_min_p > 0.0) || !(norms.lambda_min_q > 0.0) {
        return Err(Error::NotPositiveDefinite("Lyapunov pair (P, Q)".into()));
    }
    let theta = compute_theta(smooth.l_y, smooth.g_norm, norms.c_norm, norms.pa_inv_b)?;
    let eta_max = gain_bound(
        s,
        norms.lambda_min_q,
        norms.pa_inv_b,
        smooth.l_y,
        smooth.g_norm,
        norms.c_norm,
    )?;
    let (mu, l) = (smooth.mu_u, smooth.l);
    let (pmin, pmax) = (norms.lambda_min_p, norms.lambda_max_p);

    let c0 = s * (2.0 * mu * eta).min(norms.lambda_min_q / pmax);
    let c1 = ((1.0 - theta) * mu / (2.0 * eta)).min(theta * pmin / eta);
    let c2 = ((1.0 - theta) * l / (2.0 * eta)).max(theta * pmax / eta);
    let c3 = (2.0 * eta * l / mu).max(4.0 * norms.pa_inv_b / c1);
    let c4 = eta.sqrt() * (l * (2.0 / mu).sqrt()).max(2.0 * norms.pa_inv_b / pmin.sqrt());
    let c5 = 2.0 * norms.pt_a_inv_e / (eta.sqrt() * pmin.sqrt());
    Ok(Certificate {
        s,
        eta,
        theta,
        eta_max,
        gain_ok: check_gain(eta, eta_max),
        c0,
        c1,
        c2,
        c3,
        c4,
        c5,
        kappa1: (c2 / c1).sqrt(),
        kappa2: c4 / (2.0 * c1.sqrt()),
        kappa3: c5 / (2.0 * c1.sqrt()),
        norms: *norms,
        smooth: *smooth,
    })
}

/// Solves the Lyapunov equation and evaluates every constant.
pub fn certify(
    plant: &PlantModel,
    q: &nalgebra::DMatrix<f64>,
    smooth: &SmoothnessConstants,
    eta: f64,
    s: f64,
) -> Result<Certificate> {
    let lyap = LyapunovCertificate::solve(&plant.a, q)?;
    compute_constants(&PlantNorms::new(plant, &lyap), smooth, eta, s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonCheck {
    /// `ε`, or `ε′` when the cost has truncation tails.
    pub epsilon: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// `ε = 0`: exact knowledge, treated with `a = c₀`.
    pub boundary: bool,
    pub truncated: bool,
    pub a: f64,
}

/// `ε = ℓ_u sup‖α−α̂‖ + ℓ_y‖G‖² sup‖ρ−ρ̂‖`, plus `ℓ_uᵉ + ℓ_yᵉ‖G‖²` and the
/// learned-part constants when tails are present.
pub fn epsilon_condition(cert: &Certificate, sup_alpha_err: f64, sup_rho_err: f64) -> EpsilonCheck {
    let sm = &cert.smooth;
    let g2 = sm.g_norm * sm.g_norm;
    let truncated = sm.has_tails();
    let epsilon = if truncated {
        sm.l_u_n * sup_alpha_err + sm.l_y_m * g2 * sup_rho_err + sm.l_u_e + sm.l_y_e * g2
    } else {
        sm.l_u * sup_alpha_err + sm.l_y * g2 * sup_rho_err
    };
    let threshold = cert.epsilon_threshold();
    EpsilonCheck {
        epsilon,
        threshold,
        satisfied: epsilon < threshold,
        boundary: epsilon == 0.0,
        truncated,
        a: cert.c0 - epsilon * cert.c3,
    }
}

/// Per-sample estimation errors `‖α−α̂‖`, `‖ρ−ρ̂‖`.
pub fn estimate_errors(traj: &ClosedLoopTrajectory, cost: &CompositeCost) -> (Vec<f64>, Vec<f64>) {
    traj.samples
        .iter()
        .map(|s| {
            (
                (traj.phi_estimate(s) - &cost.phi.coeffs).norm(),
                (traj.psi_estimate(s) - &cost.psi.coeffs).norm(),
            )
        })
        .unzip()
}

/// `Δ(τ) = ‖∇b(u*)‖‖α−α̂‖ + ‖G‖‖∇d(y*)‖‖ρ−ρ̂‖`, plus
/// `‖∇e_φ(u*)‖ + ‖G‖‖∇e_ψ(y*)‖` when tails are present (the `Ξ` signal).
pub fn delta_signal(traj: &ClosedLoopTrajectory, cost: &CompositeCost) -> Vec<f64> {
    let g_norm = spectral_norm(&cost.g);
    let (ea, er) = estimate_errors(traj, cost);
    traj.samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut d = 0.0;
            if ea[i] > 0.0 {
                d += spectral_norm(&cost.phi.basis.jacobian(&s.u_star)) * ea[i];
            }
            if er[i] > 0.0 {
                d += g_norm * spectral_norm(&cost.psi.basis.jacobian(&s.y_star)) * er[i];
            }
            if cost.phi.tail.is_some() {
                d += cost.phi.tail_gradient(&s.u_star).norm();
            }
            if cost.psi.tail.is_some() {
                d += g_norm * cost.psi.tail_gradient(&s.y_star).norm();
            }
            d
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestartPolicy {
    /// Re-anchor at every arrival with interval-local sup errors.
    #[default]
    PerArrival,
    /// One anchor at `t₀` with running sup errors.
    Global,
}

impl std::str::FromStr for RestartPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-arrival" => Ok(Self::PerArrival),
            "global" => Ok(Self::Global),
            _ => Err(Error::Parse(format!(
                "unknown restart policy '{s}' (per-arrival | global)"
            ))),
        }
    }
}

impl std::fmt::Display for RestartPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::PerArrival => "per-arrival",
            Self::Global => "global",
        })
    }
}

/// Series the envelope is evaluated on, one entry per logged sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    /// Interval starts under the per-arrival policy.
    pub restart: Vec<bool>,
    pub alpha_err: Vec<f64>,
    pub rho_err: Vec<f64>,
    /// `Δ` or `Ξ`.
    pub delta: Vec<f64>,
    pub w_dot: Vec<f64>,
}

impl BoundInputs {
    pub fn from_trajectory(traj: &ClosedLoopTrajectory, cost: &CompositeCost) -> Self {
        let (alpha_err, rho_err) = estimate_errors(traj, cost);
        Self {
            t: traj.times(),
            z: traj.z_norms(),
            restart: traj.samples.iter().map(|s| s.event).collect(),
            alpha_err,
            rho_err,
            delta: delta_signal(traj, cost),
            w_dot: traj.w_dot_norms(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.t.len();
        for (name, len) in [
            ("z", self.z.len()),
            ("restart", self.restart.len()),
            ("alpha_err", self.alpha_err.len()),
            ("rho_err", self.rho_err.len()),
            ("delta", self.delta.len()),
            ("w_dot", self.w_dot.len()),
        ] {
            if len != n {
                return Err(Error::dim(name, n, len));
            }
        }
        if n == 0 {
            return Err(Error::Precondition(
                "bound needs at least one sample".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundInterval {
    pub start_index: usize,
    /// Exclusive.
    pub end_index: usize,
    pub t_start: f64,
    pub epsilon: EpsilonCheck,
    pub valid: bool,
    /// `‖z(t_k)‖`.
    pub anchor: f64,
    /// This interval's envelope continued to the next interval start.
    pub value_at_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTrajectory {
    pub t: Vec<f64>,
    /// Absent where the certificate is invalid.
    pub values: Vec<Option<f64>>,
    pub intervals: Vec<BoundInterval>,
    pub policy: RestartPolicy,
}

impl BoundTrajectory {
    pub fn valid_intervals(&self) -> usize {
        self.intervals.iter().filter(|i| i.valid).count()
    }

    /// First time from which the envelope is defined to the end.
    pub fn certified_from(&self) -> Option<f64> {
        let last_gap = self.values.iter().rposition(Option::is_none);
        match last_gap {
            None => self.t.first().copied(),
            Some(i) if i + 1 < self.t.len() => Some(self.t[i + 1]),
            Some(_) => None,
        }
    }

    /// `max_t (‖z(t)‖ − bound(t))` over samples where the bound is defined.
    pub fn max_violation(&self, z: &[f64]) -> Option<f64> {
        self.values
            .iter()
            .zip(z)
            .filter_map(|(b, z)| b.map(|b| z - b))
            .reduce(f64::max)
    }
}

/// `(e^{−λh}, w₀, w₁)` with `∫₀ʰ e^{−λ(h−s)} f(s) ds = w₀f(0) + w₁f(h)` exactly
/// for linear `f`.
pub fn kernel_weights(lambda: f64, h: f64) -> (f64, f64, f64) {
    let x = lambda * h;
    let decay = (-x).exp();
    if x.abs() < 1.0 {
        // w₁ = hΣ(−x)ʲ/(j+2)!, w₀ = hΣ(−x)ʲ(j+1)/(j+2)!; the closed form
        // cancels to O(x²) here.
        let (mut w0, mut w1) = (0.0, 0.0);
        let mut term = 0.5; // (−x)ʲ/(j+2)!
        for j in 0..30 {
            w1 += term;
            w0 += term * (j + 1) as f64;
            if term.abs() < 1e-18 {
                break;
            }
            term *= -x / (j + 3) as f64;
        }
        return (decay, h * w0, h * w1);
    }
    let phi1 = -(-x).exp_m1() / lambda;
    let w1 = (x - 1.0 + decay) / (lambda * x);
    (decay, phi1 - w1, w1)
}

/// Envelope state `κ₁e^{−λ(t−t_s)}‖z_s‖ + κ₂I_Δ + κ₃I_ẇ` with `λ = a/2`.
#[derive(Debug, Clone, Copy)]
struct Envelope {
    lambda: f64,
    anchor: f64,
    t0: f64,
    i_delta: f64,
    i_wdot: f64,
}

impl Envelope {
    fn new(a: f64, anchor: f64, t0: f64) -> Self {
        Self {
            lambda: 0.5 * a,
            anchor,
            t0,
            i_delta: 0.0,
            i_wdot: 0.0,
        }
    }

    fn advance(&mut self, h: f64, d0: f64, d1: f64, v0: f64, v1: f64) {
        let (decay, w0, w1) = kernel_weights(self.lambda, h);
        self.i_delta = decay * self.i_delta + w0 * d0 + w1 * d1;
        self.i_wdot = decay * self.i_wdot + w0 * v0 + w1 * v1;
    }

    fn value(&self, cert: &Certificate, t: f64) -> f64 {
        cert.kappa1 * (-self.lambda * (t - self.t0)).exp() * self.anchor
            + cert.kappa2 * self.i_delta
            + cert.kappa3 * self.i_wdot
    }
}

fn interval_valid(cert: &Certificate, eps: &EpsilonCheck) -> bool {
    cert.gain_ok && eps.satisfied && eps.a > 0.0
}

pub fn evaluate_bound(
    inputs: &BoundInputs,
    cert: &Certificate,
    policy: RestartPolicy,
) -> Result<BoundTrajectory> {
    inputs.validate()?;
    match policy {
        RestartPolicy::PerArrival => Ok(per_arrival(inputs, cert)),
        RestartPolicy::Global => Ok(global(inputs, cert)),
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

#[allow(clippy::needless_range_loop)]
fn per_arrival(inp: &BoundInputs, cert: &Certificate) -> BoundTrajectory {
    let n = inp.t.len();
    let mut starts: Vec<usize> = std::iter::once(0)
        .chain((1..n).filter(|&i| inp.restart[i]))
        .collect();
    starts.dedup();
    let mut values = vec![None; n];
    let mut intervals = Vec::with_capacity(starts.len());
    for (k, &s) in starts.iter().enumerate() {
        let e = starts.get(k + 1).copied().unwrap_or(n);
        let eps = epsilon_condition(cert, sup(&inp.alpha_err[s..e]), sup(&inp.rho_err[s..e]));
        let valid = interval_valid(cert, &eps);
        let mut value_at_end = None;
        if valid {
            let mut env = Envelope::new(eps.a, inp.z[s], inp.t[s]);
            values[s] = Some(env.value(cert, inp.t[s]));
            for i in s + 1..e {
                env.advance(
                    inp.t[i] - inp.t[i - 1],
                    inp.delta[i - 1],
                    inp.delta[i],
                    inp.w_dot[i - 1],
                    inp.w_dot[i],
                );
                values[i] = Some(env.value(cert, inp.t[i]));
            }
            if e < n {
                // Left limit at the next arrival: the old estimate still acts.
                env.advance(
                    inp.t[e] - inp.t[e - 1],
                    inp.delta[e - 1],
                    inp.delta[e - 1],
                    inp.w_dot[e - 1],
                    inp.w_dot[e],
                );
                value_at_end = Some(env.value(cert, inp.t[e]));
            }
        }
        intervals.push(BoundInterval {
            start_index: s,
            end_index: e,
            t_start: inp.t[s],
            epsilon: eps,
            valid,
            anchor: inp.z[s],
            value_at_end,
        });
    }
    BoundTrajectory {
        t: inp.t.clone(),
        values,
        intervals,
        policy: RestartPolicy::PerArrival,
    }
}

#[allow(clippy::needless_range_loop)]
fn global(inp: &BoundInputs, cert: &Certificate) -> BoundTrajectory {
    let n = inp.t.len();
    let mut values = vec![None; n];
    let (mut sa, mut sr) = (0.0f64, 0.0f64);
    let mut env: Option<Envelope> = None;
    let mut last_eps = epsilon_condition(cert, 0.0, 0.0);
    for i in 0..n {
        sa = sa.max(inp.alpha_err[i]);
        sr = sr.max(inp.rho_err[i]);
        let eps = epsilon_condition(cert, sa, sr);
        last_eps = eps;
        if !interval_valid(cert, &eps) {
            // The running sup never decreases: invalid from here on.
            break;
        }
        let same_rate = env.as_ref().is_some_and(|e| e.lambda == 0.5 * eps.a);
        if same_rate {
            let e = env.as_mut().expect("checked");
            e.advance(
                inp.t[i] - inp.t[i - 1],
                inp.delta[i - 1],
                inp.delta[i],
                inp.w_dot[i - 1],
                inp.w_dot[i],
            );
        } else {
            let mut e = Envelope::new(eps.a, inp.z[0], inp.t[0]);
            for j in 1..=i {
                e.advance(
                    inp.t[j] - inp.t[j - 1],
                    inp.delta[j - 1],
                    inp.delta[j],
                    inp.w_dot[j - 1],
                    inp.w_dot[j],
                );
            }
            env = Some(e);
        }
        values[i] = Some(env.as_ref().expect("set").value(cert, inp.t[i]));
    }
    let valid = values[0].is_some();
    BoundTrajectory {
        t: inp.t.clone(),
        values,
        intervals: vec![BoundInterval {
            start_index: 0,
            end_index: n,
            t_start: inp.t[0],
            epsilon: last_eps,
            valid,
            anchor: inp.z[0],
            value_at_end: None,
        }],
        policy: RestartPolicy::Global,
    }
}

/// `2a⁻¹(κ₂ sup Δ + κ₃ sup ‖ẇ‖)`.
pub fn iss_asymptote(
    a: f64,
    kappa2: f64,
    kappa3: f64,
    sup_delta: f64,
    sup_w_dot: f64,
) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::CertificateInvalid(format!(
            "decay rate a = {a} is not positive"
        )));
    }
    Ok(2.0 / a * (kappa2 * sup_delta + kappa3 * sup_w_dot))
}

/// Plain-text `key = value` report.
pub fn certificate_report(cert: &Certificate, eps: Option<&EpsilonCheck>) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    let f = |v: f64| format!("{v:.10e}");
    kv("s", f(cert.s));
    kv("eta", f(cert.eta));
    kv("eta_max", f(cert.eta_max));
    kv("gain_condition", cert.gain_ok.to_string());
    kv("theta", f(cert.theta));
    kv("norm_PAinvB", f(cert.norms.pa_inv_b));
    kv("norm_PtAinvE", f(cert.norms.pt_a_inv_e));
    kv("norm_C", f(cert.norms.c_norm));
    kv("norm_G", f(cert.smooth.g_norm));
    kv("lambda_min_P", f(cert.norms.lambda_min_p));
    kv("lambda_max_P", f(cert.norms.lambda_max_p));
    kv("lambda_min_Q", f(cert.norms.lambda_min_q));
    kv("mu_u", f(cert.smooth.mu_u));
    kv("l_u", f(cert.smooth.l_u));
    kv("l_y", f(cert.smooth.l_y));
    kv("l", f(cert.smooth.l));
    for (k, v) in [
        ("c0", cert.c0),
        ("c1", cert.c1),
        ("c2", cert.c2),
        ("c3", cert.c3),
        ("c4", cert.c4),
        ("c5", cert.c5),
        ("kappa1", cert.kappa1),
        ("kappa2", cert.kappa2),
        ("kappa3", cert.kappa3),
    ] {
        kv(k, f(v));
    }
    kv("epsilon_threshold", f(cert.epsilon_threshold()));
    if let Some(e) = eps {
        kv(
            if e.truncated {
                "epsilon_prime"
            } else {
                "epsilon"
            },
            f(e.epsilon),
        );
        kv("epsilon_condition", e.satisfied.to_string());
        kv("epsilon_boundary", e.boundary.to_string());
        kv("a", f(e.a));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_cert(eta: f64) -> Certificate {
        let norms = PlantNorms {
            pa_inv_b: 0.5,
            pt_a_inv_e: 0.5,
            c_norm: 1.0,
            lambda_min_p: 0.5,
            lambda_max_p: 0.5,
            lambda_min_q: 1.0,
        };
        let smooth = SmoothnessConstants::user(1.0, 1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        compute_constants(&norms, &smooth, eta, 0.5).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(compute_theta(1.0, 1.0, 1.0, 0.5).unwrap(), 0.5);
        assert_eq!(compute_theta(2.0, 1.0, 1.0, 1.0).unwrap(), 0.5);
        assert!(matches!(
            compute_theta(0.0, 1.0, 1.0, 0.5),
            Err(Error::DegenerateCoupling)
        ));
    }

    #[test]
    fn gain_examples() {
        let e = gain_bound(0.5, 1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!((e - 1.0 / 6.0).abs() < 1e-15);
        assert!(gain_bound(0.999_999, 1.0, 0.5, 1.0, 1.0, 1.0).unwrap() < 1e-11);
        assert!(gain_bound(1.0, 1.0, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(gain_bound(0.0, 1.0, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(check_gain(0.1, e));
        assert!(!check_gain(e, e));
    }

    #[test]
    fn constants_structure() {
        let a = unit_cert(0.01);
        let b = unit_cert(0.04);
        assert!(a.c1 <= a.c2 && a.kappa1 >= 1.0);
        assert!((b.c4 / a.c4 - 2.0).abs() < 1e-12);
        assert!((a.c5 / b.c5 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn epsilon_examples() {
        let c = unit_cert(0.01);
        let z = epsilon_condition(&c, 0.0, 0.0);
        assert!(z.boundary && z.satisfied && z.a == c.c0);
        // ℓ_u = 1 and ℓ_y‖G‖² = 1, so ε equals the sup error here.
        let at = epsilon_condition(&c, c.epsilon_threshold(), 0.0);
        assert!(!at.satisfied);
    }

    #[test]
    fn iss_examples() {
        assert_eq!(iss_asymptote(1.0, 3.0, 4.0, 0.0, 0.0).unwrap(), 0.0);
        assert!((iss_asymptote(2.0, 1.0, 1.0, 0.1, 0.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(
            iss_asymptote(0.0, 1.0, 1.0, 0.1, 0.0),
            Err(Error::CertificateInvalid(_))
        ));
    }

    #[test]
    fn kernel_weights_branches_agree() {
        for &h in &[1e-3, 0.01, 0.1] {
            let lam = 0.999e-3 / h;
            let (d, w0, w1) = kernel_weights(lam, h);
            let lam2 = 1.001e-3 / h;
            let (d2, v0, v1) = kernel_weights(lam2, h);
            assert!((d - d2).abs() < 1e-5);
            assert!((w0 - v0).abs() < 1e-6 * h && (w1 - v1).abs() < 1e-6 * h);
        }
        let (_, w0, w1) = kernel_weights(0.0, 2.0);
        assert_eq!((w0, w1), (1.0, 1.0));
    }

    fn synthetic(n: usize, h: f64, delta: f64) -> BoundInputs {
        BoundInputs {
            t: (0..n).map(|i| i as f64 * h).collect(),
            z: vec![1.0; n],
            restart: vec![false; n],
            alpha_err: vec![0.0; n],
            rho_err: vec![0.0; n],
            delta: vec![delta; n],
            w_dot: vec![0.0; n],
        }
    }

    #[test]
    fn zero_forcing_is_pure_exponential() {
        let c = unit_cert(0.01);
        let inp = synthetic(200, 0.05, 0.0);
        let b = evaluate_bound(&inp, &c, RestartPolicy::PerArrival).unwrap();
        for (i, v) in b.values.iter().enumerate() {
            let want = c.kappa1 * (-0.5 * c.c0 * inp.t[i]).exp();
            assert!((v.unwrap() - want).abs() < 1e-14);
        }
        assert_eq!(b.certified_from(), Some(0.0));
    }

    #[test]
    fn restart_anchors_at_kappa1_z() {
        let c = unit_cert(0.01);
        let mut inp = synthetic(100, 0.1, 0.0);
        inp.restart[40] = true;
        inp.z[40] = 0.3;
        let b = evaluate_bound(&inp, &c, RestartPolicy::PerArrival).unwrap();
        assert_eq!(b.intervals.len(), 2);
        assert!((b.values[40].unwrap() - c.kappa1 * 0.3).abs() < 1e-15);
        assert!(b.intervals[0].value_at_end.unwrap() > b.values[40].unwrap());
    }

    #[test]
    fn invalid_interval_is_absent() {
        let c = unit_cert(0.01);
        let mut inp = synthetic(10, 0.1, 0.0);
        inp.restart[5] = true;
        for e in &mut inp.alpha_err[..5] {
            *e = 10.0;
        }
        let b = evaluate_bound(&inp, &c, RestartPolicy::PerArrival).unwrap();
        assert!(b.values[..5].iter().all(Option::is_none));
        assert!(b.values[5..].iter().all(Option::is_some));
        assert_eq!(b.certified_from(), Some(0.5));
        let g = evaluate_bound(&inp, &c, RestartPolicy::Global).unwrap();
        assert!(g.values.iter().all(Option::is_none));
    }

    #[test]
    fn report_lists_keys() {
        let c = unit_cert(0.01);
        let e = epsilon_condition(&c, 0.0, 0.0);
        let r = certificate_report(&c, Some(&e));
        for key in [
            "eta_max = ",
            "kappa1 = ",
            "epsilon = ",
            "gain_condition = true",
        ] {
            assert!(r.contains(key), "{key}");
        }
    }
}
