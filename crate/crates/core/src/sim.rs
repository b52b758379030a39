//! Closed-loop simulation: plant + learned gradient-flow controller, fixed
//! step RK4, Poisson-clock evaluation arrivals.

use std::io::Write;

use nalgebra::DVector;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::cost::{BasisSet, CompositeCost, OptimizerOracle};
use crate::error::{Error, Result};
use crate::learning::{Estimator, EvaluationRecord, Learner, ParameterEstimate};
use crate::linalg::{all_finite, max_abs};
use crate::plant::PlantModel;

/// State norm treated as a blow-up.
const DIVERGENCE_NORM: f64 = 1e12;
/// Gradient tolerance of the per-sample optimizer solve.
pub const ORACLE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceSignal {
    Constant(DVector<f64>),
    /// `offset + amplitude ⊙ sin(omega·t + phase)`.
    Sinusoidal {
        offset: DVector<f64>,
        amplitude: DVector<f64>,
        omega: f64,
        phase: f64,
    },
    /// Linear interpolation between knots, held constant outside.
    PiecewiseLinear {
        times: Vec<f64>,
        values: Vec<DVector<f64>>,
    },
}

impl DisturbanceSignal {
    pub fn dim(&self) -> usize {
        match self {
            DisturbanceSignal::Constant(w) => w.len(),
            DisturbanceSignal::Sinusoidal { offset, .. } => offset.len(),
            DisturbanceSignal::PiecewiseLinear { values, .. } => {
                values.first().map_or(0, |v| v.len())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DisturbanceSignal::Constant(w) => {
                if !all_finite(w) {
                    return Err(Error::Precondition("disturbance must be finite".into()));
                }
            }
            DisturbanceSignal::Sinusoidal {
                offset,
                amplitude,
                omega,
                phase,
            } => {
                if amplitude.len() != offset.len() {
                    return Err(Error::dim(
                        "disturbance amplitude",
                        offset.len(),
                        amplitude.len(),
                    ));
                }
                if !omega.is_finite()
                    || !phase.is_finite()
                    || !all_finite(offset)
                    || !all_finite(amplitude)
                {
                    return Err(Error::Precondition("disturbance must be finite".into()));
                }
            }
            DisturbanceSignal::PiecewiseLinear { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::Precondition(
                        "piecewise-linear disturbance needs one value per knot".into(),
                    ));
                }
                if times.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err(Error::Precondition(
                        "knot times must be strictly increasing".into(),
                    ));
                }
                let q = values[0].len();
                if let Some(v) = values.iter().find(|v| v.len() != q) {
                    return Err(Error::dim("disturbance knot", q, v.len()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        match self {
            DisturbanceSignal::Constant(w) => w.clone(),
            DisturbanceSignal::Sinusoidal {
                offset,
                amplitude,
                omega,
                phase,
            } => offset + amplitude * (omega * t + phase).sin(),
            DisturbanceSignal::PiecewiseLinear { times, values } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    values[0].clone()
                } else if k == times.len() {
                    values[k - 1].clone()
                } else {
                    let r = (t - times[k - 1]) / (times[k] - times[k - 1]);
                    &values[k - 1] * (1.0 - r) + &values[k] * r
                }
            }
        }
    }

    /// Analytic derivative; right derivative at piecewise-linear knots.
    pub fn derivative(&self, t: f64) -> DVector<f64> {
        match self {
            DisturbanceSignal::Constant(w) => DVector::zeros(w.len()),
            DisturbanceSignal::Sinusoidal {
                amplitude,
                omega,
                phase,
                ..
            } => amplitude * (omega * (omega * t + phase).cos()),
            DisturbanceSignal::PiecewiseLinear { times, values } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 || k == times.len() {
                    DVector::zeros(values[0].len())
                } else {
                    (&values[k] - &values[k - 1]) / (times[k] - times[k - 1])
                }
            }
        }
    }
}

/// How one side of the cost is parameterized in the controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Learning {
    /// True coefficients from `t₀` on; no arrivals are drawn.
    Exact,
    Learned(Estimator),
}

/// A recorded evaluation point; the value defaults to the true function
/// (plus noise) when absent.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedPoint {
    pub point: DVector<f64>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub eta: f64,
    pub h: f64,
    pub horizon: f64,
    pub phi: Learning,
    pub psi: Learning,
    pub phi_rate: f64,
    pub psi_rate: f64,
    pub phi_noise_std: f64,
    pub psi_noise_std: f64,
    pub phi_seed_data: Vec<SeedPoint>,
    pub psi_seed_data: Vec<SeedPoint>,
    pub seed: u64,
    pub x0: Option<DVector<f64>>,
    pub u0: Option<DVector<f64>>,
    /// Log every `log_every`-th grid point (arrivals and the end are always logged).
    pub log_every: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            h: 1e-3,
            horizon: 80.0,
            phi: Learning::Learned(Estimator::Ls),
            psi: Learning::Exact,
            phi_rate: 0.25,
            psi_rate: 0.0,
            phi_noise_std: 0.0,
            psi_noise_std: 0.0,
            phi_seed_data: Vec::new(),
            psi_seed_data: Vec::new(),
            seed: 0,
            x0: None,
            u0: None,
            log_every: 10,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.h > 0.0) || !self.h.is_finite() {
            errs.push(format!("h = {} must be positive", self.h));
        }
        if !(self.horizon >= self.h) || !self.horizon.is_finite() {
            errs.push(format!("horizon = {} must be at least h", self.horizon));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            errs.push(format!("eta = {} must be nonnegative", self.eta));
        }
        for (name, v) in [
            ("phi_rate", self.phi_rate),
            ("psi_rate", self.psi_rate),
            ("phi_noise_std", self.phi_noise_std),
            ("psi_noise_std", self.psi_noise_std),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                errs.push(format!("{name} = {v} must be nonnegative"));
            }
        }
        if self.log_every == 0 {
            errs.push("log_every must be at least 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// One logged sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: DVector<f64>,
    pub u: DVector<f64>,
    pub y: DVector<f64>,
    pub w: DVector<f64>,
    pub w_dot_norm: f64,
    pub u_star: DVector<f64>,
    pub x_star: DVector<f64>,
    pub y_star: DVector<f64>,
    pub z_norm: f64,
    pub u_err: f64,
    pub x_err: f64,
    /// Logged right after a refit.
    pub event: bool,
    /// Index into `phi_estimates` / `psi_estimates`.
    pub phi_est: usize,
    pub psi_est: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopTrajectory {
    pub samples: Vec<Sample>,
    pub phi_estimates: Vec<ParameterEstimate>,
    pub psi_estimates: Vec<ParameterEstimate>,
    pub phi_arrivals: Vec<f64>,
    pub psi_arrivals: Vec<f64>,
}

impl ClosedLoopTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn z_norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.z_norm).collect()
    }

    pub fn w_dot_norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.w_dot_norm).collect()
    }

    pub fn final_sample(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn phi_estimate(&self, s: &Sample) -> &DVector<f64> {
        &self.phi_estimates[s.phi_est].coeffs
    }

    pub fn psi_estimate(&self, s: &Sample) -> &DVector<f64> {
        &self.psi_estimates[s.psi_est].coeffs
    }
}

/// `u̇ = −η(∇b(u)ᵀα̂ + Gᵀ∇d(y)ᵀρ̂)`.
#[allow(clippy::too_many_arguments)]
pub fn controller_rhs(
    u: &DVector<f64>,
    y: &DVector<f64>,
    alpha_hat: &DVector<f64>,
    rho_hat: &DVector<f64>,
    eta: f64,
    phi_basis: &dyn BasisSet,
    psi_basis: &dyn BasisSet,
    g: &nalgebra::DMatrix<f64>,
) -> Result<DVector<f64>> {
    let (p, m) = g.shape();
    if u.len() != m {
        return Err(Error::dim("u", m, u.len()));
    }
    if y.len() != p {
        return Err(Error::dim("y", p, y.len()));
    }
    if phi_basis.input_dim() != m || alpha_hat.len() != phi_basis.len() {
        return Err(Error::dim("alpha_hat", phi_basis.len(), alpha_hat.len()));
    }
    if psi_basis.input_dim() != p || rho_hat.len() != psi_basis.len() {
        return Err(Error::dim("rho_hat", psi_basis.len(), rho_hat.len()));
    }
    Ok(controller_rhs_unchecked(
        u, y, alpha_hat, rho_hat, eta, phi_basis, psi_basis, g,
    ))
}

#[allow(clippy::too_many_arguments)]
fn controller_rhs_unchecked(
    u: &DVector<f64>,
    y: &DVector<f64>,
    alpha_hat: &DVector<f64>,
    rho_hat: &DVector<f64>,
    eta: f64,
    phi_basis: &dyn BasisSet,
    psi_basis: &dyn BasisSet,
    g: &nalgebra::DMatrix<f64>,
) -> DVector<f64> {
    let grad_phi = phi_basis.jacobian(u).tr_mul(alpha_hat);
    let grad_psi = psi_basis.jacobian(y).tr_mul(rho_hat);
    (grad_phi + g.tr_mul(&grad_psi)) * (-eta)
}

/// Classical RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<F>(f: F, t: f64, y: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64>,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + &k1 * (0.5 * h)));
    let k3 = f(t + 0.5 * h, &(y + &k2 * (0.5 * h)));
    let k4 = f(t + h, &(y + &k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Plant and controller with frozen estimates; state is `(x, u)` stacked.
#[derive(Debug, Clone, Copy)]
pub struct ClosedLoop<'a> {
    pub plant: &'a PlantModel,
    pub g: &'a nalgebra::DMatrix<f64>,
    pub phi_basis: &'a dyn BasisSet,
    pub psi_basis: &'a dyn BasisSet,
    pub alpha_hat: &'a DVector<f64>,
    pub rho_hat: &'a DVector<f64>,
    pub eta: f64,
    pub disturbance: &'a DisturbanceSignal,
}

impl ClosedLoop<'_> {
    pub fn vector_field(&self, t: f64, s: &DVector<f64>) -> DVector<f64> {
        let n = self.plant.n();
        let m = self.plant.m();
        let x = s.rows(0, n).into_owned();
        let u = s.rows(n, m).into_owned();
        let w = self.disturbance.eval(t);
        let y = &self.plant.c * &x + &self.plant.d * &w;
        let xd = &self.plant.a * &x + &self.plant.b * &u + &self.plant.e * &w;
        let ud = controller_rhs_unchecked(
            &u,
            &y,
            self.alpha_hat,
            self.rho_hat,
            self.eta,
            self.phi_basis,
            self.psi_basis,
            self.g,
        );
        let mut out = DVector::zeros(n + m);
        out.rows_mut(0, n).copy_from(&xd);
        out.rows_mut(n, m).copy_from(&ud);
        out
    }

    /// One RK4 step of length `h`, failing on a non-finite or exploding state.
    pub fn step(&self, t: f64, s: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
        let next = rk4_step(|t, s| self.vector_field(t, s), t, s, h);
        if !all_finite(&next) || next.amax() > DIVERGENCE_NORM {
            return Err(Error::Divergence { t: t + h });
        }
        Ok(next)
    }
}

/// Poisson arrival times in `(0, horizon)`.
pub fn sample_arrivals(rate: f64, horizon: f64, seed: u64) -> Result<Vec<f64>> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Precondition(format!(
            "arrival rate must be nonnegative, got {rate}"
        )));
    }
    if rate == 0.0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Exp::new(rate).map_err(|e| Error::Precondition(e.to_string()))?;
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        t += exp.sample(&mut rng);
        if t >= horizon {
            return Ok(out);
        }
        out.push(t);
    }
}

/// Independent sub-seeds for the φ clock, ψ clock and noise stream.
pub fn derive_seeds(seed: u64) -> [u64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    [rng.next_u64(), rng.next_u64(), rng.next_u64()]
}

struct Side {
    learner: Option<Learner>,
    estimates: Vec<ParameterEstimate>,
    noise: Option<Normal<f64>>,
}

impl Side {
    fn new(
        name: &str,
        learning: Learning,
        term: &crate::cost::CostTerm,
        seeds: &[SeedPoint],
        noise_std: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        let noise = if noise_std > 0.0 {
            Some(Normal::new(0.0, noise_std).map_err(|e| Error::Precondition(e.to_string()))?)
        } else {
            None
        };
        match learning {
            Learning::Exact => Ok(Self {
                learner: None,
                estimates: vec![ParameterEstimate {
                    coeffs: term.coeffs.clone(),
                    valid_from: 0.0,
                    method: "exact",
                }],
                noise,
            }),
            Learning::Learned(est) => {
                if seeds.is_empty() {
                    return Err(Error::Precondition(format!(
                        "{name}: learning needs recorded data to fit the initial estimate"
                    )));
                }
                let mut learner = Learner::new(term.basis.clone(), est)?;
                let mut side = Self {
                    learner: None,
                    estimates: Vec::new(),
                    noise,
                };
                for sp in seeds {
                    if sp.point.len() != term.input_dim() {
                        return Err(Error::dim(
                            format!("{name} seed point"),
                            term.input_dim(),
                            sp.point.len(),
                        ));
                    }
                    let value = match sp.value {
                        Some(v) => v,
                        None => side.measure(term, &sp.point, rng),
                    };
                    learner.observe(EvaluationRecord::new(0.0, sp.point.clone(), value)?)?;
                }
                side.estimates.push(ParameterEstimate {
                    coeffs: learner.fit()?,
                    valid_from: 0.0,
                    method: est.name(),
                });
                side.learner = Some(learner);
                Ok(side)
            }
        }
    }

    fn measure(
        &self,
        term: &crate::cost::CostTerm,
        point: &DVector<f64>,
        rng: &mut ChaCha8Rng,
    ) -> f64 {
        let v = term.value(point);
        match &self.noise {
            Some(n) => v + n.sample(rng),
            None => v,
        }
    }

    fn current(&self) -> &DVector<f64> {
        &self.estimates.last().expect("initial estimate").coeffs
    }

    fn arrive(
        &mut self,
        t: f64,
        term: &crate::cost::CostTerm,
        point: &DVector<f64>,
        rng: &mut ChaCha8Rng,
    ) -> Result<()> {
        let value = self.measure(term, point, rng);
        let learner = self
            .learner
            .as_mut()
            .expect("arrivals only for learned sides");
        learner.observe(EvaluationRecord::new(t, point.clone(), value)?)?;
        let coeffs = learner.fit()?;
        let method = learner.estimator().name();
        self.estimates.push(ParameterEstimate {
            coeffs,
            valid_from: t,
            method,
        });
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Arrival {
    Phi,
    Psi,
}

/// Runs the data-driven gradient-flow loop. `cost` holds the true functions;
/// its `g`, `h` must be the plant's steady-state maps.
pub fn run_simulation(
    plant: &PlantModel,
    cost: &CompositeCost,
    config: &SimulationConfig,
    disturbance: &DisturbanceSignal,
) -> Result<ClosedLoopTrajectory> {
    let oracle = OptimizerOracle::new(cost)?;
    run_simulation_with_oracle(plant, &oracle, config, disturbance)
}

/// Same as [`run_simulation`] with a prepared optimizer (user constants).
pub fn run_simulation_with_oracle(
    plant: &PlantModel,
    oracle: &OptimizerOracle,
    config: &SimulationConfig,
    disturbance: &DisturbanceSignal,
) -> Result<ClosedLoopTrajectory> {
    config.validate()?;
    disturbance.validate()?;
    let cost = oracle.cost();
    let (n, m, q) = (plant.n(), plant.m(), plant.q());
    if cost.m() != m || cost.p() != plant.p() || cost.q() != q {
        return Err(Error::dim(
            "cost dimensions (m, p, q)",
            format!("{:?}", (m, plant.p(), q)),
            format!("{:?}", (cost.m(), cost.p(), cost.q())),
        ));
    }
    if disturbance.dim() != q {
        return Err(Error::dim("disturbance", q, disturbance.dim()));
    }
    let maps = plant.steady_state_maps();
    let scale = max_abs(&maps.g).max(max_abs(&maps.h)).max(1.0);
    if max_abs(&(&maps.g - &cost.g)) > 1e-9 * scale || max_abs(&(&maps.h - &cost.h)) > 1e-9 * scale
    {
        return Err(Error::Precondition(
            "cost G, H differ from the plant steady-state maps".into(),
        ));
    }
    let x0 = config.x0.clone().unwrap_or_else(|| DVector::zeros(n));
    let u0 = config.u0.clone().unwrap_or_else(|| DVector::zeros(m));
    if x0.len() != n {
        return Err(Error::dim("x0", n, x0.len()));
    }
    if u0.len() != m {
        return Err(Error::dim("u0", m, u0.len()));
    }

    let [seed_phi, seed_psi, seed_noise] = derive_seeds(config.seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed_noise);
    let mut phi = Side::new(
        "phi",
        config.phi,
        &cost.phi,
        &config.phi_seed_data,
        config.phi_noise_std,
        &mut noise_rng,
    )?;
    let mut psi = Side::new(
        "psi",
        config.psi,
        &cost.psi,
        &config.psi_seed_data,
        config.psi_noise_std,
        &mut noise_rng,
    )?;

    let phi_arrivals = match config.phi {
        Learning::Exact => Vec::new(),
        Learning::Learned(_) => sample_arrivals(config.phi_rate, config.horizon, seed_phi)?,
    };
    let psi_arrivals = match config.psi {
        Learning::Exact => Vec::new(),
        Learning::Learned(_) => sample_arrivals(config.psi_rate, config.horizon, seed_psi)?,
    };
    let mut events: Vec<(f64, Arrival)> = phi_arrivals
        .iter()
        .map(|&t| (t, Arrival::Phi))
        .chain(psi_arrivals.iter().map(|&t| (t, Arrival::Psi)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut state = DVector::zeros(n + m);
    state.rows_mut(0, n).copy_from(&x0);
    state.rows_mut(n, m).copy_from(&u0);

    let mut logger = Logger {
        plant,
        oracle,
        disturbance,
        samples: Vec::new(),
        warm: None,
    };
    logger.log(
        0.0,
        &state,
        false,
        phi.estimates.len() - 1,
        psi.estimates.len() - 1,
    )?;

    let steps = (config.horizon / config.h - 1e-9).ceil() as usize;
    let grid = |i: usize| (i as f64 * config.h).min(config.horizon);
    let mut t = 0.0;
    let mut next_event = 0;

    for i in 1..=steps {
        let t_grid = grid(i);
        let mut logged_at_grid = false;
        while next_event < events.len() && events[next_event].0 <= t_grid {
            let te = events[next_event].0;
            if te > t {
                state = loop_at(plant, cost, &phi, &psi, config.eta, disturbance).step(
                    t,
                    &state,
                    te - t,
                )?;
                t = te;
            }
            while next_event < events.len() && events[next_event].0 == te {
                let n_ = plant.n();
                match events[next_event].1 {
                    Arrival::Phi => {
                        let u = state.rows(n_, m).into_owned();
                        phi.arrive(te, &cost.phi, &u, &mut noise_rng)?;
                    }
                    Arrival::Psi => {
                        let x = state.rows(0, n_).into_owned();
                        let y = plant.output(&x, &disturbance.eval(te))?;
                        psi.arrive(te, &cost.psi, &y, &mut noise_rng)?;
                    }
                }
                next_event += 1;
            }
            logger.log(
                te,
                &state,
                true,
                phi.estimates.len() - 1,
                psi.estimates.len() - 1,
            )?;
            logged_at_grid = te == t_grid;
        }
        if t_grid > t {
            state = loop_at(plant, cost, &phi, &psi, config.eta, disturbance).step(
                t,
                &state,
                t_grid - t,
            )?;
            t = t_grid;
        }
        if !logged_at_grid && (i % config.log_every == 0 || i == steps) {
            logger.log(
                t,
                &state,
                false,
                phi.estimates.len() - 1,
                psi.estimates.len() - 1,
            )?;
        }
    }

    Ok(ClosedLoopTrajectory {
        samples: logger.samples,
        phi_estimates: phi.estimates,
        psi_estimates: psi.estimates,
        phi_arrivals,
        psi_arrivals,
    })
}

fn loop_at<'a>(
    plant: &'a PlantModel,
    cost: &'a CompositeCost,
    phi: &'a Side,
    psi: &'a Side,
    eta: f64,
    disturbance: &'a DisturbanceSignal,
) -> ClosedLoop<'a> {
    ClosedLoop {
        plant,
        g: &cost.g,
        phi_basis: cost.phi.basis.as_ref(),
        psi_basis: cost.psi.basis.as_ref(),
        alpha_hat: phi.current(),
        rho_hat: psi.current(),
        eta,
        disturbance,
    }
}

struct Logger<'a> {
    plant: &'a PlantModel,
    oracle: &'a OptimizerOracle,
    disturbance: &'a DisturbanceSignal,
    samples: Vec<Sample>,
    warm: Option<DVector<f64>>,
}

impl Logger<'_> {
    fn log(
        &mut self,
        t: f64,
        state: &DVector<f64>,
        event: bool,
        phi_est: usize,
        psi_est: usize,
    ) -> Result<()> {
        let (n, m) = (self.plant.n(), self.plant.m());
        let x = state.rows(0, n).into_owned();
        let u = state.rows(n, m).into_owned();
        let w = self.disturbance.eval(t);
        let y = self.plant.output(&x, &w)?;
        let u_star = self.oracle.solve(&w, self.warm.as_ref(), ORACLE_TOL)?;
        let x_star = self.plant.equilibrium_state(&u_star, &w)?;
        let y_star = self.oracle.cost().output(&u_star, &w);
        let u_err = (&u - &u_star).norm();
        let x_err = (&x - &x_star).norm();
        self.warm = Some(u_star.clone());
        self.samples.push(Sample {
            t,
            w_dot_norm: self.disturbance.derivative(t).norm(),
            x,
            u,
            y,
            w,
            u_star,
            x_star,
            y_star,
            z_norm: u_err.hypot(x_err),
            u_err,
            x_err,
            event,
            phi_est,
            psi_est,
        });
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 7] = [
    "t",
    "z_norm",
    "u_err_norm",
    "x_err_norm",
    "bound",
    "event",
    "w_dot_norm",
];

fn fmt_f(v: f64) -> String {
    format!("{v:.12e}")
}

/// Writes one row per logged sample; `bound` entries that are `None` (or a
/// missing bound series) leave the column empty.
pub fn write_csv<W: Write>(
    out: W,
    traj: &ClosedLoopTrajectory,
    bound: Option<&[Option<f64>]>,
) -> Result<()> {
    if let Some(b) = bound {
        if b.len() != traj.samples.len() {
            return Err(Error::dim("bound series", traj.samples.len(), b.len()));
        }
    }
    let mut wr = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(CSV_HEADER).map_err(io)?;
    for (i, s) in traj.samples.iter().enumerate() {
        let b = bound.and_then(|b| b[i]).map(fmt_f).unwrap_or_default();
        wr.write_record([
            fmt_f(s.t),
            fmt_f(s.z_norm),
            fmt_f(s.u_err),
            fmt_f(s.x_err),
            b,
            if s.event { "1".into() } else { "0".into() },
            fmt_f(s.w_dot_norm),
        ])
        .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// Gaussian seed points with the given spread (used by presets).
pub fn random_seed_points(count: usize, dim: usize, std: f64, seed: u64) -> Vec<SeedPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SeedPoint {
            point: DVector::from_fn(dim, |_, _| {
                std * rng.sample::<f64, _>(rand_distr::StandardNormal)
            }),
            value: None,
        })
        .collect()
}
