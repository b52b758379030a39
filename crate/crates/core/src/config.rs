//! TOML experiment configuration.
//!
//! Matrices are row-major nested arrays. A `preset = "benchmark4"` in the
//! `plant` or `cost` table fills every field left unset; presets are expanded
//! before validation so dumps always show concrete values.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::certificate::{RestartPolicy, DEFAULT_S};
use crate::cost::{BasisSet, CompositeCost, CostTerm, LogCoshBasis, QuadraticCost};
use crate::error::{Error, Result};
use crate::learning::Estimator;
use crate::linalg::{from_rows, to_rows};
use crate::plant::PlantModel;
use crate::presets::benchmark4;
use crate::sim::{random_seed_points, DisturbanceSignal, Learning, SeedPoint, SimulationConfig};

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub plant: PlantSection,
    pub cost: CostSection,
    #[serde(default)]
    pub learning: LearningSection,
    pub simulation: SimulationSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Rows>,
    /// Lyapunov weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Rows>,
}

/// `φ(u) = ½uᵀΥu + υᵀu + r` and `ψ(y) = ½‖y − ξ‖²`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upsilon: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSection>,
}

/// Fixed tails `c Σ ln cosh(·)` unknown to the controller.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSection {
    #[serde(default)]
    pub phi_logcosh: f64,
    #[serde(default)]
    pub psi_logcosh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedEntry {
    pub point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// Seed points drawn from `N(0, std²I)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSeeds {
    pub count: usize,
    #[serde(default = "one")]
    pub std: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    /// `exact`, `ls`, `ridge`, `lasso` or `rls`.
    #[serde(default = "default_phi_method")]
    pub phi: String,
    #[serde(default = "default_psi_method")]
    pub psi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rls_scale: Option<f64>,
    #[serde(default)]
    pub phi_noise_std: f64,
    #[serde(default)]
    pub psi_noise_std: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi_seed: Vec<SeedEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub psi_seed: Vec<SeedEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_seed_random: Option<RandomSeeds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_seed_random: Option<RandomSeeds>,
}

fn default_phi_method() -> String {
    "ls".into()
}
fn default_psi_method() -> String {
    "exact".into()
}

impl Default for LearningSection {
    fn default() -> Self {
        Self {
            phi: default_phi_method(),
            psi: default_psi_method(),
            lambda: None,
            rls_scale: None,
            phi_noise_std: 0.0,
            psi_noise_std: 0.0,
            phi_seed: Vec::new(),
            psi_seed: Vec::new(),
            phi_seed_random: None,
            psi_seed_random: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DisturbanceSection {
    Constant {
        value: Vec<f64>,
    },
    Sinusoidal {
        offset: Vec<f64>,
        amplitude: Vec<f64>,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    PiecewiseLinear {
        times: Vec<f64>,
        values: Rows,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub eta: f64,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_rate")]
    pub phi_rate: f64,
    #[serde(default)]
    pub psi_rate: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub disturbance: DisturbanceSection,
}

fn default_s() -> f64 {
    DEFAULT_S
}
fn default_h() -> f64 {
    1e-3
}
fn default_horizon() -> f64 {
    80.0
}
fn default_rate() -> f64 {
    0.25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_log_every")]
    pub log_every: usize,
    #[serde(default)]
    pub restart_policy: RestartPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

fn default_log_every() -> usize {
    10
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            log_every: default_log_every(),
            restart_policy: RestartPolicy::default(),
            dir: None,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parses, expands presets and validates. Validation reports every problem.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        match e.span() {
            Some(span) => {
                let (l, c) = line_col(text, span.start);
                Error::Parse(format!("line {l}, column {c}: {msg}"))
            }
            None => Error::Parse(msg),
        }
    })?;
    cfg.expand_presets()?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn dump_config(cfg: &ExperimentConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Parse(e.to_string()))
}

fn fill<T: Clone>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

impl ExperimentConfig {
    /// Fills unset fields from named presets; idempotent.
    pub fn expand_presets(&mut self) -> Result<()> {
        match self.plant.preset.as_deref() {
            None => {}
            Some("benchmark4") => {
                let eye = to_rows(&benchmark4::identity());
                let p = &mut self.plant;
                fill(&mut p.a, to_rows(&benchmark4::a()));
                fill(&mut p.b, eye.clone());
                fill(&mut p.c, eye.clone());
                fill(&mut p.d, eye.clone());
                fill(&mut p.e, eye);
                fill(&mut p.q, to_rows(&benchmark4::q()));
            }
            Some(other) => {
                return Err(Error::Config(vec![format!(
                    "plant.preset: unknown preset '{other}'"
                )]))
            }
        }
        match self.cost.preset.as_deref() {
            None => {}
            Some("benchmark4") => {
                let c = &mut self.cost;
                fill(&mut c.upsilon, to_rows(&benchmark4::upsilon()));
                fill(
                    &mut c.lin,
                    benchmark4::upsilon_lin().iter().copied().collect(),
                );
                fill(&mut c.r, benchmark4::R);
                fill(&mut c.xi, BENCHMARK_XI.to_vec());
            }
            Some(other) => {
                return Err(Error::Config(vec![format!(
                    "cost.preset: unknown preset '{other}'"
                )]))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }

    /// Builds every runtime object, collecting all validation errors.
    pub fn build(&self) -> Result<Built> {
        let mut errs = Vec::new();
        let p = &self.plant;
        let mat = |errs: &mut Vec<String>, key: &str, m: &Option<Rows>| -> Option<DMatrix<f64>> {
            match m {
                None => {
                    errs.push(format!("{key}: missing"));
                    None
                }
                Some(rows) => match from_rows(rows) {
                    Ok(m) => Some(m),
                    Err(e) => {
                        errs.push(format!("{key}: {e}"));
                        None
                    }
                },
            }
        };
        let a = mat(&mut errs, "plant.a", &p.a);
        let b = mat(&mut errs, "plant.b", &p.b);
        let c = mat(&mut errs, "plant.c", &p.c);
        let d = mat(&mut errs, "plant.d", &p.d);
        let e = mat(&mut errs, "plant.e", &p.e);
        let q = mat(&mut errs, "plant.q", &p.q);

        let n = a.as_ref().map(|a| a.nrows());
        let m = b.as_ref().map(|b| b.ncols());
        let pp = c.as_ref().map(|c| c.nrows());
        let qd = e.as_ref().map(|e| e.ncols());
        let shape = |errs: &mut Vec<String>,
                     key: &str,
                     mx: &Option<DMatrix<f64>>,
                     r: Option<usize>,
                     cdim: Option<usize>| {
            if let Some(mx) = mx {
                if let Some(r) = r {
                    if mx.nrows() != r {
                        errs.push(format!("{key}: expected {r} rows, got {}", mx.nrows()));
                    }
                }
                if let Some(cdim) = cdim {
                    if mx.ncols() != cdim {
                        errs.push(format!(
                            "{key}: expected {cdim} columns, got {}",
                            mx.ncols()
                        ));
                    }
                }
            }
        };
        shape(&mut errs, "plant.a", &a, n, n);
        shape(&mut errs, "plant.b", &b, n, None);
        shape(&mut errs, "plant.c", &c, None, n);
        shape(&mut errs, "plant.d", &d, pp, qd);
        shape(&mut errs, "plant.e", &e, n, None);
        shape(&mut errs, "plant.q", &q, n, n);

        let cs = &self.cost;
        let upsilon = mat(&mut errs, "cost.upsilon", &cs.upsilon);
        shape(&mut errs, "cost.upsilon", &upsilon, m, m);
        let vec_len = |errs: &mut Vec<String>,
                       key: &str,
                       v: &Option<Vec<f64>>,
                       len: Option<usize>|
         -> Option<DVector<f64>> {
            match v {
                None => {
                    errs.push(format!("{key}: missing"));
                    None
                }
                Some(v) => {
                    if let Some(len) = len {
                        if v.len() != len {
                            errs.push(format!("{key}: expected length {len}, got {}", v.len()));
                        }
                    }
                    Some(DVector::from_column_slice(v))
                }
            }
        };
        let lin = vec_len(&mut errs, "cost.lin", &cs.lin, m);
        let xi = vec_len(&mut errs, "cost.xi", &cs.xi, pp);
        let r = cs.r.unwrap_or(0.0);
        let tail = cs.tail.unwrap_or_default();
        if !(tail.phi_logcosh >= 0.0) || !(tail.psi_logcosh >= 0.0) {
            errs.push("cost.tail: log-cosh coefficients must be nonnegative".into());
        }

        let l = &self.learning;
        let phi = self.learning_mode("learning.phi", &l.phi, &mut errs);
        let psi = self.learning_mode("learning.psi", &l.psi, &mut errs);
        for (key, v) in [
            ("learning.phi_noise_std", l.phi_noise_std),
            ("learning.psi_noise_std", l.psi_noise_std),
        ] {
            if !(v >= 0.0) {
                errs.push(format!("{key}: must be nonnegative"));
            }
        }
        let seeds = |errs: &mut Vec<String>,
                     key: &str,
                     list: &[SeedEntry],
                     rnd: &Option<RandomSeeds>,
                     dim: Option<usize>| {
            let mut out: Vec<SeedPoint> = Vec::new();
            for (i, s) in list.iter().enumerate() {
                if let Some(dim) = dim {
                    if s.point.len() != dim {
                        errs.push(format!(
                            "{key}[{i}].point: expected length {dim}, got {}",
                            s.point.len()
                        ));
                    }
                }
                out.push(SeedPoint {
                    point: DVector::from_column_slice(&s.point),
                    value: s.value,
                });
            }
            if let (Some(r), Some(dim)) = (rnd, dim) {
                if !(r.std >= 0.0) {
                    errs.push(format!("{key}_random.std: must be nonnegative"));
                }
                out.extend(random_seed_points(r.count, dim, r.std, r.seed));
            }
            out
        };
        let phi_seed_data = seeds(
            &mut errs,
            "learning.phi_seed",
            &l.phi_seed,
            &l.phi_seed_random,
            m,
        );
        let psi_seed_data = seeds(
            &mut errs,
            "learning.psi_seed",
            &l.psi_seed,
            &l.psi_seed_random,
            pp,
        );
        if matches!(phi, Some(Learning::Learned(_))) && phi_seed_data.is_empty() {
            errs.push(
                "learning.phi_seed: learning needs recorded data (phi_seed or phi_seed_random)"
                    .into(),
            );
        }
        if matches!(psi, Some(Learning::Learned(_))) && psi_seed_data.is_empty() {
            errs.push(
                "learning.psi_seed: learning needs recorded data (psi_seed or psi_seed_random)"
                    .into(),
            );
        }

        let sm = &self.simulation;
        if !(sm.s > 0.0 && sm.s < 1.0) {
            errs.push(format!("simulation.s: {} must lie in (0, 1)", sm.s));
        }
        let u0 = sm.u0.as_ref().map(|v| DVector::from_column_slice(v));
        let x0 = sm.x0.as_ref().map(|v| DVector::from_column_slice(v));
        if let (Some(u0), Some(m)) = (&u0, m) {
            if u0.len() != m {
                errs.push(format!(
                    "simulation.u0: expected length {m}, got {}",
                    u0.len()
                ));
            }
        }
        if let (Some(x0), Some(n)) = (&x0, n) {
            if x0.len() != n {
                errs.push(format!(
                    "simulation.x0: expected length {n}, got {}",
                    x0.len()
                ));
            }
        }
        let disturbance = match &sm.disturbance {
            DisturbanceSection::Constant { value } => {
                DisturbanceSignal::Constant(DVector::from_column_slice(value))
            }
            DisturbanceSection::Sinusoidal {
                offset,
                amplitude,
                omega,
                phase,
            } => DisturbanceSignal::Sinusoidal {
                offset: DVector::from_column_slice(offset),
                amplitude: DVector::from_column_slice(amplitude),
                omega: *omega,
                phase: *phase,
            },
            DisturbanceSection::PiecewiseLinear { times, values } => {
                DisturbanceSignal::PiecewiseLinear {
                    times: times.clone(),
                    values: values
                        .iter()
                        .map(|v| DVector::from_column_slice(v))
                        .collect(),
                }
            }
        };
        if let Err(e) = disturbance.validate() {
            errs.push(format!("simulation.disturbance: {e}"));
        }
        if let Some(qd) = qd {
            if disturbance.dim() != qd {
                errs.push(format!(
                    "simulation.disturbance: expected dimension {qd}, got {}",
                    disturbance.dim()
                ));
            }
        }

        let sim = SimulationConfig {
            eta: sm.eta,
            h: sm.h,
            horizon: sm.horizon,
            phi: phi.unwrap_or(Learning::Exact),
            psi: psi.unwrap_or(Learning::Exact),
            phi_rate: sm.phi_rate,
            psi_rate: sm.psi_rate,
            phi_noise_std: l.phi_noise_std,
            psi_noise_std: l.psi_noise_std,
            phi_seed_data,
            psi_seed_data,
            seed: sm.seed,
            x0,
            u0,
            log_every: self.output.log_every,
        };
        if let Err(Error::Config(list)) = sim.validate() {
            errs.extend(list.into_iter().map(|e| format!("simulation: {e}")));
        }

        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        let (a, b, c, d, e, q) = (
            a.unwrap(),
            b.unwrap(),
            c.unwrap(),
            d.unwrap(),
            e.unwrap(),
            q.unwrap(),
        );
        let plant = PlantModel::new(a, b, c, d, e)
            .map_err(|e| Error::Config(vec![format!("plant: {e}")]))?;
        let (m, p) = (plant.m(), plant.p());
        let maps = plant.steady_state_maps();
        let cost_err = |e: Error| Error::Config(vec![format!("cost: {e}")]);
        let mut phi_term = CostTerm::quadratic(
            &QuadraticCost::new(upsilon.unwrap(), lin.unwrap(), r).map_err(cost_err)?,
        )
        .map_err(cost_err)?;
        if tail.phi_logcosh > 0.0 {
            let basis: Arc<dyn BasisSet> = Arc::new(LogCoshBasis::new(m).map_err(cost_err)?);
            phi_term = phi_term
                .with_tail(basis, DVector::from_element(m, tail.phi_logcosh))
                .map_err(cost_err)?;
        }
        let mut psi_term =
            CostTerm::quadratic(&QuadraticCost::tracking(&xi.unwrap())).map_err(cost_err)?;
        if tail.psi_logcosh > 0.0 {
            let basis: Arc<dyn BasisSet> = Arc::new(LogCoshBasis::new(p).map_err(cost_err)?);
            psi_term = psi_term
                .with_tail(basis, DVector::from_element(p, tail.psi_logcosh))
                .map_err(cost_err)?;
        }
        let cost = CompositeCost::new(phi_term, psi_term, maps.g, maps.h).map_err(cost_err)?;
        Ok(Built {
            plant,
            q,
            cost,
            sim,
            disturbance,
            s: sm.s,
            policy: self.output.restart_policy,
        })
    }

    fn learning_mode(&self, key: &str, name: &str, errs: &mut Vec<String>) -> Option<Learning> {
        let l = &self.learning;
        let need = |errs: &mut Vec<String>, v: Option<f64>, what: &str| -> f64 {
            match v {
                Some(v) => v,
                None => {
                    errs.push(format!("{key}: method '{name}' needs learning.{what}"));
                    f64::NAN
                }
            }
        };
        let est = match name {
            "exact" => return Some(Learning::Exact),
            "ls" => Estimator::Ls,
            "ridge" => {
                let lambda = need(errs, l.lambda, "lambda");
                if lambda.is_finite() && lambda <= 0.0 {
                    errs.push(format!("{key}: ridge needs lambda > 0"));
                }
                Estimator::Ridge { lambda }
            }
            "lasso" => {
                let lambda = need(errs, l.lambda, "lambda");
                if lambda.is_finite() && lambda < 0.0 {
                    errs.push(format!("{key}: lasso needs lambda >= 0"));
                }
                Estimator::Lasso { lambda }
            }
            "rls" => {
                let cov_scale = need(errs, l.rls_scale, "rls_scale");
                if cov_scale.is_finite() && cov_scale <= 0.0 {
                    errs.push(format!("{key}: rls needs rls_scale > 0"));
                }
                Estimator::Rls { cov_scale }
            }
            other => {
                errs.push(format!(
                    "{key}: unknown method '{other}' (exact | ls | ridge | lasso | rls)"
                ));
                return None;
            }
        };
        Some(Learning::Learned(est))
    }
}

/// ξ used with the `benchmark4` cost preset; the reference values do not
/// include an output cost.
pub const BENCHMARK_XI: [f64; 4] = [1.0, 1.0, -1.0, 0.5];

/// Runtime objects of a validated configuration.
#[derive(Debug, Clone)]
pub struct Built {
    pub plant: PlantModel,
    pub q: DMatrix<f64>,
    pub cost: CompositeCost,
    pub sim: SimulationConfig,
    pub disturbance: DisturbanceSignal,
    pub s: f64,
    pub policy: RestartPolicy,
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[plant]
preset = "benchmark4"

[cost]
preset = "benchmark4"

[learning]
phi = "exact"

[simulation]
eta = 0.15
disturbance = { kind = "constant", value = [1.0, -0.5, 0.5, 0.2] }
"#;

    #[test]
    fn preset_expands_to_reference_matrices() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.plant.a.as_ref().unwrap(), &to_rows(&benchmark4::a()));
        assert_eq!(cfg.plant.q.as_ref().unwrap(), &to_rows(&benchmark4::q()));
        assert_eq!(cfg.cost.r, Some(benchmark4::R));
        let built = cfg.build().unwrap();
        assert_eq!(built.plant.a, benchmark4::a());
    }

    #[test]
    fn round_trip() {
        let cfg = parse_config(MINIMAL).unwrap();
        let again = parse_config(&dump_config(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn wrong_upsilon_names_the_key() {
        let text = MINIMAL.replace(
            "preset = \"benchmark4\"\n\n[learning]",
            "preset = \"benchmark4\"\nupsilon = [[1.0, 0.0], [0.0, 1.0]]\n\n[learning]",
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("cost.upsilon"), "{err}");
    }

    #[test]
    fn all_errors_are_reported() {
        let text = MINIMAL
            .replace("eta = 0.15", "eta = -1.0\ns = 2.0")
            .replace("phi = \"exact\"", "phi = \"magic\"");
        match parse_config(&text).unwrap_err() {
            Error::Config(list) => assert!(list.len() >= 3, "{list:?}"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_keys_and_parse_positions() {
        let err =
            parse_config(&MINIMAL.replace("eta = 0.15", "eta = 0.15\nbogus = 1")).unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{err}");
        let err = parse_config("[plant]\npreset = \n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
