//! Experiment orchestration: presets, runs, reports and CLI commands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::certificate::{
    certificate_report, compute_constants, epsilon_condition, evaluate_bound, iss_asymptote,
    BoundInputs, BoundTrajectory, Certificate, EpsilonCheck, PlantNorms, RestartPolicy,
};
use crate::config::{
    load_config, Built, CostSection, DisturbanceSection, ExperimentConfig, LearningSection,
    OutputSection, PlantSection, RandomSeeds, SimulationSection, TailSection,
};
use crate::cost::{smoothness_constants, OptimizerOracle, SmoothnessConstants};
use crate::error::{Error, Result};
use crate::plant::LyapunovCertificate;
use crate::sim::{run_simulation_with_oracle, write_csv, ClosedLoopTrajectory};

/// Bound-violation slack.
pub const VIOLATION_SLACK: f64 = 1e-9;

/// Constant disturbance of the presets.
pub const PRESET_W: [f64; 4] = [1.0, -0.5, 0.5, 0.2];
pub const PRESET_ETA: f64 = 0.15;
pub const PRESET_S: f64 = 0.3;
pub const PRESET_SEED: u64 = 7;

fn benchmark_base(phi: &str, horizon: f64, disturbance: DisturbanceSection) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        plant: PlantSection {
            preset: Some("benchmark4".into()),
            ..Default::default()
        },
        cost: CostSection {
            preset: Some("benchmark4".into()),
            ..Default::default()
        },
        learning: LearningSection {
            phi: phi.into(),
            phi_seed_random: (phi != "exact").then_some(RandomSeeds {
                count: 4,
                std: 1.0,
                seed: 3,
            }),
            ..Default::default()
        },
        simulation: SimulationSection {
            eta: PRESET_ETA,
            s: PRESET_S,
            h: 1e-3,
            horizon,
            phi_rate: 0.25,
            psi_rate: 0.0,
            seed: PRESET_SEED,
            u0: None,
            x0: None,
            disturbance,
        },
        output: OutputSection::default(),
    };
    cfg.expand_presets().expect("built-in presets");
    cfg
}

fn constant_w() -> DisturbanceSection {
    DisturbanceSection::Constant {
        value: PRESET_W.to_vec(),
    }
}

/// benchmark plant and cost, constant `w`, LS learning of `φ` from four
/// recorded points, Poisson arrivals.
pub fn fig2a_config() -> ExperimentConfig {
    benchmark_base("ls", 80.0, constant_w())
}

/// As [`fig2a_config`] with sinusoidal `w`.
pub fn fig2b_config() -> ExperimentConfig {
    benchmark_base(
        "ls",
        80.0,
        DisturbanceSection::Sinusoidal {
            offset: PRESET_W.to_vec(),
            amplitude: vec![0.2, 0.2, 0.2, 0.2],
            omega: 0.5,
            phase: 0.0,
        },
    )
}

/// Learning disabled: the controller knows `φ`.
pub fn exact_config() -> ExperimentConfig {
    benchmark_base("exact", 40.0, constant_w())
}

/// Exact learned part plus a fixed `c Σ ln cosh(u_i)` tail on `φ`.
pub fn truncation_config(coeff: f64) -> ExperimentConfig {
    let mut cfg = benchmark_base("exact", 40.0, constant_w());
    cfg.cost.tail = Some(TailSection {
        phi_logcosh: coeff,
        psi_logcosh: 0.0,
    });
    cfg
}

/// Tail small enough for `ε′ < c₀/c₃`.
pub const TRUNCATION_TAIL: f64 = 1e-3;
/// Tail that violates the learning-error condition.
pub const TRUNCATION_TAIL_INVALID: f64 = 5e-2;

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    match name {
        "fig2a" => Ok(fig2a_config()),
        "fig2b" => Ok(fig2b_config()),
        "exact" => Ok(exact_config()),
        "truncation" => Ok(truncation_config(TRUNCATION_TAIL)),
        "truncation-invalid" => Ok(truncation_config(TRUNCATION_TAIL_INVALID)),
        other => Err(Error::Config(vec![format!("unknown preset '{other}'")])),
    }
}

pub const PRESET_NAMES: [&str; 5] = [
    "fig2a",
    "fig2b",
    "exact",
    "truncation",
    "truncation-invalid",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub status: Status,
    /// Why the run is not certified, if it is not.
    pub note: Option<String>,
    pub certificate: Option<Certificate>,
    /// Learning-error check of the last interval.
    pub final_epsilon: Option<EpsilonCheck>,
    pub valid_intervals: usize,
    pub intervals: usize,
    pub certified_from: Option<f64>,
    /// `max (‖z‖ − bound)` where the bound is defined.
    pub max_violation: Option<f64>,
    pub final_z: f64,
    pub iss_asymptote: Option<f64>,
    pub arrivals: usize,
    pub restart_policy: RestartPolicy,
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let f = |v: f64| format!("{v:.10e}");
        let opt = |v: Option<f64>| v.map(f).unwrap_or_else(|| "none".into());
        let _ = writeln!(out, "status = {}", self.status);
        if let Some(n) = &self.note {
            let _ = writeln!(out, "note = {n}");
        }
        let _ = writeln!(out, "final_z = {}", f(self.final_z));
        let _ = writeln!(out, "max_bound_violation = {}", opt(self.max_violation));
        let _ = writeln!(out, "certified_from = {}", opt(self.certified_from));
        let _ = writeln!(out, "valid_intervals = {}", self.valid_intervals);
        let _ = writeln!(out, "intervals = {}", self.intervals);
        let _ = writeln!(out, "arrivals = {}", self.arrivals);
        let _ = writeln!(out, "restart_policy = {}", self.restart_policy);
        let _ = writeln!(out, "iss_asymptote = {}", opt(self.iss_asymptote));
        let _ = writeln!(out, "wall_clock_s = {:.3}", self.wall_clock_s);
        if let Some(c) = &self.certificate {
            out.push_str(&certificate_report(c, self.final_epsilon.as_ref()));
        }
        out
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub built: Built,
    pub smooth: SmoothnessConstants,
    pub trajectory: ClosedLoopTrajectory,
    pub bound: Option<BoundTrajectory>,
    pub inputs: BoundInputs,
    pub report: RunReport,
}

impl RunOutput {
    pub fn bound_values(&self) -> Option<&[Option<f64>]> {
        self.bound.as_ref().map(|b| b.values.as_slice())
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_csv(&mut buf, &self.trajectory, self.bound_values())?;
        Ok(buf)
    }
}

/// Certificate for a built configuration, or the reason there is none.
pub fn certificate_for(
    built: &Built,
    smooth: &SmoothnessConstants,
) -> std::result::Result<Certificate, String> {
    let lyap = LyapunovCertificate::solve(&built.plant.a, &built.q).map_err(|e| e.to_string())?;
    let norms = PlantNorms::new(&built.plant, &lyap);
    compute_constants(&norms, smooth, built.sim.eta, built.s).map_err(|e| e.to_string())
}

pub fn run_experiment(cfg: &ExperimentConfig, policy: Option<RestartPolicy>) -> Result<RunOutput> {
    let started = Instant::now();
    let built = cfg.build()?;
    let policy = policy.unwrap_or(built.policy);
    let smooth = smoothness_constants(&built.cost)?;
    let oracle = OptimizerOracle::with_constants(&built.cost, smooth)?;
    let trajectory =
        run_simulation_with_oracle(&built.plant, &oracle, &built.sim, &built.disturbance)?;
    let inputs = BoundInputs::from_trajectory(&trajectory, &built.cost);

    let mut note = None;
    let (certificate, bound) = match certificate_for(&built, &smooth) {
        Ok(cert) => {
            if !cert.gain_ok {
                note = Some(format!(
                    "gain condition fails: eta = {} >= eta_max = {}",
                    cert.eta, cert.eta_max
                ));
            }
            (Some(cert), Some(evaluate_bound(&inputs, &cert, policy)?))
        }
        Err(e) => {
            note = Some(format!("no certificate: {e}"));
            (None, None)
        }
    };

    let final_z = trajectory.final_sample().z_norm;
    let arrivals = trajectory.phi_arrivals.len() + trajectory.psi_arrivals.len();
    let mut report = RunReport {
        status: Status::Inconclusive,
        note,
        certificate,
        final_epsilon: None,
        valid_intervals: 0,
        intervals: 0,
        certified_from: None,
        max_violation: None,
        final_z,
        iss_asymptote: None,
        arrivals,
        restart_policy: policy,
        wall_clock_s: 0.0,
    };
    if let (Some(cert), Some(b)) = (&certificate, &bound) {
        let last = b.intervals.last().expect("at least one interval");
        report.final_epsilon = Some(last.epsilon);
        report.valid_intervals = b.valid_intervals();
        report.intervals = b.intervals.len();
        report.certified_from = b.certified_from();
        report.max_violation = b.max_violation(&inputs.z);
        if last.valid {
            let range = last.start_index..last.end_index;
            let sup = |v: &[f64]| v[range.clone()].iter().copied().fold(0.0, f64::max);
            report.iss_asymptote = iss_asymptote(
                last.epsilon.a,
                cert.kappa2,
                cert.kappa3,
                sup(&inputs.delta),
                sup(&inputs.w_dot),
            )
            .ok();
        }
        report.status = if report.max_violation.is_some_and(|v| v > VIOLATION_SLACK) {
            Status::Fail
        } else if !cert.gain_ok || report.valid_intervals == 0 {
            if report.note.is_none() {
                report.note = Some(format!(
                    "learning-error condition fails on every interval (epsilon = {:.4e} >= {:.4e})",
                    last.epsilon.epsilon, last.epsilon.threshold
                ));
            }
            Status::Inconclusive
        } else {
            Status::Pass
        };
    }
    report.wall_clock_s = started.elapsed().as_secs_f64();
    Ok(RunOutput {
        built,
        smooth,
        trajectory,
        bound,
        inputs,
        report,
    })
}

/// Runs several configurations on worker threads; results keep input order.
pub fn run_many(
    cfgs: &[ExperimentConfig],
    policy: Option<RestartPolicy>,
) -> Vec<Result<RunOutput>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = cfgs
            .iter()
            .map(|c| scope.spawn(move || run_experiment(c, policy)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Precondition("worker panicked".into())))
            })
            .collect()
    })
}

/// Per-run seeds derived from a base seed.
pub fn sweep_seeds(base: u64, count: usize) -> Vec<u64> {
    let mut s = base;
    (0..count)
        .map(|_| {
            // splitmix64 step
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = s;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        })
        .collect()
}

/// Command-line overrides shared by the run commands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub restart_policy: Option<RestartPolicy>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.simulation.seed = seed;
        }
        if let Some(p) = self.restart_policy {
            cfg.output.restart_policy = p;
        }
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

/// Writes `<name>.csv` and `<name>.report.txt` into `dir`.
pub fn write_outputs(run: &RunOutput, dir: &Path, name: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let csv_path = dir.join(format!("{name}.csv"));
    let report_path = dir.join(format!("{name}.report.txt"));
    std::fs::write(&csv_path, run.csv_bytes()?)?;
    std::fs::write(&report_path, run.report.to_text())?;
    Ok((csv_path, report_path))
}

fn run_and_write(mut cfg: ExperimentConfig, ov: &Overrides, name: &str) -> Result<RunOutput> {
    ov.apply(&mut cfg);
    let run = run_experiment(&cfg, None)?;
    write_outputs(&run, &ov.out_dir(&cfg), name)?;
    Ok(run)
}

pub fn cmd_simulate(config: &Path, ov: &Overrides) -> Result<RunOutput> {
    run_and_write(load_config(config)?, ov, "trajectory")
}

pub fn cmd_fig2a(ov: &Overrides) -> Result<RunOutput> {
    run_and_write(fig2a_config(), ov, "fig2a")
}

pub fn cmd_fig2b(ov: &Overrides) -> Result<RunOutput> {
    run_and_write(fig2b_config(), ov, "fig2b")
}

/// Certificate report without simulating. `epsilon` is evaluated at zero
/// learning error, so it is the truncation floor `ℓ_uᵉ + ℓ_yᵉ‖G‖²`.
pub fn cmd_certify(cfg: &ExperimentConfig) -> Result<(String, bool)> {
    let built = cfg.build()?;
    let smooth = smoothness_constants(&built.cost)?;
    let cert = certificate_for(&built, &smooth).map_err(Error::CertificateInvalid)?;
    let eps = epsilon_condition(&cert, 0.0, 0.0);
    let hurwitz = crate::plant::validate_hurwitz(&built.plant.a)?;
    let mut out = String::new();
    let _ = writeln!(out, "hurwitz = {}", hurwitz.stable);
    let _ = writeln!(out, "hurwitz_margin = {:.10e}", hurwitz.margin);
    let _ = writeln!(out, "strong_convexity = {}", smooth.mu_u > 0.0);
    out.push_str(&certificate_report(&cert, Some(&eps)));
    let ok = hurwitz.stable && smooth.mu_u > 0.0 && cert.gain_ok && eps.satisfied;
    let _ = writeln!(out, "all_conditions = {ok}");
    Ok((out, ok))
}
