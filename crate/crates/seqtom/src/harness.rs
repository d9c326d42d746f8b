//! Experiment orchestration: configuration, the per-run monitoring protocol,
//! parallel Monte-Carlo execution and CSV output.
//!
//! Two scenarios are built in. `frequency` estimates a single unknown Rabi
//! frequency from unsharp σ_z measurements on an 11-point grid; `process`
//! estimates frequency and rotation axis together from the informationally
//! complete set on a 10×10×10 grid. Defaults follow those setups; every field
//! can be overridden from a TOML file or the CLI.
//!
//! Runs are embarrassingly parallel: each run owns its RNG stream, workers
//! share only read-only config/grid/Kraus data, and results are reduced in
//! run order, so output bytes do not depend on the worker count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimator::{map_estimate, HybridState, HypothesisGrid, ParameterPoint};
use crate::measurement::{KrausSet, Strength};
use crate::metrics::{
    aggregate, delta_fidelity, quantum_fidelity, AggregateSeries, MetricsSeries, StepMetrics,
};
use crate::qubit::PureState;
use crate::trajectory::{step, write_trajectory_csv, MeasurementRecord, RngStream, TrueDynamics};
use crate::{Error, Result};

/// RNG stream index reserved for experiment-level draws (true parameter);
/// run indices count from 0 and never reach it.
const EXPERIMENT_STREAM: u64 = u64::MAX;

/// Snap tolerance when validating an explicit true parameter against the grid.
const GRID_SNAP_TOL: f64 = 1e-6;

/// Built-in experiment scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Unknown frequency, known x rotation axis, unsharp σ_z measurements.
    Frequency,
    /// Unknown frequency and axis, informationally complete measurements.
    Process,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency" => Ok(Scenario::Frequency),
            "process" => Ok(Scenario::Process),
            other => Err(Error::ConfigValidation {
                field: "scenario",
                message: format!("expected \"frequency\" or \"process\", got \"{other}\""),
            }),
        }
    }
}

/// Hypothesis-grid shape. Frequencies span `[omega_min, omega_max]`
/// inclusively; `theta_count`/`phi_count` only apply to the process scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_count: usize,
    pub theta_count: usize,
    pub phi_count: usize,
}

/// The true dynamical parameter: drawn uniformly from the grid once per
/// experiment, or given explicitly (snapped to the nearest grid point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrueParameter {
    Named(String),
    Explicit {
        omega: f64,
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
}

fn default_theta() -> f64 {
    std::f64::consts::FRAC_PI_2
}

/// The true initial state: Haar-random per run, or fixed amplitudes
/// `[re(c0), im(c0), re(c1), im(c1)]` (normalized on use).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrueInitialState {
    Named(String),
    Amplitudes([f64; 4]),
}

/// Output destinations. `csv` is the aggregated metrics series; the posterior
/// and trajectory dumps record run 0 only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub posterior_csv: Option<PathBuf>,
    pub posterior_every: Option<usize>,
    pub trajectory_csv: Option<PathBuf>,
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridSpec,
    /// Individual measurement strength Δp ∈ (0, 1].
    pub delta_p: f64,
    /// Measurement period as a fraction of the nominal period T₀ = 2π/Ω₀.
    /// The true period is unknown to the experimenter, so τ is fixed from Ω₀.
    pub tau_fraction: f64,
    pub n_measurements: usize,
    pub n_runs: usize,
    pub master_seed: u64,
    pub true_parameter: TrueParameter,
    pub true_initial_state: TrueInitialState,
    #[serde(default)]
    pub output: OutputConfig,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// The frequency-estimation setup: 11 frequencies spaced Ω₀/100 over
    /// [0.95, 1.05]·Ω₀, Δp = 0.2, τ = T₀/10, 5000 measurements, 1000 runs.
    pub fn frequency_defaults() -> Self {
        RunConfig {
            scenario: Scenario::Frequency,
            grid: GridSpec {
                omega_min: 0.95,
                omega_max: 1.05,
                omega_count: 11,
                theta_count: 1,
                phi_count: 1,
            },
            delta_p: 0.2,
            tau_fraction: 0.1,
            n_measurements: 5000,
            n_runs: 1000,
            master_seed: 0,
            true_parameter: TrueParameter::Named("random-on-grid".into()),
            true_initial_state: TrueInitialState::Named("haar".into()),
            output: OutputConfig::default(),
            threads: None,
        }
    }

    /// The full process-tomography setup: 10 points per parameter
    /// (ω ∈ [0.95, 1.05]·Ω₀, θ ∈ [0, π], φ ∈ [0, 2π)), Δp = 0.2, τ = T₀/10,
    /// 30000 measurements with the informationally complete set, 1000 runs.
    pub fn process_defaults() -> Self {
        RunConfig {
            scenario: Scenario::Process,
            grid: GridSpec {
                omega_min: 0.95,
                omega_max: 1.05,
                omega_count: 10,
                theta_count: 10,
                phi_count: 10,
            },
            delta_p: 0.2,
            tau_fraction: 0.1,
            n_measurements: 30_000,
            n_runs: 1000,
            master_seed: 0,
            true_parameter: TrueParameter::Named("random-on-grid".into()),
            true_initial_state: TrueInitialState::Named("haar".into()),
            output: OutputConfig::default(),
            threads: None,
        }
    }

    pub fn defaults_for(scenario: Scenario) -> Self {
        match scenario {
            Scenario::Frequency => Self::frequency_defaults(),
            Scenario::Process => Self::process_defaults(),
        }
    }

    /// The measurement period in units of 1/Ω₀: `tau_fraction · 2π`.
    pub fn tau(&self) -> f64 {
        self.tau_fraction * std::f64::consts::TAU
    }

    /// The scenario's Kraus set at the configured strength.
    pub fn kraus(&self) -> Result<KrausSet> {
        let s = Strength::new(self.delta_p)?;
        Ok(match self.scenario {
            Scenario::Frequency => KrausSet::unsharp_z(s),
            Scenario::Process => KrausSet::informationally_complete(s),
        })
    }

    /// The scenario's hypothesis grid.
    pub fn build_grid(&self) -> Result<HypothesisGrid> {
        match self.scenario {
            Scenario::Frequency => HypothesisGrid::frequency(
                self.grid.omega_min,
                self.grid.omega_max,
                self.grid.omega_count,
            ),
            Scenario::Process => HypothesisGrid::process(
                self.grid.omega_min,
                self.grid.omega_max,
                self.grid.omega_count,
                self.grid.theta_count,
                self.grid.phi_count,
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn fail(field: &'static str, message: impl Into<String>) -> Error {
            Error::ConfigValidation {
                field,
                message: message.into(),
            }
        }

        if !(self.delta_p > 0.0 && self.delta_p <= 1.0) {
            return Err(fail("delta_p", format!("must lie in (0, 1], got {}", self.delta_p)));
        }
        if !(self.tau_fraction.is_finite() && self.tau_fraction > 0.0) {
            return Err(fail(
                "tau_fraction",
                format!("must be positive, got {}", self.tau_fraction),
            ));
        }
        if self.n_runs == 0 {
            return Err(fail("n_runs", "must be at least 1"));
        }
        let g = &self.grid;
        if !(g.omega_min.is_finite() && g.omega_max.is_finite()) || g.omega_min > g.omega_max {
            return Err(fail(
                "grid.omega_min",
                format!("range [{}, {}] is invalid", g.omega_min, g.omega_max),
            ));
        }
        if g.omega_count == 0 {
            return Err(fail("grid.omega_count", "must be at least 1"));
        }
        if g.omega_count > 1 && g.omega_min == g.omega_max {
            return Err(fail(
                "grid.omega_count",
                "more than one point needs omega_min < omega_max",
            ));
        }
        match self.scenario {
            Scenario::Frequency => {
                if g.theta_count != 1 || g.phi_count != 1 {
                    return Err(fail(
                        "grid.theta_count",
                        "the frequency scenario fixes the axis; theta_count and phi_count must be 1",
                    ));
                }
            }
            Scenario::Process => {
                if g.theta_count == 0 || g.phi_count == 0 {
                    return Err(fail("grid.theta_count", "must be at least 1"));
                }
            }
        }
        match &self.true_parameter {
            TrueParameter::Named(name) if name == "random-on-grid" => {}
            TrueParameter::Named(name) => {
                return Err(fail(
                    "true_parameter",
                    format!("unknown mode \"{name}\", expected \"random-on-grid\" or an explicit point"),
                ));
            }
            TrueParameter::Explicit { omega, theta, phi } => {
                if !(omega.is_finite() && theta.is_finite() && phi.is_finite()) {
                    return Err(fail("true_parameter", "coordinates must be finite"));
                }
                let grid = self.build_grid()?;
                let p = ParameterPoint::new(*omega, *theta, *phi);
                let nearest = grid.points()[grid.nearest(&p)];
                if p.dist_sq(&nearest).sqrt() > GRID_SNAP_TOL {
                    return Err(fail(
                        "true_parameter",
                        format!(
                            "(omega={omega}, theta={theta}, phi={phi}) is not a grid point; nearest is (omega={}, theta={}, phi={})",
                            nearest.omega, nearest.theta, nearest.phi
                        ),
                    ));
                }
            }
        }
        match &self.true_initial_state {
            TrueInitialState::Named(name) if name == "haar" => {}
            TrueInitialState::Named(name) => {
                return Err(fail(
                    "true_initial_state",
                    format!("unknown mode \"{name}\", expected \"haar\" or 4 amplitudes"),
                ));
            }
            TrueInitialState::Amplitudes(a) => {
                if a.iter().any(|x| !x.is_finite()) {
                    return Err(fail("true_initial_state", "amplitudes must be finite"));
                }
                let norm_sq: f64 = a.iter().map(|x| x * x).sum();
                if norm_sq.sqrt() <= crate::qubit::NORM_FLOOR {
                    return Err(fail("true_initial_state", "amplitudes have zero norm"));
                }
            }
        }
        if let Some(every) = self.output.posterior_every {
            if every == 0 {
                return Err(fail("output.posterior_every", "must be at least 1"));
            }
        }
        Ok(())
    }

    /// Stable hash of the resolved configuration, recorded per run.
    pub fn hash(&self) -> u64 {
        let text = toml::to_string(self).unwrap_or_default();
        fnv1a64(text.as_bytes())
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Optional fields parsed from a TOML file; anything absent falls back to the
/// scenario defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: Option<Scenario>,
    delta_p: Option<f64>,
    tau_fraction: Option<f64>,
    n_measurements: Option<usize>,
    n_runs: Option<usize>,
    master_seed: Option<u64>,
    grid: Option<FileGrid>,
    true_parameter: Option<TrueParameter>,
    true_initial_state: Option<TrueInitialState>,
    output: Option<FileOutput>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    omega_count: Option<usize>,
    theta_count: Option<usize>,
    phi_count: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    csv: Option<PathBuf>,
    posterior_csv: Option<PathBuf>,
    posterior_every: Option<usize>,
    trajectory_csv: Option<PathBuf>,
}

/// Parse a TOML config, fill unset fields from the scenario defaults, and
/// validate. The scenario comes from the CLI flag or the file; one of the two
/// must provide it. An empty file plus a scenario flag yields that scenario's
/// defaults.
pub fn parse_config(text: &str, scenario_flag: Option<Scenario>) -> Result<RunConfig> {
    let file: FileConfig =
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;

    let scenario = scenario_flag
        .or(file.scenario)
        .ok_or(Error::ConfigValidation {
            field: "scenario",
            message: "not given on the command line or in the config file".into(),
        })?;

    let mut cfg = RunConfig::defaults_for(scenario);
    if let Some(v) = file.delta_p {
        cfg.delta_p = v;
    }
    if let Some(v) = file.tau_fraction {
        cfg.tau_fraction = v;
    }
    if let Some(v) = file.n_measurements {
        cfg.n_measurements = v;
    }
    if let Some(v) = file.n_runs {
        cfg.n_runs = v;
    }
    if let Some(v) = file.master_seed {
        cfg.master_seed = v;
    }
    if let Some(g) = file.grid {
        if let Some(v) = g.omega_min {
            cfg.grid.omega_min = v;
        }
        if let Some(v) = g.omega_max {
            cfg.grid.omega_max = v;
        }
        if let Some(v) = g.omega_count {
            cfg.grid.omega_count = v;
        }
        if let Some(v) = g.theta_count {
            cfg.grid.theta_count = v;
        }
        if let Some(v) = g.phi_count {
            cfg.grid.phi_count = v;
        }
    }
    if let Some(v) = file.true_parameter {
        cfg.true_parameter = v;
    }
    if let Some(v) = file.true_initial_state {
        cfg.true_initial_state = v;
    }
    if let Some(o) = file.output {
        cfg.output = OutputConfig {
            csv: o.csv,
            posterior_csv: o.posterior_csv,
            posterior_every: o.posterior_every,
            trajectory_csv: o.trajectory_csv,
        };
    }
    if let Some(v) = file.threads {
        cfg.threads = Some(v);
    }

    cfg.validate()?;
    Ok(cfg)
}

/// The true grid point for an experiment, resolved deterministically from the
/// config: explicit points snap to the grid; "random-on-grid" draws the index
/// from the experiment-level RNG stream.
pub fn resolve_truth(cfg: &RunConfig, grid: &HypothesisGrid) -> Result<(usize, ParameterPoint)> {
    let idx = match &cfg.true_parameter {
        TrueParameter::Explicit { omega, theta, phi } => {
            let p = ParameterPoint::new(*omega, *theta, *phi);
            let idx = grid.nearest(&p);
            if p.dist_sq(&grid.points()[idx]).sqrt() > GRID_SNAP_TOL {
                return Err(Error::ConfigValidation {
                    field: "true_parameter",
                    message: "not a grid point".into(),
                });
            }
            idx
        }
        TrueParameter::Named(_) => {
            let mut rng = RngStream::for_run(cfg.master_seed, EXPERIMENT_STREAM);
            ((rng.uniform() * grid.len() as f64) as usize).min(grid.len() - 1)
        }
    };
    Ok((idx, grid.points()[idx]))
}

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metrics: MetricsSeries,
    /// MAP parameter from the final posterior.
    pub map_point: ParameterPoint,
    pub map_is_truth: bool,
    /// Posterior snapshots `(step, posterior)`, only for run 0 when a
    /// posterior dump is configured.
    pub posterior_snapshots: Vec<(usize, Vec<f64>)>,
    /// True trajectory, only for run 0 when a trajectory dump is configured.
    pub trajectory: Option<(MeasurementRecord, Vec<PureState>)>,
}

/// Execute a single monitoring run.
///
/// The per-run protocol: derive the run's RNG stream; draw the true initial
/// state; start the estimator on the uniform prior with the worst-case
/// initial guess (orthogonal to the true state); then repeat `n_measurements`
/// times: evolve and measure the true system, feed the same outcome to the
/// filter's predict+update cycle, and record fidelities. Deterministic in
/// `(master_seed, run_index)`.
pub fn run_single(cfg: &RunConfig, run_index: u64) -> Result<RunOutput> {
    let grid = cfg.build_grid()?;
    let kraus = cfg.kraus()?;
    let (truth_idx, truth) = resolve_truth(cfg, &grid)?;
    run_single_prepared(cfg, run_index, &grid, &kraus, truth_idx, truth)
}

/// [`run_single`] with the experiment-wide data prebuilt (hot path for
/// [`run_experiment`], which shares one grid/Kraus set across workers).
fn run_single_prepared(
    cfg: &RunConfig,
    run_index: u64,
    grid: &HypothesisGrid,
    kraus: &KrausSet,
    truth_idx: usize,
    truth: ParameterPoint,
) -> Result<RunOutput> {
    let tau = cfg.tau();
    let mut rng = RngStream::for_run(cfg.master_seed, run_index);

    let psi_true_0 = match &cfg.true_initial_state {
        TrueInitialState::Named(_) => rng.haar_state(),
        TrueInitialState::Amplitudes(a) => PureState::new(
            num_complex::Complex64::new(a[0], a[1]),
            num_complex::Complex64::new(a[2], a[3]),
        )?,
    };
    // worst case: start the estimate orthogonal to the true state
    let psi_e = psi_true_0.orthogonal();

    let dynamics = TrueDynamics {
        omega: truth.omega,
        axis: truth.axis(),
        tau,
    };
    let u_true = dynamics.propagator()?;
    let mut filter = HybridState::new(grid, &grid.uniform_prior(), &psi_e, tau)?;

    let n = cfg.n_measurements;
    let config_hash = cfg.hash();
    let mut series = MetricsSeries {
        run_index,
        seed: cfg.master_seed,
        config_hash,
        steps: Vec::with_capacity(if n == 0 { 0 } else { n + 1 }),
    };

    let dump_posteriors = run_index == 0 && cfg.output.posterior_every.is_some();
    let every = cfg.output.posterior_every.unwrap_or(0);
    let mut snapshots = Vec::new();
    let dump_trajectory = run_index == 0 && cfg.output.trajectory_csv.is_some();
    let mut traj_outcomes = Vec::new();
    let mut traj_states = Vec::new();

    let mut posterior = vec![0.0; grid.len()];
    let mut psi_true = psi_true_0;

    let record = |filter: &HybridState,
                      posterior: &mut [f64],
                      psi_true: &PureState,
                      step_no: usize,
                      series: &mut MetricsSeries| {
        filter.posterior_into(posterior);
        series.steps.push(StepMetrics {
            step: step_no,
            classical_fidelity: delta_fidelity(posterior, truth_idx),
            quantum_fidelity: quantum_fidelity(psi_true, &filter.reduced_state()),
            posterior_at_truth: posterior[truth_idx],
        });
    };

    if n > 0 {
        record(&filter, &mut posterior, &psi_true, 0, &mut series);
        if dump_posteriors {
            snapshots.push((0, filter.posterior()));
        }
    }

    for step_no in 1..=n {
        let (outcome, next) = step(&psi_true, &u_true, kraus, &mut rng)?;
        psi_true = next;

        filter.predict();
        let m = kraus
            .operator(outcome)
            .expect("outcome sampled from this set");
        filter.update(m)?;

        record(&filter, &mut posterior, &psi_true, step_no, &mut series);
        if dump_posteriors && step_no % every == 0 {
            snapshots.push((step_no, filter.posterior()));
        }
        if dump_trajectory {
            traj_outcomes.push(outcome);
            traj_states.push(psi_true);
        }
    }

    filter.posterior_into(&mut posterior);
    let map_point = map_estimate(&posterior, grid);
    let map_is_truth = map_point == truth.canonical();

    Ok(RunOutput {
        metrics: series,
        map_point,
        map_is_truth,
        posterior_snapshots: snapshots,
        trajectory: dump_trajectory.then_some((
            MeasurementRecord {
                outcomes: traj_outcomes,
                seed: cfg.master_seed,
            },
            traj_states,
        )),
    })
}

/// Aggregated results of a whole experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub aggregate: AggregateSeries,
    pub truth: ParameterPoint,
    /// Most frequent per-run MAP parameter.
    pub map_point: ParameterPoint,
    /// Fraction of runs whose final MAP equals the true grid point.
    pub map_hit_rate: f64,
    pub final_classical_fidelity: f64,
    pub final_quantum_fidelity: f64,
    pub n_runs: usize,
    pub n_measurements: usize,
    pub wall_time: Duration,
}

/// Run all Monte-Carlo trajectories of an experiment (in parallel), aggregate
/// the metrics, and write any configured CSV outputs.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let start = Instant::now();

    let grid = cfg.build_grid()?;
    let kraus = cfg.kraus()?;
    let (truth_idx, truth) = resolve_truth(cfg, &grid)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Runtime(format!("thread pool: {e}")))?;

    let outputs: Result<Vec<RunOutput>> = pool.install(|| {
        (0..cfg.n_runs as u64)
            .into_par_iter()
            .map(|i| run_single_prepared(cfg, i, &grid, &kraus, truth_idx, truth))
            .collect()
    });
    let outputs = outputs?;

    let series: Vec<MetricsSeries> = outputs.iter().map(|o| o.metrics.clone()).collect();
    let agg = aggregate(&series)?;

    let hits = outputs.iter().filter(|o| o.map_is_truth).count();
    let map_point = modal_map_point(&outputs);

    if let Some(path) = &cfg.output.csv {
        let mut w = BufWriter::new(File::create(path)?);
        agg.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = &cfg.output.posterior_csv {
        write_posterior_csv(path, &grid, &outputs[0].posterior_snapshots)?;
    }
    if let Some(path) = &cfg.output.trajectory_csv {
        if let Some((record, states)) = &outputs[0].trajectory {
            let mut w = BufWriter::new(File::create(path)?);
            write_trajectory_csv(&mut w, record, states)?;
            w.flush()?;
        }
    }

    let last = agg.rows.last();
    Ok(ExperimentSummary {
        truth,
        map_point,
        map_hit_rate: hits as f64 / cfg.n_runs as f64,
        final_classical_fidelity: last.map_or(f64::NAN, |r| r.mean_classical_fidelity),
        final_quantum_fidelity: last.map_or(f64::NAN, |r| r.mean_quantum_fidelity),
        n_runs: cfg.n_runs,
        n_measurements: cfg.n_measurements,
        wall_time: start.elapsed(),
        aggregate: agg,
    })
}

fn modal_map_point(outputs: &[RunOutput]) -> ParameterPoint {
    let mut best = outputs[0].map_point;
    let mut best_count = 0;
    for o in outputs {
        let count = outputs
            .iter()
            .filter(|other| other.map_point == o.map_point)
            .count();
        if count > best_count {
            best_count = count;
            best = o.map_point;
        }
    }
    best
}

/// Posterior snapshot dump: `step,omega,theta,phi,probability`, one row per
/// grid point per snapshot.
fn write_posterior_csv(
    path: &Path,
    grid: &HypothesisGrid,
    snapshots: &[(usize, Vec<f64>)],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "step,omega,theta,phi,probability")?;
    for (step, posterior) in snapshots {
        for (point, p) in grid.points().iter().zip(posterior) {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                step, point.omega, point.theta, point.phi, p
            )?;
        }
    }
    w.flush()?;
    Ok(())
}
