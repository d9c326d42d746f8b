//! Acceptance suite: one test per acceptance criterion, each asserting its
//! stated tolerances and runtime bound and printing a PASS line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use seqtom::estimator::{HybridState, HypothesisGrid, ParameterPoint, QqState};
use seqtom::harness::{run_experiment, RunConfig, TrueParameter};
use seqtom::measurement::{KrausSet, Strength};
use seqtom::qubit::{Matrix2, Propagator, PureState};
use seqtom::trajectory::{step, RngStream, TrueDynamics};

use common::{random_axis, series_propagator};

fn finish(criterion: u32, name: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= budget,
        "ACCEPTANCE {criterion} ({name}): FAIL — took {elapsed:?}, budget {budget:?}"
    );
    println!("ACCEPTANCE {criterion} ({name}): PASS in {elapsed:?}");
}

#[test]
fn criterion_1_kraus_completeness() {
    let start = Instant::now();
    let mut rng = RngStream::from_seed(0xacce_0001);
    for _ in 0..100 {
        let s = Strength::new((rng.uniform() * 0.999 + 1e-3).min(1.0)).unwrap();
        assert!(KrausSet::unsharp_z(s).completeness_defect() < 1e-12);
        assert!(KrausSet::informationally_complete(s).completeness_defect() < 1e-12);
    }
    finish(1, "kraus completeness", start, Duration::from_secs(1));
}

#[test]
fn criterion_2_propagator_vs_series_oracle() {
    let start = Instant::now();
    let mut rng = RngStream::from_seed(0xacce_0002);
    for _ in 0..1000 {
        let axis = random_axis(&mut rng);
        let angle = (rng.uniform() - 0.5) * 8.0 * std::f64::consts::PI;
        let closed = Propagator::from_axis_angle(axis, angle).unwrap().matrix();
        let series = series_propagator(axis, angle);
        assert!(
            closed.max_abs_diff(&series) < 1e-10,
            "axis {axis:?} angle {angle}"
        );
    }

    let full_turn = Propagator::from_axis_angle([1.0, 0.0, 0.0], std::f64::consts::TAU)
        .unwrap()
        .matrix();
    let minus_identity = Matrix2::identity().scale(C64::new(-1.0, 0.0));
    assert!(full_turn.max_abs_diff(&minus_identity) < 1e-12);

    finish(2, "propagator vs series oracle", start, Duration::from_secs(1));
}

#[test]
fn criterion_3_bayes_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = RngStream::from_seed(0xacce_0003);

    for _ in 0..100 {
        let n = 1 + (rng.uniform() * 8.0) as usize;
        let points: Vec<_> = (0..n)
            .map(|i| {
                ParameterPoint::new(
                    0.8 + 0.4 * rng.uniform() + i as f64 * 1e-9,
                    std::f64::consts::PI * rng.uniform(),
                    std::f64::consts::TAU * 0.999 * rng.uniform(),
                )
            })
            .collect();
        let grid = HypothesisGrid::from_points(points).unwrap();
        let mut prior: Vec<f64> = (0..n).map(|_| rng.uniform() + 1e-3).collect();
        let total: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= total);
        let psi = PureState::from_bloch(
            std::f64::consts::PI * rng.uniform(),
            std::f64::consts::TAU * rng.uniform(),
        );
        let tau = 0.2 + rng.uniform();
        let s = Strength::new(0.1 + 0.85 * rng.uniform()).unwrap();
        let kraus = if rng.uniform() < 0.5 {
            KrausSet::unsharp_z(s)
        } else {
            KrausSet::informationally_complete(s)
        };
        let pick = ((rng.uniform() * kraus.len() as f64) as usize).min(kraus.len() - 1);
        let m = kraus.operators()[pick].1;

        // (1) pure-state filter
        let mut hybrid = HybridState::new(&grid, &prior, &psi, tau).unwrap();
        hybrid.predict();
        hybrid.update(&m).unwrap();
        let p_hybrid = hybrid.posterior();

        // (2) block-density reference
        let mut qq = QqState::new(&grid, &prior, &psi, tau).unwrap();
        qq.step(&m).unwrap();
        let p_qq = qq.posterior();

        // (3) direct Bayes rule with likelihoods Tr[M U ρ U† M†]
        let rho = psi.density().matrix();
        let likelihood: Vec<f64> = grid
            .points()
            .iter()
            .map(|point| {
                let u = Propagator::from_axis_angle(point.axis(), point.omega * tau)
                    .unwrap()
                    .matrix();
                let evolved = u * rho * u.adjoint();
                (m * evolved * m.adjoint()).trace().re
            })
            .collect();
        let evidence: f64 = prior.iter().zip(&likelihood).map(|(p, l)| p * l).sum();
        let p_direct: Vec<f64> = prior
            .iter()
            .zip(&likelihood)
            .map(|(p, l)| p * l / evidence)
            .collect();

        for i in 0..n {
            assert!((p_hybrid[i] - p_qq[i]).abs() < 1e-12, "hybrid vs qq at {i}");
            assert!(
                (p_hybrid[i] - p_direct[i]).abs() < 1e-12,
                "hybrid vs direct at {i}"
            );
        }
    }

    finish(3, "bayes oracle equivalence", start, Duration::from_secs(5));
}

#[test]
fn criterion_4_level_resolution_rate() {
    let start = Instant::now();
    // γ_m = Ω_R/(5π) for Δp = 0.2 and τ = T_R/10, for any Ω_R
    for omega in [1.0, 0.95, 1.05, 2.0] {
        let period = std::f64::consts::TAU / omega;
        let sched = Strength::new(0.2)
            .unwrap()
            .schedule(period / 10.0)
            .unwrap();
        assert!((sched.gamma_m - omega / (5.0 * std::f64::consts::PI)).abs() < 1e-12);
    }
    finish(4, "level-resolution rate", start, Duration::from_secs(1));
}

#[test]
fn criterion_5_frequency_estimation_convergence() {
    let start = Instant::now();

    let mut cfg = RunConfig::frequency_defaults();
    cfg.n_runs = 100;
    cfg.master_seed = 42;
    let summary = run_experiment(&cfg).unwrap();
    let rows = &summary.aggregate.rows;

    // uniform prior over 11 points against the delta at truth
    let expected0 = (1.0f64 / 11.0).sqrt();
    assert!((rows[0].mean_classical_fidelity - expected0).abs() < 1e-12);
    assert!(rows[0].stderr_classical < 1e-12);

    // monotone across checkpoints up to 3 standard errors
    let checkpoints = [0usize, 500, 1000, 2500, 5000];
    for pair in checkpoints.windows(2) {
        let a = &rows[pair[0]];
        let b = &rows[pair[1]];
        let slack = 3.0
            * (a.stderr_classical * a.stderr_classical
                + b.stderr_classical * b.stderr_classical)
                .sqrt();
        assert!(
            b.mean_classical_fidelity >= a.mean_classical_fidelity - slack,
            "fidelity dropped from step {} ({}) to step {} ({})",
            a.step,
            a.mean_classical_fidelity,
            b.step,
            b.mean_classical_fidelity
        );
    }

    let final_fidelity = rows[5000].mean_classical_fidelity;
    assert!(
        final_fidelity > 0.95,
        "mean classical fidelity at step 5000 is {final_fidelity}"
    );

    finish(5, "frequency estimation convergence", start, Duration::from_secs(120));
}

#[test]
fn criterion_6_process_tomography_convergence() {
    let start = Instant::now();

    let mut cfg = RunConfig::process_defaults();
    cfg.n_runs = 20;
    cfg.master_seed = 42;
    // a generic (non-pole) grid point: ω index 3, θ index 4, φ index 7
    cfg.true_parameter = TrueParameter::Explicit {
        omega: 0.95 + 3.0 * (0.1 / 9.0),
        theta: 4.0 * std::f64::consts::PI / 9.0,
        phi: 7.0 * std::f64::consts::TAU / 10.0,
    };
    let summary = run_experiment(&cfg).unwrap();
    let rows = &summary.aggregate.rows;

    let checkpoints = [0usize, 1000, 5000, 10000, 20000, 30000];
    for pair in checkpoints.windows(2) {
        let a = &rows[pair[0]];
        let b = &rows[pair[1]];
        let slack = 3.0
            * (a.stderr_classical * a.stderr_classical
                + b.stderr_classical * b.stderr_classical)
                .sqrt();
        assert!(
            b.mean_classical_fidelity >= a.mean_classical_fidelity - slack,
            "fidelity dropped from step {} to step {}",
            a.step,
            b.step
        );
    }

    let gain = rows[30000].mean_classical_fidelity - rows[1000].mean_classical_fidelity;
    assert!(gain >= 0.2, "fidelity gain over step 1000 is only {gain}");

    assert!(
        summary.map_hit_rate >= 0.7,
        "MAP hit rate {} below 0.7",
        summary.map_hit_rate
    );

    finish(6, "process tomography convergence", start, Duration::from_secs(900));
}

#[test]
fn criterion_7_measurement_regimes() {
    let start = Instant::now();
    let omega = 1.0;
    let rabi_period = std::f64::consts::TAU / omega;
    let runs = 400;

    // strong frequent measurements freeze the dynamics
    let strong = TrueDynamics {
        omega,
        axis: [1.0, 0.0, 0.0],
        tau: rabi_period / 100.0,
    };
    let kraus = KrausSet::unsharp_z(Strength::new(0.98).unwrap());
    let u = strong.propagator().unwrap();
    let mut total = 0.0;
    let mut samples = 0usize;
    for run in 0..runs {
        let mut rng = RngStream::for_run(0xacce_0007, run);
        let mut psi = PureState::ground();
        for _ in 0..100 {
            let (_, next) = step(&psi, &u, &kraus, &mut rng).unwrap();
            psi = next;
            total += psi.excited_population();
            samples += 1;
        }
    }
    let frozen_mean = total / samples as f64;
    assert!(
        frozen_mean < 0.1,
        "mean excited population {frozen_mean} not frozen"
    );

    // weak infrequent measurements leave the oscillation intact
    let weak = TrueDynamics {
        omega,
        axis: [1.0, 0.0, 0.0],
        tau: rabi_period / 10.0,
    };
    let kraus = KrausSet::unsharp_z(Strength::new(0.05).unwrap());
    let u = weak.propagator().unwrap();
    let mut amplitude_sum = 0.0;
    for run in 0..runs {
        let mut rng = RngStream::for_run(0xacce_0017, run);
        let mut psi = PureState::ground();
        let mut lo = psi.excited_population();
        let mut hi = lo;
        for _ in 0..10 {
            let (_, next) = step(&psi, &u, &kraus, &mut rng).unwrap();
            psi = next;
            lo = lo.min(psi.excited_population());
            hi = hi.max(psi.excited_population());
        }
        amplitude_sum += hi - lo;
    }
    let mean_amplitude = amplitude_sum / runs as f64;
    assert!(
        mean_amplitude > 0.8,
        "oscillation amplitude {mean_amplitude} too small"
    );

    println!("  regimes: frozen mean population {frozen_mean:.4}, free amplitude {mean_amplitude:.4}");
    finish(7, "measurement regimes", start, Duration::from_secs(10));
}

#[test]
fn criterion_8_csv_determinism_across_thread_counts() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_seqtom");
    let dir = tempfile::tempdir().unwrap();

    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = dir.path().join(format!("freq_t{threads}.csv"));
        let status = std::process::Command::new(bin)
            .args([
                "run",
                "--scenario",
                "frequency",
                "--runs",
                "50",
                "--seed",
                "7",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "seqtom run failed with --threads {threads}");
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "CSV bytes differ across thread counts");
    assert!(!outputs[0].is_empty());

    finish(8, "csv determinism across threads", start, Duration::from_secs(60));
}

#[test]
fn criterion_9_conservation_over_long_run() {
    let start = Instant::now();

    let grid = HypothesisGrid::frequency(0.95, 1.05, 11).unwrap();
    let tau = 0.1 * std::f64::consts::TAU;
    let dynamics = TrueDynamics {
        omega: 0.99,
        axis: [1.0, 0.0, 0.0],
        tau,
    };
    let kraus = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
    let u = dynamics.propagator().unwrap();

    let mut rng = RngStream::from_seed(0xacce_0009);
    let mut psi = rng.haar_state();
    let mut filter = HybridState::new(&grid, &grid.uniform_prior(), &psi.orthogonal(), tau).unwrap();

    for i in 0..100_000 {
        let (outcome, next) = step(&psi, &u, &kraus, &mut rng).unwrap();
        psi = next;
        filter.predict();
        filter.update(kraus.operator(outcome).unwrap()).unwrap();

        if i % 100 == 0 || i > 99_000 {
            assert!(
                (filter.total_weight() - 1.0).abs() < 1e-10,
                "hybrid weight drifted at step {i}"
            );
            assert!(
                (psi.norm_sq() - 1.0).abs() < 1e-10,
                "true state norm drifted at step {i}"
            );
        }
    }
    assert!((filter.total_weight() - 1.0).abs() < 1e-10);
    assert!((psi.norm_sq() - 1.0).abs() < 1e-10);

    finish(9, "conservation over long run", start, Duration::from_secs(10));
}
