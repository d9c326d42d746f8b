//! Estimation fidelities and Monte-Carlo aggregation.
//!
//! The classical fidelity between two distributions is the Bhattacharyya
//! overlap `Σᵢ √(pᵢ qᵢ)`; against the delta distribution at the true grid
//! point it reduces to `√p_true`. The quantum fidelity is the overlap
//! `⟨ψ|ρ_e|ψ⟩` between the true pure state and the estimated density matrix.

use crate::qubit::{pure_mixed_fidelity, DensityMatrix, PureState};
use crate::{Error, Result};

/// Metrics recorded after one full predict+update cycle (step ≥ 1), or for
/// the prior state (step 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    pub step: usize,
    pub classical_fidelity: f64,
    pub quantum_fidelity: f64,
    pub posterior_at_truth: f64,
}

/// Per-step metrics of a single Monte-Carlo run, with run metadata.
///
/// For `n` measurements the series holds rows for steps `0..=n` (the step-0
/// row is the prior baseline); a zero-measurement run yields an empty series.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSeries {
    pub run_index: u64,
    pub seed: u64,
    pub config_hash: u64,
    pub steps: Vec<StepMetrics>,
}

impl MetricsSeries {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Bhattacharyya overlap `Σᵢ √(pᵢ qᵢ)` between two probability vectors of
/// equal length. Symmetric, ≤ 1, and 1 exactly when `p = q`.
pub fn classical_fidelity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            what: "probability vectors",
            left: p.len(),
            right: q.len(),
        });
    }
    debug_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    debug_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| (a * b).max(0.0).sqrt())
        .sum())
}

/// [`classical_fidelity`] against the delta distribution at `truth`:
/// `√(p_truth)`.
pub fn delta_fidelity(p: &[f64], truth: usize) -> f64 {
    p[truth].max(0.0).sqrt()
}

/// Overlap between the true pure state and the estimated density matrix.
pub fn quantum_fidelity(psi_true: &PureState, rho_e: &DensityMatrix) -> f64 {
    pure_mixed_fidelity(psi_true, rho_e)
}

/// One row of the run-averaged series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub step: usize,
    pub mean_classical_fidelity: f64,
    pub stderr_classical: f64,
    pub mean_quantum_fidelity: f64,
    pub stderr_quantum: f64,
    pub mean_posterior_at_truth: f64,
}

/// Pointwise mean and standard-error band over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub rows: Vec<AggregateRow>,
}

impl AggregateSeries {
    /// CSV with header
    /// `step,mean_classical_fidelity,stderr_classical,mean_quantum_fidelity,stderr_quantum,mean_posterior_at_truth`,
    /// LF line endings, 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(self.to_csv_string().as_bytes())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 120 + 120);
        out.push_str(
            "step,mean_classical_fidelity,stderr_classical,mean_quantum_fidelity,stderr_quantum,mean_posterior_at_truth\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.step,
                r.mean_classical_fidelity,
                r.stderr_classical,
                r.mean_quantum_fidelity,
                r.stderr_quantum,
                r.mean_posterior_at_truth
            ));
        }
        out
    }
}

fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Pointwise mean and standard error over runs. Summation order is fixed by
/// sorting on run index, so the result is independent of input permutation.
pub fn aggregate(series: &[MetricsSeries]) -> Result<AggregateSeries> {
    if series.is_empty() {
        return Err(Error::EmptyInput("no metrics series to aggregate"));
    }
    let len = series[0].len();
    for s in series {
        if s.len() != len {
            return Err(Error::LengthMismatch {
                what: "metrics series",
                left: len,
                right: s.len(),
            });
        }
    }

    let mut order: Vec<usize> = (0..series.len()).collect();
    order.sort_by_key(|&i| series[i].run_index);

    let mut rows = Vec::with_capacity(len);
    let mut classical = vec![0.0; series.len()];
    let mut quantum = vec![0.0; series.len()];
    let mut posterior = vec![0.0; series.len()];
    for step_idx in 0..len {
        for (slot, &run) in order.iter().enumerate() {
            let m = &series[run].steps[step_idx];
            classical[slot] = m.classical_fidelity;
            quantum[slot] = m.quantum_fidelity;
            posterior[slot] = m.posterior_at_truth;
        }
        let (mc, sc) = mean_and_stderr(&classical);
        let (mq, sq) = mean_and_stderr(&quantum);
        let (mp, _) = mean_and_stderr(&posterior);
        rows.push(AggregateRow {
            step: series[order[0]].steps[step_idx].step,
            mean_classical_fidelity: mc,
            stderr_classical: sc,
            mean_quantum_fidelity: mq,
            stderr_quantum: sq,
            mean_posterior_at_truth: mp,
        });
    }
    Ok(AggregateSeries { rows })
}
