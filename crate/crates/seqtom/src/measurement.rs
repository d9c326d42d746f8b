//! Unsharp measurement models.
//!
//! An individual measurement of strength `Δp` is a two-outcome POVM whose
//! Kraus operators are close to scaled identities: outcome 0 weights the
//! "up" eigenspace by `√(1−p₀)` and the "down" one by `√p₀`, with
//! `p₀ = (1−Δp)/2`. `Δp → 0` extracts nothing and disturbs nothing;
//! `Δp = 1` is a projective measurement.
//!
//! Two sets are provided: the single-axis σ_z pair (enough to pin down a
//! frequency) and the six-outcome informationally complete x/y/z set needed
//! when the rotation axis itself is unknown. The IC set is one POVM sampled
//! once per period, not three sequential measurements; its completeness
//! relation spans all six operators.
//!
//! A sequence of such measurements with period `τ` resolves the two levels on
//! the timescale `τ_m = τ/Δp²`; the level-resolution rate `γ_m = 1/τ_m` is the
//! strength figure of merit for the whole sequence.

use std::fmt;

use crate::qubit::{Matrix2, PureState};
use crate::{Error, Result};

/// Strength of an individual unsharp measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strength {
    delta_p: f64,
    p0: f64,
}

impl Strength {
    /// `delta_p` must lie in (0, 1]. `p0 = (1 − delta_p)/2` lands in [0, 0.5).
    pub fn new(delta_p: f64) -> Result<Self> {
        if !delta_p.is_finite() || delta_p <= 0.0 || delta_p > 1.0 {
            return Err(Error::InvalidStrength(delta_p));
        }
        Ok(Strength {
            delta_p,
            p0: 0.5 * (1.0 - delta_p),
        })
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Timescale bookkeeping for measurements repeated with period `tau`
    /// (in units of 1/Ω₀).
    pub fn schedule(&self, tau: f64) -> Result<Schedule> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidTau(tau));
        }
        let tau_m = tau / (self.delta_p * self.delta_p);
        Ok(Schedule {
            tau,
            tau_m,
            gamma_m: 1.0 / tau_m,
        })
    }
}

/// Inter-measurement period, level-resolution time `τ_m = τ/Δp²` and rate
/// `γ_m = 1/τ_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub tau: f64,
    pub tau_m: f64,
    pub gamma_m: f64,
}

/// Measurement outcome label: axis and binary result.
///
/// Labels are stable strings (`"z0"`, `"x1"`, ...) so recorded trajectories
/// replay across versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    X0,
    X1,
    Y0,
    Y1,
    Z0,
    Z1,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::X0 => "x0",
            Outcome::X1 => "x1",
            Outcome::Y0 => "y0",
            Outcome::Y1 => "y1",
            Outcome::Z0 => "z0",
            Outcome::Z1 => "z1",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An ordered, complete set of Kraus operators: `Σ M†M = I`.
///
/// The list order is fixed and deterministic; outcome sampling and recorded
/// trajectories rely on it.
#[derive(Debug, Clone)]
pub struct KrausSet {
    ops: Vec<(Outcome, Matrix2)>,
}

impl KrausSet {
    /// The two-outcome unsharp σ_z set:
    /// `M₀ = diag(√(1−p₀), √p₀)`, `M₁ = diag(√p₀, √(1−p₀))`.
    pub fn unsharp_z(s: Strength) -> Self {
        let hi = (1.0 - s.p0()).sqrt();
        let lo = s.p0().sqrt();
        KrausSet {
            ops: vec![
                (Outcome::Z0, Matrix2::diag(hi, lo)),
                (Outcome::Z1, Matrix2::diag(lo, hi)),
            ],
        }
    }

    /// The six-outcome informationally complete set
    /// `M₀ⁱ = (√(1−p₀)·P₊ⁱ + √p₀·P₋ⁱ)/√3` (and the outcome-1 partners) for
    /// `i ∈ {x, y, z}`, with projectors `P±ⁱ = (I ± σᵢ)/2`.
    pub fn informationally_complete(s: Strength) -> Self {
        let hi = (1.0 - s.p0()).sqrt();
        let lo = s.p0().sqrt();
        let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
        let half = num_complex::Complex64::new(0.5, 0.0);

        let mut ops = Vec::with_capacity(6);
        let axes = [
            (Outcome::X0, Outcome::X1, Matrix2::pauli_x()),
            (Outcome::Y0, Outcome::Y1, Matrix2::pauli_y()),
            (Outcome::Z0, Outcome::Z1, Matrix2::pauli_z()),
        ];
        for (up, down, sigma) in axes {
            let p_plus = (Matrix2::identity() + sigma).scale(half);
            let p_minus = (Matrix2::identity() - sigma).scale(half);
            let weighted = |a: f64, b: f64| {
                (p_plus.scale(num_complex::Complex64::new(a, 0.0))
                    + p_minus.scale(num_complex::Complex64::new(b, 0.0)))
                .scale(num_complex::Complex64::new(inv_sqrt3, 0.0))
            };
            ops.push((up, weighted(hi, lo)));
            ops.push((down, weighted(lo, hi)));
        }
        KrausSet { ops }
    }

    pub fn operators(&self) -> &[(Outcome, Matrix2)] {
        &self.ops
    }

    /// The operator carrying a given label, if this set produces it.
    pub fn operator(&self, outcome: Outcome) -> Option<&Matrix2> {
        self.ops
            .iter()
            .find(|(o, _)| *o == outcome)
            .map(|(_, m)| m)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `‖Σ M†M − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = Matrix2::zero();
        for (_, m) in &self.ops {
            sum = sum + m.adjoint() * *m;
        }
        sum.max_abs_diff(&Matrix2::identity())
    }

    /// Outcome probabilities `pᵢ = ⟨ψ|Mᵢ†Mᵢ|ψ⟩` in list order, clamped at 0.
    pub fn outcome_distribution(&self, psi: &PureState) -> Vec<f64> {
        self.ops
            .iter()
            .map(|(_, m)| m.apply_with_weight(psi).1.max(0.0))
            .collect()
    }
}
