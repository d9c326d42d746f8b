//! Grid-based Bayesian filter over candidate dynamical parameters.
//!
//! The filter state is one unnormalized pure state per hypothesis,
//! `φᵢ = √P(ωᵢ)|ψᵢ⟩`, so the branch weights `⟨φᵢ|φᵢ⟩` are the posterior over
//! the grid and `Σᵢ |φᵢ⟩⟨φᵢ|` is the estimated density matrix of the qubit.
//! A filter cycle is
//!
//! 1. predict: `φᵢ ← Uᵢ φᵢ` with each hypothesis' own cached propagator
//!    (weights unchanged, by unitarity), then
//! 2. update: `φᵢ ← M φᵢ` for the observed outcome's Kraus operator,
//!    followed by one global renormalization — which is exactly a Bayes
//!    update of the weights with likelihoods `P(n|ωᵢ)`.
//!
//! Each cycle applies every operator once per hypothesis (a matrix-vector
//! product); the density-matrix formulation needs each operator twice
//! (`M ρ M†`). [`QqState`] implements that block-density formulation over the
//! same grid and is kept as a reference to cross-check the filter against.
//!
//! The augmented composite operators over (parameter ⊗ qubit) space are never
//! materialized: all blocks are decoupled, so the per-hypothesis loop *is*
//! the block-diagonal operator.

use crate::qubit::{DensityMatrix, Ket, Matrix2, Propagator, PureState};
use crate::{Error, Result};

/// Total posterior weight below which an outcome is declared inconsistent
/// with the entire hypothesis set.
const WEIGHT_FLOOR: f64 = 1e-300;

/// One candidate for the unknown dynamics: frequency `omega` (units of Ω₀)
/// and rotation axis `n = (sinθcosφ, sinθsinφ, cosθ)` with `θ ∈ [0, π]`,
/// `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterPoint {
    pub omega: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ParameterPoint {
    pub fn new(omega: f64, theta: f64, phi: f64) -> Self {
        ParameterPoint { omega, theta, phi }
    }

    /// Frequency-only candidate: rotation about the x axis
    /// (`θ = π/2`, `φ = 0`).
    pub fn frequency_only(omega: f64) -> Self {
        ParameterPoint {
            omega,
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Canonical representative: at the poles (`θ ∈ {0, π}`) every `φ`
    /// describes the same axis, so `φ` collapses to 0 for reporting.
    pub fn canonical(&self) -> Self {
        if self.theta == 0.0 || self.theta == std::f64::consts::PI {
            ParameterPoint {
                phi: 0.0,
                ..*self
            }
        } else {
            *self
        }
    }

    pub(crate) fn dist_sq(&self, other: &ParameterPoint) -> f64 {
        let d0 = self.omega - other.omega;
        let d1 = self.theta - other.theta;
        let d2 = self.phi - other.phi;
        d0 * d0 + d1 * d1 + d2 * d2
    }
}

/// Evenly spaced points over `[a, b]`, both endpoints included.
fn linspace_inclusive(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * step).collect()
}

/// Evenly spaced points over `[a, b)`, end excluded.
fn linspace_half_open(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / n as f64;
    (0..n).map(|i| a + i as f64 * step).collect()
}

/// The ordered, discrete set of candidate parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisGrid {
    points: Vec<ParameterPoint>,
}

impl HypothesisGrid {
    /// Wrap an explicit point list. The list must be non-empty and the
    /// points distinct as `(ω, θ, φ)` tuples; the order is preserved.
    pub fn from_points(points: Vec<ParameterPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid must be non-empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.omega.is_finite() && p.theta.is_finite() && p.phi.is_finite()) {
                return Err(Error::InvalidGrid(format!("point {i} is not finite")));
            }
            for q in &points[..i] {
                if p == q {
                    return Err(Error::InvalidGrid(format!(
                        "duplicate point (omega={}, theta={}, phi={})",
                        p.omega, p.theta, p.phi
                    )));
                }
            }
        }
        Ok(HypothesisGrid { points })
    }

    /// Frequency-only grid: `count` frequencies evenly spaced on
    /// `[omega_min, omega_max]` (inclusive), all rotating about x.
    pub fn frequency(omega_min: f64, omega_max: f64, count: usize) -> Result<Self> {
        Self::from_points(
            linspace_inclusive(omega_min, omega_max, count)
                .into_iter()
                .map(ParameterPoint::frequency_only)
                .collect(),
        )
    }

    /// Full product grid: frequencies inclusive on `[omega_min, omega_max]`,
    /// `θ` inclusive on `[0, π]`, `φ` on `[0, 2π)` excluding the endpoint.
    /// Ordering is ω-major, then θ, then φ. Axis degeneracy at the θ poles is
    /// kept, matching a flat product grid.
    pub fn process(
        omega_min: f64,
        omega_max: f64,
        n_omega: usize,
        n_theta: usize,
        n_phi: usize,
    ) -> Result<Self> {
        let omegas = linspace_inclusive(omega_min, omega_max, n_omega);
        let thetas = linspace_inclusive(0.0, std::f64::consts::PI, n_theta);
        let phis = linspace_half_open(0.0, std::f64::consts::TAU, n_phi);
        let mut points = Vec::with_capacity(n_omega * n_theta * n_phi);
        for &omega in &omegas {
            for &theta in &thetas {
                for &phi in &phis {
                    points.push(ParameterPoint::new(omega, theta, phi));
                }
            }
        }
        Self::from_points(points)
    }

    pub fn points(&self) -> &[ParameterPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of an exactly matching point.
    pub fn position(&self, p: &ParameterPoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// Index of the closest point in `(ω, θ, φ)` Euclidean distance.
    pub fn nearest(&self, p: &ParameterPoint) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            let d = p.dist_sq(q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// The flat prior `1/len` per point.
    pub fn uniform_prior(&self) -> Vec<f64> {
        vec![1.0 / self.len() as f64; self.len()]
    }

    fn propagators(&self, tau: f64) -> Result<Vec<Matrix2>> {
        if !tau.is_finite() {
            return Err(Error::NonFinite("tau"));
        }
        self.points
            .iter()
            .map(|p| Propagator::from_axis_angle(p.axis(), p.omega * tau).map(|u| u.matrix()))
            .collect()
    }
}

fn check_prior(prior: &[f64], n: usize) -> Result<()> {
    if prior.len() != n {
        return Err(Error::LengthMismatch {
            what: "prior vs grid",
            left: prior.len(),
            right: n,
        });
    }
    if let Some(p) = prior.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidPrior(format!("negative or non-finite entry {p}")));
    }
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidPrior(format!("sums to {total}, expected 1")));
    }
    Ok(())
}

/// The filter state: one weighted pure state per hypothesis, plus the cached
/// per-hypothesis propagators for a fixed measurement period.
///
/// A `HybridState` belongs to a single trajectory worker; the grid and Kraus
/// sets it references are shared read-only.
#[derive(Debug, Clone)]
pub struct HybridState {
    branches: Vec<Ket>,
    propagators: Vec<Matrix2>,
}

impl HybridState {
    /// Start the filter: `φᵢ = √(priorᵢ) ψ_e` for every grid point, with the
    /// propagators `U(nᵢ, ωᵢτ)` precomputed.
    pub fn new(
        grid: &HypothesisGrid,
        prior: &[f64],
        psi_e: &PureState,
        tau: f64,
    ) -> Result<Self> {
        check_prior(prior, grid.len())?;
        let branches = prior
            .iter()
            .map(|p| psi_e.ket().scale(p.sqrt()))
            .collect();
        Ok(HybridState {
            branches,
            propagators: grid.propagators(tau)?,
        })
    }

    /// Number of hypotheses.
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Propagate every branch with its own unitary. Weights are unchanged.
    pub fn predict(&mut self) {
        for (phi, u) in self.branches.iter_mut().zip(&self.propagators) {
            *phi = *u * *phi;
        }
    }

    /// Condition on an observed outcome: apply its Kraus operator to every
    /// branch and renormalize the bundle. The weights become the Bayesian
    /// posterior given the outcome.
    pub fn update(&mut self, m: &Matrix2) -> Result<()> {
        let mut total = 0.0;
        for phi in &mut self.branches {
            *phi = *m * *phi;
            total += phi.norm_sq();
        }
        if total < WEIGHT_FLOOR {
            return Err(Error::ImpossibleOutcome(total));
        }
        let inv = 1.0 / total.sqrt();
        for phi in &mut self.branches {
            *phi = phi.scale(inv);
        }
        Ok(())
    }

    /// The posterior `pᵢ = ⟨φᵢ|φᵢ⟩`.
    pub fn posterior(&self) -> Vec<f64> {
        self.branches.iter().map(Ket::norm_sq).collect()
    }

    /// Write the posterior into a caller-provided buffer (hot loop variant).
    pub fn posterior_into(&self, out: &mut [f64]) {
        assert_eq!(out.len(), self.branches.len());
        for (o, phi) in out.iter_mut().zip(&self.branches) {
            *o = phi.norm_sq();
        }
    }

    pub fn posterior_at(&self, index: usize) -> f64 {
        self.branches[index].norm_sq()
    }

    /// `Σᵢ ⟨φᵢ|φᵢ⟩`; 1 within 1e-10 after every update.
    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(Ket::norm_sq).sum()
    }

    /// The estimated qubit state `ρ_e = Σᵢ |φᵢ⟩⟨φᵢ|` (trace = total weight).
    pub fn reduced_state(&self) -> DensityMatrix {
        let mut sum = Matrix2::zero();
        for phi in &self.branches {
            sum = sum + phi.outer(phi);
        }
        DensityMatrix::from_matrix_unchecked(sum)
    }
}

/// Reference filter carrying one weighted density block `P(ωᵢ)·ρᵢ` per
/// hypothesis. Same posterior and reduced state as [`HybridState`], at twice
/// the operator applications; kept as the cross-check oracle.
#[derive(Debug, Clone)]
pub struct QqState {
    blocks: Vec<Matrix2>,
    propagators: Vec<Matrix2>,
}

impl QqState {
    pub fn new(
        grid: &HypothesisGrid,
        prior: &[f64],
        psi_e: &PureState,
        tau: f64,
    ) -> Result<Self> {
        check_prior(prior, grid.len())?;
        let proj = psi_e.density().matrix();
        let blocks = prior
            .iter()
            .map(|p| proj.scale(num_complex::Complex64::new(*p, 0.0)))
            .collect();
        Ok(QqState {
            blocks,
            propagators: grid.propagators(tau)?,
        })
    }

    /// One full cycle on the block-density state:
    /// `blockᵢ ← M Uᵢ blockᵢ Uᵢ† M†`, then global renormalization by the
    /// total trace (the outcome probability).
    pub fn step(&mut self, m: &Matrix2) -> Result<()> {
        let mut total = 0.0;
        for (block, u) in self.blocks.iter_mut().zip(&self.propagators) {
            let evolved = *u * *block * u.adjoint();
            let measured = *m * evolved * m.adjoint();
            total += measured.trace().re;
            *block = measured;
        }
        if total < WEIGHT_FLOOR {
            return Err(Error::ImpossibleOutcome(total));
        }
        let inv = num_complex::Complex64::new(1.0 / total, 0.0);
        for block in &mut self.blocks {
            *block = block.scale(inv);
        }
        Ok(())
    }

    /// `pᵢ = Tr[blockᵢ]`.
    pub fn posterior(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace().re).sum()
    }

    /// `ρ_e = Σᵢ blockᵢ`.
    pub fn reduced_state(&self) -> DensityMatrix {
        let mut sum = Matrix2::zero();
        for b in &self.blocks {
            sum = sum + *b;
        }
        DensityMatrix::from_matrix_unchecked(sum)
    }
}

/// The maximum-a-posteriori grid point. Ties break to the lowest grid index;
/// degenerate pole axes report the canonical `φ = 0` representative.
pub fn map_estimate(posterior: &[f64], grid: &HypothesisGrid) -> ParameterPoint {
    assert_eq!(posterior.len(), grid.len(), "posterior vs grid length");
    let mut best = 0;
    for (i, p) in posterior.iter().enumerate() {
        if *p > posterior[best] {
            best = i;
        }
    }
    grid.points()[best].canonical()
}
