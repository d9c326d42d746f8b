//! Exact 2×2 complex linear algebra for qubit states, density matrices and
//! unitary propagators.
//!
//! Everything here is a small immutable value type and every operation is a
//! pure function, so values can be shared and sent across threads freely.
//! Global phase is never canonicalized; comparisons of physical content go
//! through overlaps and fidelities.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

use crate::{Error, Result};

/// Smallest vector norm [`Ket::normalize`] accepts. Anything below this is
/// treated as the application of an impossible measurement outcome.
pub const NORM_FLOOR: f64 = 1e-150;


/// An unnormalized two-component complex amplitude vector.
///
/// This is the raw carrier for measurement back-action and for the filter's
/// weighted branches; [`PureState`] wraps it once normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket {
    pub c0: C64,
    pub c1: C64,
}

impl Ket {
    pub const fn new(c0: C64, c1: C64) -> Self {
        Ket { c0, c1 }
    }

    pub fn zero() -> Self {
        Ket::new(C64::ZERO, C64::ZERO)
    }

    /// Squared Euclidean norm `|c0|² + |c1|²`.
    pub fn norm_sq(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.c0.conj() * other.c0 + self.c1.conj() * other.c1
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Ket) -> Matrix2 {
        let b0 = other.c0.conj();
        let b1 = other.c1.conj();
        Matrix2::new(self.c0 * b0, self.c0 * b1, self.c1 * b0, self.c1 * b1)
    }

    pub fn scale(&self, s: f64) -> Self {
        Ket::new(self.c0 * s, self.c1 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite()
    }

    /// Normalize to a [`PureState`], preserving direction (and global phase).
    ///
    /// Fails with [`Error::ZeroNorm`] when the norm is at or below
    /// [`NORM_FLOOR`], which signals that an impossible measurement outcome
    /// was applied upstream.
    pub fn normalize(&self) -> Result<PureState> {
        let norm = self.norm_sq().sqrt();
        if norm.is_nan() || norm <= NORM_FLOOR {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm;
        Ok(PureState(Ket::new(self.c0 * inv, self.c1 * inv)))
    }
}

impl Add for Ket {
    type Output = Ket;
    fn add(self, rhs: Ket) -> Ket {
        Ket::new(self.c0 + rhs.c0, self.c1 + rhs.c1)
    }
}

/// A normalized qubit state `c0|0⟩ + c1|1⟩` with `|c0|² + |c1|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState(Ket);

impl PureState {
    /// `|0⟩`, the ground state.
    pub fn ground() -> Self {
        PureState(Ket::new(C64::ONE, C64::ZERO))
    }

    /// `|1⟩`, the excited state.
    pub fn excited() -> Self {
        PureState(Ket::new(C64::ZERO, C64::ONE))
    }

    /// Build from raw amplitudes, normalizing them.
    pub fn new(c0: C64, c1: C64) -> Result<Self> {
        Ket::new(c0, c1).normalize()
    }

    /// State at Bloch angles `(θ, φ)`: `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        PureState(Ket::new(C64::new(c, 0.0), C64::from_polar(s, phi)))
    }

    pub fn c0(&self) -> C64 {
        self.0.c0
    }

    pub fn c1(&self) -> C64 {
        self.0.c1
    }

    pub fn ket(&self) -> Ket {
        self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_sq()
    }

    /// Excited-level population `|c1|²`.
    pub fn excited_population(&self) -> f64 {
        self.0.c1.norm_sqr()
    }

    /// The orthogonal state `(-c1*, c0*)`, satisfying `⟨ψ⊥|ψ⟩ = 0`.
    pub fn orthogonal(&self) -> Self {
        PureState(Ket::new(-self.0.c1.conj(), self.0.c0.conj()))
    }

    /// Inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> C64 {
        self.0.inner(&other.0)
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(self.0.outer(&self.0))
    }

    /// Wrap a ket that is already normalized (e.g. the output of a unitary).
    pub(crate) fn from_ket_unchecked(ket: Ket) -> Self {
        PureState(ket)
    }
}

/// A general 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m: [[C64; 2]; 2],
}

impl Matrix2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Matrix2 {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn zero() -> Self {
        Matrix2::new(C64::ZERO, C64::ZERO, C64::ZERO, C64::ZERO)
    }

    pub fn identity() -> Self {
        Matrix2::new(C64::ONE, C64::ZERO, C64::ZERO, C64::ONE)
    }

    pub fn pauli_x() -> Self {
        Matrix2::new(C64::ZERO, C64::ONE, C64::ONE, C64::ZERO)
    }

    pub fn pauli_y() -> Self {
        Matrix2::new(C64::ZERO, -C64::I, C64::I, C64::ZERO)
    }

    pub fn pauli_z() -> Self {
        Matrix2::new(C64::ONE, C64::ZERO, C64::ZERO, -C64::ONE)
    }

    /// Real diagonal matrix `diag(a, b)`.
    pub fn diag(a: f64, b: f64) -> Self {
        Matrix2::new(C64::new(a, 0.0), C64::ZERO, C64::ZERO, C64::new(b, 0.0))
    }

    /// `n·σ` for a real 3-vector `n`.
    pub fn axis_dot_sigma(n: [f64; 3]) -> Self {
        let [nx, ny, nz] = n;
        Matrix2::new(
            C64::new(nz, 0.0),
            C64::new(nx, -ny),
            C64::new(nx, ny),
            C64::new(-nz, 0.0),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Matrix2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Matrix2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Apply to a normalized state, returning the unnormalized image together
    /// with the outcome weight `⟨ψ|M†M|ψ⟩ = ‖Mψ‖²`.
    pub fn apply_with_weight(&self, psi: &PureState) -> (Ket, f64) {
        let out = *self * psi.ket();
        let weight = out.norm_sq();
        (out, weight)
    }

    /// Largest entrywise absolute difference; convenient matrix distance for
    /// tolerance checks.
    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .all(|row| row.iter().all(|e| e.is_finite()))
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl Mul<Ket> for Matrix2 {
    type Output = Ket;
    fn mul(self, v: Ket) -> Ket {
        #[cfg(test)]
        opcount::MATVEC.with(|c| c.set(c.get() + 1));
        Ket::new(
            self.m[0][0] * v.c0 + self.m[0][1] * v.c1,
            self.m[1][0] * v.c0 + self.m[1][1] * v.c1,
        )
    }
}

impl Mul<Matrix2> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        #[cfg(test)]
        opcount::MATMUL.with(|c| c.set(c.get() + 1));
        Matrix2::new(
            self.m[0][0] * rhs.m[0][0] + self.m[0][1] * rhs.m[1][0],
            self.m[0][0] * rhs.m[0][1] + self.m[0][1] * rhs.m[1][1],
            self.m[1][0] * rhs.m[0][0] + self.m[1][1] * rhs.m[1][0],
            self.m[1][0] * rhs.m[0][1] + self.m[1][1] * rhs.m[1][1],
        )
    }
}

/// A qubit density matrix: Hermitian, positive semidefinite, trace ≈ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix2);

const HERMITICITY_TOL: f64 = 1e-12;
const EIGENVALUE_TOL: f64 = -1e-12;

impl DensityMatrix {
    /// Validate and wrap a matrix. Hermiticity within 1e-12 and eigenvalues
    /// ≥ −1e-12 are required; the trace is the caller's business (a mixture
    /// under construction may be unnormalized).
    pub fn new(m: Matrix2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix entries"));
        }
        let herm_defect = (m.m[0][1] - m.m[1][0].conj())
            .norm()
            .max(m.m[0][0].im.abs())
            .max(m.m[1][1].im.abs());
        if herm_defect > HERMITICITY_TOL {
            return Err(Error::NonFinite("density matrix (not Hermitian)"));
        }
        let rho = DensityMatrix(m);
        let (lo, _) = rho.eigenvalues();
        if lo < EIGENVALUE_TOL {
            return Err(Error::NonFinite("density matrix (negative eigenvalue)"));
        }
        Ok(rho)
    }

    /// Wrap without validation; for matrices valid by construction.
    pub(crate) fn from_matrix_unchecked(m: Matrix2) -> Self {
        DensityMatrix(m)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &PureState) -> Self {
        psi.density()
    }

    /// `I/2`.
    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix2::identity().scale(C64::new(0.5, 0.0)))
    }

    pub fn matrix(&self) -> Matrix2 {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues of the Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.0.m[0][0].re;
        let d = self.0.m[1][1].re;
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + self.0.m[0][1].norm_sqr()).sqrt();
        (mid - rad, mid + rad)
    }

    /// Expectation value `⟨ψ|ρ|ψ⟩` (real for Hermitian ρ).
    pub fn expectation(&self, psi: &PureState) -> f64 {
        let v = psi.ket();
        let rv = self.0 * v;
        v.inner(&rv).re
    }
}

/// Overlap `⟨ψ|ρ|ψ⟩` between a pure state and a density matrix; equals 1
/// exactly when `ρ = |ψ⟩⟨ψ|`.
pub fn pure_mixed_fidelity(psi: &PureState, rho: &DensityMatrix) -> f64 {
    rho.expectation(psi).max(0.0)
}

/// The unitary `exp(-i φ (n·σ) / 2)` rotating the Bloch sphere by angle `φ`
/// about the unit axis `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator(Matrix2);

const AXIS_TOL: f64 = 1e-10;

impl Propagator {
    /// Closed form `cos(φ/2)·I − i·sin(φ/2)·(n·σ)`.
    ///
    /// `axis` must be a unit vector within 1e-10 and `angle` finite. With
    /// `ħ = 1` and the Hamiltonian `(Ω/2) n·σ`, the evolution over a period
    /// `τ` is obtained with `angle = Ω·τ`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOL {
            return Err(Error::NonUnitAxis(norm));
        }
        if !angle.is_finite() {
            return Err(Error::NonFinite("rotation angle"));
        }
        let (s, c) = (0.5 * angle).sin_cos();
        let u = Matrix2::identity().scale(C64::new(c, 0.0))
            + Matrix2::axis_dot_sigma(axis).scale(C64::new(0.0, -s));
        Ok(Propagator(u))
    }

    pub fn matrix(&self) -> Matrix2 {
        self.0
    }

    /// Apply to a normalized state. Unitarity keeps the norm at 1 up to
    /// rounding; downstream measurement updates renormalize every step.
    pub fn apply(&self, psi: &PureState) -> PureState {
        PureState::from_ket_unchecked(self.0 * psi.ket())
    }

    /// `‖U†U − I‖_max`, for tests.
    pub fn unitarity_defect(&self) -> f64 {
        (self.0.adjoint() * self.0).max_abs_diff(&Matrix2::identity())
    }
}
