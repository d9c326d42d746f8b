//! Real-time state monitoring and dynamical-parameter estimation for a single
//! driven qubit, using a sequence of unsharp measurements.
//!
//! A two-level system evolves under a Hamiltonian `(Ω/2) n·σ` whose frequency
//! `Ω` (and, in the general case, rotation axis `n`) is only known to lie on a
//! finite grid of candidates. The system is measured repeatedly with weak POVM
//! measurements; every outcome both disturbs the state (back-action) and
//! carries partial information about the dynamics.
//!
//! The estimator maintains one weighted pure state `√P(ωᵢ)|ψᵢ⟩` per candidate
//! parameter. Each cycle it propagates every branch with that branch's own
//! unitary, applies the observed measurement operator, and renormalizes the
//! bundle; the branch weights are then exactly the Bayesian posterior over the
//! grid, and their weighted sum of projectors is the estimated density matrix
//! of the qubit. Carrying pure states instead of density matrices halves the
//! number of operator applications per cycle.
//!
//! Modules:
//!
//! - [`qubit`] — exact 2×2 complex algebra: states, operators, propagators.
//! - [`measurement`] — unsharp Kraus sets (single-axis z and informationally
//!   complete x/y/z) and measurement-strength bookkeeping.
//! - [`trajectory`] — the simulated "real" system: drive, sampled outcomes,
//!   back-action, seeded RNG streams.
//! - [`estimator`] — the hypothesis grid, the pure-state filter, and the
//!   block-density reference implementation used to cross-check it.
//! - [`metrics`] — estimation fidelities and Monte-Carlo aggregation.
//! - [`harness`] — experiment configuration, per-run protocol, parallel
//!   execution, CSV output.
//!
//! The `seqtom` binary exposes the two built-in experiments (`frequency` and
//! `process`) on the command line.

use thiserror::Error;

pub mod estimator;
pub mod harness;
pub mod measurement;
pub mod metrics;
pub mod qubit;
pub mod trajectory;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Tried to normalize a vector with norm below the underflow floor.
    #[error("cannot normalize a state vector with norm below {floor:e}", floor = qubit::NORM_FLOOR)]
    ZeroNorm,

    /// A rotation axis was not a unit vector.
    #[error("rotation axis must be a unit vector, got |n| = {0}")]
    NonUnitAxis(f64),

    /// A numeric input was NaN or infinite.
    #[error("{0} must be finite")]
    NonFinite(&'static str),

    /// Individual measurement strength outside (0, 1].
    #[error("measurement strength delta_p must lie in (0, 1], got {0}")]
    InvalidStrength(f64),

    /// Non-positive measurement period.
    #[error("measurement period tau must be positive, got {0}")]
    InvalidTau(f64),

    /// Two slices that must have equal lengths did not.
    #[error("length mismatch for {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    /// A prior failed to be a probability distribution.
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    /// A hypothesis grid failed its construction invariants.
    #[error("invalid hypothesis grid: {0}")]
    InvalidGrid(String),

    /// A measurement outcome had (numerically) zero probability under every
    /// hypothesis; the filter state cannot be conditioned on it.
    #[error("measurement outcome impossible under every hypothesis (total weight {0:e})")]
    ImpossibleOutcome(f64),

    /// Aggregation or statistics over an empty collection.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    /// Config parsed but failed validation.
    #[error("invalid config: field `{field}`: {message}")]
    ConfigValidation {
        field: &'static str,
        message: String,
    },

    /// Runtime failure outside the numerical core (thread pool, etc.).
    #[error("runtime error: {0}")]
    Runtime(String),

    /// I/O failure on an output path.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user-supplied configuration (CLI exit code 1);
    /// everything else is a runtime error (exit code 2).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ConfigParse(_) | Error::ConfigValidation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
