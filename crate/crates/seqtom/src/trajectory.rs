//! The simulated "real" system: unitary drive for a period `τ`, then one
//! sampled measurement outcome with its back-action, repeated.
//!
//! Sampling uses a single uniform draw per step, mapped through the inverse
//! CDF of the outcome distribution in fixed label order, so a trajectory is
//! bit-reproducible from its seed.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measurement::{KrausSet, Outcome};
use crate::qubit::{Propagator, PureState};
use crate::{Error, Result};

/// The true dynamics: rotation about `axis` at angular frequency `omega`
/// (units of Ω₀), sampled every `tau` (units of 1/Ω₀).
#[derive(Debug, Clone, Copy)]
pub struct TrueDynamics {
    pub omega: f64,
    pub axis: [f64; 3],
    pub tau: f64,
}

impl TrueDynamics {
    /// The per-period propagator `U(n, Ωτ)`.
    pub fn propagator(&self) -> Result<Propagator> {
        Propagator::from_axis_angle(self.axis, self.omega * self.tau)
    }
}

/// A seeded, counter-based random stream. Identical `(seed, stream)` pairs
/// reproduce identical draw sequences bit-for-bit; distinct stream indices
/// never overlap, so Monte-Carlo runs parallelize without coordination.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    seed: u64,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self::for_run(seed, 0)
    }

    /// Stream for one Monte-Carlo run: master seed plus run index.
    pub fn for_run(master_seed: u64, run_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(run_index);
        RngStream {
            rng,
            seed: master_seed,
        }
    }

    /// The master seed this stream was derived from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One uniform draw from [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// A Haar-random pure state from two uniform draws mapped to Bloch
    /// angles: `cos θ` uniform on [−1, 1], `φ` uniform on [0, 2π).
    pub fn haar_state(&mut self) -> PureState {
        let theta = (1.0 - 2.0 * self.uniform()).clamp(-1.0, 1.0).acos();
        let phi = std::f64::consts::TAU * self.uniform();
        PureState::from_bloch(theta, phi)
    }
}

/// The outcome labels of one trajectory, with the seed that generated them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub outcomes: Vec<Outcome>,
    pub seed: u64,
}

impl MeasurementRecord {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}

/// One monitoring cycle: evolve, sample an outcome, apply its back-action.
///
/// Returns the sampled label and the normalized post-measurement state.
pub fn step(
    psi: &PureState,
    u: &Propagator,
    kraus: &KrausSet,
    rng: &mut RngStream,
) -> Result<(Outcome, PureState)> {
    step_with_draw(psi, u, kraus, rng.uniform())
}

/// [`step`] with the uniform draw supplied by the caller; the sampling rule
/// picks the first outcome whose cumulative weight exceeds the draw.
pub fn step_with_draw(
    psi: &PureState,
    u: &Propagator,
    kraus: &KrausSet,
    draw: f64,
) -> Result<(Outcome, PureState)> {
    let evolved = u.apply(psi);

    let ops = kraus.operators();
    let mut acc = 0.0;
    let mut chosen = ops.len() - 1;
    let mut image = None;
    for (i, (_, m)) in ops.iter().enumerate() {
        let (v, w) = m.apply_with_weight(&evolved);
        acc += w;
        if draw < acc {
            chosen = i;
            image = Some(v);
            break;
        }
    }
    // Falling off the end can only happen when the draw lands inside the
    // rounding defect of the total weight; the last outcome takes it.
    let v = image.unwrap_or_else(|| ops[chosen].1.apply_with_weight(&evolved).0);
    Ok((ops[chosen].0, v.normalize()?))
}

/// Run `n` monitoring cycles, returning the outcome record and the `n`
/// post-measurement states. Deterministic given the rng stream.
pub fn run_trajectory(
    dynamics: &TrueDynamics,
    kraus: &KrausSet,
    psi0: &PureState,
    n: usize,
    rng: &mut RngStream,
) -> Result<(MeasurementRecord, Vec<PureState>)> {
    let u = dynamics.propagator()?;
    let mut outcomes = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut psi = *psi0;
    for _ in 0..n {
        let (label, next) = step(&psi, &u, kraus, rng)?;
        outcomes.push(label);
        states.push(next);
        psi = next;
    }
    Ok((
        MeasurementRecord {
            outcomes,
            seed: rng.seed(),
        },
        states,
    ))
}

/// Dump a trajectory as CSV, one line per step:
/// `step,label,re(c0),im(c0),re(c1),im(c1)`.
pub fn write_trajectory_csv<W: Write>(
    w: &mut W,
    record: &MeasurementRecord,
    states: &[PureState],
) -> Result<()> {
    if record.len() != states.len() {
        return Err(Error::LengthMismatch {
            what: "trajectory record vs states",
            left: record.len(),
            right: states.len(),
        });
    }
    writeln!(w, "step,label,re(c0),im(c0),re(c1),im(c1)")?;
    for (i, (label, psi)) in record.outcomes.iter().zip(states).enumerate() {
        writeln!(
            w,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            i + 1,
            label,
            psi.c0().re,
            psi.c0().im,
            psi.c1().re,
            psi.c1().im
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Strength;

    fn identity_prop() -> Propagator {
        Propagator::from_axis_angle([1.0, 0.0, 0.0], 0.0).unwrap()
    }

    #[test]
    fn projective_eigenstate_is_deterministic() {
        let k = KrausSet::unsharp_z(Strength::new(1.0).unwrap());
        let mut rng = RngStream::from_seed(123);
        for _ in 0..100 {
            let (label, psi) = step(&PureState::ground(), &identity_prop(), &k, &mut rng).unwrap();
            assert_eq!(label, Outcome::Z0);
            assert!((psi.c0().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_cdf_rule_on_ground_state() {
        let k = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
        // cumulative weights for |0⟩ are (0.6, 1.0)
        let (label, psi) = step_with_draw(&PureState::ground(), &identity_prop(), &k, 0.59).unwrap();
        assert_eq!(label, Outcome::Z0);
        assert!((psi.c0().re - 1.0).abs() < 1e-12);

        let (label, _) = step_with_draw(&PureState::ground(), &identity_prop(), &k, 0.61).unwrap();
        assert_eq!(label, Outcome::Z1);
    }

    #[test]
    fn backaction_on_plus_state() {
        let k = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
        let plus = PureState::new(num_complex::Complex64::ONE, num_complex::Complex64::ONE)
            .unwrap();
        let (label, psi) = step_with_draw(&plus, &identity_prop(), &k, 0.99).unwrap();
        assert_eq!(label, Outcome::Z1);
        assert!((psi.c0().re - 0.6325).abs() < 1e-4);
        assert!((psi.c1().re - 0.7746).abs() < 1e-4);
    }

    #[test]
    fn trajectory_is_deterministic_given_seed() {
        let d = TrueDynamics {
            omega: 1.0,
            axis: [1.0, 0.0, 0.0],
            tau: 0.37,
        };
        let k = KrausSet::unsharp_z(Strength::new(0.3).unwrap());
        let psi0 = PureState::from_bloch(0.9, 1.4);

        let mut rng_a = RngStream::for_run(42, 5);
        let (rec_a, states_a) = run_trajectory(&d, &k, &psi0, 500, &mut rng_a).unwrap();
        let mut rng_b = RngStream::for_run(42, 5);
        let (rec_b, states_b) = run_trajectory(&d, &k, &psi0, 500, &mut rng_b).unwrap();

        assert_eq!(rec_a, rec_b);
        assert_eq!(states_a, states_b);

        // a different stream gives a different record
        let mut rng_c = RngStream::for_run(42, 6);
        let (rec_c, _) = run_trajectory(&d, &k, &psi0, 500, &mut rng_c).unwrap();
        assert_ne!(rec_a.outcomes, rec_c.outcomes);
    }

    #[test]
    fn single_step_trajectory_reduces_to_step() {
        let d = TrueDynamics {
            omega: 0.8,
            axis: [0.0, 0.0, 1.0],
            tau: 0.5,
        };
        let k = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
        let psi0 = PureState::from_bloch(1.2, 0.3);

        let mut rng = RngStream::from_seed(7);
        let (rec, states) = run_trajectory(&d, &k, &psi0, 1, &mut rng).unwrap();

        let mut rng = RngStream::from_seed(7);
        let (label, psi) = step(&psi0, &d.propagator().unwrap(), &k, &mut rng).unwrap();
        assert_eq!(rec.outcomes, vec![label]);
        assert_eq!(states, vec![psi]);
    }

    #[test]
    fn stroboscopic_identity_keeps_ground_state() {
        // Ωτ = 2π: evolution is −I per period; projective z-set sees |0⟩ forever
        let d = TrueDynamics {
            omega: 1.0,
            axis: [1.0, 0.0, 0.0],
            tau: std::f64::consts::TAU,
        };
        let k = KrausSet::unsharp_z(Strength::new(1.0).unwrap());
        let mut rng = RngStream::from_seed(3);
        let (rec, states) =
            run_trajectory(&d, &k, &PureState::ground(), 1000, &mut rng).unwrap();
        assert!(rec.outcomes.iter().all(|&o| o == Outcome::Z0));
        assert!(states
            .iter()
            .all(|s| s.excited_population() < 1e-20));
    }

    #[test]
    fn empirical_frequencies_match_distribution() {
        // frozen state: no evolution, |0⟩ is an eigenstate of both operators
        let d = TrueDynamics {
            omega: 0.0,
            axis: [0.0, 0.0, 1.0],
            tau: 1.0,
        };
        let k = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
        let n = 100_000;
        let mut rng = RngStream::from_seed(2024);
        let (rec, _) = run_trajectory(&d, &k, &PureState::ground(), n, &mut rng).unwrap();
        let freq = rec.outcomes.iter().filter(|&&o| o == Outcome::Z0).count() as f64 / n as f64;
        let sigma = (0.6 * 0.4 / n as f64).sqrt();
        assert!(
            (freq - 0.6).abs() < 3.0 * sigma,
            "freq {freq} vs 0.6 ± {}",
            3.0 * sigma
        );
    }

    #[test]
    fn norm_stays_pinned_over_a_million_steps() {
        let d = TrueDynamics {
            omega: 1.03,
            axis: [1.0, 0.0, 0.0],
            tau: 0.628,
        };
        let k = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
        let u = d.propagator().unwrap();
        let mut rng = RngStream::from_seed(5);
        let mut psi = PureState::ground();
        for _ in 0..1_000_000 {
            let (_, next) = step(&psi, &u, &k, &mut rng).unwrap();
            psi = next;
        }
        assert!((psi.norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn trajectory_csv_schema() {
        let d = TrueDynamics {
            omega: 1.0,
            axis: [1.0, 0.0, 0.0],
            tau: 0.6,
        };
        let k = KrausSet::unsharp_z(Strength::new(0.2).unwrap());
        let mut rng = RngStream::from_seed(1);
        let (rec, states) = run_trajectory(&d, &k, &PureState::ground(), 3, &mut rng).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &rec, &states).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "step,label,re(c0),im(c0),re(c1),im(c1)"
        );
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(1).unwrap().starts_with("1,z"));
    }
}
