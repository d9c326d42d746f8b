//! Property tests for the algebra and metrics invariants.

mod common;

use proptest::prelude::*;
use seqtom::measurement::{KrausSet, Strength};
use seqtom::metrics::{classical_fidelity, delta_fidelity};
use seqtom::qubit::{Ket, Propagator, PureState};

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6..1.0f64, len).prop_map(|mut v| {
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= total);
        v
    })
}

proptest! {
    #[test]
    fn classical_fidelity_is_symmetric_and_bounded(
        p in distribution(9),
        q in distribution(9),
    ) {
        let fwd = classical_fidelity(&p, &q).unwrap();
        let rev = classical_fidelity(&q, &p).unwrap();
        prop_assert!((fwd - rev).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&fwd));
    }

    #[test]
    fn classical_fidelity_is_one_only_on_equal_distributions(
        p in distribution(7),
        q in distribution(7),
    ) {
        let f = classical_fidelity(&p, &q).unwrap();
        let equal = p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-10);
        if equal {
            prop_assert!((f - 1.0).abs() < 1e-8);
        }
        if (f - 1.0).abs() < 1e-12 {
            prop_assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-5));
        }
        prop_assert!((classical_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_fidelity_squares_to_posterior_mass(
        p in distribution(11),
        truth in 0usize..11,
    ) {
        let f = delta_fidelity(&p, truth);
        prop_assert!((f * f - p[truth]).abs() < 1e-12);

        let mut delta = vec![0.0; 11];
        delta[truth] = 1.0;
        prop_assert_eq!(classical_fidelity(&p, &delta).unwrap(), f);
    }

    #[test]
    fn propagator_is_unitary_and_matches_series(
        z in -1.0..1.0f64,
        azimuth in 0.0..std::f64::consts::TAU,
        angle in -4.0 * std::f64::consts::PI..4.0 * std::f64::consts::PI,
    ) {
        let r = (1.0 - z * z).max(0.0).sqrt();
        let axis = [r * azimuth.cos(), r * azimuth.sin(), z];
        let u = Propagator::from_axis_angle(axis, angle).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-10);
        prop_assert!(u.matrix().max_abs_diff(&common::series_propagator(axis, angle)) < 1e-10);
    }

    #[test]
    fn kraus_sets_are_complete_and_normalized(
        delta_p in 1e-6..=1.0f64,
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..std::f64::consts::TAU,
    ) {
        let s = Strength::new(delta_p).unwrap();
        let psi = PureState::from_bloch(theta, phi);
        for k in [KrausSet::unsharp_z(s), KrausSet::informationally_complete(s)] {
            prop_assert!(k.completeness_defect() < 1e-12);
            let total: f64 = k.outcome_distribution(&psi).iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_preserves_direction(
        re0 in -1.0..1.0f64, im0 in -1.0..1.0f64,
        re1 in -1.0..1.0f64, im1 in -1.0..1.0f64,
    ) {
        let v = Ket::new(
            num_complex::Complex64::new(re0, im0),
            num_complex::Complex64::new(re1, im1),
        );
        prop_assume!(v.norm_sq().sqrt() > 1e-6);
        let n = v.normalize().unwrap();
        prop_assert!((n.norm_sq() - 1.0).abs() < 1e-12);
        // direction preserved: v = ‖v‖ · n
        let norm = v.norm_sq().sqrt();
        prop_assert!((n.c0() * norm - v.c0).norm() < 1e-9);
        prop_assert!((n.c1() * norm - v.c1).norm() < 1e-9);
    }
}
