//! Shared test oracles, kept independent of the library's closed-form paths.

use num_complex::Complex64 as C64;
use seqtom::qubit::Matrix2;

/// Reference propagator `exp(-i φ (n·σ) / 2)` via a 30-term Taylor series.
///
/// The angle is halved into the series' fast-convergence regime
/// (|φ| ≤ π/2, truncation error < 1e-26) and the result squared back up, so
/// the oracle holds 1e-10 over the whole ±4π test range. No trigonometric
/// closed form is used anywhere.
pub fn series_propagator(axis: [f64; 3], angle: f64) -> Matrix2 {
    let mut a = angle;
    let mut halvings = 0u32;
    while a.abs() > std::f64::consts::FRAC_PI_2 {
        a *= 0.5;
        halvings += 1;
    }

    let generator = Matrix2::axis_dot_sigma(axis).scale(C64::new(0.0, -0.5 * a));
    let mut sum = Matrix2::identity();
    let mut term = Matrix2::identity();
    for k in 1..30 {
        term = (term * generator).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
    }

    for _ in 0..halvings {
        sum = sum * sum;
    }
    sum
}

/// A random point on the unit sphere.
#[allow(dead_code)] // not every test binary that includes this module uses it
pub fn random_axis(rng: &mut seqtom::trajectory::RngStream) -> [f64; 3] {
    let z = 1.0 - 2.0 * rng.uniform();
    let az = std::f64::consts::TAU * rng.uniform();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * az.cos(), r * az.sin(), z]
}
