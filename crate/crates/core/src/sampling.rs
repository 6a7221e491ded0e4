//! Random inputs for the randomized audits: coefficient sets that satisfy
//! every causality condition, boosted velocities and unit covectors.

use rand::Rng;

use crate::eos::{CoefficientSample, TransportValues};
use crate::kinematics::{normalize_velocity, FourCovector, FourVector};
use crate::symbol::{betas, causality_report};

/// Coefficients used as the reference passing set throughout the tests.
pub const REFERENCE_TRANSPORT: TransportValues = TransportValues {
    eta: 0.5,
    chi1: 1.0,
    chi2: 1.0,
    chi3: 0.3,
    chi4: 2.0 / 3.0 + 0.01,
    lambda: 1.0,
};

/// The reference set at `ε = 1` with `P = ε/3`.
pub fn reference_coefficients() -> CoefficientSample {
    CoefficientSample::from_parts(1.0, 1.0 / 3.0, 1.0 / 3.0, REFERENCE_TRANSPORT)
}

/// Rejection-samples coefficients with a true causality verdict and pairwise
/// `β` gaps of at least `min_separation`. Panics after `10⁵` rejections.
pub fn passing_coefficients<R: Rng + ?Sized>(rng: &mut R, min_separation: f64) -> CoefficientSample {
    for _ in 0..100_000 {
        let eps = rng.random_range(0.5..2.0);
        let cs2 = rng.random_range(0.05..0.6);
        let lambda = rng.random_range(0.5..2.0);
        let eta = lambda * rng.random_range(0.05..0.95);
        let t = TransportValues {
            eta,
            lambda,
            chi1: rng.random_range(0.5..4.0),
            chi2: rng.random_range(0.0..2.0),
            chi3: rng.random_range(0.0..1.0),
            chi4: 4.0 * eta / 3.0 + rng.random_range(0.01..2.0),
        };
        let c = CoefficientSample::from_parts(eps, cs2 * eps, cs2, t);
        if !causality_report(&c).verdict {
            continue;
        }
        if betas(&c).is_ok_and(|b| b.min_separation() >= min_separation) {
            return c;
        }
    }
    panic!("no passing coefficient sample found");
}

/// Four-velocity whose spatial part is uniform in `[-scale, scale]³`.
pub fn boosted_velocity<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> FourVector {
    normalize_velocity(std::array::from_fn(|_| rng.random_range(-scale..scale)))
}

/// Uniformly oriented covector of unit Euclidean length.
pub fn unit_covector<R: Rng + ?Sized>(rng: &mut R) -> FourCovector {
    loop {
        let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return FourCovector(w.map(|x| x / n));
        }
    }
}

/// Unit spatial direction `ζ = (0, n)`.
pub fn spatial_direction<R: Rng + ?Sized>(rng: &mut R) -> FourCovector {
    loop {
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return FourCovector([0.0, w[0] / n, w[1] / n, w[2] / n]);
        }
    }
}
