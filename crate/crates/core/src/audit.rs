//! Randomized verification suites over the characteristic analysis.
//!
//! Sample `i` of a suite draws from its own ChaCha stream keyed by
//! `(seed, suite, i)`, so results do not depend on thread count or order.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eos::CoefficientSample;
use crate::kinematics::{projector_upper, FourCovector, FourVector};
use crate::par::Execution;
use crate::sampling::{boosted_velocity, passing_coefficients, spatial_direction, unit_covector};
use crate::symbol::{
    det_factorization_check, eigenstructure, predicted_eigenvalues, rank_one_det_identity_check,
    second_order_factorization_check, DeterminantCheck, SpectrumOptions, SymbolError, EXPECTED_PATTERN,
};

/// Independent random stream for one sample of one suite.
pub fn sample_rng(seed: u64, suite: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&suite.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeterminantSuite {
    /// 30×30 first-order symbol.
    FirstOrder,
    /// 5×5 second-order symbol.
    SecondOrder,
    /// `det(A I + B 𝔟𝔟ᵀ + C 𝔟Ξᵀ)` with `𝔟 = ΠΞ`.
    RankOne,
}

impl DeterminantSuite {
    fn stream(self) -> u64 {
        match self {
            DeterminantSuite::FirstOrder => 1,
            DeterminantSuite::SecondOrder => 2,
            DeterminantSuite::RankOne => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteParams {
    pub seed: u64,
    /// Spatial components of `u` are uniform in `[-boost, boost]`.
    pub boost: f64,
    /// Minimum pairwise gap of the `β_a` in eigenstructure samples.
    pub min_separation: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            seed: 1,
            boost: 1.0,
            min_separation: 1e-3,
        }
    }
}

/// One random determinant sample with its inputs.
pub fn determinant_sample(
    suite: DeterminantSuite,
    params: &SuiteParams,
    index: u64,
) -> Result<DeterminantCheck, SymbolError> {
    let mut rng = sample_rng(params.seed, suite.stream(), index);
    match suite {
        DeterminantSuite::FirstOrder | DeterminantSuite::SecondOrder => {
            let c = passing_coefficients(&mut rng, 0.0);
            let u = boosted_velocity(&mut rng, params.boost);
            let xi = unit_covector(&mut rng);
            if suite == DeterminantSuite::FirstOrder {
                det_factorization_check(&c, &u, &xi)
            } else {
                second_order_factorization_check(&c, &u, &xi)
            }
        }
        DeterminantSuite::RankOne => {
            use rand::Rng;
            let u = boosted_velocity(&mut rng, params.boost);
            let xi = unit_covector(&mut rng);
            let p = projector_upper(&u.0);
            let b = FourVector(std::array::from_fn(|m| (0..4).map(|k| p[m][k] * xi.0[k]).sum()));
            let a = rng.random_range(-2.0..2.0);
            let bb = rng.random_range(-2.0..2.0);
            let cc = rng.random_range(-2.0..2.0);
            rank_one_det_identity_check(a, bb, cc, &b, &xi)
        }
    }
}

pub fn determinant_suite(
    suite: DeterminantSuite,
    params: &SuiteParams,
    samples: usize,
    execution: Execution,
) -> Result<Vec<DeterminantCheck>, SymbolError> {
    execution.try_map(samples, |i| determinant_sample(suite, params, i as u64))
}

/// Compact record of one eigenstructure sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub max_imag_over_radius: f64,
    pub spectral_radius: f64,
    pub pattern: Vec<usize>,
    pub geometric_total: usize,
    pub matches_expected: bool,
    pub degenerate: bool,
    /// Absent when the eigenvectors are incomplete.
    pub residual: Option<f64>,
    pub condition: Option<f64>,
    /// Largest distance of a computed eigenvalue (real part) from the closed-form speeds.
    pub prediction_error: f64,
    pub beta_separation: f64,
}

pub fn eigen_sample(
    params: &SuiteParams,
    options: &SpectrumOptions,
    index: u64,
) -> Result<SpectrumSummary, SymbolError> {
    let mut rng = sample_rng(params.seed, 4, index);
    let c: CoefficientSample = passing_coefficients(&mut rng, params.min_separation);
    let u = boosted_velocity(&mut rng, params.boost);
    let zeta: FourCovector = spatial_direction(&mut rng);
    let r = eigenstructure(&c, &u, &zeta, options)?;
    let predicted = predicted_eigenvalues(&c, &u, &zeta)?;
    let prediction_error = r
        .eigenvalues
        .iter()
        .map(|z| {
            predicted
                .iter()
                .map(|p| (z - p).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(SpectrumSummary {
        max_imag_over_radius: r.max_imag / r.spectral_radius.max(f64::MIN_POSITIVE),
        spectral_radius: r.spectral_radius,
        pattern: r.pattern.clone(),
        geometric_total: r.geometric_total,
        matches_expected: r.matches_expected,
        degenerate: r.degenerate,
        residual: r.residual,
        condition: r.condition,
        prediction_error,
        beta_separation: crate::symbol::betas(&c)?.min_separation(),
    })
}

pub fn eigen_suite(
    params: &SuiteParams,
    options: &SpectrumOptions,
    samples: usize,
    execution: Execution,
) -> Result<Vec<SpectrumSummary>, SymbolError> {
    execution.try_map(samples, |i| eigen_sample(params, options, i as u64))
}

/// Counts of multiplicity patterns, keyed as `"20,3,3,1,1,1,1"`.
pub fn pattern_histogram(samples: &[SpectrumSummary]) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for s in samples {
        let key = s.pattern.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        *h.entry(key).or_insert(0) += 1;
    }
    h
}

/// The pattern expected for distinct `β_a`, as a histogram key.
pub fn expected_pattern_key() -> String {
    EXPECTED_PATTERN.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_do_not_depend_on_execution_mode() {
        let p = SuiteParams::default();
        let a = determinant_suite(DeterminantSuite::FirstOrder, &p, 16, Execution::Sequential).unwrap();
        let b = determinant_suite(DeterminantSuite::FirstOrder, &p, 16, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let one = determinant_sample(DeterminantSuite::FirstOrder, &p, 9).unwrap();
        assert_eq!(one, a[9]);
    }

    #[test]
    fn streams_differ_between_suites_and_seeds() {
        use rand::Rng;
        let x: u64 = sample_rng(1, 1, 0).random();
        assert_ne!(x, sample_rng(1, 2, 0).random::<u64>());
        assert_ne!(x, sample_rng(2, 1, 0).random::<u64>());
        assert_ne!(x, sample_rng(1, 1, 1).random::<u64>());
        assert_eq!(x, sample_rng(1, 1, 0).random::<u64>());
    }

    #[test]
    fn small_suites_pass() {
        let p = SuiteParams::default();
        for suite in [DeterminantSuite::FirstOrder, DeterminantSuite::SecondOrder, DeterminantSuite::RankOne] {
            let r = determinant_suite(suite, &p, 20, Execution::Parallel).unwrap();
            assert!(r.iter().all(|d| d.rel_error <= 1e-6), "{suite:?}");
        }
        let e = eigen_suite(&p, &SpectrumOptions::default(), 4, Execution::Parallel).unwrap();
        assert!(e.iter().all(|s| s.matches_expected && s.residual.is_some_and(|r| r <= 1e-8)));
        let h = pattern_histogram(&e);
        assert_eq!(h.get(&expected_pattern_key()), Some(&4));
    }
}
