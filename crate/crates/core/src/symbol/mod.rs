//! Characteristic analysis of the equations of motion.
//!
//! The characteristic determinant of both the 30-variable first-order
//! reformulation and the 5-variable second-order system factors into
//! quadratic forms `(u·Ξ)² − β_a Π(Ξ,Ξ)` with squared speeds
//! `β_a ∈ {0, η/λ, β₋, β₊}`. This module computes those speeds, evaluates the
//! causality inequalities that keep them in `[0, 1]`, assembles the principal
//! matrices, checks both factorizations against brute-force determinants and
//! numerically diagonalizes the first-order symbol.

mod first_order;
mod second_order;
mod spectrum;

pub use first_order::{
    assemble_first_order, contracted_first_order, det_factorization_check,
    rank_one_det_identity_check, DeterminantCheck, PrincipalMatrix, StateVector30,
    layout,
};
pub use second_order::{assemble_second_order, second_order_factorization_check, SecondOrderSymbol};
pub use spectrum::{
    eigenstructure, predicted_eigenvalues, EigenCluster, SpectrumOptions, SpectrumReport,
    EXPECTED_PATTERN,
};

use serde::Serialize;
use thiserror::Error;

use crate::eos::CoefficientSample;
use crate::kinematics::{projector_upper, FourCovector, FourVector, KinematicsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("λ·χ₁ = {0} must be nonzero")]
    Coefficient(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("squared speed β = {0} is outside [0, 1]")]
    InvalidBeta(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate direction: root denominator {0:e} vanishes")]
    DegenerateDirection(f64),
    #[error("non-causal input: discriminant 𝒲 = {0:e} is negative")]
    NonCausalInput(f64),
    #[error("both determinants are below 1e-300 ({brute:e}, {closed:e})")]
    SingularSample { brute: f64, closed: f64 },
    #[error("coefficients fail the causality conditions: {0:?}")]
    Acausal(Vec<&'static str>),
    #[error("principal matrix along the time direction is singular")]
    SingularPrincipal,
    #[error("eigenvalue iteration did not converge")]
    EigenFailure,
}

/// The pair `β±`, real when the discriminant is nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AcousticPair {
    Real { minus: f64, plus: f64 },
    ComplexConjugate { re: f64, im: f64 },
}

/// Squared characteristic speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaSet {
    pub delta_d: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub acoustic: AcousticPair,
}

impl BetaSet {
    /// `[β₁, β₂, β₋, β₊]` when all four are real.
    pub fn real_values(&self) -> Option<[f64; 4]> {
        match self.acoustic {
            AcousticPair::Real { minus, plus } => Some([self.beta1, self.beta2, minus, plus]),
            AcousticPair::ComplexConjugate { .. } => None,
        }
    }

    /// Sum and product of `β₋, β₊`: real even when the pair is complex.
    pub fn acoustic_sum_product(&self) -> (f64, f64) {
        match self.acoustic {
            AcousticPair::Real { minus, plus } => (minus + plus, minus * plus),
            AcousticPair::ComplexConjugate { re, im } => (2.0 * re, re * re + im * im),
        }
    }

    /// `max_a √β_a`, the fastest characteristic speed in the fluid frame.
    pub fn max_speed(&self) -> Option<f64> {
        self.real_values()
            .map(|b| b.iter().fold(0.0f64, |m, x| m.max(x.max(0.0).sqrt())))
    }

    /// Smallest gap between two of the four values (0 for a complex pair).
    pub fn min_separation(&self) -> f64 {
        let Some(b) = self.real_values() else { return 0.0 };
        let mut gap = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                gap = gap.min((b[i] - b[j]).abs());
            }
        }
        gap
    }

    /// `∏_a ((u·Ξ)² − β_a Π(Ξ,Ξ))^{n_a}` for exponents `[n₁, n₂, n±]`.
    pub(crate) fn factor_product(&self, a: f64, bb: f64, exponents: [i32; 3]) -> f64 {
        let a2 = a * a;
        let (sum, prod) = self.acoustic_sum_product();
        let pair = match self.acoustic {
            AcousticPair::Real { minus, plus } => (a2 - minus * bb) * (a2 - plus * bb),
            AcousticPair::ComplexConjugate { .. } => a2 * a2 - sum * a2 * bb + prod * bb * bb,
        };
        (a2 - self.beta1 * bb).powi(exponents[0])
            * (a2 - self.beta2 * bb).powi(exponents[1])
            * pair.powi(exponents[2])
    }
}

fn discriminant(c: &CoefficientSample) -> f64 {
    let (l, eta, c1, c2, c3, c4, cs2) = (c.lambda, c.eta, c.chi1, c.chi2, c.chi3, c.chi4, c.cs2);
    let k = c1 * (4.0 * eta - 3.0 * c4);
    9.0 * l * l * c2 * c2 * cs2 * cs2
        + 6.0 * l * cs2 * (k * (2.0 * l + c2) + 3.0 * c2 * c3 * (l + c2))
        + (k + 3.0 * c3 * (l + c2)).powi(2)
}

/// Squared characteristic speeds of the coefficient sample.
pub fn betas(c: &CoefficientSample) -> Result<BetaSet, SymbolError> {
    let denom = 6.0 * c.lambda * c.chi1;
    if denom == 0.0 || !denom.is_finite() {
        return Err(SymbolError::Coefficient(c.lambda * c.chi1));
    }
    let delta_d = discriminant(c);
    let center = 3.0 * c.lambda * c.chi2 * c.cs2
        + c.chi1 * (4.0 * c.eta - 3.0 * c.chi4)
        + 3.0 * c.chi3 * (c.lambda + c.chi2);
    let acoustic = if delta_d >= 0.0 {
        let r = delta_d.sqrt();
        AcousticPair::Real {
            minus: (center - r) / denom,
            plus: (center + r) / denom,
        }
    } else {
        AcousticPair::ComplexConjugate {
            re: center / denom,
            im: (-delta_d).sqrt() / denom,
        }
    };
    Ok(BetaSet {
        delta_d,
        beta1: 0.0,
        beta2: c.eta / c.lambda,
        acoustic,
    })
}

/// Outcome of every causality condition for one coefficient sample.
/// Strict and non-strict inequalities are kept exactly as stated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalityReport {
    /// `λ > 0`, `χ₁ > 0`, `η > 0`
    pub positivity: bool,
    /// `Δ_D > 0`
    pub discriminant_positive: bool,
    /// `λ ≥ η`
    pub lambda_ge_eta: bool,
    /// `3χ₄ > 4η`
    pub chi4_gt_four_thirds_eta: bool,
    /// `2λχ₁ ≥ λχ₂c_s² − χ₁(χ₄ − 4η/3) + λχ₃ + χ₃χ₂`
    pub plus_branch_bound: bool,
    /// `λχ₁ + c_s²λ(χ₄ − 4η/3) ≥ c_s²λχ₂ + λχ₃ + χ₂χ₃ − χ₁(χ₄ − 4η/3) ≥ 0`
    pub composite_bounds: bool,
    /// `0 ≤ β_a ≤ 1` for all four squared speeds
    pub beta_in_unit_interval: bool,
    pub betas: Option<BetaSet>,
    pub verdict: bool,
    /// Names of the failed checks, in declaration order.
    pub failed: Vec<&'static str>,
}

pub fn causality_report(c: &CoefficientSample) -> CausalityReport {
    let (l, eta, c1, c2, c3, c4, cs2) = (c.lambda, c.eta, c.chi1, c.chi2, c.chi3, c.chi4, c.cs2);
    let positivity = l > 0.0 && c1 > 0.0 && eta > 0.0;
    let delta_d = discriminant(c);
    let shifted = c4 - 4.0 * eta / 3.0;
    let middle = cs2 * l * c2 + l * c3 + c2 * c3 - c1 * shifted;
    let checks = [
        ("positivity", positivity),
        ("discriminant_positive", delta_d > 0.0),
        ("lambda_ge_eta", l >= eta),
        ("chi4_gt_four_thirds_eta", 3.0 * c4 > 4.0 * eta),
        (
            "plus_branch_bound",
            2.0 * l * c1 >= l * c2 * cs2 - c1 * shifted + l * c3 + c3 * c2,
        ),
        (
            "composite_bounds",
            l * c1 + cs2 * l * shifted >= middle && middle >= 0.0,
        ),
    ];
    let betas = betas(c).ok();
    let in_range = betas
        .and_then(|b| b.real_values())
        .is_some_and(|v| v.iter().all(|x| (0.0..=1.0).contains(x)));
    let mut failed: Vec<&'static str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    if !in_range {
        failed.push("beta_in_unit_interval");
    }
    CausalityReport {
        positivity,
        discriminant_positive: checks[1].1,
        lambda_ge_eta: checks[2].1,
        chi4_gt_four_thirds_eta: checks[3].1,
        plus_branch_bound: checks[4].1,
        composite_bounds: checks[5].1,
        beta_in_unit_interval: in_range,
        betas,
        verdict: failed.is_empty(),
        failed,
    }
}

/// Contractions of `u` and `Π^{μν}` with a pair of covectors.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairInvariants {
    pub u_xi: f64,
    pub u_zeta: f64,
    pub pi_xi_xi: f64,
    pub pi_zeta_zeta: f64,
    pub pi_xi_zeta: f64,
}

impl PairInvariants {
    pub(crate) fn new(u: &FourVector, xi: &FourCovector, zeta: &FourCovector) -> Self {
        let p = projector_upper(&u.0);
        let form = |a: &[f64; 4], b: &[f64; 4]| -> f64 {
            let mut s = 0.0;
            for m in 0..4 {
                for n in 0..4 {
                    s += p[m][n] * a[m] * b[n];
                }
            }
            s
        };
        Self {
            u_xi: u.contract(xi),
            u_zeta: u.contract(zeta),
            pi_xi_xi: form(&xi.0, &xi.0),
            pi_zeta_zeta: form(&zeta.0, &zeta.0),
            pi_xi_zeta: form(&xi.0, &zeta.0),
        }
    }
}

/// Roots `Λ₋ ≤ Λ₊` of `(u·Ξ)² − β Π(Ξ,Ξ) = 0` along `Ξ = ζ + Λξ`.
pub fn characteristic_speeds(
    beta: f64,
    u: &FourVector,
    xi: &FourCovector,
    zeta: &FourCovector,
) -> Result<(f64, f64), SymbolError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(SymbolError::InvalidBeta(beta));
    }
    crate::kinematics::projector(u)?;
    if xi.dot(xi) >= 0.0 {
        return Err(SymbolError::Precondition("ξ must be timelike".into()));
    }
    if zeta.dot(zeta) <= 0.0 {
        return Err(SymbolError::Precondition("ζ must be spacelike".into()));
    }
    let inv = PairInvariants::new(u, xi, zeta);
    let xi_xi = xi.dot(xi);
    let denom = inv.u_xi * inv.u_xi * (1.0 - beta) - beta * xi_xi;
    let scale = inv.u_xi * inv.u_xi + xi_xi.abs();
    if denom.abs() <= 1e-14 * scale {
        return Err(SymbolError::DegenerateDirection(denom));
    }
    // Discriminant of the quadratic in Λ, divided by β.
    let cross = inv.u_xi * inv.u_zeta - inv.pi_xi_zeta;
    let w = beta
        * ((inv.u_xi * inv.u_xi - inv.pi_xi_xi) * (inv.pi_zeta_zeta - inv.u_zeta * inv.u_zeta)
            + cross * cross
            + (1.0 - beta)
                * (inv.pi_xi_xi * inv.pi_zeta_zeta - inv.pi_xi_zeta * inv.pi_xi_zeta));
    let w_scale = beta * (inv.u_xi.powi(2) + inv.pi_xi_xi) * (inv.u_zeta.powi(2) + inv.pi_zeta_zeta);
    if w < -1e-12 * w_scale.max(f64::MIN_POSITIVE) {
        return Err(SymbolError::NonCausalInput(w));
    }
    let root = w.max(0.0).sqrt();
    let center = -inv.u_zeta * inv.u_xi + beta * inv.pi_xi_zeta;
    let a = (center - root) / denom;
    let b = (center + root) / denom;
    Ok((a.min(b), a.max(b)))
}

/// `(u·Ξ)² − β Π(Ξ,Ξ)` evaluated at `Ξ = ζ + Λξ`.
pub fn speed_residual(beta: f64, u: &FourVector, xi: &FourCovector, zeta: &FourCovector, speed: f64) -> f64 {
    let big_xi = FourCovector(std::array::from_fn(|m| zeta.0[m] + speed * xi.0[m]));
    let inv = PairInvariants::new(u, &big_xi, &big_xi);
    inv.u_xi * inv.u_xi - beta * inv.pi_xi_xi
}

#[cfg(test)]
mod tests;
