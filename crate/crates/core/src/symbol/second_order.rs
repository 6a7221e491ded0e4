use nalgebra::Matrix5;

use super::{betas, DeterminantCheck, SymbolError};
use crate::eos::CoefficientSample;
use crate::kinematics::{lower, projector, projector_upper, FourCovector, FourVector, KinematicsError};

/// `C = m^{αβ}ξ_αξ_β` acting on `(ε, u^ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderSymbol {
    pub matrix: Matrix5<f64>,
    pub u: FourVector,
    pub coeffs: CoefficientSample,
    pub xi: FourCovector,
    /// `𝔞 = u^μξ_μ`
    pub a: f64,
    /// `𝔟^μ = Π^{μν}ξ_ν`
    pub b: FourVector,
}

pub fn assemble_second_order(
    coeffs: &CoefficientSample,
    u: &FourVector,
    xi: &FourCovector,
) -> Result<SecondOrderSymbol, SymbolError> {
    projector(u)?;
    let c = coeffs;
    let enthalpy = c.eps + c.pressure;
    if !(enthalpy > 0.0) {
        return Err(KinematicsError::DegenerateState { enthalpy }.into());
    }
    let pu = projector_upper(&u.0);
    let w = &xi.0;
    let a = u.contract(xi);
    let b: [f64; 4] = std::array::from_fn(|m| (0..4).map(|k| pu[m][k] * w[k]).sum());
    let bb: f64 = (0..4).map(|k| b[k] * w[k]).sum();
    let u_low = lower(&u.0);

    let mut m = Matrix5::zeros();
    for nu in 0..4 {
        m[(0, 1 + nu)] = a * a * u_low[nu];
    }
    for mu in 0..4 {
        m[(1 + mu, 0)] = (c.chi1 * u.0[mu] * a * a
            + (c.chi3 + c.lambda * c.cs2) * a * b[mu]
            + c.lambda * c.cs2 * u.0[mu] * bb)
            / enthalpy;
        let rank_one = a * (c.chi2 + c.lambda) * u.0[mu] + (c.chi4 - c.eta / 3.0) * b[mu];
        for nu in 0..4 {
            m[(1 + mu, 1 + nu)] = rank_one * w[nu];
        }
        m[(1 + mu, 1 + mu)] += c.lambda * a * a - c.eta * bb;
    }
    Ok(SecondOrderSymbol {
        matrix: m,
        u: *u,
        coeffs: *coeffs,
        xi: *xi,
        a,
        b: FourVector(b),
    })
}

/// Compares `det C` with `(λ³χ₁/(ε+P)) ∏_a ((u·ξ)² − β_a Π(ξ,ξ))^{m_a}`,
/// `m = (1, 2, 1, 1)`, on unit-normalized `ξ`.
pub fn second_order_factorization_check(
    coeffs: &CoefficientSample,
    u: &FourVector,
    xi: &FourCovector,
) -> Result<DeterminantCheck, SymbolError> {
    let norm = xi.euclidean_norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SymbolError::Precondition("ξ must be a nonzero finite covector".into()));
    }
    let xi = FourCovector(xi.0.map(|x| x / norm));
    let beta = betas(coeffs)?;
    let sym = assemble_second_order(coeffs, u, &xi)?;
    let brute = sym.matrix.determinant();
    let inv = super::PairInvariants::new(u, &xi, &xi);
    let c = coeffs;
    let closed = c.lambda.powi(3) * c.chi1 / (c.eps + c.pressure)
        * beta.factor_product(inv.u_xi, inv.pi_xi_xi, [1, 2, 1]);
    DeterminantCheck::checked(brute, closed)
}
