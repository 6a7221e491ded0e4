use nalgebra::{DMatrix, Matrix4};

use super::{betas, SymbolError};
use crate::eos::CoefficientSample;
use crate::kinematics::{
    derived_gradients, lower, projector, projector_upper, FluidPointState, FourCovector,
    FourVector, KinematicsError,
};

/// Positions of the unknowns inside the 30-component state vector
/// `(𝒱 | V^ν | 𝖲^ν | S₀^ν | S₁^ν | S₂^ν | S₃^ν | ε | u^ν)`.
pub mod layout {
    pub const DIM: usize = 30;
    pub const SCALAR_V: usize = 0;
    pub const EPS: usize = 25;

    pub const fn v(nu: usize) -> usize {
        1 + nu
    }
    pub const fn acceleration(nu: usize) -> usize {
        5 + nu
    }
    /// Slot of `S_λ^ν`.
    pub const fn s(lambda: usize, nu: usize) -> usize {
        9 + 4 * lambda + nu
    }
    pub const fn u(nu: usize) -> usize {
        26 + nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector30(pub [f64; layout::DIM]);

impl StateVector30 {
    pub fn from_state(
        state: &FluidPointState,
        coeffs: &CoefficientSample,
    ) -> Result<Self, KinematicsError> {
        let g = derived_gradients(state, coeffs)?;
        let mut x = [0.0; layout::DIM];
        x[layout::SCALAR_V] = g.scalar_v;
        for nu in 0..4 {
            x[layout::v(nu)] = g.v[nu];
            x[layout::acceleration(nu)] = g.acceleration[nu];
            x[layout::u(nu)] = state.u[nu];
            for lambda in 0..4 {
                x[layout::s(lambda, nu)] = g.s[lambda][nu];
            }
        }
        x[layout::EPS] = state.eps;
        Ok(Self(x))
    }
}

/// A principal matrix of the first-order system and the inputs it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalMatrix {
    pub matrix: DMatrix<f64>,
    pub u: FourVector,
    pub coeffs: CoefficientSample,
    /// Covector the coefficient matrices were contracted with
    /// (a coordinate basis covector for a single `𝒜^α`).
    pub direction: FourCovector,
}

/// `𝒜^α` for a coordinate direction `α ∈ 0..4`.
pub fn assemble_first_order(
    coeffs: &CoefficientSample,
    u: &FourVector,
    direction: usize,
) -> Result<PrincipalMatrix, SymbolError> {
    if direction > 3 {
        return Err(SymbolError::Precondition(format!(
            "direction index {direction} out of range 0..4"
        )));
    }
    let mut w = [0.0; 4];
    w[direction] = 1.0;
    contracted_first_order(coeffs, u, &FourCovector(w))
}

/// `𝒜^α Ξ_α`.
pub fn contracted_first_order(
    coeffs: &CoefficientSample,
    u: &FourVector,
    xi: &FourCovector,
) -> Result<PrincipalMatrix, SymbolError> {
    projector(u)?;
    let c = coeffs;
    let w = &xi.0;
    let pu = projector_upper(&u.0);
    let a = u.contract(xi);
    let b: [f64; 4] = std::array::from_fn(|m| (0..4).map(|k| pu[m][k] * w[k]).sum());
    let b_low = lower(&b);
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let shear_bulk = c.chi4 + 2.0 * c.eta / 3.0;

    let mut m = DMatrix::zeros(layout::DIM, layout::DIM);
    m[(0, 0)] = c.chi1 * a;
    for nu in 0..4 {
        m[(0, layout::v(nu))] = c.lambda * c.cs2 * w[nu];
        m[(0, layout::acceleration(nu))] = c.lambda * w[nu];
        m[(0, layout::s(nu, nu))] = c.chi2 * a;
    }
    for mu in 0..4 {
        let row = 1 + mu;
        m[(row, 0)] = c.chi3 * b[mu];
        m[(row, layout::v(mu))] = c.lambda * c.cs2 * a;
        m[(row, layout::acceleration(mu))] = c.lambda * a;
        for lam in 0..4 {
            for nu in 0..4 {
                m[(row, layout::s(lam, nu))] = shear_bulk * b[mu] * delta(lam, nu)
                    - c.eta * (b[lam] * delta(mu, nu) + pu[mu][lam] * w[nu]);
            }
        }
        let row = 5 + mu;
        m[(row, 0)] = -b[mu];
        m[(row, layout::v(mu))] = a;
    }
    for lam in 0..4 {
        for nu in 0..4 {
            let row = layout::s(lam, nu);
            m[(row, layout::acceleration(nu))] = -b_low[lam];
            m[(row, row)] = a;
        }
    }
    m[(layout::EPS, layout::EPS)] = a;
    for nu in 0..4 {
        m[(layout::u(nu), layout::u(nu))] = a;
    }
    Ok(PrincipalMatrix {
        matrix: m,
        u: *u,
        coeffs: *coeffs,
        direction: *xi,
    })
}

/// Brute-force determinant next to its closed-form factorization.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DeterminantCheck {
    pub brute: f64,
    pub closed: f64,
    pub rel_error: f64,
}

impl DeterminantCheck {
    fn new(brute: f64, closed: f64) -> Self {
        let scale = brute.abs().max(closed.abs());
        let rel_error = if scale == 0.0 { 0.0 } else { (brute - closed).abs() / scale };
        Self {
            brute,
            closed,
            rel_error,
        }
    }

    pub(crate) fn checked(brute: f64, closed: f64) -> Result<Self, SymbolError> {
        if brute.abs() < 1e-300 && closed.abs() < 1e-300 {
            return Err(SymbolError::SingularSample { brute, closed });
        }
        Ok(Self::new(brute, closed))
    }
}

/// Compares `det(𝒜^α Ξ_α)` with `λ⁴χ₁ ∏_a ((u·Ξ)² − β_a Π(Ξ,Ξ))^{n_a}`,
/// `n = (10, 3, 1, 1)`. `Ξ` is rescaled to unit Euclidean length first.
pub fn det_factorization_check(
    coeffs: &CoefficientSample,
    u: &FourVector,
    xi: &FourCovector,
) -> Result<DeterminantCheck, SymbolError> {
    let norm = xi.euclidean_norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SymbolError::Precondition("Ξ must be a nonzero finite covector".into()));
    }
    let xi = FourCovector(xi.0.map(|x| x / norm));
    let beta = betas(coeffs)?;
    let pm = contracted_first_order(coeffs, u, &xi)?;
    let brute = pm.matrix.determinant();
    let inv = super::PairInvariants::new(u, &xi, &xi);
    let closed = coeffs.lambda.powi(4)
        * coeffs.chi1
        * beta.factor_product(inv.u_xi, inv.pi_xi_xi, [10, 3, 1]);
    DeterminantCheck::checked(brute, closed)
}

/// Checks `det(A I₄ + B 𝔟^μ𝔟_ν + C 𝔟^μΞ_ν) = A³(A + (B + C) 𝔟·𝔟)`, which
/// requires `𝔟·Ξ = 𝔟·𝔟`.
pub fn rank_one_det_identity_check(
    a: f64,
    b: f64,
    c: f64,
    frak_b: &FourVector,
    xi: &FourCovector,
) -> Result<DeterminantCheck, SymbolError> {
    let b_low = frak_b.lower().0;
    let bb = frak_b.dot(frak_b);
    let bxi = frak_b.contract(xi);
    if (bxi - bb).abs() > 1e-8 {
        return Err(SymbolError::Precondition(format!(
            "𝔟·Ξ = {bxi} differs from 𝔟·𝔟 = {bb}"
        )));
    }
    let m = Matrix4::from_fn(|mu, nu| {
        let id = if mu == nu { a } else { 0.0 };
        id + b * frak_b.0[mu] * b_low[nu] + c * frak_b.0[mu] * xi.0[nu]
    });
    let brute = m.determinant();
    let closed = a.powi(3) * (a + (b + c) * bb);
    Ok(DeterminantCheck::new(brute, closed))
}
