//! Minkowski tensor algebra, the fluid point state, derived gradient
//! variables and the viscous stress-energy tensor.
//!
//! Conventions: signature (−,+,+,+), index 0 is time, flat space so every
//! covariant derivative is a partial derivative. `du[α][μ]` stores `∂_α u^μ`
//! and `d_eps[α]` stores `∂_α ε`. Rank-2 tensors returned by this module
//! carry both indices down unless a function says otherwise.

use thiserror::Error;

use crate::eos::{CoefficientSample, Coefficients, EosError, TransportModel};
use crate::fd::{self, FdOrder};
use crate::scalar::Scalar;

/// Diagonal of the Minkowski metric; also its inverse.
pub const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Tolerance on `g(u,u) + 1` used by the checked constructors.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

pub type Tensor2 = [[f64; 4]; 4];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("four-velocity is not unit future-timelike: |g(u,u) + 1| = {violation:e}, u⁰ = {u0}")]
    Normalization { violation: f64, u0: f64 },
    #[error("degenerate state: ε + P = {enthalpy} must be positive")]
    DegenerateState { enthalpy: f64 },
    #[error("stencil along axis {axis} has {got} samples, order {order} needs {needed}")]
    Stencil {
        axis: usize,
        order: u32,
        needed: usize,
        got: usize,
    },
    #[error(transparent)]
    Eos(#[from] EosError),
}

/// Contravariant four-vector `v^μ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector(pub [f64; 4]);

/// Covariant four-vector `ω_μ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourCovector(pub [f64; 4]);

impl FourVector {
    pub fn lower(self) -> FourCovector {
        FourCovector(lower(&self.0))
    }

    /// `g_{αβ} v^α w^β`
    pub fn dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|a| METRIC[a] * self.0[a] * other.0[a]).sum()
    }

    pub fn contract(&self, w: &FourCovector) -> f64 {
        (0..4).map(|a| self.0[a] * w.0[a]).sum()
    }

    pub fn norm_violation(&self) -> f64 {
        (self.dot(self) + 1.0).abs()
    }
}

impl FourCovector {
    pub fn raise(self) -> FourVector {
        FourVector(lower(&self.0))
    }

    /// `g^{αβ} ω_α ω_β`
    pub fn dot(&self, other: &FourCovector) -> f64 {
        (0..4).map(|a| METRIC[a] * self.0[a] * other.0[a]).sum()
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Index lowering and raising coincide for the diagonal ±1 metric.
#[inline]
pub fn lower<S: Scalar>(v: &[S; 4]) -> [S; 4] {
    [-v[0], v[1], v[2], v[3]]
}

/// Lowers or raises both indices of a rank-2 tensor.
pub fn lower_both<S: Scalar>(t: &[[S; 4]; 4]) -> [[S; 4]; 4] {
    let mut out = *t;
    for (a, row) in out.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = *x * (METRIC[a] * METRIC[b]);
        }
    }
    out
}

/// `u = (√(1+|v|²), v)`.
pub fn normalize_velocity(v: [f64; 3]) -> FourVector {
    let v2 = v.iter().map(|x| x * x).sum::<f64>();
    FourVector([(1.0 + v2).sqrt(), v[0], v[1], v[2]])
}

fn check_velocity(u: &FourVector) -> Result<(), KinematicsError> {
    let violation = u.norm_violation();
    if violation > NORMALIZATION_TOLERANCE || !(u.0[0] > 0.0) || !violation.is_finite() {
        Err(KinematicsError::Normalization {
            violation,
            u0: u.0[0],
        })
    } else {
        Ok(())
    }
}

/// `Π_{αβ} = g_{αβ} + u_α u_β`.
pub fn projector(u: &FourVector) -> Result<Tensor2, KinematicsError> {
    check_velocity(u)?;
    Ok(projector_lower(&u.0))
}

pub(crate) fn projector_lower<S: Scalar>(u: &[S; 4]) -> [[S; 4]; 4] {
    let ul = lower(u);
    let mut p = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            p[a][b] = ul[a] * ul[b];
        }
        p[a][a] += S::from_f64(METRIC[a]);
    }
    p
}

/// `Π^{αβ} = g^{αβ} + u^α u^β`.
pub(crate) fn projector_upper<S: Scalar>(u: &[S; 4]) -> [[S; 4]; 4] {
    let mut p = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            p[a][b] = u[a] * u[b];
        }
        p[a][a] += S::from_f64(METRIC[a]);
    }
    p
}

/// `Π_α^{ μ} = δ_α^μ + u_α u^μ`, indexed `[α][μ]`.
pub(crate) fn projector_mixed<S: Scalar>(u: &[S; 4]) -> [[S; 4]; 4] {
    let ul = lower(u);
    let mut p = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for m in 0..4 {
            p[a][m] = ul[a] * u[m];
        }
        p[a][a] += S::one();
    }
    p
}

/// Pure boost `Λ^μ_ν` with three-velocity `beta` (|beta| < 1).
pub fn boost_matrix(beta: [f64; 3]) -> Tensor2 {
    let b2: f64 = beta.iter().map(|x| x * x).sum();
    let gamma = 1.0 / (1.0 - b2).sqrt();
    let mut l = [[0.0; 4]; 4];
    l[0][0] = gamma;
    for i in 0..3 {
        l[0][i + 1] = gamma * beta[i];
        l[i + 1][0] = gamma * beta[i];
        for j in 0..3 {
            let k = if b2 > 0.0 { (gamma - 1.0) * beta[i] * beta[j] / b2 } else { 0.0 };
            l[i + 1][j + 1] = k + if i == j { 1.0 } else { 0.0 };
        }
    }
    l
}

/// Value and first derivatives of the hydrodynamic fields at one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidPointState<S = f64> {
    pub eps: S,
    pub u: [S; 4],
    /// `∂_α ε`
    pub d_eps: [S; 4],
    /// `du[α][μ] = ∂_α u^μ`
    pub du: [[S; 4]; 4],
}

impl FluidPointState<f64> {
    /// Checked constructor: requires a unit future-timelike `u`.
    pub fn new(
        eps: f64,
        u: FourVector,
        d_eps: [f64; 4],
        du: [[f64; 4]; 4],
    ) -> Result<Self, KinematicsError> {
        check_velocity(&u)?;
        Ok(Self {
            eps,
            u: u.0,
            d_eps,
            du,
        })
    }

    /// Builds a state from the spatial velocity `v = (u¹,u²,u³)` and its
    /// derivatives `dv[α][i] = ∂_α u^i`. `u⁰` and `∂_α u⁰` follow from the
    /// normalization, so `u^μ ∂_α u_μ = 0` holds.
    pub fn from_spatial(eps: f64, v: [f64; 3], d_eps: [f64; 4], dv: [[f64; 3]; 4]) -> Self {
        let u = normalize_velocity(v).0;
        let mut du = [[0.0; 4]; 4];
        for a in 0..4 {
            let mut s = 0.0;
            for i in 0..3 {
                du[a][i + 1] = dv[a][i];
                s += v[i] * dv[a][i];
            }
            du[a][0] = s / u[0];
        }
        Self { eps, u, d_eps, du }
    }

    /// Constant fields in the rest frame.
    pub fn equilibrium(eps: f64) -> Self {
        Self::from_spatial(eps, [0.0; 3], [0.0; 4], [[0.0; 3]; 4])
    }

    pub fn velocity(&self) -> FourVector {
        FourVector(self.u)
    }

    /// Max over α of `|u^μ ∂_α u_μ|`.
    pub fn orthogonality_violation(&self) -> f64 {
        let ul = lower(&self.u);
        (0..4)
            .map(|a| (0..4).map(|m| ul[m] * self.du[a][m]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Applies a constant Lorentz transformation `Λ^μ_ν` to the state:
    /// `u' = Λu`, `∂'_α = (Λ⁻¹)^β_α ∂_β`.
    pub fn transformed(&self, l: &Tensor2) -> Self {
        let inv = inverse_lorentz(l);
        let mut u = [0.0; 4];
        let mut d_eps = [0.0; 4];
        let mut du = [[0.0; 4]; 4];
        for m in 0..4 {
            u[m] = (0..4).map(|n| l[m][n] * self.u[n]).sum();
        }
        for a in 0..4 {
            d_eps[a] = (0..4).map(|b| inv[b][a] * self.d_eps[b]).sum();
            for m in 0..4 {
                let mut s = 0.0;
                for b in 0..4 {
                    for n in 0..4 {
                        s += inv[b][a] * l[m][n] * self.du[b][n];
                    }
                }
                du[a][m] = s;
            }
        }
        Self {
            eps: self.eps,
            u,
            d_eps,
            du,
        }
    }
}

/// `Λ⁻¹ = g Λᵀ g` for a Lorentz transformation.
pub fn inverse_lorentz(l: &Tensor2) -> Tensor2 {
    let mut inv = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            inv[a][b] = METRIC[a] * l[b][a] * METRIC[b];
        }
    }
    inv
}

/// The gradient variables of the first-order reformulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedGradients {
    /// `𝒱 = u^μ ∂_μ ε / (ε + P)`
    pub scalar_v: f64,
    /// `V^α = Π^{αβ} ∂_β ε / (ε + P)`
    pub v: [f64; 4],
    /// `𝖲^α = u^μ ∂_μ u^α`
    pub acceleration: [f64; 4],
    /// `s[α][β] = S_α^β = Π_α^μ ∂_μ u^β`
    pub s: [[f64; 4]; 4],
}

impl DerivedGradients {
    /// Reconstructs `∂_α u^β = −u_α 𝖲^β + S_α^β`.
    pub fn velocity_gradient(&self, u: &[f64; 4]) -> [[f64; 4]; 4] {
        let ul = lower(u);
        let mut du = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                du[a][b] = -ul[a] * self.acceleration[b] + self.s[a][b];
            }
        }
        du
    }
}

fn enthalpy_of(c: &CoefficientSample) -> Result<f64, KinematicsError> {
    let w = c.eps + c.pressure;
    if w > 0.0 && w.is_finite() {
        Ok(w)
    } else {
        Err(KinematicsError::DegenerateState { enthalpy: w })
    }
}

pub fn derived_gradients(
    state: &FluidPointState,
    coeffs: &CoefficientSample,
) -> Result<DerivedGradients, KinematicsError> {
    let w = enthalpy_of(coeffs)?;
    let u = &state.u;
    let pu = projector_upper(u);
    let pm = projector_mixed(u);
    let scalar_v = (0..4).map(|m| u[m] * state.d_eps[m]).sum::<f64>() / w;
    let mut v = [0.0; 4];
    let mut acceleration = [0.0; 4];
    let mut s = [[0.0; 4]; 4];
    for a in 0..4 {
        v[a] = (0..4).map(|b| pu[a][b] * state.d_eps[b]).sum::<f64>() / w;
        acceleration[a] = (0..4).map(|m| u[m] * state.du[m][a]).sum();
        for b in 0..4 {
            s[a][b] = (0..4).map(|m| pm[a][m] * state.du[m][b]).sum();
        }
    }
    Ok(DerivedGradients {
        scalar_v,
        v,
        acceleration,
        s,
    })
}

/// The dissipative building blocks of the stress-energy tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscousParts<S> {
    pub a1: S,
    pub a2: S,
    /// `Q_α`, index down.
    pub q: [S; 4],
    /// `σ_{αβ}`, indices down.
    pub sigma: [[S; 4]; 4],
}

pub(crate) fn shear_generic<S: Scalar>(state: &FluidPointState<S>) -> [[S; 4]; 4] {
    let u = &state.u;
    let pl = projector_lower(u);
    let pm = projector_mixed(u);
    let expansion = (0..4).fold(S::zero(), |acc, m| acc + state.du[m][m]);
    // x[α][β] = Π_α^μ ∂_μ u_β
    let mut x = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut s = S::zero();
            for m in 0..4 {
                s += pm[a][m] * state.du[m][b];
            }
            x[a][b] = s * METRIC[b];
        }
    }
    let mut sigma = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let v = (x[a][b] + x[b][a] - pl[a][b] * expansion * (2.0 / 3.0)) * 0.5;
            sigma[a][b] = v;
            sigma[b][a] = v;
        }
    }
    sigma
}

pub fn viscous_parts<S: Scalar>(state: &FluidPointState<S>, c: &Coefficients<S>) -> ViscousParts<S> {
    let u = &state.u;
    let w = c.eps + c.pressure;
    let pm = projector_mixed(u);
    let expansion = (0..4).fold(S::zero(), |acc, m| acc + state.du[m][m]);
    let u_grad_eps = (0..4).fold(S::zero(), |acc, m| acc + u[m] * state.d_eps[m]);
    let convective = u_grad_eps / w;
    let a1 = c.chi1 * convective + c.chi2 * expansion;
    let a2 = c.chi3 * convective + c.chi4 * expansion;
    let heat = c.cs2 / w;
    let mut q = [S::zero(); 4];
    for a in 0..4 {
        let mut proj = S::zero();
        let mut accel = S::zero();
        for m in 0..4 {
            proj += pm[a][m] * state.d_eps[m];
            accel += u[m] * state.du[m][a];
        }
        q[a] = c.lambda * (heat * proj + accel * METRIC[a]);
    }
    ViscousParts {
        a1,
        a2,
        q,
        sigma: shear_generic(state),
    }
}

/// `𝒯_{αβ}` over any scalar type; no validity checks.
pub fn stress_energy_generic<S: Scalar>(
    state: &FluidPointState<S>,
    c: &Coefficients<S>,
) -> [[S; 4]; 4] {
    let parts = viscous_parts(state, c);
    let ul = lower(&state.u);
    let pl = projector_lower(&state.u);
    let e = c.eps + parts.a1;
    let p = c.pressure + parts.a2;
    let two_eta = c.eta * 2.0;
    let mut t = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let v = e * ul[a] * ul[b] + p * pl[a][b] - two_eta * parts.sigma[a][b]
                + ul[a] * parts.q[b]
                + ul[b] * parts.q[a];
            t[a][b] = v;
            t[b][a] = v;
        }
    }
    t
}

/// Shear tensor `σ_{αβ}`.
pub fn shear(state: &FluidPointState) -> Result<Tensor2, KinematicsError> {
    check_velocity(&state.velocity())?;
    Ok(shear_generic(state))
}

/// Viscous stress-energy tensor `𝒯_{αβ}`, indices down.
pub fn stress_energy(
    state: &FluidPointState,
    coeffs: &CoefficientSample,
) -> Result<Tensor2, KinematicsError> {
    enthalpy_of(coeffs)?;
    Ok(stress_energy_generic(state, coeffs))
}

/// States sampled along each coordinate axis through an event, for
/// differencing the stress-energy tensor.
#[derive(Debug, Clone)]
pub struct SpaceTimePatch {
    pub spacing: [f64; 4],
    /// `samples[α][k]` is the state at offset `k − r` along axis `α`.
    pub samples: [Vec<FluidPointState>; 4],
}

impl SpaceTimePatch {
    /// Samples `field` on the axis-aligned stencil of the given order.
    pub fn sample<F>(field: F, center: [f64; 4], spacing: [f64; 4], order: FdOrder) -> Self
    where
        F: Fn([f64; 4]) -> FluidPointState,
    {
        let r = order.radius() as i64;
        let samples = std::array::from_fn(|axis| {
            (-r..=r)
                .map(|k| {
                    let mut x = center;
                    x[axis] += k as f64 * spacing[axis];
                    field(x)
                })
                .collect()
        });
        Self { spacing, samples }
    }
}

/// Numerical `∂_α 𝒯^α_β` at the centre of `patch`.
pub fn divergence_residual(
    patch: &SpaceTimePatch,
    model: &TransportModel,
    order: FdOrder,
) -> Result<FourCovector, KinematicsError> {
    let needed = 2 * order.radius() + 1;
    for (axis, s) in patch.samples.iter().enumerate() {
        if s.len() < needed {
            return Err(KinematicsError::Stencil {
                axis,
                order: order.order(),
                needed,
                got: s.len(),
            });
        }
    }
    let mut out = [0.0; 4];
    for (axis, s) in patch.samples.iter().enumerate() {
        let mid = s.len() / 2;
        let stencil = &s[mid - order.radius()..=mid + order.radius()];
        let mut rows: Vec<[f64; 4]> = Vec::with_capacity(needed);
        for st in stencil {
            let c = model.evaluate(st.eps)?;
            let t = stress_energy(st, &c)?;
            // 𝒯^α_β with α = axis
            rows.push(std::array::from_fn(|b| METRIC[axis] * t[axis][b]));
        }
        for (b, o) in out.iter_mut().enumerate() {
            *o += fd::apply(order.first(), rows.iter().map(|r| r[b]), patch.spacing[axis], 1);
        }
    }
    Ok(FourCovector(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::TransportValues;
    use proptest::prelude::*;

    pub(crate) fn passing_coeffs(eps: f64) -> CoefficientSample {
        CoefficientSample::from_parts(
            eps,
            eps / 3.0,
            1.0 / 3.0,
            TransportValues {
                eta: 0.5,
                chi1: 1.0,
                chi2: 1.0,
                chi3: 0.3,
                chi4: 2.0 / 3.0 + 0.01,
                lambda: 1.0,
            },
        )
    }

    fn random_state(
        eps: f64,
        v: [f64; 3],
        d_eps: [f64; 4],
        dv: [[f64; 3]; 4],
    ) -> FluidPointState {
        FluidPointState::from_spatial(eps, v, d_eps, dv)
    }

    prop_compose! {
        fn arb_state()(
            eps in 0.5f64..3.0,
            v in prop::array::uniform3(-1.5f64..1.5),
            d_eps in prop::array::uniform4(-1.0f64..1.0),
            dv in prop::array::uniform4(prop::array::uniform3(-1.0f64..1.0)),
        ) -> FluidPointState {
            random_state(eps, v, d_eps, dv)
        }
    }

    #[test]
    fn rest_frame_velocity() {
        assert_eq!(normalize_velocity([0.0; 3]).0, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(normalize_velocity([1.0, 0.0, 0.0]).0, [2f64.sqrt(), 1.0, 0.0, 0.0]);
    }

    #[test]
    fn rest_frame_projector() {
        let p = projector(&FourVector([1.0, 0.0, 0.0, 0.0])).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b && a > 0 { 1.0 } else { 0.0 };
                assert_eq!(p[a][b], expect);
            }
        }
    }

    #[test]
    fn projector_rejects_unnormalized_velocity() {
        assert!(matches!(
            projector(&FourVector([1.0, 0.5, 0.0, 0.0])),
            Err(KinematicsError::Normalization { .. })
        ));
        // past-directed
        assert!(projector(&FourVector([-1.0, 0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn constant_fields_have_vanishing_gradients() {
        let s = FluidPointState::equilibrium(1.3);
        let c = passing_coeffs(1.3);
        let g = derived_gradients(&s, &c).unwrap();
        assert_eq!(g.scalar_v, 0.0);
        assert_eq!(g.v, [0.0; 4]);
        assert_eq!(g.acceleration, [0.0; 4]);
        assert_eq!(g.s, [[0.0; 4]; 4]);
    }

    #[test]
    fn rest_frame_time_derivative_of_energy() {
        let mut s = FluidPointState::equilibrium(1.0);
        s.d_eps[0] = 0.7;
        let c = passing_coeffs(1.0);
        let g = derived_gradients(&s, &c).unwrap();
        assert!((g.scalar_v - 0.7 / (4.0 / 3.0)).abs() < 1e-15);
        assert_eq!(g.v, [0.0; 4]);
    }

    #[test]
    fn degenerate_enthalpy_is_rejected() {
        let s = FluidPointState::equilibrium(1.0);
        let mut c = passing_coeffs(1.0);
        c.pressure = -2.0;
        assert!(matches!(
            derived_gradients(&s, &c),
            Err(KinematicsError::DegenerateState { .. })
        ));
        assert!(stress_energy(&s, &c).is_err());
    }

    #[test]
    fn rest_frame_shear_component() {
        // ∂_x u^y = s only
        let mut dv = [[0.0; 3]; 4];
        dv[1][1] = 0.8;
        let st = random_state(1.0, [0.0; 3], [0.0; 4], dv);
        let sigma = shear(&st).unwrap();
        assert!((sigma[1][2] - 0.4).abs() < 1e-15);
        assert!((sigma[2][1] - 0.4).abs() < 1e-15);
        let trace: f64 = (0..4).map(|a| METRIC[a] * sigma[a][a]).sum();
        assert!(trace.abs() < 1e-15);
    }

    #[test]
    fn equilibrium_stress_energy_is_perfect_fluid_diagonal() {
        let s = FluidPointState::equilibrium(2.0);
        let c = passing_coeffs(2.0);
        let t = stress_energy(&s, &c).unwrap();
        let expect = [2.0, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        for a in 0..4 {
            for b in 0..4 {
                let e = if a == b { expect[a] } else { 0.0 };
                assert!((t[a][b] - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rest_frame_energy_time_derivative_enters_a1_and_a2() {
        let a = 0.9;
        let mut s = FluidPointState::equilibrium(1.0);
        s.d_eps[0] = a;
        let c = passing_coeffs(1.0);
        let w = 4.0 / 3.0;
        let parts = viscous_parts(&s, &c);
        assert!((parts.a1 - c.chi1 * a / w).abs() < 1e-15);
        assert!((parts.a2 - c.chi3 * a / w).abs() < 1e-15);
        let t = stress_energy(&s, &c).unwrap();
        assert!((t[0][0] - (1.0 + c.chi1 * a / w)).abs() < 1e-15);
        for i in 1..4 {
            assert!((t[i][i] - (1.0 / 3.0 + c.chi3 * a / w)).abs() < 1e-15);
        }
    }

    #[test]
    fn divergence_patch_too_small_is_reported() {
        let st = FluidPointState::equilibrium(1.0);
        let patch = SpaceTimePatch {
            spacing: [0.1; 4],
            samples: std::array::from_fn(|_| vec![st; 3]),
        };
        let m = crate::eos::TransportModel::constant(1.0 / 3.0, passing_coeffs(1.0).transport())
            .unwrap();
        assert!(divergence_residual(&patch, &m, FdOrder::Second).is_ok());
        assert!(matches!(
            divergence_residual(&patch, &m, FdOrder::Fourth),
            Err(KinematicsError::Stencil { needed: 5, got: 3, .. })
        ));
    }

    #[test]
    fn equilibrium_patch_has_zero_divergence() {
        let m = crate::eos::TransportModel::constant(1.0 / 3.0, passing_coeffs(1.0).transport())
            .unwrap();
        let patch = SpaceTimePatch::sample(
            |_| FluidPointState::equilibrium(1.7),
            [0.0; 4],
            [0.05; 4],
            FdOrder::Fourth,
        );
        let r = divergence_residual(&patch, &m, FdOrder::Fourth).unwrap();
        assert!(r.0.iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn perfect_fluid_reduction() {
        let st = random_state(1.4, [0.3, -0.2, 0.5], [0.1, 0.2, -0.3, 0.4], [[0.2, -0.1, 0.3]; 4]);
        let mut c = passing_coeffs(1.4);
        c.eta = 0.0;
        c.chi1 = 0.0;
        c.chi2 = 0.0;
        c.chi3 = 0.0;
        c.chi4 = 0.0;
        c.lambda = 0.0;
        let t = stress_energy(&st, &c).unwrap();
        let ul = lower(&st.u);
        for a in 0..4 {
            for b in 0..4 {
                let g = if a == b { METRIC[a] } else { 0.0 };
                let perfect = (c.eps + c.pressure) * ul[a] * ul[b] + c.pressure * g;
                assert!((t[a][b] - perfect).abs() < 1e-14 * (1.0 + perfect.abs()));
            }
        }
    }

    proptest! {
        #[test]
        fn random_velocity_is_normalized(v in prop::array::uniform3(-5.0f64..5.0)) {
            let u = normalize_velocity(v);
            prop_assert!(u.norm_violation() <= 1e-14 * (1.0 + u.0[0] * u.0[0]));
            prop_assert!(u.0[0] >= 1.0);
        }

        #[test]
        fn projector_invariants(v in prop::array::uniform3(-2.0f64..2.0)) {
            let u = normalize_velocity(v);
            let p = projector(&u).unwrap();
            // Π_{αβ} u^β = 0
            for a in 0..4 {
                let c: f64 = (0..4).map(|b| p[a][b] * u.0[b]).sum();
                prop_assert!(c.abs() < 1e-12);
            }
            // trace and idempotence of the mixed form
            let trace: f64 = (0..4).map(|a| METRIC[a] * p[a][a]).sum();
            prop_assert!((trace - 3.0).abs() < 1e-12);
            let m = projector_mixed(&u.0);
            for a in 0..4 {
                for b in 0..4 {
                    let sq: f64 = (0..4).map(|k| m[a][k] * m[k][b]).sum();
                    prop_assert!((sq - m[a][b]).abs() < 1e-12 * (1.0 + u.0[0] * u.0[0]));
                }
            }
        }

        #[test]
        fn derived_gradients_invariants(st in arb_state()) {
            prop_assert!(st.orthogonality_violation() < 1e-10);
            let c = passing_coeffs(st.eps);
            let g = derived_gradients(&st, &c).unwrap();
            let ul = lower(&st.u);
            let dot = |x: &[f64; 4]| (0..4).map(|a| ul[a] * x[a]).sum::<f64>();
            prop_assert!(dot(&g.v).abs() < 1e-10);
            prop_assert!(dot(&g.acceleration).abs() < 1e-10);
            for a in 0..4 {
                prop_assert!(dot(&g.s[a]).abs() < 1e-10);
            }
            let rec = g.velocity_gradient(&st.u);
            for a in 0..4 {
                for b in 0..4 {
                    prop_assert!((rec[a][b] - st.du[a][b]).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn shear_is_symmetric_traceless_transverse(st in arb_state()) {
            let s = shear(&st).unwrap();
            let trace: f64 = (0..4).map(|a| METRIC[a] * s[a][a]).sum();
            prop_assert!(trace.abs() < 1e-10);
            for a in 0..4 {
                let c: f64 = (0..4).map(|b| s[a][b] * st.u[b]).sum();
                prop_assert!(c.abs() < 1e-10);
                for b in 0..4 {
                    prop_assert_eq!(s[a][b], s[b][a]);
                }
            }
        }

        #[test]
        fn stress_energy_symmetry_and_energy_density(st in arb_state()) {
            let c = passing_coeffs(st.eps);
            let t = stress_energy(&st, &c).unwrap();
            let parts = viscous_parts(&st, &c);
            let mut uu = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    prop_assert_eq!(t[a][b], t[b][a]);
                    uu += st.u[a] * st.u[b] * t[a][b];
                }
            }
            prop_assert!((uu - (st.eps + parts.a1)).abs() < 1e-10 * (1.0 + uu.abs()));
            let qu: f64 = (0..4).map(|a| parts.q[a] * st.u[a]).sum();
            prop_assert!(qu.abs() < 1e-10);
        }

        #[test]
        fn stress_energy_is_lorentz_covariant(
            st in arb_state(),
            beta in prop::array::uniform3(-0.5f64..0.5),
        ) {
            let l = boost_matrix(beta);
            let c = passing_coeffs(st.eps);
            let t = lower_both(&stress_energy(&st, &c).unwrap());
            let tb = lower_both(&stress_energy(&st.transformed(&l), &c).unwrap());
            for a in 0..4 {
                for b in 0..4 {
                    let mut e = 0.0;
                    for m in 0..4 {
                        for n in 0..4 {
                            e += l[a][m] * t[m][n] * l[b][n];
                        }
                    }
                    prop_assert!((tb[a][b] - e).abs() < 1e-10 * (1.0 + e.abs()));
                }
            }
        }
    }

    #[test]
    fn boost_preserves_metric_and_inverse_is_exact() {
        let l = boost_matrix([0.3, -0.4, 0.5]);
        let inv = inverse_lorentz(&l);
        for a in 0..4 {
            for b in 0..4 {
                let id: f64 = (0..4).map(|k| l[a][k] * inv[k][b]).sum();
                assert!((id - if a == b { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
        let u = FourVector(std::array::from_fn(|m| l[m][0]));
        assert!(u.norm_violation() < 1e-13);
    }

    #[test]
    fn index_raising_is_an_involution() {
        let w = FourCovector([0.3, -1.0, 2.0, 0.5]);
        assert_eq!(w.raise().lower(), w);
    }
}
