use nalgebra::{Matrix5, Vector5};

use super::grid::{Fields, Grid};
use super::EvolveError;
use crate::eos::{Coefficients, TransportModel};
use crate::fd::FdOrder;
use crate::kinematics::{lower, FluidPointState, METRIC};
use crate::scalar::Dual;

/// How derivatives of the reconstructed `u⁰` enter a jet.
#[derive(Debug, Clone, Copy)]
pub enum TimeComponent<'a> {
    /// From the normalization identity applied to the `u^i` derivatives.
    Identity,
    /// Differenced grid arrays of `u⁰` and `∂_t u⁰`.
    Grid { u0: &'a [f64], u0_t: &'a [f64] },
}

/// Values, first and second derivatives of `U = (ε, u⁰, u¹, u², u³)` at one
/// point. The `tt` second derivatives are whatever the caller put there
/// (zero while assembling the right-hand side).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointJet {
    pub eps: f64,
    pub u: [f64; 4],
    /// `∂_α ε`
    pub d_eps: [f64; 4],
    /// `du[α][μ] = ∂_α u^μ`
    pub du: [[f64; 4]; 4],
    /// `dd_eps[α][β] = ∂_α∂_β ε`
    pub dd_eps: [[f64; 4]; 4],
    /// `ddu[α][β][μ] = ∂_α∂_β u^μ`
    pub ddu: [[[f64; 4]; 4]; 4],
}

impl PointJet {
    pub fn from_grid(
        grid: &Grid,
        f: &Fields,
        idx: usize,
        order: FdOrder,
        time: TimeComponent<'_>,
    ) -> Self {
        let mut j = PointJet {
            eps: f.eps[idx],
            ..Default::default()
        };
        for k in 0..3 {
            j.u[k + 1] = f.u[k][idx];
            j.du[0][k + 1] = f.u_t[k][idx];
        }
        j.d_eps[0] = f.eps_t[idx];
        for a in 0..grid.dim {
            j.d_eps[a + 1] = grid.d1(&f.eps, idx, a, order);
            let e_ta = grid.d1(&f.eps_t, idx, a, order);
            j.dd_eps[0][a + 1] = e_ta;
            j.dd_eps[a + 1][0] = e_ta;
            for b in a..grid.dim {
                let v = grid.d11(&f.eps, idx, a, b, order);
                j.dd_eps[a + 1][b + 1] = v;
                j.dd_eps[b + 1][a + 1] = v;
            }
            for k in 0..3 {
                j.du[a + 1][k + 1] = grid.d1(&f.u[k], idx, a, order);
                let v_ta = grid.d1(&f.u_t[k], idx, a, order);
                j.ddu[0][a + 1][k + 1] = v_ta;
                j.ddu[a + 1][0][k + 1] = v_ta;
                for b in a..grid.dim {
                    let v = grid.d11(&f.u[k], idx, a, b, order);
                    j.ddu[a + 1][b + 1][k + 1] = v;
                    j.ddu[b + 1][a + 1][k + 1] = v;
                }
            }
        }
        match time {
            TimeComponent::Identity => j.reconstruct_time_component(),
            TimeComponent::Grid { u0, u0_t } => {
                j.u[0] = u0[idx];
                j.du[0][0] = u0_t[idx];
                for a in 0..grid.dim {
                    j.du[a + 1][0] = grid.d1(u0, idx, a, order);
                    let v_ta = grid.d1(u0_t, idx, a, order);
                    j.ddu[0][a + 1][0] = v_ta;
                    j.ddu[a + 1][0][0] = v_ta;
                    for b in a..grid.dim {
                        let v = grid.d11(u0, idx, a, b, order);
                        j.ddu[a + 1][b + 1][0] = v;
                        j.ddu[b + 1][a + 1][0] = v;
                    }
                }
                j.ddu[0][0][0] = j.u0_tt_identity();
            }
        }
        j
    }

    /// Fills `u⁰` and every derivative of it except `∂_t∂_t u⁰` from the
    /// normalization `u⁰ = √(1 + u^iu^i)`.
    pub fn reconstruct_time_component(&mut self) {
        let s: f64 = (1..4).map(|k| self.u[k] * self.u[k]).sum();
        let u0 = (1.0 + s).sqrt();
        self.u[0] = u0;
        for a in 0..4 {
            self.du[a][0] = (1..4).map(|k| self.u[k] * self.du[a][k]).sum::<f64>() / u0;
        }
        for a in 0..4 {
            for b in a..4 {
                if a == 0 && b == 0 {
                    continue;
                }
                let v = self.u0_second_identity(a, b);
                self.ddu[a][b][0] = v;
                self.ddu[b][a][0] = v;
            }
        }
    }

    fn u0_second_identity(&self, a: usize, b: usize) -> f64 {
        let s: f64 = (1..4)
            .map(|k| self.du[a][k] * self.du[b][k] + self.u[k] * self.ddu[a][b][k])
            .sum();
        (s - self.du[a][0] * self.du[b][0]) / self.u[0]
    }

    /// `∂_t∂_t u⁰` implied by `∂_t∂_t u^i` and the normalization.
    pub fn u0_tt_identity(&self) -> f64 {
        self.u0_second_identity(0, 0)
    }

    /// Copy with the pure time second derivatives set.
    pub fn with_time_second(&self, eps_tt: f64, u_tt: [f64; 4]) -> Self {
        let mut j = *self;
        j.dd_eps[0][0] = eps_tt;
        j.ddu[0][0] = u_tt;
        j
    }

    pub fn state(&self) -> FluidPointState {
        FluidPointState {
            eps: self.eps,
            u: self.u,
            d_eps: self.d_eps,
            du: self.du,
        }
    }

    /// State whose dual parts are the derivatives along `∂_ν`.
    fn directional(&self, nu: usize) -> FluidPointState<Dual> {
        FluidPointState {
            eps: Dual::new(self.eps, self.d_eps[nu]),
            u: std::array::from_fn(|m| Dual::new(self.u[m], self.du[nu][m])),
            d_eps: std::array::from_fn(|a| Dual::new(self.d_eps[a], self.dd_eps[nu][a])),
            du: std::array::from_fn(|a| {
                std::array::from_fn(|m| Dual::new(self.du[a][m], self.ddu[nu][a][m]))
            }),
        }
    }
}

/// `T^{αβ}` (indices up) as a plain tensor.
pub fn stress_energy_upper(jet: &PointJet, model: &TransportModel) -> Result<[[f64; 4]; 4], EvolveError> {
    let c = model.evaluate(jet.eps)?;
    let t = crate::kinematics::stress_energy(&jet.state(), &c)?;
    Ok(std::array::from_fn(|a| std::array::from_fn(|b| METRIC[a] * METRIC[b] * t[a][b])))
}

/// `∂_ν T^{αβ}` by exact chain-rule differentiation of the constitutive map.
pub fn stress_energy_derivative(
    jet: &PointJet,
    model: &TransportModel,
    nu: usize,
) -> Result<[[f64; 4]; 4], EvolveError> {
    let s = jet.directional(nu);
    let c = model.evaluate_generic(s.eps)?;
    let t = crate::kinematics::stress_energy_generic(&s, &c);
    Ok(std::array::from_fn(|a| {
        std::array::from_fn(|b| METRIC[a] * METRIC[b] * t[a][b].du)
    }))
}

/// `∂_ν T^{νμ}` for `μ = 0..4`.
pub fn divergence(jet: &PointJet, model: &TransportModel) -> Result<[f64; 4], EvolveError> {
    let mut out = [0.0; 4];
    for nu in 0..4 {
        let d = stress_energy_derivative(jet, model, nu)?;
        for (m, o) in out.iter_mut().enumerate() {
            *o += d[nu][m];
        }
    }
    Ok(out)
}

/// `u_ν u^α u^β ∂_α∂_β u^ν + u^α u^β ∂_α u_ν ∂_β u^ν`, half the second
/// derivative of `u·u` along `u`.
pub fn constraint_residual(jet: &PointJet) -> f64 {
    let u = &jet.u;
    let ul = lower(u);
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let w = u[a] * u[b];
            let mut inner = 0.0;
            for n in 0..4 {
                inner += ul[n] * jet.ddu[a][b][n] + METRIC[n] * jet.du[a][n] * jet.du[b][n];
            }
            s += w * inner;
        }
    }
    s
}

/// Result of the pointwise solve for `∂_t∂_t U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondTimeDerivatives {
    pub eps_tt: f64,
    /// `∂_t∂_t u^μ`, including the time component returned by the solve.
    pub u_tt: [f64; 4],
    /// Coefficient matrix of `∂_t∂_t U` (rows: constraint, `μ = 0..4`).
    pub principal: Matrix5<f64>,
    /// Left-hand sides evaluated with `∂_t∂_t U = 0`.
    pub rhs: Vector5<f64>,
    /// 1-norm condition number of `principal`.
    pub condition: f64,
}

/// Largest accepted 1-norm condition number of the time principal matrix.
pub const MAX_CONDITION: f64 = 1e12;

fn one_norm(m: &Matrix5<f64>) -> f64 {
    (0..5)
        .map(|j| (0..5).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Coefficients of `∂_t∂_t U` in the constraint and in `∂_ν T^{νμ}`.
pub fn time_principal(jet: &PointJet, model: &TransportModel) -> Result<Matrix5<f64>, EvolveError> {
    let c = model.evaluate(jet.eps)?;
    let cd = Coefficients::<Dual>::lift(&c);
    let base = FluidPointState {
        eps: Dual::constant(jet.eps),
        u: jet.u.map(Dual::constant),
        d_eps: jet.d_eps.map(Dual::constant),
        du: jet.du.map(|r| r.map(Dual::constant)),
    };
    let ul = lower(&jet.u);
    let mut m = Matrix5::zeros();
    for k in 0..5 {
        let mut s = base;
        if k == 0 {
            s.d_eps[0].du = 1.0;
        } else {
            s.du[0][k - 1].du = 1.0;
            m[(0, k)] = ul[k - 1] * jet.u[0] * jet.u[0];
        }
        let t = crate::kinematics::stress_energy_generic(&s, &cd);
        for mu in 0..4 {
            m[(1 + mu, k)] = METRIC[0] * METRIC[mu] * t[0][mu].du;
        }
    }
    Ok(m)
}

/// Solves `M ∂_t∂_t U = −R₀` at one point. `jet` may hold anything in its
/// `tt` slots; they are zeroed first.
pub fn second_time_derivative_solve(
    jet: &PointJet,
    model: &TransportModel,
    floor: f64,
) -> Result<SecondTimeDerivatives, EvolveError> {
    if !(jet.eps >= floor) {
        return Err(EvolveError::Floor {
            index: 0,
            eps: jet.eps,
            floor,
        });
    }
    let j0 = jet.with_time_second(0.0, [0.0; 4]);
    let principal = time_principal(&j0, model)?;
    let div = divergence(&j0, model)?;
    let rhs = Vector5::new(constraint_residual(&j0), div[0], div[1], div[2], div[3]);
    let inv = principal.try_inverse().ok_or(EvolveError::SingularPrincipal {
        index: 0,
        condition: f64::INFINITY,
    })?;
    let condition = one_norm(&principal) * one_norm(&inv);
    if !(condition <= MAX_CONDITION) {
        return Err(EvolveError::SingularPrincipal { index: 0, condition });
    }
    let x = -(inv * rhs);
    Ok(SecondTimeDerivatives {
        eps_tt: x[0],
        u_tt: [x[1], x[2], x[3], x[4]],
        principal,
        rhs,
        condition,
    })
}
