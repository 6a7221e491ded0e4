use serde::{Deserialize, Serialize};

use super::grid::{Fields, Grid};
use super::jet::{second_time_derivative_solve, PointJet, TimeComponent};
use super::EvolveError;
use crate::eos::TransportModel;
use crate::fd::FdOrder;
use crate::kinematics::{FourCovector, FourVector};
use crate::par::Execution;
use crate::symbol::{betas, characteristic_speeds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepOptions {
    pub order: FdOrder,
    /// Hard ceiling on `dt·v_max/h`; steps above it are refused.
    pub max_cfl: f64,
    /// Energy density below which a step aborts.
    pub floor: f64,
    /// Largest admissible magnitude of any evolved value.
    pub blowup_cap: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            order: FdOrder::Fourth,
            max_cfl: 0.5,
            floor: 0.0,
            blowup_cap: 1e6,
            execution: Execution::default(),
        }
    }
}

/// `d/dt (ε, u^i, ∂_tε, ∂_tu^i)`.
pub fn time_derivative(
    grid: &Grid,
    fields: &Fields,
    model: &TransportModel,
    opts: &StepOptions,
) -> Result<Fields, EvolveError> {
    let solved = opts.execution.try_map(grid.len(), |idx| {
        let jet = PointJet::from_grid(grid, fields, idx, opts.order, TimeComponent::Identity);
        second_time_derivative_solve(&jet, model, opts.floor).map_err(|e| e.at(idx))
    })?;
    let mut out = Fields::zeros(grid.len());
    out.eps.clone_from(&fields.eps_t);
    for k in 0..3 {
        out.u[k].clone_from(&fields.u_t[k]);
    }
    for (i, s) in solved.iter().enumerate() {
        out.eps_t[i] = s.eps_tt;
        for k in 0..3 {
            out.u_t[k][i] = s.u_tt[k + 1];
        }
    }
    Ok(out)
}

/// Largest coordinate speed of any characteristic along a grid axis:
/// `max |Λ|` over points, axes and `β_a`, with `Ξ = dx^i − Λ dt`.
pub fn max_characteristic_speed(
    grid: &Grid,
    fields: &Fields,
    model: &TransportModel,
    execution: Execution,
) -> Result<f64, EvolveError> {
    let dt = FourCovector([1.0, 0.0, 0.0, 0.0]);
    let per_point = execution.try_map(grid.len(), |idx| {
        let c = model.evaluate(fields.eps[idx])?;
        let b = betas(&c)?
            .real_values()
            .ok_or(EvolveError::Symbol(crate::symbol::SymbolError::Precondition(
                "complex characteristic speeds".into(),
            )))?;
        let u = FourVector([fields.u0_at(idx), fields.u[0][idx], fields.u[1][idx], fields.u[2][idx]]);
        let mut v = 0.0f64;
        for axis in 0..grid.dim {
            let mut zeta = [0.0; 4];
            zeta[axis + 1] = 1.0;
            for beta in b {
                let (lo, hi) = characteristic_speeds(beta, &u, &dt, &FourCovector(zeta))?;
                v = v.max(lo.abs()).max(hi.abs());
            }
        }
        Ok::<f64, EvolveError>(v)
    })?;
    Ok(per_point.into_iter().fold(0.0, f64::max))
}

pub fn cfl_number(grid: &Grid, dt: f64, v_max: f64) -> f64 {
    dt * v_max / grid.min_spacing()
}

fn check_fields(fields: &Fields, opts: &StepOptions) -> Result<(), EvolveError> {
    let (index, value) = fields.max_abs();
    if !(value <= opts.blowup_cap) {
        return Err(EvolveError::Blowup {
            index,
            value,
            cap: opts.blowup_cap,
        });
    }
    if let Some((index, eps)) = fields
        .eps
        .iter()
        .enumerate()
        .find(|(_, e)| !(**e >= opts.floor))
    {
        return Err(EvolveError::Floor {
            index,
            eps: *eps,
            floor: opts.floor,
        });
    }
    Ok(())
}

/// One classical four-stage Runge–Kutta step. `v_max` is the bound used
/// for the CFL check (see [`max_characteristic_speed`]).
pub fn rk4_step(
    grid: &Grid,
    fields: &Fields,
    model: &TransportModel,
    dt: f64,
    v_max: f64,
    opts: &StepOptions,
) -> Result<Fields, EvolveError> {
    let cfl = cfl_number(grid, dt, v_max);
    if !(dt > 0.0) || !(cfl <= opts.max_cfl) {
        return Err(EvolveError::Cfl {
            cfl,
            limit: opts.max_cfl,
        });
    }
    let k1 = time_derivative(grid, fields, model, opts)?;
    let y2 = fields.axpy(0.5 * dt, &k1);
    check_fields(&y2, opts)?;
    let k2 = time_derivative(grid, &y2, model, opts)?;
    let y3 = fields.axpy(0.5 * dt, &k2);
    check_fields(&y3, opts)?;
    let k3 = time_derivative(grid, &y3, model, opts)?;
    let y4 = fields.axpy(dt, &k3);
    check_fields(&y4, opts)?;
    let k4 = time_derivative(grid, &y4, model, opts)?;
    let mut out = fields.clone();
    let w = dt / 6.0;
    for (o, ((a, b), (c, d))) in out.arrays_mut().into_iter().zip(
        k1.arrays()
            .into_iter()
            .zip(k2.arrays())
            .zip(k3.arrays().into_iter().zip(k4.arrays())),
    ) {
        for i in 0..o.len() {
            o[i] += w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
        }
    }
    check_fields(&out, opts)?;
    Ok(out)
}
