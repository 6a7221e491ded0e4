use std::io::Write;

use serde::Serialize;

use super::grid::{Fields, Grid};
use super::jet::{
    constraint_residual, second_time_derivative_solve, stress_energy_derivative,
    stress_energy_upper, PointJet, TimeComponent,
};
use super::stepper::StepOptions;
use super::EvolveError;
use crate::eos::TransportModel;
use crate::fd;

pub const MONITOR_COLUMNS: [&str; 6] = [
    "time",
    "max_norm_violation",
    "div_residual_l2",
    "constraint4a_l2",
    "min_eps",
    "cfl",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorRow {
    pub time: f64,
    /// `max |g(u,u) + 1|` of the reconstructed four-velocity.
    pub max_norm_violation: f64,
    /// Discrete L² norm of `∂_t T^{0μ} + ∂_i T^{iμ}` with spatial fluxes differenced on the grid.
    pub div_residual_l2: f64,
    /// Discrete L² norm of the normalization constraint with `u⁰` differenced on the grid.
    pub constraint4a_l2: f64,
    pub min_eps: f64,
    pub cfl: f64,
}

impl MonitorRow {
    pub fn values(&self) -> [f64; 6] {
        [
            self.time,
            self.max_norm_violation,
            self.div_residual_l2,
            self.constraint4a_l2,
            self.min_eps,
            self.cfl,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

struct PointDiagnostics {
    norm_violation: f64,
    flux_time_derivative: [f64; 4],
    flux: [[f64; 4]; 3],
    constraint: f64,
}

/// Evaluates every diagnostic on a field snapshot.
pub fn measure(
    grid: &Grid,
    fields: &Fields,
    model: &TransportModel,
    opts: &StepOptions,
    time: f64,
    cfl: f64,
) -> Result<MonitorRow, EvolveError> {
    let u0 = fields.u0();
    let u0_t = fields.u0_t();
    let points = opts.execution.try_map(grid.len(), |idx| {
        let jet = PointJet::from_grid(grid, fields, idx, opts.order, TimeComponent::Identity);
        let sol = second_time_derivative_solve(&jet, model, opts.floor).map_err(|e| e.at(idx))?;
        let full = jet.with_time_second(sol.eps_tt, sol.u_tt);
        let dt_t = stress_energy_derivative(&full, model, 0)?;
        let t = stress_energy_upper(&full, model)?;
        let norm_violation = {
            let u = &full.u;
            (-u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3] + 1.0).abs()
        };
        let gridded = PointJet::from_grid(
            grid,
            fields,
            idx,
            opts.order,
            TimeComponent::Grid { u0: &u0, u0_t: &u0_t },
        );
        let mut g = gridded;
        for k in 1..4 {
            g.ddu[0][0][k] = sol.u_tt[k];
        }
        g.ddu[0][0][0] = g.u0_tt_identity();
        Ok::<_, EvolveError>(PointDiagnostics {
            norm_violation,
            flux_time_derivative: dt_t[0],
            flux: [t[1], t[2], t[3]],
            constraint: constraint_residual(&g),
        })
    })?;

    let r = opts.order.radius() as isize;
    let weights = opts.order.first();
    let div_sq: Vec<f64> = opts.execution.map(grid.len(), |idx| {
        let mut res = points[idx].flux_time_derivative;
        for axis in 0..grid.dim {
            for (mu, out) in res.iter_mut().enumerate() {
                *out += fd::apply(
                    weights,
                    (-r..=r).map(|k| points[grid.shift(idx, axis, k)].flux[axis][mu]),
                    grid.spacing(axis),
                    1,
                );
            }
        }
        res.iter().map(|x| x * x).sum()
    });

    let vol = grid.cell_volume();
    let mut div = 0.0;
    let mut con = 0.0;
    let mut norm = 0.0f64;
    for (p, d) in points.iter().zip(&div_sq) {
        div += d;
        con += p.constraint * p.constraint;
        norm = norm.max(p.norm_violation);
    }
    Ok(MonitorRow {
        time,
        max_norm_violation: norm,
        div_residual_l2: (div * vol).sqrt(),
        constraint4a_l2: (con * vol).sqrt(),
        min_eps: fields.eps.iter().copied().fold(f64::INFINITY, f64::min),
        cfl,
    })
}

/// Writes the monitor table as CSV with a fixed column order.
pub fn write_csv<W: Write>(mut w: W, rows: &[MonitorRow]) -> std::io::Result<()> {
    writeln!(w, "{}", MONITOR_COLUMNS.join(","))?;
    for r in rows {
        let line: Vec<String> = r.values().iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
