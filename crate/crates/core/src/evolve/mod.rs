//! Method-of-lines evolution of the second-order equations on a periodic torus.
//!
//! The evolved unknowns are `U = (ε, u^i)` and `∂_t U`. At every point the
//! pure second time derivatives come from a 5×5 linear solve: the
//! normalization constraint differentiated twice along `u` plus the four
//! components of `∂_ν T^{νμ} = 0`. The coefficients of that system and its
//! right-hand side are obtained by forward-mode differentiation of the
//! stress-energy tensor, so no lower-order term is written out by hand.
//! Spatial derivatives are centered differences; time integration is
//! classical RK4.

mod grid;
mod initial;
mod jet;
mod monitors;
mod snapshot;
mod stepper;


use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{Fields, Grid, FIELD_NAMES, MIN_POINTS};
pub use initial::{InitialData, TimeDerivatives};
pub use jet::{
    constraint_residual, divergence, second_time_derivative_solve, stress_energy_derivative,
    stress_energy_upper, time_principal, PointJet, SecondTimeDerivatives, TimeComponent,
    MAX_CONDITION,
};
pub use monitors::{measure, write_csv, MonitorRow, MONITOR_COLUMNS};
pub use snapshot::{Snapshot, MAGIC};
pub use stepper::{cfl_number, max_characteristic_speed, rk4_step, time_derivative, StepOptions};

use crate::eos::{EosError, TransportModel};
use crate::fd::FdOrder;
use crate::kinematics::KinematicsError;
use crate::par::Execution;
use crate::symbol::{causality_report, SymbolError};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("energy density {eps:e} below floor {floor:e} at point {index}")]
    Floor { index: usize, eps: f64, floor: f64 },
    #[error("time principal matrix ill-conditioned (condition {condition:e}) at point {index}")]
    SingularPrincipal { index: usize, condition: f64 },
    #[error("CFL number {cfl} exceeds the limit {limit}")]
    Cfl { cfl: f64, limit: f64 },
    #[error("field magnitude {value:e} exceeds cap {cap:e} at point {index}")]
    Blowup { index: usize, value: f64, cap: f64 },
    #[error("initial data violate the causality conditions at point {index}: {failed:?}")]
    Acausal { index: usize, failed: Vec<&'static str> },
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl EvolveError {
    /// Attaches a grid index to pointwise errors.
    pub fn at(self, idx: usize) -> Self {
        match self {
            EvolveError::Floor { eps, floor, .. } => EvolveError::Floor {
                index: idx,
                eps,
                floor,
            },
            EvolveError::SingularPrincipal { condition, .. } => EvolveError::SingularPrincipal {
                index: idx,
                condition,
            },
            other => other,
        }
    }

    /// Failures of the numerical scheme as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            EvolveError::Floor { .. }
                | EvolveError::SingularPrincipal { .. }
                | EvolveError::Cfl { .. }
                | EvolveError::Blowup { .. }
                | EvolveError::Eos(_)
                | EvolveError::Kinematics(_)
                | EvolveError::Symbol(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EvolveError::Config(_) => "config",
            EvolveError::Floor { .. } => "floor",
            EvolveError::SingularPrincipal { .. } => "singular-principal",
            EvolveError::Cfl { .. } => "cfl",
            EvolveError::Blowup { .. } => "blowup",
            EvolveError::Acausal { .. } => "acausal",
            EvolveError::Eos(_) => "eos",
            EvolveError::Kinematics(_) => "kinematics",
            EvolveError::Symbol(_) => "symbol",
            EvolveError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub order: FdOrder,
    /// Target `dt·v_max/h` used to choose the step.
    pub cfl: f64,
    /// Refuse steps above this CFL number (the speed bound can grow during a run).
    pub max_cfl: f64,
    pub t_end: f64,
    /// Record monitors every this many steps (and always at the end).
    pub monitor_every: usize,
    /// Write a snapshot every this many steps; 0 writes only the first and last.
    pub snapshot_every: usize,
    /// Floor as a fraction of the initial minimum energy density.
    pub floor_fraction: f64,
    pub blowup_cap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            order: FdOrder::Fourth,
            cfl: 0.25,
            max_cfl: 0.5,
            t_end: 1.0,
            monitor_every: 1,
            snapshot_every: 0,
            floor_fraction: 1e-8,
            blowup_cap: 1e6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let positive = [
            ("cfl", self.cfl),
            ("max_cfl", self.max_cfl),
            ("t_end", self.t_end),
            ("floor_fraction", self.floor_fraction),
            ("blowup_cap", self.blowup_cap),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EvolveError::Config(format!("solver.{name} must be positive, got {v}")));
            }
        }
        if self.cfl > self.max_cfl {
            return Err(EvolveError::Config(format!(
                "solver.cfl = {} exceeds solver.max_cfl = {}",
                self.cfl, self.max_cfl
            )));
        }
        if self.monitor_every == 0 {
            return Err(EvolveError::Config("solver.monitor_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything needed for one run.
#[derive(Debug, Clone)]
pub struct RunSetup {
    pub grid: Grid,
    pub model: TransportModel,
    pub initial: InitialData,
    pub solver: SolverConfig,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Halt {
    Completed,
    Failed {
        time: f64,
        step: usize,
        kind: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub dt: f64,
    pub steps_planned: usize,
    pub steps_taken: usize,
    pub time: f64,
    pub initial_speed_bound: f64,
    pub floor: f64,
    pub monitors: Vec<MonitorRow>,
    pub halt: Halt,
    pub snapshots: Vec<PathBuf>,
    pub fields: Fields,
}

/// Rejects initial data whose energy densities fail a causality condition.
pub fn check_initial_causality(fields: &Fields, model: &TransportModel) -> Result<(), EvolveError> {
    for (index, eps) in fields.eps.iter().enumerate() {
        let c = model.evaluate(*eps)?;
        let r = causality_report(&c);
        if !r.verdict {
            return Err(EvolveError::Acausal {
                index,
                failed: r.failed,
            });
        }
    }
    Ok(())
}

/// Runs to `t_end` or to the first numerical failure, which is recorded in
/// [`RunReport::halt`]. Invalid input is returned as an error.
/// With `out_dir`, writes `monitors.csv` and snapshots `snapshot_NNNNNN.bin`.
pub fn evolve(setup: &RunSetup, out_dir: Option<&Path>) -> Result<RunReport, EvolveError> {
    setup.solver.validate()?;
    let grid = &setup.grid;
    let model = &setup.model;
    let fields = setup.initial.build(grid, model)?;
    check_initial_causality(&fields, model)?;
    let min_eps = fields.eps.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = setup.solver.floor_fraction * min_eps;
    let opts = StepOptions {
        order: setup.solver.order,
        max_cfl: setup.solver.max_cfl,
        floor,
        blowup_cap: setup.solver.blowup_cap,
        execution: setup.execution,
    };
    let v0 = max_characteristic_speed(grid, &fields, model, setup.execution)?;
    if !(v0 > 0.0) {
        return Err(EvolveError::Config("characteristic speed bound is zero".into()));
    }
    let dt_cfl = setup.solver.cfl * grid.min_spacing() / v0;
    let steps = (setup.solver.t_end / dt_cfl).ceil().max(1.0) as usize;
    let dt = setup.solver.t_end / steps as f64;

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let mut snapshots = Vec::new();
    let mut write_snapshot = |f: &Fields, step: usize, t: f64| -> Result<(), EvolveError> {
        if let Some(dir) = out_dir {
            let path = dir.join(format!("snapshot_{step:06}.bin"));
            let file = BufWriter::new(fs::File::create(&path)?);
            Snapshot::from_fields(grid, f, t).write(file)?;
            snapshots.push(path);
        }
        Ok(())
    };

    let mut monitors = vec![measure(grid, &fields, model, &opts, 0.0, cfl_number(grid, dt, v0))?];
    write_snapshot(&fields, 0, 0.0)?;
    let mut current = fields;
    let mut halt = Halt::Completed;
    let mut taken = 0;
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * dt;
        let attempt = max_characteristic_speed(grid, &current, model, setup.execution)
            .and_then(|v| {
                rk4_step(grid, &current, model, dt, v, &opts).map(|f| (f, cfl_number(grid, dt, v)))
            });
        let (next, cfl) = match attempt {
            Ok(x) => x,
            Err(e) if e.is_numerical() => {
                halt = Halt::Failed {
                    time: t_prev,
                    step,
                    kind: e.kind(),
                    message: e.to_string(),
                };
                break;
            }
            Err(e) => return Err(e),
        };
        current = next;
        taken = step;
        let t = step as f64 * dt;
        if step % setup.solver.monitor_every == 0 || step == steps {
            match measure(grid, &current, model, &opts, t, cfl) {
                Ok(row) => monitors.push(row),
                Err(e) if e.is_numerical() => {
                    halt = Halt::Failed {
                        time: t,
                        step,
                        kind: e.kind(),
                        message: e.to_string(),
                    };
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let every = setup.solver.snapshot_every;
        if (every > 0 && step % every == 0) || step == steps {
            write_snapshot(&current, step, t)?;
        }
    }
    if halt != Halt::Completed {
        write_snapshot(&current, taken, taken as f64 * dt)?;
    }
    if let Some(dir) = out_dir {
        let file = BufWriter::new(fs::File::create(dir.join("monitors.csv"))?);
        write_csv(file, &monitors)?;
    }
    Ok(RunReport {
        dt,
        steps_planned: steps,
        steps_taken: taken,
        time: taken as f64 * dt,
        initial_speed_bound: v0,
        floor,
        monitors,
        halt,
        snapshots,
        fields: current,
    })
}
