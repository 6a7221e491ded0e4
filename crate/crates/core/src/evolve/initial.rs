use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{Fields, Grid};
use super::EvolveError;
use crate::eos::TransportModel;

/// How `∂_t ε` and `∂_t u^i` are initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TimeDerivatives {
    #[default]
    Zero,
    /// Linearised ideal-fluid values about rest:
    /// `∂_t ε = −(ε+P) ∂_i u^i`, `∂_t u^i = −c_s² ∂_i ε / (ε+P)`.
    LinearIdeal,
}

fn zero3() -> [f64; 3] {
    [0.0; 3]
}

/// Named initial profiles. Pulses use the periodic chord
/// `s = (L/π) sin(π(x − c)/L)` in place of `x − c`, which keeps them smooth on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Equilibrium {
        eps0: f64,
        #[serde(default = "zero3")]
        velocity: [f64; 3],
    },
    /// `ε = ε₀ + A sin θ`, `u = B m̂ sin θ`, with `θ = Σ 2π m_a x_a / L_a`.
    Sinusoid {
        eps0: f64,
        amplitude: f64,
        #[serde(default)]
        velocity_amplitude: f64,
        modes: Vec<i32>,
        #[serde(default)]
        time_derivatives: TimeDerivatives,
    },
    /// `ε = ε₀ + A exp(−|s|²/(2σ²))`.
    GaussianPulse {
        eps0: f64,
        amplitude: f64,
        width: f64,
        /// Defaults to the box centre.
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        time_derivatives: TimeDerivatives,
    },
    /// `ε = ε₀ + A (1 − |s|²/w²)⁴` for `|s| < w`, `ε₀` elsewhere.
    CompactPulse {
        eps0: f64,
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        time_derivatives: TimeDerivatives,
    },
}

struct Chord {
    s: f64,
    ds: f64,
}

fn chord(x: f64, c: f64, l: f64) -> Chord {
    let (sin, cos) = (PI * (x - c) / l).sin_cos();
    Chord {
        s: l / PI * sin,
        ds: cos,
    }
}

impl InitialData {
    fn centre(grid: &Grid, c: &Option<Vec<f64>>) -> Result<[f64; 3], EvolveError> {
        match c {
            None => Ok(std::array::from_fn(|a| 0.5 * grid.length[a])),
            Some(v) if v.len() == grid.dim => {
                Ok(std::array::from_fn(|a| v.get(a).copied().unwrap_or(0.0)))
            }
            Some(v) => Err(EvolveError::Config(format!(
                "pulse centre has {} components for a {}-dimensional grid",
                v.len(),
                grid.dim
            ))),
        }
    }

    /// `(ε, ∇ε, u^i, ∂_a u^i)` at a point.
    fn profile(&self, grid: &Grid, x: [f64; 3]) -> Result<([f64; 4], [[f64; 3]; 4]), EvolveError> {
        let d = grid.dim;
        let mut e = [0.0; 4];
        let mut v = [[0.0; 3]; 4];
        match self {
            InitialData::Equilibrium { eps0, velocity } => {
                e[0] = *eps0;
                v[0] = *velocity;
            }
            InitialData::Sinusoid {
                eps0,
                amplitude,
                velocity_amplitude,
                modes,
                ..
            } => {
                if modes.len() != d {
                    return Err(EvolveError::Config(format!(
                        "sinusoid needs {d} mode numbers, got {}",
                        modes.len()
                    )));
                }
                let k: Vec<f64> = (0..d).map(|a| 2.0 * PI * modes[a] as f64 / grid.length[a]).collect();
                let theta: f64 = (0..d).map(|a| k[a] * x[a]).sum();
                let (s, c) = theta.sin_cos();
                let m_norm = modes.iter().map(|m| (m * m) as f64).sum::<f64>().sqrt();
                e[0] = eps0 + amplitude * s;
                for a in 0..d {
                    e[a + 1] = amplitude * c * k[a];
                    let dir = if m_norm > 0.0 { modes[a] as f64 / m_norm } else { 0.0 };
                    v[0][a] = velocity_amplitude * dir * s;
                    for b in 0..d {
                        v[b + 1][a] = velocity_amplitude * dir * c * k[b];
                    }
                }
            }
            InitialData::GaussianPulse {
                eps0,
                amplitude,
                width,
                center,
                ..
            } => {
                let c = Self::centre(grid, center)?;
                let ch: Vec<Chord> = (0..d).map(|a| chord(x[a], c[a], grid.length[a])).collect();
                let r2: f64 = ch.iter().map(|q| q.s * q.s).sum();
                let g = (-r2 / (2.0 * width * width)).exp();
                e[0] = eps0 + amplitude * g;
                for a in 0..d {
                    e[a + 1] = -amplitude * g * ch[a].s * ch[a].ds / (width * width);
                }
            }
            InitialData::CompactPulse {
                eps0,
                amplitude,
                width,
                center,
                ..
            } => {
                let c = Self::centre(grid, center)?;
                let ch: Vec<Chord> = (0..d).map(|a| chord(x[a], c[a], grid.length[a])).collect();
                let r2: f64 = ch.iter().map(|q| q.s * q.s).sum();
                let w2 = width * width;
                e[0] = *eps0;
                if r2 < w2 {
                    let q = 1.0 - r2 / w2;
                    e[0] += amplitude * q.powi(4);
                    for a in 0..d {
                        e[a + 1] = amplitude * 4.0 * q.powi(3) * (-2.0 * ch[a].s * ch[a].ds / w2);
                    }
                }
            }
        }
        Ok((e, v))
    }

    fn time_derivatives(&self) -> TimeDerivatives {
        match self {
            InitialData::Equilibrium { .. } => TimeDerivatives::Zero,
            InitialData::Sinusoid { time_derivatives, .. }
            | InitialData::GaussianPulse { time_derivatives, .. }
            | InitialData::CompactPulse { time_derivatives, .. } => *time_derivatives,
        }
    }

    pub fn build(&self, grid: &Grid, model: &TransportModel) -> Result<Fields, EvolveError> {
        let mut f = Fields::zeros(grid.len());
        let td = self.time_derivatives();
        for idx in 0..grid.len() {
            let (e, v) = self.profile(grid, grid.coords(idx))?;
            if !(e[0] > 0.0 && e[0].is_finite()) {
                return Err(EvolveError::Config(format!(
                    "initial energy density {} at point {idx} is not positive",
                    e[0]
                )));
            }
            f.eps[idx] = e[0];
            for k in 0..3 {
                f.u[k][idx] = v[0][k];
            }
            if td == TimeDerivatives::LinearIdeal {
                let c = model.evaluate(e[0])?;
                let w = c.enthalpy();
                let expansion: f64 = (0..grid.dim).map(|a| v[a + 1][a]).sum();
                f.eps_t[idx] = -w * expansion;
                for a in 0..grid.dim {
                    f.u_t[a][idx] = -c.cs2 * e[a + 1] / w;
                }
            }
        }
        Ok(f)
    }
}
