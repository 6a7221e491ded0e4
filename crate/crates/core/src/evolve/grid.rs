use serde::{Deserialize, Serialize};

use super::EvolveError;
use crate::fd::{self, FdOrder};

/// Smallest admissible number of points along an active axis.
pub const MIN_POINTS: usize = 8;

/// Uniform periodic grid on `[0, L₁) × … × [0, L_d)`. Inactive axes have one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub n: [usize; 3],
    pub length: [f64; 3],
}

impl Grid {
    pub fn new(n: &[usize], length: &[f64]) -> Result<Self, EvolveError> {
        let dim = n.len();
        if !(1..=3).contains(&dim) || length.len() != dim {
            return Err(EvolveError::Config(format!(
                "grid needs 1 to 3 axes with one length each, got {} sizes and {} lengths",
                n.len(),
                length.len()
            )));
        }
        let mut g = Grid {
            dim,
            n: [1; 3],
            length: [1.0; 3],
        };
        for a in 0..dim {
            if n[a] < MIN_POINTS {
                return Err(EvolveError::Config(format!(
                    "axis {a}: need at least {MIN_POINTS} points, got {}",
                    n[a]
                )));
            }
            if !(length[a] > 0.0 && length[a].is_finite()) {
                return Err(EvolveError::Config(format!(
                    "axis {a}: box length must be positive, got {}",
                    length[a]
                )));
            }
            g.n[a] = n[a];
            g.length[a] = length[a];
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.length[axis] / self.n[axis] as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// `h₁⋯h_d`, the weight of one point in discrete L² norms.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.n[0] * (i[1] + self.n[1] * i[2])
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        [
            idx % self.n[0],
            (idx / self.n[0]) % self.n[1],
            idx / (self.n[0] * self.n[1]),
        ]
    }

    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let m = self.multi_index(idx);
        std::array::from_fn(|a| m[a] as f64 * self.spacing(a))
    }

    /// Neighbour of `idx` displaced by `offset` points along `axis`, with wrap.
    pub fn shift(&self, idx: usize, axis: usize, offset: isize) -> usize {
        let mut m = self.multi_index(idx);
        let n = self.n[axis] as isize;
        m[axis] = (m[axis] as isize + offset).rem_euclid(n) as usize;
        self.index(m)
    }

    /// Centered first derivative of `f` along `axis`.
    pub fn d1(&self, f: &[f64], idx: usize, axis: usize, order: FdOrder) -> f64 {
        let r = order.radius() as isize;
        fd::apply(
            order.first(),
            (-r..=r).map(|k| f[self.shift(idx, axis, k)]),
            self.spacing(axis),
            1,
        )
    }

    /// Centered second derivative of `f` along `axis`.
    pub fn d2(&self, f: &[f64], idx: usize, axis: usize, order: FdOrder) -> f64 {
        let r = order.radius() as isize;
        fd::apply(
            order.second(),
            (-r..=r).map(|k| f[self.shift(idx, axis, k)]),
            self.spacing(axis),
            2,
        )
    }

    /// `∂_a∂_b f` as two nested first-derivative stencils, also for `a = b`.
    pub fn d11(&self, f: &[f64], idx: usize, a: usize, b: usize, order: FdOrder) -> f64 {
        let r = order.radius() as isize;
        let inner = (-r..=r).map(|k| self.d1(f, self.shift(idx, a, k), b, order));
        fd::apply(order.first(), inner, self.spacing(a), 1)
    }
}

pub const FIELD_NAMES: [&str; 8] = ["eps", "u1", "u2", "u3", "eps_t", "u1_t", "u2_t", "u3_t"];

/// Evolved data, stored field by field: `ε`, `u^i` and their time derivatives.
/// `u⁰` and `∂_t u⁰` are never stored; they follow from the normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub eps: Vec<f64>,
    pub u: [Vec<f64>; 3],
    pub eps_t: Vec<f64>,
    pub u_t: [Vec<f64>; 3],
}

impl Fields {
    pub fn zeros(n: usize) -> Self {
        Self {
            eps: vec![0.0; n],
            u: std::array::from_fn(|_| vec![0.0; n]),
            eps_t: vec![0.0; n],
            u_t: std::array::from_fn(|_| vec![0.0; n]),
        }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// Fields in [`FIELD_NAMES`] order.
    pub fn arrays(&self) -> [&Vec<f64>; 8] {
        [
            &self.eps,
            &self.u[0],
            &self.u[1],
            &self.u[2],
            &self.eps_t,
            &self.u_t[0],
            &self.u_t[1],
            &self.u_t[2],
        ]
    }

    pub fn arrays_mut(&mut self) -> [&mut Vec<f64>; 8] {
        let [u1, u2, u3] = &mut self.u;
        let [v1, v2, v3] = &mut self.u_t;
        [&mut self.eps, u1, u2, u3, &mut self.eps_t, v1, v2, v3]
    }

    /// `u⁰ = √(1 + u_iu^i)` at every point.
    pub fn u0(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.u0_at(i)).collect()
    }

    pub fn u0_at(&self, i: usize) -> f64 {
        let s: f64 = self.u.iter().map(|c| c[i] * c[i]).sum();
        (1.0 + s).sqrt()
    }

    /// `∂_t u⁰ = u_i ∂_t u^i / u⁰` at every point.
    pub fn u0_t(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let s: f64 = (0..3).map(|c| self.u[c][i] * self.u_t[c][i]).sum();
                s / self.u0_at(i)
            })
            .collect()
    }

    /// `self + k·other`, component-wise.
    pub fn axpy(&self, k: f64, other: &Fields) -> Fields {
        let mut out = self.clone();
        for (o, x) in out.arrays_mut().into_iter().zip(other.arrays()) {
            for (a, b) in o.iter_mut().zip(x) {
                *a += k * b;
            }
        }
        out
    }

    pub fn max_abs(&self) -> (usize, f64) {
        let mut best = (0, 0.0f64);
        for a in self.arrays() {
            for (i, v) in a.iter().enumerate() {
                if !(v.abs() <= best.1) {
                    best = (i, v.abs());
                }
            }
        }
        best
    }
}
