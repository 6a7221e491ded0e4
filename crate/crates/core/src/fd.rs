//! Centered finite-difference weights.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(try_from = "u8", into = "u8")]
pub enum FdOrder {
    Second,
    #[default]
    Fourth,
}

impl FdOrder {
    /// Half-width of the centered stencil.
    pub const fn radius(self) -> usize {
        match self {
            FdOrder::Second => 1,
            FdOrder::Fourth => 2,
        }
    }

    pub const fn order(self) -> u32 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }

    /// First-derivative weights for offsets `-r..=r` (divide by `h`).
    pub const fn first(self) -> &'static [f64] {
        match self {
            FdOrder::Second => &[-0.5, 0.0, 0.5],
            FdOrder::Fourth => &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
        }
    }

    /// Second-derivative weights for offsets `-r..=r` (divide by `h²`).
    pub const fn second(self) -> &'static [f64] {
        match self {
            FdOrder::Second => &[1.0, -2.0, 1.0],
            FdOrder::Fourth => &[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
        }
    }
}

impl TryFrom<u8> for FdOrder {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            2 => Ok(FdOrder::Second),
            4 => Ok(FdOrder::Fourth),
            other => Err(format!("finite-difference order must be 2 or 4, got {other}")),
        }
    }
}

impl From<FdOrder> for u8 {
    fn from(o: FdOrder) -> u8 {
        o.order() as u8
    }
}

/// Applies `weights` to `samples` (same length, centered) and divides by `h^power`.
pub fn apply(weights: &[f64], samples: impl IntoIterator<Item = f64>, h: f64, power: i32) -> f64 {
    weights
        .iter()
        .zip(samples)
        .map(|(w, s)| w * s)
        .sum::<f64>()
        / h.powi(power)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_exact_on_polynomials() {
        // order 4 stencils differentiate quartics exactly
        let p = |x: f64| 1.0 + 2.0 * x - 3.0 * x * x + 0.5 * x.powi(3) + 0.25 * x.powi(4);
        let dp = |x: f64| 2.0 - 6.0 * x + 1.5 * x * x + x.powi(3);
        let d2p = |x: f64| -6.0 + 3.0 * x + 3.0 * x * x;
        let (x0, h) = (0.3, 0.1);
        let o = FdOrder::Fourth;
        let r = o.radius() as i32;
        let s: Vec<f64> = (-r..=r).map(|k| p(x0 + k as f64 * h)).collect();
        assert!((apply(o.first(), s.iter().copied(), h, 1) - dp(x0)).abs() < 1e-11);
        assert!((apply(o.second(), s.iter().copied(), h, 2) - d2p(x0)).abs() < 1e-9);
    }

    #[test]
    fn orders_round_trip_through_integers() {
        assert_eq!(FdOrder::try_from(2).unwrap(), FdOrder::Second);
        assert_eq!(u8::from(FdOrder::Fourth), 4);
        assert!(FdOrder::try_from(3).is_err());
    }
}
