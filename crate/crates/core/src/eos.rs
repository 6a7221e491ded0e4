//! Barotropic equations of state and transport-coefficient models.
//!
//! A [`TransportModel`] is a bundle of seven scalar functions of the energy
//! density: the pressure `P(ε)` and the transport coefficients
//! `η, χ₁, χ₂, χ₃, χ₄, λ`. The squared sound speed `c_s² = dP/dε` is taken
//! from the analytic derivative of the pressure function.
//!
//! Tabulated functions are interpolated with monotone piecewise-cubic Hermite
//! splines. Their derivatives are the derivatives of the interpolant, not of
//! the underlying data, and tabulated models are only piecewise smooth, so
//! they sit outside the analyticity hypothesis of the well-posedness theory
//! (see [`TransportModel::is_analytic`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EosError {
    #[error("energy density {eps} is outside the model domain ({lo}, {hi})")]
    Domain { eps: f64, lo: f64, hi: f64 },
    #[error("coefficient {name} = {value} at energy density {eps} is not strictly positive and finite")]
    NonPositive {
        name: &'static str,
        eps: f64,
        value: f64,
    },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
}

/// A smooth scalar function of the energy density with derivative access.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Constant(f64),
    /// `slope · ε`
    Linear { slope: f64 },
    /// `scale · ε^exponent`
    PowerLaw { scale: f64, exponent: f64 },
    Table(MonotoneCubic),
}

impl ScalarFn {
    pub fn value<S: Scalar>(&self, eps: S) -> S {
        match self {
            ScalarFn::Constant(c) => S::from_f64(*c),
            ScalarFn::Linear { slope } => eps * *slope,
            ScalarFn::PowerLaw { scale, exponent } => eps.powf(*exponent) * *scale,
            ScalarFn::Table(t) => t.value(eps),
        }
    }

    pub fn derivative<S: Scalar>(&self, eps: S) -> S {
        match self {
            ScalarFn::Constant(_) => S::zero(),
            ScalarFn::Linear { slope } => S::from_f64(*slope),
            ScalarFn::PowerLaw { scale, exponent } => {
                if *exponent == 0.0 {
                    S::zero()
                } else {
                    eps.powf(exponent - 1.0) * (scale * exponent)
                }
            }
            ScalarFn::Table(t) => t.derivative(eps),
        }
    }

    fn is_analytic(&self) -> bool {
        !matches!(self, ScalarFn::Table(_))
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            ScalarFn::Table(t) => (t.knots[0], *t.knots.last().unwrap()),
            _ => (0.0, f64::INFINITY),
        }
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, EosError> {
        let n = knots.len();
        if n < 2 || values.len() != n {
            return Err(EosError::InvalidTable(format!(
                "need at least two (x, y) pairs of equal length, got {} and {}",
                n,
                values.len()
            )));
        }
        if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(EosError::InvalidTable("non-finite entry".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EosError::InvalidTable(
                "abscissae must be strictly increasing".into(),
            ));
        }
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1)
            .map(|k| (values[k + 1] - values[k]) / h[k])
            .collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self {
            knots,
            values,
            slopes,
        })
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.knots.len();
        match self.knots.partition_point(|k| *k <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    pub fn value<S: Scalar>(&self, x: S) -> S {
        let k = self.segment(x.re());
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = t3 * 2.0 - t2 * 3.0 + 1.0;
        let h10 = t3 - t2 * 2.0 + t;
        let h01 = t3 * (-2.0) + t2 * 3.0;
        let h11 = t3 - t2;
        h00 * self.values[k]
            + h10 * (h * self.slopes[k])
            + h01 * self.values[k + 1]
            + h11 * (h * self.slopes[k + 1])
    }

    pub fn derivative<S: Scalar>(&self, x: S) -> S {
        let k = self.segment(x.re());
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let t2 = t * t;
        let d00 = (t2 * 6.0 - t * 6.0) / h;
        let d10 = t2 * 3.0 - t * 4.0 + 1.0;
        let d01 = (t2 * (-6.0) + t * 6.0) / h;
        let d11 = t2 * 3.0 - t * 2.0;
        d00 * self.values[k]
            + d10 * self.slopes[k]
            + d01 * self.values[k + 1]
            + d11 * self.slopes[k + 1]
    }
}

// Three-point end slope with the usual shape-preserving limiter.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Transport coefficients at a single energy density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportValues {
    pub eta: f64,
    pub chi1: f64,
    pub chi2: f64,
    pub chi3: f64,
    pub chi4: f64,
    pub lambda: f64,
}

/// All constitutive inputs at one point, generic over the scalar type so the
/// same record can carry derivative information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficients<S> {
    pub eps: S,
    pub pressure: S,
    pub cs2: S,
    pub eta: S,
    pub chi1: S,
    pub chi2: S,
    pub chi3: S,
    pub chi4: S,
    pub lambda: S,
}

/// Plain-number coefficient record.
pub type CoefficientSample = Coefficients<f64>;

impl CoefficientSample {
    pub fn from_parts(eps: f64, pressure: f64, cs2: f64, t: TransportValues) -> Self {
        Self {
            eps,
            pressure,
            cs2,
            eta: t.eta,
            chi1: t.chi1,
            chi2: t.chi2,
            chi3: t.chi3,
            chi4: t.chi4,
            lambda: t.lambda,
        }
    }

    pub fn transport(&self) -> TransportValues {
        TransportValues {
            eta: self.eta,
            chi1: self.chi1,
            chi2: self.chi2,
            chi3: self.chi3,
            chi4: self.chi4,
            lambda: self.lambda,
        }
    }

    pub fn enthalpy(&self) -> f64 {
        self.eps + self.pressure
    }

    /// True when every entry is finite and `ε + P > 0`.
    pub fn is_valid(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite()) && self.enthalpy() > 0.0
    }

    fn as_array(&self) -> [f64; 9] {
        [
            self.eps,
            self.pressure,
            self.cs2,
            self.eta,
            self.chi1,
            self.chi2,
            self.chi3,
            self.chi4,
            self.lambda,
        ]
    }
}

impl<S: Scalar> Coefficients<S> {
    pub fn lift(c: &CoefficientSample) -> Self {
        Self {
            eps: S::from_f64(c.eps),
            pressure: S::from_f64(c.pressure),
            cs2: S::from_f64(c.cs2),
            eta: S::from_f64(c.eta),
            chi1: S::from_f64(c.chi1),
            chi2: S::from_f64(c.chi2),
            chi3: S::from_f64(c.chi3),
            chi4: S::from_f64(c.chi4),
            lambda: S::from_f64(c.lambda),
        }
    }

    pub fn value_part(&self) -> CoefficientSample {
        Coefficients {
            eps: self.eps.re(),
            pressure: self.pressure.re(),
            cs2: self.cs2.re(),
            eta: self.eta.re(),
            chi1: self.chi1.re(),
            chi2: self.chi2.re(),
            chi3: self.chi3.re(),
            chi4: self.chi4.re(),
            lambda: self.lambda.re(),
        }
    }
}

/// Pressure and transport coefficients as functions of energy density.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportModel {
    pub pressure: ScalarFn,
    pub eta: ScalarFn,
    pub chi1: ScalarFn,
    pub chi2: ScalarFn,
    pub chi3: ScalarFn,
    pub chi4: ScalarFn,
    pub lambda: ScalarFn,
}

impl TransportModel {
    /// Linear equation of state `P = w·ε` with constant transport coefficients.
    pub fn constant(pressure_ratio: f64, t: TransportValues) -> Result<Self, EosError> {
        if !(pressure_ratio > 0.0 && pressure_ratio.is_finite()) {
            return Err(EosError::InvalidParameter(format!(
                "pressure ratio must be positive, got {pressure_ratio}"
            )));
        }
        Ok(Self {
            pressure: ScalarFn::Linear {
                slope: pressure_ratio,
            },
            eta: ScalarFn::Constant(t.eta),
            chi1: ScalarFn::Constant(t.chi1),
            chi2: ScalarFn::Constant(t.chi2),
            chi3: ScalarFn::Constant(t.chi3),
            chi4: ScalarFn::Constant(t.chi4),
            lambda: ScalarFn::Constant(t.lambda),
        })
    }

    /// `P = κ ε^γ`; every transport coefficient is `scale · ε^exponent`.
    pub fn power_law(
        kappa: f64,
        gamma: f64,
        transport: [(f64, f64); 6],
    ) -> Result<Self, EosError> {
        if !(kappa > 0.0 && gamma > 0.0) {
            return Err(EosError::InvalidParameter(format!(
                "power-law pressure needs κ > 0 and γ > 0, got κ = {kappa}, γ = {gamma}"
            )));
        }
        let f = |(scale, exponent): (f64, f64)| ScalarFn::PowerLaw { scale, exponent };
        let [eta, chi1, chi2, chi3, chi4, lambda] = transport.map(f);
        Ok(Self {
            pressure: ScalarFn::PowerLaw {
                scale: kappa,
                exponent: gamma,
            },
            eta,
            chi1,
            chi2,
            chi3,
            chi4,
            lambda,
        })
    }

    /// Parses a whitespace-separated table. Two columns `ε P` use the
    /// supplied constant transport values; eight columns
    /// `ε P η χ₁ χ₂ χ₃ χ₄ λ` tabulate everything. `#` starts a comment.
    pub fn from_table_text(
        text: &str,
        constant_transport: Option<TransportValues>,
    ) -> Result<Self, EosError> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(str::parse::<f64>)
                .collect();
            let row = row.map_err(|e| {
                EosError::InvalidTable(format!("line {}: {}", lineno + 1, e))
            })?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(EosError::InvalidTable(format!(
                        "line {}: expected {} columns, found {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            rows.push(row);
        }
        let ncol = rows.first().map_or(0, Vec::len);
        let column = |j: usize| -> Vec<f64> { rows.iter().map(|r| r[j]).collect() };
        let eps = column(0);
        if eps.first().is_some_and(|e| *e <= 0.0) {
            return Err(EosError::InvalidTable(
                "energy densities must be positive".into(),
            ));
        }
        let table = |j: usize| MonotoneCubic::new(eps.clone(), column(j)).map(ScalarFn::Table);
        let pressure_values = column(1.min(ncol.saturating_sub(1)));
        if ncol >= 2 && pressure_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EosError::InvalidTable(
                "pressure must be strictly increasing so that c_s² > 0".into(),
            ));
        }
        match (ncol, constant_transport) {
            (2, Some(t)) => Ok(Self {
                pressure: table(1)?,
                eta: ScalarFn::Constant(t.eta),
                chi1: ScalarFn::Constant(t.chi1),
                chi2: ScalarFn::Constant(t.chi2),
                chi3: ScalarFn::Constant(t.chi3),
                chi4: ScalarFn::Constant(t.chi4),
                lambda: ScalarFn::Constant(t.lambda),
            }),
            (2, None) => Err(EosError::InvalidTable(
                "two-column table needs constant transport values".into(),
            )),
            (8, _) => Ok(Self {
                pressure: table(1)?,
                eta: table(2)?,
                chi1: table(3)?,
                chi2: table(4)?,
                chi3: table(5)?,
                chi4: table(6)?,
                lambda: table(7)?,
            }),
            (n, _) => Err(EosError::InvalidTable(format!(
                "expected 2 or 8 columns, found {n}"
            ))),
        }
    }

    fn functions(&self) -> [(&'static str, &ScalarFn); 7] {
        [
            ("P", &self.pressure),
            ("eta", &self.eta),
            ("chi1", &self.chi1),
            ("chi2", &self.chi2),
            ("chi3", &self.chi3),
            ("chi4", &self.chi4),
            ("lambda", &self.lambda),
        ]
    }

    /// False for tabulated models, which are only piecewise smooth.
    pub fn is_analytic(&self) -> bool {
        self.functions().iter().all(|(_, f)| f.is_analytic())
    }

    /// Open interval of admissible energy densities (closed at table ends).
    pub fn domain(&self) -> (f64, f64) {
        self.functions()
            .iter()
            .map(|(_, f)| f.domain())
            .fold((0.0, f64::INFINITY), |(lo, hi), (a, b)| (lo.max(a), hi.min(b)))
    }

    fn check_domain(&self, eps: f64) -> Result<(), EosError> {
        let (lo, hi) = self.domain();
        let inside = if lo == 0.0 { eps > 0.0 } else { eps >= lo };
        if inside && eps <= hi && eps.is_finite() {
            Ok(())
        } else {
            Err(EosError::Domain { eps, lo, hi })
        }
    }

    /// Pointwise evaluation; every output must be finite and positive.
    pub fn evaluate(&self, eps: f64) -> Result<CoefficientSample, EosError> {
        let c = self.evaluate_generic(eps)?;
        let named = [
            ("P", c.pressure),
            ("cs2", c.cs2),
            ("eta", c.eta),
            ("chi1", c.chi1),
            ("chi2", c.chi2),
            ("chi3", c.chi3),
            ("chi4", c.chi4),
            ("lambda", c.lambda),
        ];
        for (name, value) in named {
            if !(value > 0.0 && value.is_finite()) {
                return Err(EosError::NonPositive { name, eps, value });
            }
        }
        Ok(c)
    }

    /// Evaluation over any scalar type. Only the domain is checked, so this
    /// is the entry point for derivative propagation.
    pub fn evaluate_generic<S: Scalar>(&self, eps: S) -> Result<Coefficients<S>, EosError> {
        self.check_domain(eps.re())?;
        Ok(Coefficients {
            eps,
            pressure: self.pressure.value(eps),
            cs2: self.pressure.derivative(eps),
            eta: self.eta.value(eps),
            chi1: self.chi1.value(eps),
            chi2: self.chi2.value(eps),
            chi3: self.chi3.value(eps),
            chi4: self.chi4.value(eps),
            lambda: self.lambda.value(eps),
        })
    }
}
