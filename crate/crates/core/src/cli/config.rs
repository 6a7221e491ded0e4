use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::audit::SuiteParams;
use crate::eos::{TransportModel, TransportValues};
use crate::evolve::{Grid, InitialData, SolverConfig};
use crate::par::Execution;
use crate::symbol::SpectrumOptions;

/// `scale · ε^exponent`, written `[scale, exponent]`.
pub type PowerTerm = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// `P = pressure_ratio · ε` with constant transport values.
    Constant {
        pressure_ratio: f64,
        transport: TransportValues,
    },
    /// `P = κ ε^γ`, each transport coefficient a power law.
    PowerLaw {
        kappa: f64,
        gamma: f64,
        eta: PowerTerm,
        chi1: PowerTerm,
        chi2: PowerTerm,
        chi3: PowerTerm,
        chi4: PowerTerm,
        lambda: PowerTerm,
    },
    /// Text table, relative paths resolved against the config file.
    Table {
        path: PathBuf,
        #[serde(default)]
        transport: Option<TransportValues>,
    },
}

impl ModelConfig {
    pub fn build(&self, base: &Path) -> Result<TransportModel, CliError> {
        let model = match self {
            ModelConfig::Constant {
                pressure_ratio,
                transport,
            } => TransportModel::constant(*pressure_ratio, *transport),
            ModelConfig::PowerLaw {
                kappa,
                gamma,
                eta,
                chi1,
                chi2,
                chi3,
                chi4,
                lambda,
            } => {
                let t = [eta, chi1, chi2, chi3, chi4, lambda].map(|p| (p[0], p[1]));
                TransportModel::power_law(*kappa, *gamma, t)
            }
            ModelConfig::Table { path, transport } => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    CliError::Config(format!("model.path: cannot read {}: {e}", full.display()))
                })?;
                TransportModel::from_table_text(&text, *transport)
            }
        };
        model.map_err(|e| CliError::Config(format!("model: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Points per axis; its length is the dimension.
    pub n: Vec<usize>,
    pub length: Vec<f64>,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid, CliError> {
        Grid::new(&self.n, &self.length).map_err(|e| CliError::Config(format!("grid: {e}")))
    }
}

/// Energy-density scan and frame used by `causality-check` and `char-speeds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub eps_min: f64,
    pub eps_max: f64,
    /// Log-spaced samples between the bounds, inclusive.
    pub points: usize,
    /// Spatial components of the fluid velocity `u^i`.
    pub velocity: [f64; 3],
    /// Directions `ζ` evenly spaced in the x–y plane.
    pub directions: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            eps_min: 1.0,
            eps_max: 1.0,
            points: 1,
            velocity: [0.0; 3],
            directions: 8,
        }
    }
}

impl ScanConfig {
    pub fn energies(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.eps_min];
        }
        let (lo, hi) = (self.eps_min.ln(), self.eps_max.ln());
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.eps_min
                } else if i + 1 == self.points {
                    self.eps_max
                } else {
                    (lo + (hi - lo) * i as f64 / (self.points - 1) as f64).exp()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub determinant_samples: usize,
    pub rank_one_samples: usize,
    pub eigen_samples: usize,
    /// Default seed; `--seed` overrides it.
    pub seed: u64,
    pub boost: f64,
    pub min_separation: f64,
    pub det_tolerance: f64,
    pub rank_one_tolerance: f64,
    pub imag_tolerance: f64,
    pub residual_tolerance: f64,
    pub spectrum: SpectrumOptions,
    /// Include every sample in the report, not just summaries.
    pub per_sample: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let p = SuiteParams::default();
        Self {
            determinant_samples: 1000,
            rank_one_samples: 1000,
            eigen_samples: 100,
            seed: p.seed,
            boost: p.boost,
            min_separation: p.min_separation,
            det_tolerance: 1e-6,
            rank_one_tolerance: 1e-10,
            imag_tolerance: 1e-8,
            residual_tolerance: 1e-8,
            spectrum: SpectrumOptions::default(),
            per_sample: true,
        }
    }
}

impl AuditConfig {
    pub fn params(&self, seed: u64) -> SuiteParams {
        SuiteParams {
            seed,
            boost: self.boost,
            min_separation: self.min_separation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Reports go to stdout when unset; `evolve` requires it.
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub initial: Option<InitialData>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub execution: Execution,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not need the model or grid to be built.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.scan;
        positive("scan.eps_min", s.eps_min)?;
        positive("scan.eps_max", s.eps_max)?;
        if s.eps_max < s.eps_min {
            return Err(CliError::Config("scan.eps_max is below scan.eps_min".into()));
        }
        if s.points == 0 || s.directions == 0 {
            return Err(CliError::Config("scan.points and scan.directions must be at least 1".into()));
        }
        let a = &self.audit;
        for (name, v) in [
            ("audit.det_tolerance", a.det_tolerance),
            ("audit.rank_one_tolerance", a.rank_one_tolerance),
            ("audit.imag_tolerance", a.imag_tolerance),
            ("audit.residual_tolerance", a.residual_tolerance),
            ("audit.spectrum.cluster_gap", a.spectrum.cluster_gap),
            ("audit.spectrum.rank_tol", a.spectrum.rank_tol),
            ("audit.spectrum.degeneracy_tol", a.spectrum.degeneracy_tol),
            ("audit.boost", a.boost),
        ] {
            positive(name, v)?;
        }
        if !(a.min_separation >= 0.0) {
            return Err(CliError::Config("audit.min_separation must be nonnegative".into()));
        }
        self.solver
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }
}

/// Hex SHA-256 of the configuration file as read.
pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
