use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    assemble_first_order, betas, causality_report, characteristic_speeds, contracted_first_order,
    SymbolError,
};
use crate::eos::CoefficientSample;
use crate::kinematics::{FourCovector, FourVector};

/// Geometric multiplicities for pairwise distinct `β_a`, largest first.
pub const EXPECTED_PATTERN: [usize; 7] = [20, 3, 3, 1, 1, 1, 1];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumOptions {
    /// Relative gap (in units of the spectral radius) that separates clusters.
    pub cluster_gap: f64,
    /// Singular values below `rank_tol · σ_max` count toward the null space.
    pub rank_tol: f64,
    /// `β` values closer than this are treated as colliding.
    pub degeneracy_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            cluster_gap: 1e-6,
            rank_tol: 1e-8,
            degeneracy_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCluster {
    pub value: f64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Real parts, ascending.
    pub eigenvalues: Vec<f64>,
    pub max_imag: f64,
    pub spectral_radius: f64,
    pub clusters: Vec<EigenCluster>,
    /// Geometric multiplicities, descending.
    pub pattern: Vec<usize>,
    pub geometric_total: usize,
    pub matches_expected: bool,
    /// Set when two `β_a` collide; the pattern is then reported as found.
    pub degenerate: bool,
    /// `max |SÃ − DS|` with unit-norm rows of `S`; absent when the eigenvectors are incomplete.
    pub residual: Option<f64>,
    /// 2-norm condition number of `S`.
    pub condition: Option<f64>,
    #[serde(skip)]
    pub diagonalizer: Option<DMatrix<f64>>,
    #[serde(skip)]
    pub diagonal: Option<Vec<f64>>,
}

/// Eigenvalues of `Ã` predicted from the characteristic roots along `ξ = dt`:
/// `Ãv = Λv` exactly when `ζ − Λ dt` is characteristic, i.e. the negated roots.
pub fn predicted_eigenvalues(
    coeffs: &CoefficientSample,
    u: &FourVector,
    zeta: &FourCovector,
) -> Result<Vec<f64>, SymbolError> {
    let beta = betas(coeffs)?
        .real_values()
        .ok_or_else(|| SymbolError::Precondition("β± are complex".into()))?;
    let dt = FourCovector([1.0, 0.0, 0.0, 0.0]);
    let mut out = Vec::with_capacity(7);
    let (r0, _) = characteristic_speeds(beta[0], u, &dt, zeta)?;
    out.push(-r0);
    for b in &beta[1..] {
        let (lo, hi) = characteristic_speeds(*b, u, &dt, zeta)?;
        out.push(-lo);
        out.push(-hi);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Diagonalizes `Ã = (𝒜⁰)⁻¹ 𝒜^i ζ_i`.
pub fn eigenstructure(
    coeffs: &CoefficientSample,
    u: &FourVector,
    zeta: &FourCovector,
    options: &SpectrumOptions,
) -> Result<SpectrumReport, SymbolError> {
    let report = causality_report(coeffs);
    if !report.verdict {
        return Err(SymbolError::Acausal(report.failed));
    }
    if zeta.dot(zeta) <= 0.0 {
        return Err(SymbolError::Precondition("ζ must be spacelike".into()));
    }
    let spatial = FourCovector([0.0, zeta.0[1], zeta.0[2], zeta.0[3]]);
    let a0 = assemble_first_order(coeffs, u, 0)?.matrix;
    let az = contracted_first_order(coeffs, u, &spatial)?.matrix;
    let lu = a0.lu();
    let a_tilde = lu.solve(&az).ok_or(SymbolError::SingularPrincipal)?;
    let n = a_tilde.nrows();

    // QR iteration with a deflation threshold at machine epsilon can stall on
    // the large cluster; loosen it step by step.
    let complex = [8.0, 64.0, 512.0, 4096.0]
        .iter()
        .find_map(|k| {
            nalgebra::linalg::Schur::try_new(a_tilde.clone(), k * f64::EPSILON, 5_000)
        })
        .ok_or(SymbolError::EigenFailure)?
        .complex_eigenvalues();
    let spectral_radius = complex.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let max_imag = complex.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let mut eigenvalues: Vec<f64> = complex.iter().map(|z| z.re).collect();
    eigenvalues.sort_by(f64::total_cmp);

    let gap = options.cluster_gap * spectral_radius.max(1.0);
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &x in &eigenvalues {
        match groups.last_mut() {
            Some(g) if x - g[g.len() - 1] <= gap => g.push(x),
            _ => groups.push(vec![x]),
        }
    }

    let mut clusters = Vec::with_capacity(groups.len());
    let mut columns: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    let mut diagonal = Vec::with_capacity(n);
    for g in &groups {
        let value = g.iter().sum::<f64>() / g.len() as f64;
        let shifted = &a_tilde - DMatrix::identity(n, n) * value;
        // Left null space: rows s with s(Ã − λ) = 0.
        let svd = shifted.transpose().svd(false, true);
        let v_t = svd.v_t.as_ref().ok_or(SymbolError::EigenFailure)?;
        let s_max = svd.singular_values.max();
        let threshold = options.rank_tol * s_max.max(f64::MIN_POSITIVE);
        let mut geometric = 0;
        for (i, s) in svd.singular_values.iter().enumerate() {
            if *s <= threshold {
                geometric += 1;
                columns.push(v_t.row(i).transpose());
                diagonal.push(value);
            }
        }
        clusters.push(EigenCluster {
            value,
            algebraic: g.len(),
            geometric,
        });
    }

    let geometric_total: usize = clusters.iter().map(|c| c.geometric).sum();
    let mut pattern: Vec<usize> = clusters.iter().map(|c| c.geometric).collect();
    pattern.sort_unstable_by(|a, b| b.cmp(a));
    let degenerate = betas(coeffs)?.min_separation() < options.degeneracy_tol;

    let (residual, condition, diagonalizer, diag) = if geometric_total == n {
        let rows: Vec<_> = columns.iter().map(|c| c.transpose()).collect();
        let s = DMatrix::from_rows(&rows);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diagonal.clone()));
        let res = (&s * &a_tilde - &d * &s).abs().max();
        let sv = s.singular_values();
        let cond = sv.max() / sv.min();
        (Some(res), Some(cond), Some(s), Some(diagonal))
    } else {
        (None, None, None, None)
    };

    Ok(SpectrumReport {
        eigenvalues,
        max_imag,
        spectral_radius,
        matches_expected: pattern == EXPECTED_PATTERN,
        clusters,
        pattern,
        geometric_total,
        degenerate,
        residual,
        condition,
        diagonalizer,
        diagonal: diag,
    })
}
