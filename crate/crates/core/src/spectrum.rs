//! Mean-field excitations above a ground state: the linearized operator, its
//! low eigenpairs, and two closed-form bounds — a spectral-gap lower bound
//! from the integrated potential, and a condensate-depletion bound from the
//! gap and particle number.

use crate::error::{Error, Result};
use crate::grid::{schrodinger_operator, Grid, PotentialOnGrid, TridiagonalOperator};
use serde_json::json;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// e_0 ≤ e_1 ≤ … (k+1 of them)
    pub eigenvalues: Vec<f64>,
    /// grid arrays, orthonormal in the h-weighted discrete L² inner product
    pub eigenvectors: Vec<Vec<f64>>,
    /// e_1 − e_0
    pub gap: f64,
    pub eta: Option<f64>,
    pub gap_bound: Option<f64>,
}

impl SpectrumResult {
    /// Attach the closed-form gap bound for the given integrated potential.
    pub fn with_gap_bound(mut self, integral_w: f64) -> Result<Self> {
        let (eta, bound) = gap_lower_bound(integral_w)?;
        self.eta = Some(eta);
        self.gap_bound = Some(bound);
        Ok(self)
    }

    /// Scalar summary (eigenvectors are serialized separately as CSV).
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "eigenvalues": self.eigenvalues,
            "gap": self.gap,
            "gap_bound": self.gap_bound,
            "eta": self.eta,
        })
    }
}

/// Linearization of the interacting problem around a normalized ground state:
/// −Δ + V + γψ₀² − (γ/2)∫ψ₀⁴, so that ψ₀ itself is an eigenvector with
/// eigenvalue e0.
pub fn mean_field_hamiltonian(
    potential: &PotentialOnGrid,
    gamma: f64,
    psi0: &[f64],
    grid: &Grid,
) -> Result<TridiagonalOperator> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!(
            "interaction strength must be finite and nonnegative, got {gamma}"
        )));
    }
    if psi0.len() != grid.m {
        return Err(Error::usage(format!(
            "ground state has {} nodes but the grid has {}",
            psi0.len(),
            grid.m
        )));
    }
    let h = grid.h;
    let norm: f64 = h * psi0.iter().map(|x| x * x).sum::<f64>();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::usage(format!(
            "ground state must be normalized: h·Σψ² = {norm:.8}"
        )));
    }
    let quart: f64 = h * psi0.iter().map(|x| x * x * x * x).sum::<f64>();
    let shift = 0.5 * gamma * quart;
    let extra: Vec<f64> = psi0.iter().map(|x| gamma * x * x - shift).collect();
    schrodinger_operator(potential, Some(&extra), grid)
}

/// The k+1 lowest eigenpairs of a tridiagonal operator, with eigenvectors
/// returned in the h-weighted normalization of the grid the operator lives on.
pub fn lowest_eigenpairs(op: &TridiagonalOperator, k: usize) -> Result<SpectrumResult> {
    let m = op.n();
    if k < 2 {
        return Err(Error::usage(format!("need at least two excited levels, got k = {k}")));
    }
    if k > m / 4 {
        return Err(Error::usage(format!(
            "k = {k} too large for an M = {m} grid (need k ≤ M/4)"
        )));
    }
    let (eigenvalues, vecs) = crate::eigen::lowest_eigenpairs_euclidean(op, k + 1)?;
    let root_h = (1.0 / (m as f64 + 1.0)).sqrt();
    let eigenvectors: Vec<Vec<f64>> = vecs
        .into_iter()
        .map(|v| v.into_iter().map(|x| x / root_h).collect())
        .collect();
    let gap = eigenvalues[1] - eigenvalues[0];
    Ok(SpectrumResult { eigenvalues, eigenvectors, gap, eta: None, gap_bound: None })
}

/// Spectral-gap lower bound from the integrated potential W ≥ 0 on the unit
/// interval: η = √(π² + 3∫W), gap ≥ η·ln(1 + π e^{−2η}).
pub fn gap_lower_bound(integral_w: f64) -> Result<(f64, f64)> {
    if !integral_w.is_finite() || integral_w < 0.0 {
        return Err(Error::domain(format!(
            "integrated potential must be finite and nonnegative, got {integral_w}"
        )));
    }
    let eta = (PI * PI + 3.0 * integral_w).sqrt();
    let bound = eta * (PI * (-2.0 * eta).exp()).ln_1p();
    Ok((eta, bound))
}

/// Condensate-depletion bound C·e0/(e_k − e0)·N^{−1/3}·min(√γ, γ).
pub fn depletion_bound(n: u64, gamma: f64, e0: f64, e_k: f64, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("particle number must be >= 1".to_string()));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!(
            "interaction strength must be finite and nonnegative, got {gamma}"
        )));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain(format!("constant must be positive, got {c}")));
    }
    if !(e_k > e0) {
        return Err(Error::domain(format!(
            "excited level must lie above the ground state: e_k = {e_k}, e0 = {e0}"
        )));
    }
    Ok(c * e0 / (e_k - e0) * (n as f64).cbrt().recip() * gamma.sqrt().min(gamma))
}
