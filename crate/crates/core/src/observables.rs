//! Quantities derived from a solved ground state: per-gap masses and the
//! empirical occupied fraction, the momentum density of the condensed state,
//! and the comparison report binding a numerical solve to the analytic
//! repartition model on the same sample.

use crate::disorder::DisorderSample;
use crate::error::{Error, Result};
use crate::gc::{mass_per_length, GcSolution};
use crate::gp::GpSolution;
use crate::parallel::par_map;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// |e0_num − e_gc| / e0_num
    pub relative_energy_gap: f64,
    /// fraction of gaps whose numerical mass exceeds the occupation threshold
    pub lambda_num: f64,
    /// analytic occupied fraction
    pub lambda_gc: f64,
    /// total-variation distance between the numerical per-gap mass
    /// distribution and the model prediction on the same gaps
    pub mass_tv_distance: f64,
}

fn check_same_sample(solution: &GpSolution, sample: &DisorderSample) -> Result<()> {
    if let Some((seed, m)) = solution.sample_id {
        if seed != sample.seed || m != sample.m_omega() {
            return Err(Error::usage(format!(
                "solution came from sample (seed {seed}, m {m}) but got (seed {}, m {})",
                sample.seed,
                sample.m_omega()
            )));
        }
    }
    Ok(())
}

/// Mass per gap by direct quadrature of ψ², and the fraction of gaps counted
/// as occupied.  A node falling exactly on an obstacle is attributed to the
/// gap on its left, so the masses always partition the total norm.
pub fn interval_masses(
    solution: &GpSolution,
    sample: &DisorderSample,
) -> Result<(Vec<f64>, f64)> {
    check_same_sample(solution, sample)?;
    let h = solution.grid_step();
    let k = sample.lengths.len();
    let mut masses = vec![0.0; k];
    let mut gap = 0usize;
    for (j, &v) in solution.psi.iter().enumerate() {
        let z = (j as f64 + 1.0) * h;
        while gap + 1 < k && z > sample.positions[gap] {
            gap += 1;
        }
        masses[gap] += h * v * v;
    }
    let eps_occ = 1e-3 / (sample.m_omega() as f64 + 1.0);
    let occupied = masses.iter().filter(|&&m| m > eps_occ).count();
    let lambda_num = occupied as f64 / (sample.m_omega() as f64 + 1.0);
    Ok((masses, lambda_num))
}

/// Default momentum window: 2048 points spanning [−20π, 20π].
pub fn default_momentum_grid() -> Vec<f64> {
    let cap = 20.0 * PI;
    let n = 2048usize;
    (0..n).map(|i| -cap + 2.0 * cap * i as f64 / (n as f64 - 1.0)).collect()
}

/// Momentum density of the condensed state built on a raw profile:
/// ρ̂(p)/N = (2π)⁻¹ |∫ e^{ipz} ψ(z) dz|², trapezoid in z per momentum.
pub fn momentum_density_of(psi: &[f64], p_grid: &[f64]) -> Vec<f64> {
    let h = 1.0 / (psi.len() as f64 + 1.0);
    let psi: std::sync::Arc<Vec<f64>> = std::sync::Arc::new(psi.to_vec());
    par_map(p_grid.to_vec(), move |p| {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, &v) in psi.iter().enumerate() {
            let z = (j as f64 + 1.0) * h;
            re += v * (p * z).cos();
            im += v * (p * z).sin();
        }
        (re * re + im * im) * h * h / (2.0 * PI)
    })
}

pub fn momentum_density(solution: &GpSolution, p_grid: &[f64]) -> Vec<f64> {
    momentum_density_of(&solution.psi, p_grid)
}

/// Trapezoid integral of samples on an increasing grid.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Bind a hard-wall solve to the analytic model on its own sample.
pub fn compare_model(
    solution: &GpSolution,
    sample: &DisorderSample,
    gc: &GcSolution,
) -> Result<ComparisonReport> {
    if solution.gamma == 0.0 {
        return Err(Error::usage(
            "the repartition model is undefined at gamma = 0; the linear case is exact".to_string(),
        ));
    }
    if (solution.gamma - gc.gamma).abs() > 1e-12 * gc.gamma.abs() {
        return Err(Error::usage(format!(
            "solution at gamma {} but model solved at {}",
            solution.gamma, gc.gamma
        )));
    }
    if (sample.nu - gc.nu).abs() > 1e-12 * gc.nu.abs() {
        return Err(Error::usage(format!(
            "sample at nu {} but model solved at {}",
            sample.nu, gc.nu
        )));
    }
    check_same_sample(solution, sample)?;
    let (masses, lambda_num) = interval_masses(solution, sample)?;
    let mut predicted: Vec<f64> = sample
        .lengths
        .iter()
        .map(|&l| mass_per_length(l, gc.mu, gc.gamma))
        .collect::<Result<_>>()?;
    let total: f64 = predicted.iter().sum();
    let mass_tv_distance = if total > 0.0 {
        for p in predicted.iter_mut() {
            *p /= total;
        }
        0.5 * masses.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).sum::<f64>()
    } else {
        // model predicts no occupation anywhere on this sample
        1.0
    };
    Ok(ComparisonReport {
        relative_energy_gap: (solution.e0 - gc.e_gc).abs() / solution.e0,
        lambda_num,
        lambda_gc: gc.lambda,
        mass_tv_distance,
    })
}
