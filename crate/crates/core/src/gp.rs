//! Ground states of the interacting problem.
//!
//! `minimize_gp` is the grid-global two-phase solver: semi-implicit
//! imaginary-time flow with adaptive step (robust far from the minimizer),
//! then self-consistent linear-eigenproblem polish with under-relaxed density
//! mixing (sharpens the residual).  `solve_hard_wall` handles impenetrable
//! scatterers exactly: the domain decomposes at the obstacles and the mass
//! repartition among intervals is fixed by equalizing local chemical
//! potentials, which is optimal because each interval energy is convex in its
//! mass.

use crate::disorder::DisorderSample;
use crate::elliptic::{g_hat_for_mu, UnitGp};
use crate::error::{Error, Result};
use crate::grid::{schrodinger_operator, Grid, PotentialOnGrid, TridiagonalOperator};
use crate::params::SolveOpts;
use serde_json::json;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
}

#[derive(Debug, Clone)]
pub struct GpSolution {
    /// grid values of the nonnegative normalized minimizer
    pub psi: Vec<f64>,
    pub e0: f64,
    /// chemical potential e0 + (γ/2)∫ψ⁴
    pub mu: f64,
    pub breakdown: EnergyBreakdown,
    /// discrete L² norm of (−Δ + V + γψ²)ψ − μψ; for hard walls, the worst
    /// per-interval value over stencils that do not straddle an obstacle
    pub residual: f64,
    pub iterations: usize,
    /// per-gap masses (hard-wall solves only)
    pub interval_masses: Option<Vec<f64>>,
    pub gamma: f64,
    /// (seed, m_omega) of the sample a hard-wall solve came from
    pub sample_id: Option<(u64, usize)>,
}

impl GpSolution {
    /// Grid spacing implied by the stored profile.
    pub fn grid_step(&self) -> f64 {
        1.0 / (self.psi.len() as f64 + 1.0)
    }

    /// Scalar summary for serialization next to the profile CSV.
    pub fn json_header(&self) -> serde_json::Value {
        json!({
            "e0": self.e0,
            "mu": self.mu,
            "breakdown": self.breakdown,
            "residual": self.residual,
            "iterations": self.iterations,
            "interval_masses": self.interval_masses,
        })
    }
}

fn norm_h(v: &[f64], h: f64) -> f64 {
    (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

fn normalize_h(v: &mut [f64], h: f64) {
    let n = norm_h(v, h);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

fn breakdown_of(psi: &[f64], potential: &PotentialOnGrid, gamma: f64, h: f64) -> EnergyBreakdown {
    let m = psi.len();
    let mut edges = psi[0] * psi[0] + psi[m - 1] * psi[m - 1];
    for i in 0..m - 1 {
        let d = psi[i + 1] - psi[i];
        edges += d * d;
    }
    let kinetic = edges / h;
    let mut pot = 0.0;
    let mut quart = 0.0;
    for i in 0..m {
        let s = psi[i] * psi[i];
        pot += potential.values[i] * s;
        quart += s * s;
    }
    EnergyBreakdown {
        kinetic,
        potential: h * pot,
        interaction: 0.5 * gamma * h * quart,
    }
}

fn energy_of(psi: &[f64], potential: &PotentialOnGrid, gamma: f64, h: f64) -> f64 {
    let b = breakdown_of(psi, potential, gamma, h);
    b.kinetic + b.potential + b.interaction
}

/// μ and ‖(−Δ+V+γψ²)ψ − μψ‖ for a normalized ψ.
fn mu_and_residual(psi: &[f64], a: &TridiagonalOperator, gamma: f64, h: f64) -> (f64, f64) {
    let m = psi.len();
    let mut av = vec![0.0; m];
    a.matvec(psi, &mut av);
    for i in 0..m {
        av[i] += gamma * psi[i] * psi[i] * psi[i];
    }
    // ⟨ψ,(A+γψ²)ψ⟩ = kin + pot + γ∫ψ⁴ = e0 + (γ/2)∫ψ⁴, which is exactly μ.
    let mu: f64 = h * av.iter().zip(psi).map(|(y, x)| y * x).sum::<f64>();
    let mut r2 = 0.0;
    for i in 0..m {
        let r = av[i] - mu * psi[i];
        r2 += r * r;
    }
    (mu, (h * r2).sqrt())
}

/// Solve the symmetric tridiagonal system (diag, off) x = b in place.
/// Callers guarantee strict diagonal dominance, so no pivoting.
fn thomas_solve(diag: &[f64], off: &[f64], b: &mut [f64]) {
    let n = diag.len();
    let mut w = vec![0.0; n.saturating_sub(1)];
    let mut g = vec![0.0; n];
    w[0] = off[0] / diag[0];
    g[0] = b[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off[i - 1] * w[i - 1];
        if i < n - 1 {
            w[i] = off[i] / m;
        }
        g[i] = (b[i] - off[i - 1] * g[i - 1]) / m;
    }
    b[n - 1] = g[n - 1];
    for i in (0..n - 1).rev() {
        b[i] = g[i] - w[i] * b[i + 1];
    }
}

/// One semi-implicit normalized flow step: (I + τ(A + γψ²)) w = ψ, renormalize.
fn flow_step(a: &TridiagonalOperator, psi: &[f64], gamma: f64, tau: f64, h: f64) -> Vec<f64> {
    let m = psi.len();
    let diag: Vec<f64> = (0..m)
        .map(|i| 1.0 + tau * (a.diagonal[i] + gamma * psi[i] * psi[i]))
        .collect();
    let off: Vec<f64> = a.off_diagonal.iter().map(|e| tau * e).collect();
    let mut w = psi.to_vec();
    thomas_solve(&diag, &off, &mut w);
    for x in w.iter_mut() {
        *x = x.abs();
    }
    normalize_h(&mut w, h);
    w
}

pub fn minimize_gp(
    potential: &PotentialOnGrid,
    gamma: f64,
    grid: &Grid,
    opts: &SolveOpts,
) -> Result<GpSolution> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!(
            "interaction strength must be finite and nonnegative, got {gamma}"
        )));
    }
    opts.validate()?;
    let a = schrodinger_operator(potential, None, grid)?;
    let h = grid.h;

    // Seed: ground state of the linear problem.
    let (_, vecs) = crate::eigen::lowest_eigenpairs_euclidean(&a, 1)?;
    let mut psi: Vec<f64> = vecs.into_iter().next().unwrap().iter().map(|x| x.abs()).collect();
    normalize_h(&mut psi, h);
    let mut iterations = 0usize;
    let mut energy = energy_of(&psi, potential, gamma, h);
    let mut tau = 0.5 / energy.abs().max(1.0);

    if gamma > 0.0 {
        // Phase 1: imaginary-time flow with step rejection on energy increase.
        let mut settled = 0u32;
        while iterations < opts.max_iter {
            iterations += 1;
            let trial = flow_step(&a, &psi, gamma, tau, h);
            let en = energy_of(&trial, potential, gamma, h);
            if en <= energy * (1.0 + 1e-14) + 1e-300 {
                let drop = energy - en;
                psi = trial;
                energy = en;
                tau = (tau * 1.2).min(1e6);
                if drop <= opts.energy_tol * energy.abs().max(1.0) {
                    settled += 1;
                    if settled >= 3 {
                        break;
                    }
                } else {
                    settled = 0;
                }
            } else {
                tau *= 0.5;
                if tau < 1e-18 {
                    break;
                }
            }
        }
    }

    // Phase 2: polish to the residual target.  An under-relaxed
    // self-consistent replacement step is tried first; once γρ dominates the
    // level spacing that map diverges for any practical mixing weight, so on
    // rejection fall back to a block of flow steps, which contract
    // unconditionally (if slowly) and keep the energy monotone.
    let (mut mu, mut residual) = mu_and_residual(&psi, &a, gamma, h);
    let mut alpha = 0.5;
    while gamma > 0.0 && residual > opts.residual_tol && iterations < opts.max_iter {
        iterations += 1;
        let nl = TridiagonalOperator {
            diagonal: (0..psi.len())
                .map(|i| a.diagonal[i] + gamma * psi[i] * psi[i])
                .collect(),
            off_diagonal: a.off_diagonal.clone(),
        };
        let (_, vecs) = crate::eigen::lowest_eigenpairs_euclidean(&nl, 1)?;
        let mut phi: Vec<f64> = vecs.into_iter().next().unwrap().iter().map(|x| x.abs()).collect();
        normalize_h(&mut phi, h);
        let mut cand: Vec<f64> = psi
            .iter()
            .zip(&phi)
            .map(|(p, q)| ((1.0 - alpha) * p * p + alpha * q * q).sqrt())
            .collect();
        normalize_h(&mut cand, h);
        let (mu_c, res_c) = mu_and_residual(&cand, &a, gamma, h);
        if res_c < residual {
            psi = cand;
            energy = energy_of(&psi, potential, gamma, h);
            mu = mu_c;
            residual = res_c;
            alpha = (alpha * 1.25).min(0.9);
            continue;
        }
        alpha = (alpha * 0.5).max(0.05);
        let block_start = residual;
        let mut steps = 0;
        while steps < 400 && residual > opts.residual_tol && iterations < opts.max_iter {
            steps += 1;
            iterations += 1;
            let trial = flow_step(&a, &psi, gamma, tau, h);
            let en = energy_of(&trial, potential, gamma, h);
            if en <= energy * (1.0 + 1e-14) + 1e-300 {
                psi = trial;
                energy = en;
                tau = (tau * 1.2).min(1e6);
            } else {
                tau *= 0.5;
                continue;
            }
            let (mu_t, res_t) = mu_and_residual(&psi, &a, gamma, h);
            mu = mu_t;
            residual = res_t;
        }
        if residual > 0.995 * block_start {
            break; // stagnated; report honestly below
        }
    }

    let breakdown = breakdown_of(&psi, potential, gamma, h);
    let e0 = breakdown.kinetic + breakdown.potential + breakdown.interaction;
    if residual > opts.residual_tol {
        return Err(Error::NonConvergence {
            context: "imaginary-time flow + self-consistent polish".into(),
            iterations,
            energy: e0,
            residual,
            last_iterate: psi,
        });
    }
    Ok(GpSolution {
        psi,
        e0,
        mu,
        breakdown,
        residual,
        iterations,
        interval_masses: None,
        gamma,
        sample_id: None,
    })
}

/// Energy and chemical potential of a length-ℓ interval carrying squared
/// norm n.  The energy comes from the unit cell problem by scaling,
/// E(ℓ,n) = (n/ℓ²)·ê(γnℓ); the reported chemical potential is the centered
/// finite difference of E in n with relative step 1e-4 (validated against
/// the γ = 0 closed form).
pub fn interval_gp(ell: f64, n: f64, gamma: f64, _opts: &SolveOpts) -> Result<(f64, f64)> {
    if !ell.is_finite() || ell <= 0.0 {
        return Err(Error::domain(format!("interval length must be positive, got {ell}")));
    }
    if !n.is_finite() || n < 0.0 {
        return Err(Error::domain(format!("interval mass must be nonnegative, got {n}")));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!(
            "interaction strength must be finite and nonnegative, got {gamma}"
        )));
    }
    let ell2 = ell * ell;
    if n == 0.0 {
        return Ok((0.0, PI * PI / ell2));
    }
    if gamma == 0.0 {
        return Ok((n * PI * PI / ell2, PI * PI / ell2));
    }
    let energy_at = |mass: f64| -> Result<f64> {
        Ok(mass / ell2 * UnitGp::solve(gamma * mass * ell)?.e_hat)
    };
    let e = energy_at(n)?;
    let dn = 1e-4 * n;
    let mu = (energy_at(n + dn)? - energy_at(n - dn)?) / (2.0 * dn);
    Ok((e, mu))
}

/// Interval start positions: 0, then the scatterer positions.
fn interval_starts(sample: &DisorderSample) -> Vec<f64> {
    let mut starts = Vec::with_capacity(sample.lengths.len());
    starts.push(0.0);
    starts.extend(sample.positions.iter().copied());
    starts
}

/// Deposit a cell profile with mass `n` on the global grid nodes strictly
/// inside (start, start+len).
fn deposit_profile(
    psi: &mut [f64],
    grid: &Grid,
    start: f64,
    len: f64,
    n: f64,
    cell: &UnitGp,
) {
    let h = grid.h;
    let end = start + len;
    let scale = (n / len).sqrt();
    let mut j = if start <= 0.0 { 0 } else { (start / h) as usize };
    while (j as f64 + 1.0) * h <= start {
        j += 1;
    }
    while j < psi.len() {
        let z = (j as f64 + 1.0) * h;
        if z >= end {
            break;
        }
        psi[j] = scale * cell.profile((z - start) / len);
        j += 1;
    }
}

/// Worst per-interval discrete residual of the assembled profile, using only
/// stencils fully inside one interval.
fn hard_wall_residual(
    psi: &[f64],
    grid: &Grid,
    starts: &[f64],
    lengths: &[f64],
    masses: &[f64],
    gamma: f64,
    mu: f64,
) -> f64 {
    let h = grid.h;
    let mut worst = 0.0f64;
    for (k, (&start, &len)) in starts.iter().zip(lengths).enumerate() {
        if masses[k] == 0.0 {
            continue;
        }
        let end = start + len;
        let mut r2 = 0.0;
        for j in 1..psi.len() - 1 {
            let z = (j as f64 + 1.0) * h;
            if z - h <= start || z + h >= end {
                continue;
            }
            let lap = (-psi[j - 1] + 2.0 * psi[j] - psi[j + 1]) / (h * h);
            let r = lap + gamma * psi[j] * psi[j] * psi[j] - mu * psi[j];
            r2 += r * r;
        }
        worst = worst.max((h * r2).sqrt());
    }
    worst
}

/// Ground state with impenetrable scatterers: exact decomposition into the
/// gaps between obstacles.  Mass goes where a common chemical potential μ
/// supports it: n_i(μ) inverts the cell relation on each gap (zero whenever
/// μ ≤ π²/ℓ_i²), and μ is fixed by bisection on Σ n_i(μ) = 1.
pub fn solve_hard_wall(sample: &DisorderSample, gamma: f64, opts: &SolveOpts) -> Result<GpSolution> {
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::domain(format!(
            "interaction strength must be finite and nonnegative, got {gamma}"
        )));
    }
    opts.validate()?;
    let lengths = &sample.lengths;
    let starts = interval_starts(sample);
    let (i_max, ell_max) = sample.largest_interval();
    let pi2 = PI * PI;
    // μ̂'(ĝ) = q̂ + (ĝ/2)q̂' ≤ 3/2, so μ̂(γℓ) ≤ π² + 1.5γℓ and this cap
    // guarantees the largest gap alone can hold the whole mass.
    let mu_cap = (pi2 + 1.5 * gamma * ell_max) / (ell_max * ell_max);
    let grid = Grid::auto(sample.nu, mu_cap);
    let h = grid.h;

    let mut masses = vec![0.0; lengths.len()];
    let mut iterations = 0usize;
    if gamma == 0.0 {
        // All mass in the largest gap: kinetic energy alone decides.
        masses[i_max] = 1.0;
    } else {
        let ell_cut = 4.0 * h;
        let skipped = lengths.iter().filter(|&&l| l < ell_cut).count();
        if skipped > 0 {
            log::warn!(
                "{skipped} gaps shorter than 4h = {ell_cut:.3e} treated as unoccupiable"
            );
        }
        let mass_at = |mu: f64| -> Result<f64> {
            let mut total = 0.0;
            for (&len, _) in lengths.iter().zip(starts.iter()) {
                if len < ell_cut {
                    continue;
                }
                let mu_cell = mu * len * len;
                if mu_cell <= pi2 {
                    continue;
                }
                total += g_hat_for_mu(mu_cell)? / (gamma * len);
            }
            Ok(total)
        };
        let mut lo = pi2 / (ell_max * ell_max);
        let mut hi = mu_cap + 1.0;
        let mut grew = 0;
        while mass_at(hi)? < 1.0 {
            hi *= 2.0;
            grew += 1;
            if grew > 60 {
                return Err(Error::Bracket(format!(
                    "no chemical potential in [{lo:.6e}, {hi:.6e}] carries unit mass"
                )));
            }
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            iterations += 1;
            if mass_at(mid)? < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu_star = 0.5 * (lo + hi);
        for (k, &len) in lengths.iter().enumerate() {
            if len < ell_cut {
                continue;
            }
            let mu_cell = mu_star * len * len;
            if mu_cell > pi2 {
                masses[k] = g_hat_for_mu(mu_cell)? / (gamma * len);
            }
        }
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Bracket(format!(
                "mass allocation collapsed at mu = {mu_star:.6e}"
            )));
        }
        for m in masses.iter_mut() {
            *m /= total;
        }
    }

    // Assemble energy, breakdown, and the grid profile from the cells.
    let mut kinetic = 0.0;
    let mut interaction = 0.0;
    let mut psi = vec![0.0; grid.m];
    for (k, (&len, &start)) in lengths.iter().zip(&starts).enumerate() {
        let n = masses[k];
        if n == 0.0 {
            continue;
        }
        let ghat = gamma * n * len;
        let cell = UnitGp::solve(ghat)?;
        kinetic += n / (len * len) * (cell.e_hat - 0.5 * ghat * cell.q_hat);
        interaction += 0.5 * gamma * n * n / len * cell.q_hat;
        deposit_profile(&mut psi, &grid, start, len, n, &cell);
    }
    let e0 = kinetic + interaction;
    let mu = e0 + interaction;
    normalize_h(&mut psi, h);
    let residual = hard_wall_residual(&psi, &grid, &starts, lengths, &masses, gamma, mu);

    Ok(GpSolution {
        psi,
        e0,
        mu,
        breakdown: EnergyBreakdown { kinetic, potential: 0.0, interaction },
        residual,
        iterations,
        interval_masses: Some(masses),
        gamma,
        sample_id: Some((sample.seed, sample.m_omega())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::{sample_poisson, DisorderSample};

    fn free_grid(m: usize) -> (Grid, PotentialOnGrid) {
        let g = Grid::new(m).unwrap();
        let p = PotentialOnGrid::zero(&g);
        (g, p)
    }

    #[test]
    fn free_linear_ground_state_is_the_sine() {
        let (g, p) = free_grid(2000);
        let s = minimize_gp(&p, 0.0, &g, &SolveOpts::default()).unwrap();
        assert!((s.e0 - PI * PI).abs() < 1e-3, "e0 = {}", s.e0);
        let mut err = 0.0;
        for (i, &z) in g.nodes.iter().enumerate() {
            let d = s.psi[i] - std::f64::consts::SQRT_2 * (PI * z).sin();
            err += d * d;
        }
        assert!((g.h * err).sqrt() < 1e-3);
        assert!((s.mu - s.e0).abs() < 1e-12);
    }

    #[test]
    fn free_interacting_obeys_the_sine_variational_bound() {
        let (g, p) = free_grid(2000);
        let s = minimize_gp(&p, 10.0, &g, &SolveOpts::default()).unwrap();
        assert!(s.e0 >= PI * PI - 1e-6);
        assert!(s.e0 <= PI * PI + 7.5 + 1e-6, "e0 = {}", s.e0);
        assert!(s.mu >= s.e0);
        assert!(s.residual <= 1e-6);
        let norm: f64 = g.h * s.psi.iter().map(|x| x * x).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-10);
        assert!(s.psi.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn free_strong_coupling_reaches_the_flat_profile_ratio() {
        let (g, p) = free_grid(4000);
        let s = minimize_gp(&p, 1e4, &g, &SolveOpts::default()).unwrap();
        let ratio = s.e0 / (0.5 * 1e4);
        assert!((1.0..=1.1).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn minimizer_matches_the_cell_closed_form() {
        // Zero potential on the unit interval *is* the cell problem.
        for gamma in [10.0, 300.0] {
            let (g, p) = free_grid(4000);
            let s = minimize_gp(&p, gamma, &g, &SolveOpts::default()).unwrap();
            let cell = UnitGp::solve(gamma).unwrap();
            assert!(
                (s.e0 - cell.e_hat).abs() <= 2e-4 * cell.e_hat,
                "gamma={gamma}: {} vs {}",
                s.e0,
                cell.e_hat
            );
            assert!((s.mu - cell.mu_hat).abs() <= 2e-4 * cell.mu_hat);
        }
    }

    #[test]
    fn interval_energy_linear_limit() {
        let opts = SolveOpts::default();
        let (e, mu) = interval_gp(0.5, 0.0, 7.0, &opts).unwrap();
        assert_eq!(e, 0.0);
        assert!((mu - 4.0 * PI * PI).abs() < 1e-12);
        let (e, mu) = interval_gp(0.25, 0.6, 0.0, &opts).unwrap();
        assert!((e - 0.6 * PI * PI / 0.0625).abs() < 1e-10);
        assert!((mu - PI * PI / 0.0625).abs() < 1e-10);
        assert!(interval_gp(0.5, -0.1, 1.0, &opts).is_err());
        assert!(interval_gp(0.0, 0.5, 1.0, &opts).is_err());
    }

    #[test]
    fn interval_energy_near_quadratic_model_in_its_regime() {
        let (e, _) = interval_gp(0.2, 0.3, 50.0, &SolveOpts::default()).unwrap();
        let model = PI * PI * 0.3 / 0.04 + 50.0 * 0.09 / 0.4;
        assert!((e - model).abs() / model < 0.15, "e = {e}, model = {model}");
    }

    #[test]
    fn interval_chemical_potential_matches_the_exact_derivative() {
        for (ell, n, gamma) in [(0.3, 0.4, 20.0), (1.0, 1.0, 300.0), (0.05, 0.01, 5.0)] {
            let (_, mu_fd) = interval_gp(ell, n, gamma, &SolveOpts::default()).unwrap();
            let mu_exact = UnitGp::solve(gamma * n * ell).unwrap().mu_hat / (ell * ell);
            assert!(
                (mu_fd - mu_exact).abs() <= 1e-6 * mu_exact,
                "fd {mu_fd} vs exact {mu_exact}"
            );
        }
    }

    #[test]
    fn hard_wall_linear_mass_sits_in_the_largest_gap() {
        let s = sample_poisson(25.0, 7).unwrap();
        let sol = solve_hard_wall(&s, 0.0, &SolveOpts::default()).unwrap();
        let (i_max, ell_max) = s.largest_interval();
        assert!((sol.e0 - PI * PI / (ell_max * ell_max)).abs() <= 1e-6 * sol.e0);
        let masses = sol.interval_masses.as_ref().unwrap();
        for (k, &m) in masses.iter().enumerate() {
            if k == i_max {
                assert_eq!(m, 1.0);
            } else {
                assert_eq!(m, 0.0);
            }
        }
        assert!((sol.mu - sol.e0).abs() < 1e-12);
    }

    #[test]
    fn hard_wall_symmetric_tie_takes_the_first_half() {
        let s = DisorderSample::from_positions(1.0, 0, &[0.5]).unwrap();
        let sol = solve_hard_wall(&s, 0.0, &SolveOpts::default()).unwrap();
        assert!((sol.e0 - 4.0 * PI * PI).abs() < 1e-10);
        let masses = sol.interval_masses.as_ref().unwrap();
        assert_eq!(masses[0], 1.0);
        assert_eq!(masses[1], 0.0);
    }

    #[test]
    fn hard_wall_without_scatterers_is_the_unit_cell() {
        let s = DisorderSample::from_positions(40.0, 3, &[]).unwrap();
        let sol = solve_hard_wall(&s, 55.0, &SolveOpts::default()).unwrap();
        let cell = UnitGp::solve(55.0).unwrap();
        assert!((sol.e0 - cell.e_hat).abs() <= 1e-12 * cell.e_hat);
        assert!((sol.mu - cell.mu_hat).abs() <= 1e-12 * cell.mu_hat);
        let norm: f64 = sol.psi.iter().map(|x| x * x).sum::<f64>() * sol.grid_step();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hard_wall_masses_sum_to_one_and_mu_exceeds_e0() {
        let s = sample_poisson(40.0, 11).unwrap();
        let sol = solve_hard_wall(&s, 500.0, &SolveOpts::default()).unwrap();
        let total: f64 = sol.interval_masses.as_ref().unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-8);
        assert!(sol.mu > sol.e0);
        assert!(sol.e0 > PI * PI);
        let norm: f64 = sol.psi.iter().map(|x| x * x).sum::<f64>() * sol.grid_step();
        assert!((norm - 1.0).abs() < 1e-10);
        assert!(sol.psi.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn hard_wall_chemical_potentials_equalize_across_occupied_gaps() {
        let s = sample_poisson(30.0, 2).unwrap();
        let sol = solve_hard_wall(&s, 2000.0, &SolveOpts::default()).unwrap();
        let masses = sol.interval_masses.as_ref().unwrap();
        let mut mus = Vec::new();
        for (k, &n) in masses.iter().enumerate() {
            if n > 1e-9 {
                let ell = s.lengths[k];
                mus.push(UnitGp::solve(2000.0 * n * ell).unwrap().mu_hat / (ell * ell));
            }
        }
        assert!(mus.len() > 1, "expected several occupied gaps");
        let lo = mus.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = mus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((hi - lo) <= 1e-6 * hi, "mu spread [{lo}, {hi}]");
    }
}
