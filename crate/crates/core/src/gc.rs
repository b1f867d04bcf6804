//! Analytic grand-canonical repartition model.
//!
//! Mass in a gap of length ℓ follows the quadratic per-interval estimate
//! n(ℓ) = (ℓγ)⁻¹[μℓ² − π²]₊, and the chemical potential is fixed by averaging
//! the normalization over the exponential gap law: ν∫n(ℓ)dP_ν(ℓ) = 1.  From μ
//! follow the occupied fraction λ = e^{−πν/√μ}, the weighted mean occupied
//! length ℓ̄, a phase label, and two asymptotic self-consistency constants.
//! The linear case γ = 0 is excluded here by contract — it is solved exactly
//! by the hard-wall path in `gp`.

use crate::error::{Error, Result};
use crate::params::Sigma;
use crate::quad::integrate;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Delocalized,
    Transition,
    Localized,
    FewIntervals,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Delocalized => "DELOCALIZED",
            Phase::Transition => "TRANSITION",
            Phase::Localized => "LOCALIZED",
            Phase::FewIntervals => "FEW_INTERVALS",
        };
        write!(f, "{s}")
    }
}

/// Classification cutoffs.  The underlying regimes are asymptotic, so these
/// are reporting conventions, not physics; they are recorded alongside every
/// output row.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhaseThresholds {
    /// λ at or above this → DELOCALIZED
    pub deloc: f64,
    /// λ at or below this (with enough occupied gaps) → LOCALIZED
    pub loc: f64,
    /// λ·ν at or below this → FEW_INTERVALS
    pub few_lambda_nu: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        PhaseThresholds { deloc: 0.9, loc: 0.1, few_lambda_nu: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GcSolution {
    pub gamma: f64,
    pub nu: f64,
    pub mu: f64,
    /// occupied fraction e^{−πν/√μ}
    pub lambda: f64,
    /// weighted mean occupied length
    pub lbar: f64,
    /// |ν∫n dP − 1| at the accepted μ
    pub norm_residual: f64,
    pub phase: Phase,
    /// [λ/(ln λ⁻¹)²]·ν²/γ — finite-size constant of the λ(γ/ν²) asymptotic
    pub relation_constant: f64,
    /// (μ/γ)·λ — the order-unity check of the strong-coupling closure
    pub eq_star_check: f64,
    /// model energy ν∫[π²n/ℓ² + γn²/(2ℓ)]dP
    pub e_gc: f64,
}

/// Quadratic-model mass carried by a single gap of length `ell` at chemical
/// potential `mu`.
pub fn mass_per_length(ell: f64, mu: f64, gamma: f64) -> Result<f64> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::domain(format!("gap length must be positive, got {ell}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("chemical potential must be positive, got {mu}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!(
            "the repartition model needs gamma > 0 (the linear case is exact elsewhere), got {gamma}"
        )));
    }
    Ok((mu * ell * ell - PI * PI).max(0.0) / (ell * gamma))
}

/// Fraction of gaps long enough to hold mass: e^{−πν/√μ}, the exponential
/// tail probability of the gap law above the threshold length π/√μ.
pub fn occupied_fraction(mu: f64, nu: f64) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(format!("chemical potential must be positive, got {mu}")));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("density must be nonnegative, got {nu}")));
    }
    Ok((-PI * nu / mu.sqrt()).exp())
}

/// Upper quadrature cutoff: the exponential weight makes the tail beyond
/// (40 + 3 ln ν)/ν smaller than e⁻⁴⁰ relative to the retained mass.
fn ell_cut(nu: f64) -> f64 {
    (40.0 + 3.0 * nu.ln().max(0.0)) / nu
}

/// ν∫n(ℓ,μ)dP_ν(ℓ) − 1: negative when μ supports less than unit mass.
pub fn mass_balance(mu: f64, gamma: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("density must be positive, got {nu}")));
    }
    let lo = PI / mu.sqrt();
    let hi = ell_cut(nu).max(lo);
    let f = |ell: f64| {
        ((mu * ell * ell - PI * PI).max(0.0) / (ell * gamma)) * nu * nu * (-nu * ell).exp()
    };
    // guard against a zero-measure window
    if hi <= lo {
        return Ok(-1.0);
    }
    Ok(integrate(&f, lo, hi, 1e-12, 1e-15) - 1.0)
}

/// Weighted mean occupied length ν∫ℓ·n(ℓ)dP_ν(ℓ).
pub fn mean_occupied_length(mu: f64, gamma: f64, nu: f64) -> Result<f64> {
    mass_per_length(1.0, mu, gamma)?; // validate mu, gamma
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("density must be positive, got {nu}")));
    }
    let lo = PI / mu.sqrt();
    let hi = ell_cut(nu).max(lo * (1.0 + 1e-12));
    let f = |ell: f64| {
        ell * ((mu * ell * ell - PI * PI).max(0.0) / (ell * gamma)) * nu * nu * (-nu * ell).exp()
    };
    Ok(integrate(&f, lo, hi, 1e-12, 1e-18))
}

/// Diagnostic ratio ℓ̄·ν/(1 + ln(1 + ν²/γ)): order unity when the mean
/// occupied length follows its asymptotic scaling.
pub fn lbar_ratio(lbar: f64, nu: f64, gamma: f64) -> f64 {
    lbar * nu / (1.0 + (nu * nu / gamma).ln_1p())
}

/// Model energy ν∫[π²n/ℓ² + γn²/(2ℓ)]dP_ν(ℓ).
pub fn model_energy(mu: f64, gamma: f64, nu: f64) -> Result<f64> {
    mass_per_length(1.0, mu, gamma)?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("density must be positive, got {nu}")));
    }
    let lo = PI / mu.sqrt();
    let hi = ell_cut(nu).max(lo * (1.0 + 1e-12));
    let f = |ell: f64| {
        let n = (mu * ell * ell - PI * PI).max(0.0) / (ell * gamma);
        (PI * PI * n / (ell * ell) + 0.5 * gamma * n * n / ell) * nu * nu * (-nu * ell).exp()
    };
    Ok(integrate(&f, lo, hi, 1e-12, 1e-15))
}

pub fn classify_phase(lambda: f64, nu: f64, t: &PhaseThresholds) -> Phase {
    if lambda >= t.deloc {
        Phase::Delocalized
    } else if lambda * nu <= t.few_lambda_nu {
        Phase::FewIntervals
    } else if lambda <= t.loc {
        Phase::Localized
    } else {
        Phase::Transition
    }
}

/// The two asymptotic self-consistency constants at a solved μ:
/// [λ/(ln λ⁻¹)²]·ν²/γ and (μ/γ)·λ.  The first degenerates to ∞ as λ → 1.
pub fn relation_check(gamma: f64, nu: f64, mu: f64) -> Result<(f64, f64)> {
    let lambda = occupied_fraction(mu, nu)?;
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    let log_inv = -lambda.ln();
    let constant = if log_inv == 0.0 {
        f64::INFINITY
    } else {
        lambda / (log_inv * log_inv) * nu * nu / gamma
    };
    Ok((constant, mu / gamma * lambda))
}

/// Solve ν∫n(ℓ,μ)dP_ν(ℓ) = 1 for μ by bisection and fill in the derived
/// quantities, classifying with the given thresholds.
pub fn solve_mu_with(
    gamma: f64,
    nu: f64,
    tol: f64,
    thresholds: &PhaseThresholds,
) -> Result<GcSolution> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!(
            "the repartition model needs gamma > 0, got {gamma}"
        )));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("density must be positive, got {nu}")));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut lo = PI * PI * (1.0 + 1e-9);
    if mass_balance(lo, gamma, nu)? >= 0.0 {
        return Err(Error::Bracket(format!(
            "already over unit mass at mu = {lo:.6e}; gamma = {gamma:.3e} is below the model's range at nu = {nu:.3e}"
        )));
    }
    let mut hi = (2.0 * PI * PI).max(lo * 2.0);
    let mut doublings = 0;
    while mass_balance(hi, gamma, nu)? <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1000 {
            return Err(Error::Bracket(format!(
                "no unit-mass chemical potential found in [{lo:.6e}, {hi:.6e}]"
            )));
        }
    }
    let mut mid;
    loop {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = mass_balance(mid, gamma, nu)?;
        if f.abs() < tol.min(1e-10) {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = mid;
    let norm_residual = mass_balance(mu, gamma, nu)?.abs();
    let lambda = occupied_fraction(mu, nu)?;
    let lbar = mean_occupied_length(mu, gamma, nu)?;
    let (relation_constant, eq_star_check) = relation_check(gamma, nu, mu)?;
    let e_gc = model_energy(mu, gamma, nu)?;
    Ok(GcSolution {
        gamma,
        nu,
        mu,
        lambda,
        lbar,
        norm_residual,
        phase: classify_phase(lambda, nu, thresholds),
        relation_constant,
        eq_star_check,
        e_gc,
    })
}

pub fn solve_mu(gamma: f64, nu: f64, tol: f64) -> Result<GcSolution> {
    solve_mu_with(gamma, nu, tol, &PhaseThresholds::default())
}

/// Margins of the deterministic-energy regime: c1 = γ(ln ν)²/ν and
/// c2 = σ(1 + ln(1 + ν²/γ))/ν.  Both ≫ 1 means sample-to-sample energy
/// fluctuations vanish in the density limit.
pub fn deterministic_regime_margins(gamma: f64, nu: f64, sigma: Sigma) -> Result<(f64, f64)> {
    if !(nu > 1.0) || !nu.is_finite() {
        return Err(Error::domain(format!("need nu > 1 for the margins, got {nu}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    let lnnu = nu.ln();
    let c1 = gamma * lnnu * lnnu / nu;
    let c2 = match sigma.validate()? {
        Sigma::Infinite => f64::INFINITY,
        Sigma::Finite(s) => s * (1.0 + (nu * nu / gamma).ln_1p()) / nu,
    };
    Ok((c1, c2))
}

/// Dictionary from thermodynamic variables (system size L, impurity strength
/// b, impurity density d, coupling g, particle density ρ) to the scaled
/// triple (σ, ν, γ) = (Lb, Ld, L²ρg).
pub fn scale_from_thermodynamic(l: f64, b: f64, d: f64, g: f64, rho: f64) -> Result<(f64, f64, f64)> {
    for (name, v) in [("L", l), ("b", b), ("d", d), ("g", g), ("rho", rho)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok((l * b, l * d, l * l * rho * g))
}

/// Inverse dictionary: recover (b, d, g) from (σ, ν, γ) at given L and ρ.
pub fn thermodynamic_from_scale(
    sigma: f64,
    nu: f64,
    gamma: f64,
    l: f64,
    rho: f64,
) -> Result<(f64, f64, f64)> {
    for (name, v) in [("sigma", sigma), ("nu", nu), ("gamma", gamma), ("L", l), ("rho", rho)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok((sigma / l, nu / l, gamma / (l * l * rho)))
}

/// The window (L(ln L)²)⁻¹·d < ρg < d² in which the scaled triple sits in
/// the regime of interest; returned as (lower edge, ρg, upper edge).
pub fn scaling_window(l: f64, d: f64, g: f64, rho: f64) -> Result<(f64, f64, f64)> {
    for (name, v) in [("L", l), ("d", d), ("g", g), ("rho", rho)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    let lnl = l.ln();
    Ok((d / (l * lnl * lnl), rho * g, d * d))
}
