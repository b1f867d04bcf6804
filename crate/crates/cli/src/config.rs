//! Run configurations: one JSON document per command, with CLI flags
//! overriding individual fields. Every output embeds the merged config.

use anyhow::{bail, Context, Result};
use gplab_core::{Sigma, SolveOpts};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Grid size: a fixed interior node count or the resolution heuristic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridChoice {
    Auto,
    Fixed(usize),
}

impl Default for GridChoice {
    fn default() -> Self {
        GridChoice::Auto
    }
}

impl fmt::Display for GridChoice {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            GridChoice::Auto => write!(f, "auto"),
            GridChoice::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for GridChoice {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "auto" {
            return Ok(GridChoice::Auto);
        }
        let m: usize = s.trim().parse().context("grid must be \"auto\" or a node count")?;
        Ok(GridChoice::Fixed(m))
    }
}

impl Serialize for GridChoice {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GridChoice::Auto => ser.serialize_str("auto"),
            GridChoice::Fixed(m) => ser.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for GridChoice {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = GridChoice;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "\"auto\" or a positive integer")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<GridChoice, E> {
                Ok(GridChoice::Fixed(v as usize))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<GridChoice, E> {
                GridChoice::from_str(v).map_err(E::custom)
            }
        }
        de.deserialize_any(V)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub nu: f64,
    pub gamma: f64,
    pub sigma: Sigma,
    pub seed: u64,
    pub grid: GridChoice,
    pub n_particles: u64,
    pub energy_tol: f64,
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let opts = SolveOpts::default();
        SolveConfig {
            nu: 0.0,
            gamma: 0.0,
            sigma: Sigma::Finite(0.0),
            seed: 0,
            grid: GridChoice::Auto,
            n_particles: 1_000_000,
            energy_tol: opts.energy_tol,
            residual_tol: opts.residual_tol,
            max_iter: opts.max_iter,
        }
    }
}

impl SolveConfig {
    pub fn solve_opts(&self) -> SolveOpts {
        SolveOpts {
            energy_tol: self.energy_tol,
            residual_tol: self.residual_tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GcConfig {
    pub gamma: f64,
    pub nu: f64,
    pub sigma: Sigma,
    pub tol: f64,
    /// occupied-fraction threshold declaring DELOCALIZED
    pub deloc_lambda: f64,
    /// occupied-fraction threshold (with lambda*nu > few) declaring LOCALIZED
    pub loc_lambda: f64,
    /// lambda*nu at or below this is FEW_INTERVALS
    pub few_lambda_nu: f64,
}

impl Default for GcConfig {
    fn default() -> Self {
        let t = gplab_core::gc::PhaseThresholds::default();
        GcConfig {
            gamma: 1.0,
            nu: 10.0,
            sigma: Sigma::Infinite,
            tol: 1e-10,
            deloc_lambda: t.deloc,
            loc_lambda: t.loc,
            few_lambda_nu: t.few_lambda_nu,
        }
    }
}

impl GcConfig {
    pub fn thresholds(&self) -> gplab_core::gc::PhaseThresholds {
        gplab_core::gc::PhaseThresholds {
            deloc: self.deloc_lambda,
            loc: self.loc_lambda,
            few_lambda_nu: self.few_lambda_nu,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub nus: Vec<f64>,
    pub gammas: Vec<f64>,
    pub sigmas: Vec<Sigma>,
    pub seeds: u64,
    pub grid: GridChoice,
    pub n_particles: u64,
    pub energy_tol: f64,
    pub residual_tol: f64,
    pub max_iter: usize,
    /// solves whose wall time exceeds this are recorded NA / "timeout"
    pub timeout_secs: f64,
    /// record wall times (breaks byte-for-byte reproducibility of the CSV)
    pub timings: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let opts = SolveOpts::default();
        SweepConfig {
            nus: vec![],
            gammas: vec![],
            sigmas: vec![],
            seeds: 1,
            grid: GridChoice::Auto,
            n_particles: 1_000_000,
            energy_tol: opts.energy_tol,
            residual_tol: opts.residual_tol,
            max_iter: opts.max_iter,
            timeout_secs: 600.0,
            timings: false,
        }
    }
}

impl SweepConfig {
    pub fn solve_opts(&self) -> SolveOpts {
        SolveOpts {
            energy_tol: self.energy_tol,
            residual_tol: self.residual_tol,
            max_iter: self.max_iter,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nus.is_empty() || self.gammas.is_empty() || self.sigmas.is_empty() {
            bail!("sweep needs at least one value each of nu, gamma, sigma");
        }
        if self.seeds == 0 {
            bail!("sweep needs at least one seed");
        }
        Ok(())
    }
}

/// Named gamma(nu) schedules for the convergence study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// gamma = nu^2: the self-averaging regime
    Valid,
    /// gamma = nu / (2 ln^2 nu): fluctuations persist
    Violating,
}

impl Schedule {
    pub fn gamma(&self, nu: f64) -> f64 {
        match self {
            Schedule::Valid => nu * nu,
            Schedule::Violating => nu / (2.0 * nu.ln().powi(2)),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Schedule::Valid => write!(f, "valid"),
            Schedule::Violating => write!(f, "violating"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub nus: Vec<f64>,
    pub seeds: u64,
    pub schedule: Schedule,
    pub tol: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            nus: vec![20.0, 40.0, 80.0],
            seeds: 50,
            schedule: Schedule::Valid,
            tol: 1e-10,
        }
    }
}

/// Load a config document if a path was given, else start from defaults.
pub fn load_or_default<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}
