mod config;
mod record;
mod svg;
mod tasks;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use gplab_core::Sigma;

use config::{ConvergenceConfig, GcConfig, GridChoice, Schedule, SolveConfig, SweepConfig};

#[derive(Parser)]
#[command(
    name = "gplab",
    version,
    about = "Ground states of a 1D Bose gas among Poisson point scatterers: \
             solves, spectra, the mass-repartition model, sweeps, and plots"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SolveFlags {
    /// JSON config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// scatterer density (0 = no disorder)
    #[arg(long)]
    nu: Option<f64>,
    /// interaction strength
    #[arg(long)]
    gamma: Option<f64>,
    /// scatterer strength: a number or "inf"
    #[arg(long)]
    sigma: Option<Sigma>,
    #[arg(long)]
    seed: Option<u64>,
    /// interior grid nodes, or "auto"
    #[arg(long)]
    grid: Option<GridChoice>,
    #[arg(long)]
    n_particles: Option<u64>,
    #[arg(long)]
    energy_tol: Option<f64>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

impl SolveFlags {
    fn merge(&self) -> Result<SolveConfig> {
        let mut cfg: SolveConfig = config::load_or_default(self.config.as_deref())?;
        if let Some(v) = self.nu {
            cfg.nu = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = self.n_particles {
            cfg.n_particles = v;
        }
        if let Some(v) = self.energy_tol {
            cfg.energy_tol = v;
        }
        if let Some(v) = self.residual_tol {
            cfg.residual_tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if cfg.nu < 0.0 || !cfg.nu.is_finite() {
            bail!("nu must be finite and >= 0");
        }
        if cfg.gamma < 0.0 || !cfg.gamma.is_finite() {
            bail!("gamma must be finite and >= 0");
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimize the energy functional for one disorder sample
    Solve {
        #[command(flatten)]
        flags: SolveFlags,
        /// output prefix; writes <out>.csv and <out>.json
        #[arg(long, default_value = "solve")]
        out: PathBuf,
    },
    /// Low spectrum of the linearization around the ground state
    Spectrum {
        #[command(flatten)]
        flags: SolveFlags,
        /// how many excited eigenpairs
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value = "spectrum")]
        out: PathBuf,
    },
    /// Solve the grand-canonical mass-repartition model
    Gc {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        /// used only for the regime margins
        #[arg(long)]
        sigma: Option<Sigma>,
        #[arg(long)]
        tol: Option<f64>,
        /// write <out>.json instead of printing
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cartesian sweep over nu x gamma x sigma x seeds, CSV out
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// comma-separated list
        #[arg(long, value_delimiter = ',')]
        nus: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        /// comma-separated; entries are numbers or "inf"
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<Sigma>>,
        /// seeds 0..N per parameter point
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        grid: Option<GridChoice>,
        #[arg(long)]
        timeout_secs: Option<f64>,
        /// record wall times (makes the CSV non-reproducible byte-for-byte)
        #[arg(long)]
        timings: bool,
        /// reuse rows journaled by an interrupted run
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Disorder-averaged e0/e_gc ladder along a gamma(nu) schedule
    Convergence {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        nus: Option<Vec<f64>>,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long, value_enum)]
        schedule: Option<Schedule>,
        #[arg(long, default_value = "convergence.csv")]
        out: PathBuf,
    },
    /// Render a CSV produced by sweep or convergence as SVG
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, value_enum)]
        kind: svg::PlotKind,
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().cmd {
        Cmd::Solve { flags, out } => tasks::run_solve(&flags.merge()?, &out),
        Cmd::Spectrum { flags, k, out } => tasks::run_spectrum(&flags.merge()?, k, &out),
        Cmd::Gc {
            config,
            gamma,
            nu,
            sigma,
            tol,
            out,
        } => {
            let mut cfg: GcConfig = config::load_or_default(config.as_deref())?;
            if let Some(v) = gamma {
                cfg.gamma = v;
            }
            if let Some(v) = nu {
                cfg.nu = v;
            }
            if let Some(v) = sigma {
                cfg.sigma = v;
            }
            if let Some(v) = tol {
                cfg.tol = v;
            }
            tasks::run_gc(&cfg, out.as_deref())
        }
        Cmd::Sweep {
            config,
            nus,
            gammas,
            sigmas,
            seeds,
            grid,
            timeout_secs,
            timings,
            resume,
            out,
        } => {
            let mut cfg: SweepConfig = config::load_or_default(config.as_deref())?;
            if let Some(v) = nus {
                cfg.nus = v;
            }
            if let Some(v) = gammas {
                cfg.gammas = v;
            }
            if let Some(v) = sigmas {
                cfg.sigmas = v;
            }
            if let Some(v) = seeds {
                cfg.seeds = v;
            }
            if let Some(v) = grid {
                cfg.grid = v;
            }
            if let Some(v) = timeout_secs {
                cfg.timeout_secs = v;
            }
            if timings {
                cfg.timings = true;
            }
            tasks::run_sweep(&cfg, &out, resume)
        }
        Cmd::Convergence {
            config,
            nus,
            seeds,
            schedule,
            out,
        } => {
            let mut cfg: ConvergenceConfig = config::load_or_default(config.as_deref())?;
            if let Some(v) = nus {
                cfg.nus = v;
            }
            if let Some(v) = seeds {
                cfg.seeds = v;
            }
            if let Some(v) = schedule {
                cfg.schedule = v;
            }
            tasks::run_convergence(&cfg, &out)
        }
        Cmd::Plot { csv, kind, out } => {
            let table = record::Table::read(&csv)?;
            table.require_rows("plot")?;
            let rendered = svg::render(&table, kind)?;
            std::fs::write(&out, rendered)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
