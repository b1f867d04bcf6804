//! Command implementations: everything that computes, reads, or writes.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use gplab_core::disorder::{sample_poisson, DisorderSample};
use gplab_core::gc;
use gplab_core::gp::{minimize_gp, solve_hard_wall, GpSolution};
use gplab_core::grid::{assemble_potential, Grid, PotentialOnGrid};
use gplab_core::observables;
use gplab_core::parallel::par_map;
use gplab_core::spectrum::{depletion_bound, lowest_eigenpairs, mean_field_hamiltonian};
use gplab_core::{Error as CoreError, Sigma, SolveOpts};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{ConvergenceConfig, GcConfig, GridChoice, SolveConfig, SweepConfig};
use crate::record::{write_csv, SweepRecord};

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// Margins past which the disorder-averaging conditions count as comfortably met.
const MARGIN_LARGE: f64 = 10.0;

fn make_sample(nu: f64, seed: u64) -> Result<DisorderSample> {
    if nu > 0.0 {
        Ok(sample_poisson(nu, seed)?)
    } else {
        Ok(DisorderSample::from_positions(0.0, seed, &[])?)
    }
}

fn resolve_grid(choice: GridChoice, nu: f64, gamma: f64) -> Result<Grid> {
    match choice {
        GridChoice::Fixed(m) => Ok(Grid::new(m)?),
        GridChoice::Auto => {
            // Resolution heuristic wants a chemical-potential scale; the
            // repartition model provides one when it applies.
            let mu_est = if gamma > 0.0 && nu > 1.0 {
                gc::solve_mu(gamma, nu, 1e-8).map(|g| g.mu).unwrap_or(gamma + PI2)
            } else {
                gamma + PI2
            };
            Ok(Grid::auto(nu.max(0.0), mu_est))
        }
    }
}

enum Solved {
    OnGrid {
        solution: GpSolution,
        potential: PotentialOnGrid,
        grid: Grid,
    },
    HardWall(GpSolution),
}

impl Solved {
    fn solution(&self) -> &GpSolution {
        match self {
            Solved::OnGrid { solution, .. } => solution,
            Solved::HardWall(s) => s,
        }
    }
}

fn solve_sample(
    sample: &DisorderSample,
    sigma: Sigma,
    gamma: f64,
    grid_choice: GridChoice,
    opts: &SolveOpts,
) -> Result<Solved, CoreError> {
    match sigma {
        Sigma::Infinite => Ok(Solved::HardWall(solve_hard_wall(sample, gamma, opts)?)),
        Sigma::Finite(s) => {
            let grid = resolve_grid(grid_choice, sample.nu, gamma)
                .map_err(|e| CoreError::usage(e.to_string()))?;
            let potential = if s > 0.0 && sample.m_omega() > 0 {
                assemble_potential(sample, Sigma::Finite(s), &grid)?
            } else {
                PotentialOnGrid::zero(&grid)
            };
            let solution = minimize_gp(&potential, gamma, &grid, opts)?;
            Ok(Solved::OnGrid {
                solution,
                potential,
                grid,
            })
        }
    }
}

// ---- solve ----------------------------------------------------------------

pub fn run_solve(cfg: &SolveConfig, out: &Path) -> Result<()> {
    let sample = make_sample(cfg.nu, cfg.seed)?;
    let solved = match solve_sample(&sample, cfg.sigma, cfg.gamma, cfg.grid, &cfg.solve_opts()) {
        Ok(s) => s,
        Err(CoreError::NonConvergence {
            context,
            iterations,
            energy,
            residual,
            ..
        }) => {
            let diag = json!({
                "config": cfg,
                "error": "nonconvergence",
                "context": context,
                "iterations": iterations,
                "energy": energy,
                "residual": residual,
            });
            let path = with_suffix(out, ".error.json");
            std::fs::write(&path, pretty(&diag)?)?;
            bail!(
                "solver did not converge after {iterations} iterations \
                 (residual {residual:.3e}); diagnostics in {}",
                path.display()
            );
        }
        Err(e) => return Err(e.into()),
    };
    let sol = solved.solution();

    // profile CSV
    let csv_path = with_suffix(out, ".csv");
    {
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(["z", "psi"])?;
        let h = sol.grid_step();
        for (i, p) in sol.psi.iter().enumerate() {
            w.write_record([format!("{:.12e}", (i + 1) as f64 * h), format!("{p:.12e}")])?;
        }
        w.flush()?;
    }

    // spectrum of the linearization (grid solutions only)
    let spectrum_json = match &solved {
        Solved::OnGrid {
            solution,
            potential,
            grid,
        } => {
            let op = mean_field_hamiltonian(potential, cfg.gamma, &solution.psi, grid)?;
            let sp = lowest_eigenpairs(&op, 2)?.with_gap_bound(potential.integral + cfg.gamma)?;
            let depletion = depletion_bound(
                cfg.n_particles,
                cfg.gamma,
                sp.eigenvalues[0],
                sp.eigenvalues[1],
                1.0,
            )
            .ok();
            json!({
                "gap": sp.gap,
                "gap_bound": sp.gap_bound,
                "eta": sp.eta,
                "depletion_bound_modC": depletion,
            })
        }
        Solved::HardWall(_) => serde_json::Value::Null,
    };

    // repartition-model comparison where the model applies
    let comparison = if cfg.gamma > 0.0 && cfg.nu > 1.0 {
        match gc::solve_mu(cfg.gamma, cfg.nu, 1e-10) {
            Ok(model) => {
                let report = observables::compare_model(sol, &sample, &model).ok();
                json!({ "model": model, "report": report })
            }
            Err(_) => serde_json::Value::Null,
        }
    } else {
        serde_json::Value::Null
    };

    let (_, lambda_num) = observables::interval_masses(sol, &sample)?;
    let mut summary = sol.json_header();
    let obj = summary.as_object_mut().unwrap();
    obj.insert("config".into(), serde_json::to_value(cfg)?);
    obj.insert(
        "sample".into(),
        json!({
            "seed": cfg.seed,
            "nu": sample.nu,
            "m_omega": sample.m_omega(),
            "ell_max": sample.largest_interval().1,
        }),
    );
    obj.insert("lambda_num".into(), json!(lambda_num));
    obj.insert("spectrum".into(), spectrum_json);
    obj.insert("gc".into(), comparison);

    std::fs::write(with_suffix(out, ".json"), pretty(&summary)?)?;
    println!(
        "e0 = {:.12e}  mu = {:.12e}  residual = {:.3e}  ({} iterations)",
        sol.e0, sol.mu, sol.residual, sol.iterations
    );
    Ok(())
}

// ---- spectrum -------------------------------------------------------------

pub fn run_spectrum(cfg: &SolveConfig, k: usize, out: &Path) -> Result<()> {
    if matches!(cfg.sigma, Sigma::Infinite) {
        bail!(
            "spectrum needs a finite sigma: the hard-wall operator decomposes \
             per interval and has no single grid representation"
        );
    }
    let sample = make_sample(cfg.nu, cfg.seed)?;
    let solved = solve_sample(&sample, cfg.sigma, cfg.gamma, cfg.grid, &cfg.solve_opts())?;
    let (sol, potential, grid) = match &solved {
        Solved::OnGrid {
            solution,
            potential,
            grid,
        } => (solution, potential, grid),
        Solved::HardWall(_) => unreachable!(),
    };
    let op = mean_field_hamiltonian(potential, cfg.gamma, &sol.psi, grid)?;
    let sp = lowest_eigenpairs(&op, k)?.with_gap_bound(potential.integral + cfg.gamma)?;

    let csv_path = with_suffix(out, ".csv");
    {
        let mut w = csv::Writer::from_path(&csv_path)?;
        let mut header = vec!["z".to_string(), "psi0".to_string()];
        header.extend((0..sp.eigenvectors.len()).map(|i| format!("v{i}")));
        w.write_record(&header)?;
        for (i, z) in grid.nodes.iter().enumerate() {
            let mut row = vec![format!("{z:.12e}"), format!("{:.12e}", sol.psi[i])];
            row.extend(sp.eigenvectors.iter().map(|v| format!("{:.12e}", v[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
    }

    let mut doc = sp.to_json();
    let obj = doc.as_object_mut().unwrap();
    obj.insert("config".into(), serde_json::to_value(cfg)?);
    obj.insert("e0".into(), json!(sol.e0));
    std::fs::write(with_suffix(out, ".json"), pretty(&doc)?)?;
    println!(
        "lowest eigenvalues: {:?}  gap = {:.6e}",
        &sp.eigenvalues, sp.gap
    );
    Ok(())
}

// ---- gc -------------------------------------------------------------------

pub fn run_gc(cfg: &GcConfig, out: Option<&Path>) -> Result<()> {
    let model = gc::solve_mu_with(cfg.gamma, cfg.nu, cfg.tol, &cfg.thresholds())?;
    let margins = gc::deterministic_regime_margins(cfg.gamma, cfg.nu, cfg.sigma).ok();
    let doc = json!({
        "config": cfg,
        "solution": model,
        "margins": margins.map(|(c1, c2)| json!({ "c1": c1, "c2": c2 })),
    });
    let text = pretty(&doc)?;
    match out {
        Some(p) => std::fs::write(with_suffix(p, ".json"), text)?,
        None => println!("{text}"),
    }
    Ok(())
}

// ---- sweep ----------------------------------------------------------------

#[derive(Clone)]
struct Task {
    nu: f64,
    gamma: f64,
    sigma: Sigma,
    seed: u64,
}

fn task_hash(cfg: &SweepConfig, t: &Task) -> String {
    let descriptor = format!(
        "{:.17e}|{:.17e}|{}|{}|{}|{}|{:.17e}|{:.17e}|{}",
        t.nu,
        t.gamma,
        t.sigma,
        t.seed,
        cfg.grid,
        cfg.n_particles,
        cfg.energy_tol,
        cfg.residual_tol,
        cfg.max_iter
    );
    let mut hasher = Sha256::new();
    hasher.update(descriptor.as_bytes());
    format!("{:x}", hasher.finalize())
}

fn run_case(cfg: &SweepConfig, t: &Task) -> SweepRecord {
    let started = Instant::now();
    let mut rec = SweepRecord {
        seed: t.seed,
        nu: t.nu,
        sigma: match t.sigma {
            Sigma::Infinite => None,
            Sigma::Finite(s) => Some(s),
        },
        gamma: t.gamma,
        ..Default::default()
    };

    // model side never depends on the sample; fill it first
    if t.gamma > 0.0 && t.nu > 1.0 {
        if let Ok(model) = gc::solve_mu(t.gamma, t.nu, 1e-10) {
            rec.e_gc = Some(model.e_gc);
            rec.mu_gc = Some(model.mu);
            rec.lambda_gc = Some(model.lambda);
            rec.lbar = Some(model.lbar);
            rec.phase = Some(model.phase.to_string());
        }
        if let Ok((c1, c2)) = gc::deterministic_regime_margins(t.gamma, t.nu, t.sigma) {
            rec.c1 = Some(c1);
            rec.c2 = Some(c2);
        }
    }

    let outcome: Result<(), String> = (|| {
        let sample = make_sample(t.nu, t.seed).map_err(|e| e.to_string())?;
        rec.m_omega = Some(sample.m_omega());
        rec.ell_max = Some(sample.largest_interval().1);
        let solved = solve_sample(&sample, t.sigma, t.gamma, cfg.grid, &cfg.solve_opts())
            .map_err(|e| match e {
                CoreError::NonConvergence {
                    iterations,
                    residual,
                    ..
                } => format!("nonconvergence after {iterations} iterations (residual {residual:.3e})"),
                other => other.to_string(),
            })?;
        let sol = solved.solution();
        rec.e0_num = Some(sol.e0);
        rec.mu_num = Some(sol.mu);
        if let Ok((_, lambda_num)) = observables::interval_masses(sol, &sample) {
            rec.lambda_num = Some(lambda_num);
        }
        if let Solved::OnGrid {
            solution,
            potential,
            grid,
        } = &solved
        {
            let op = mean_field_hamiltonian(potential, t.gamma, &solution.psi, grid)
                .map_err(|e| e.to_string())?;
            let sp = lowest_eigenpairs(&op, 2)
                .and_then(|s| s.with_gap_bound(potential.integral + t.gamma))
                .map_err(|e| e.to_string())?;
            rec.gap = Some(sp.gap);
            rec.gap_bound = sp.gap_bound;
            rec.depletion_bound_mod_c = depletion_bound(
                cfg.n_particles,
                t.gamma,
                sp.eigenvalues[0],
                sp.eigenvalues[1],
                1.0,
            )
            .ok();
        }
        Ok(())
    })();

    let elapsed = started.elapsed().as_secs_f64();
    if let Err(reason) = outcome {
        rec.reason = reason;
    } else if elapsed > cfg.timeout_secs {
        // Budget guard: solves always terminate (max_iter is finite), so the
        // guard reclassifies overruns after the fact rather than preempting.
        rec = SweepRecord {
            seed: t.seed,
            nu: t.nu,
            sigma: rec.sigma,
            gamma: t.gamma,
            m_omega: rec.m_omega,
            ell_max: rec.ell_max,
            reason: "timeout".to_string(),
            ..Default::default()
        };
    }
    if cfg.timings {
        rec.wall_time = Some(elapsed);
    }
    rec
}

pub fn run_sweep(cfg: &SweepConfig, out: &Path, resume: bool) -> Result<()> {
    cfg.validate()?;

    let mut tasks = Vec::new();
    for &nu in &cfg.nus {
        for &gamma in &cfg.gammas {
            for &sigma in &cfg.sigmas {
                for seed in 0..cfg.seeds {
                    tasks.push(Task {
                        nu,
                        gamma,
                        sigma,
                        seed,
                    });
                }
            }
        }
    }

    let journal_path = with_suffix(out, ".journal");
    let mut done: HashMap<String, SweepRecord> = HashMap::new();
    if resume && journal_path.exists() {
        let file = std::fs::File::open(&journal_path)?;
        for line in std::io::BufReader::new(file).lines() {
            let line = line?;
            if let Some((hash, body)) = line.split_once('\t') {
                if let Ok(rec) = serde_json::from_str::<SweepRecord>(body) {
                    done.insert(hash.to_string(), rec);
                }
                // a torn final line from an interrupted run is simply redone
            }
        }
    }

    let pending: Vec<(String, Task)> = tasks
        .iter()
        .map(|t| (task_hash(cfg, t), t.clone()))
        .filter(|(h, _)| !done.contains_key(h))
        .collect();
    log::info!(
        "sweep: {} tasks total, {} already journaled, {} to run",
        tasks.len(),
        done.len(),
        pending.len()
    );

    let journal = Mutex::new(std::io::BufWriter::new(
        std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&journal_path)?,
    ));
    let fresh: Vec<(String, SweepRecord)> = par_map(pending, |(hash, task)| {
        let rec = run_case(cfg, &task);
        let line = format!("{hash}\t{}\n", serde_json::to_string(&rec).unwrap());
        {
            let mut w = journal.lock().unwrap();
            w.write_all(line.as_bytes()).unwrap();
            w.flush().unwrap();
        }
        (hash, rec)
    });
    drop(journal);
    done.extend(fresh);

    let mut rows: Vec<SweepRecord> = tasks
        .iter()
        .map(|t| done.get(&task_hash(cfg, t)).expect("task computed").clone())
        .collect();
    rows.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap());

    write_csv(out, &rows)?;
    let meta = json!({ "config": cfg, "rows": rows.len() });
    std::fs::write(with_suffix(out, ".meta.json"), pretty(&meta)?)?;
    println!("{} rows -> {}", rows.len(), out.display());
    Ok(())
}

// ---- convergence ----------------------------------------------------------

pub fn run_convergence(cfg: &ConvergenceConfig, out: &Path) -> Result<()> {
    if cfg.nus.is_empty() {
        bail!("convergence study needs a nu ladder");
    }
    if cfg.seeds == 0 {
        bail!("convergence study needs at least one seed");
    }
    let opts = SolveOpts::default();
    let underpowered = cfg.seeds < 2;

    struct Row {
        nu: f64,
        gamma: f64,
        samples: u64,
        mean: f64,
        std: f64,
        cv: f64,
        c1: f64,
        c2: f64,
    }

    let rows: Vec<Row> = cfg
        .nus
        .iter()
        .map(|&nu| -> Result<Row> {
            let gamma = cfg.schedule.gamma(nu);
            let model = gc::solve_mu(gamma, nu, cfg.tol)?;
            let ratios: Vec<f64> = par_map((0..cfg.seeds).collect(), |seed| {
                let sample = sample_poisson(nu, seed).expect("nu > 0 on the ladder");
                let sol = solve_hard_wall(&sample, gamma, &opts).expect("hard-wall solve");
                sol.e0 / model.e_gc
            });
            let n = ratios.len() as f64;
            let mean = ratios.iter().sum::<f64>() / n;
            let std = if ratios.len() < 2 {
                0.0
            } else {
                (ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            let (c1, c2) = gc::deterministic_regime_margins(gamma, nu, Sigma::Infinite)?;
            Ok(Row {
                nu,
                gamma,
                samples: cfg.seeds,
                mean,
                std,
                cv: std / mean,
                c1,
                c2,
            })
        })
        .collect::<Result<_>>()?;

    {
        let mut w = csv::Writer::from_path(out)?;
        w.write_record([
            "nu",
            "gamma",
            "sigma",
            "samples",
            "mean_ratio",
            "std_ratio",
            "cv",
            "c1",
            "c2",
            "margins_large",
            "note",
        ])?;
        for r in &rows {
            w.write_record([
                format!("{:.12e}", r.nu),
                format!("{:.12e}", r.gamma),
                "inf".to_string(),
                r.samples.to_string(),
                format!("{:.12e}", r.mean),
                format!("{:.12e}", r.std),
                format!("{:.12e}", r.cv),
                format!("{:.12e}", r.c1),
                "inf".to_string(),
                (r.c1 >= MARGIN_LARGE && r.c2 >= MARGIN_LARGE).to_string(),
                if underpowered { "underpowered".to_string() } else { String::new() },
            ])?;
        }
        w.flush()?;
    }

    let cvs: Vec<f64> = rows.iter().map(|r| r.cv).collect();
    let decreasing = !underpowered && cvs.windows(2).all(|w| w[1] < w[0]);
    // The verdict reflects the measurement, not the schedule's name.
    let flag = if underpowered {
        "underpowered"
    } else if decreasing {
        "self-averaging"
    } else {
        "fluctuating regime"
    };
    let doc = json!({
        "config": cfg,
        "cv": cvs,
        "cv_strictly_decreasing": decreasing,
        "flag": flag,
    });
    std::fs::write(with_suffix(out, ".meta.json"), pretty(&doc)?)?;
    println!("cv ladder {cvs:?} -> {flag}");
    Ok(())
}

// ---- shared ---------------------------------------------------------------

/// `p` with `suffix` appended to the stem, replacing any existing extension:
/// out/run + ".json" -> out/run.json; out/run.csv + ".meta.json" -> out/run.meta.json.
pub fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let stem = p.with_extension("");
    PathBuf::from(format!("{}{suffix}", stem.display()))
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).context("serializing JSON")?;
    s.push('\n');
    Ok(s)
}
