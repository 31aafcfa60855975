//! The `run`, `ensemble`, `check` and `convergence` commands.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinwell_core::diagnostics::{self, holder_estimate, state_report, HolderEstimate, InvariantReport};
use spinwell_core::ensemble::{EnsembleStats, PathSeed};
use spinwell_core::integrator::{simulate, simulate_observed};
use spinwell_core::{BrownianPath, GalerkinState, Model, NoiseFamily, Scheme, SimOptions, Trajectory};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::output::{self, ConvergenceRow};
use crate::parallel;
use crate::snapshot;

/// Outcome of a command that completed without error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    ToleranceFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Passed => 0,
            Status::ToleranceFailed => 1,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Passed
        } else {
            Status::ToleranceFailed
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// The Brownian path of stream `stream`, or an all-zero path without noise.
pub fn brownian_path(model: &Model, seed: u64, stream: u64, dt: f64, steps: usize) -> Result<BrownianPath> {
    let j = model.noise.len();
    Ok(if j == 0 {
        BrownianPath::zero(dt, steps, 0)?
    } else {
        BrownianPath::generate(seed, stream, dt, steps, j)?
    })
}

pub fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join("snapshots").join(format!("state_{step:06}.bin"))
}

/// Writes `trajectory.csv` and `snapshots/state_NNNNNN.bin` under the output
/// directory.
pub fn run(cfg: &SimConfig) -> Result<Trajectory> {
    let model = cfg.model()?;
    let initial = cfg.initial_state(&model.bases)?;
    let opts = cfg.sim_options();
    let path = brownian_path(&model, cfg.seed, 0, cfg.dt, opts.steps)?;
    create_dir(&cfg.output_dir.join("snapshots"))?;
    let mut write_error = None;
    let result = simulate_observed(&model, &initial, &path, &opts, |k, s| {
        let due = k == 0 || k == opts.steps || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0);
        if due {
            if let Err(e) = snapshot::write_snapshot(&snapshot_path(&cfg.output_dir, k), &model.bases, s) {
                write_error = Some(e);
                return Err(spinwell_core::Error::InvalidParameter("snapshot write failed".into()));
            }
        }
        Ok(())
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    let traj = result?;
    output::write_trajectory(&cfg.output_dir.join("trajectory.csv"), &traj.rows)?;
    Ok(traj)
}

/// Runs `ensemble_size` paths and writes `ensemble.csv`. Failed paths are
/// reported on stderr and turn the result into an error after the statistics
/// of the remaining paths are written.
pub fn ensemble(cfg: &SimConfig) -> Result<EnsembleStats> {
    let model = cfg.model()?;
    let initial = cfg.initial_state(&model.bases)?;
    let opts = cfg.sim_options();
    let seeds = PathSeed::derive(cfg.seed, cfg.ensemble_size);
    let outcome = parallel::run_ensemble(&model, &initial, &opts, &seeds)?;
    create_dir(&cfg.output_dir)?;
    let stats = outcome.stats();
    output::write_ensemble(&cfg.output_dir.join("ensemble.csv"), &stats)?;
    for (i, e) in &outcome.failures {
        eprintln!("path {i} (seed {}, stream {}): {e}", seeds[*i].seed, seeds[*i].stream);
    }
    if !outcome.failures.is_empty() {
        return Err(Error::PathsFailed {
            failed: outcome.failures.len(),
            total: seeds.len(),
        });
    }
    Ok(stats)
}

fn without_noise(model: &Model) -> Model {
    let mut m = model.clone();
    m.noise = NoiseFamily::empty(&m.bases.mag);
    m
}

fn norm_drift(traj: &Trajectory, initial: &GalerkinState) -> f64 {
    let n0 = initial.m.norm();
    (traj.final_state.m.norm() - n0).abs() / n0.max(f64::MIN_POSITIVE)
}

/// Identity residuals on the initial state and on random states, and the
/// time-stepping invariants of a noise-free and of the configured run.
pub fn check_report(cfg: &SimConfig) -> Result<InvariantReport> {
    let model = cfg.model()?;
    let initial = cfg.initial_state(&model.bases)?;
    let mut report = InvariantReport::default();
    state_report(&model, &initial, &mut report)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.check_states {
        state_report(&model, &diagnostics::random_state(&model.bases, &mut rng), &mut report)?;
    }
    report.push(
        "initial_divergence",
        model.bases.em.divergence(&initial.b)?.iter().fold(0.0, |m: f64, d| m.max(d.abs())),
        1e-12,
    );

    let opts = cfg.sim_options();
    let quiet = without_noise(&model);
    let traj = simulate(&quiet, &initial, &brownian_path(&quiet, 0, 0, cfg.dt, opts.steps)?, &opts)?;
    let scale = traj.step_energies[0].abs().max(1.0);
    report.push("div_b_noise_free", traj.stats.max_div_b_resid, 1e-12);
    if model.forcing.is_zero() {
        let rise = traj
            .step_energies
            .windows(2)
            .fold(0.0f64, |m, w| m.max(w[1] - w[0]));
        report.push("energy_increase_noise_free", rise / scale, 1e-12);
    }
    let step_resid = traj
        .step_energy_residuals
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    report.push("energy_step_residual_noise_free", step_resid / scale, cfg.dt * cfg.dt);
    report.push_info("norm_drift_noise_free", norm_drift(&traj, &initial));

    let traj = simulate(&model, &initial, &brownian_path(&model, cfg.seed, 0, cfg.dt, opts.steps)?, &opts)?;
    report.push("div_b", traj.stats.max_div_b_resid, 1e-12);
    report.push_info("norm_drift", norm_drift(&traj, &initial));
    report.push_info("sphere_max_dev", traj.stats.max_sphere_dev);
    let theta = match holder_estimate(&traj.times(), &traj.m_history) {
        HolderEstimate::Smooth => f64::INFINITY,
        HolderEstimate::Exponent(t) => t,
    };
    report.push_info("holder_exponent", theta);
    Ok(report)
}

/// Writes `check.csv`; fails when any residual exceeds its tolerance.
pub fn check(cfg: &SimConfig) -> Result<Status> {
    let report = check_report(cfg)?;
    create_dir(&cfg.output_dir)?;
    output::write_check(&cfg.output_dir.join("check.csv"), &report)?;
    Ok(Status::from_pass(report.all_passed()))
}

/// `−slope` of the least-squares fit of `log₂ v` against the level.
pub fn fitted_order(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = ys.iter().enumerate().map(|(k, y)| (k as f64 - mx) * (y - my)).sum();
    let sxx: f64 = (0..values.len()).map(|k| (k as f64 - mx).powi(2)).sum();
    -sxy / sxx
}

fn study_rows(study: &str, dts: &[f64], modes: &[usize], values: &[f64], bracket: (f64, f64)) -> Vec<ConvergenceRow> {
    let inside = |o: f64| o >= bracket.0 && o <= bracket.1;
    let mut rows: Vec<ConvergenceRow> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let order = if k == 0 { f64::NAN } else { (values[k - 1] / v).log2() };
            ConvergenceRow {
                study: study.into(),
                level: k,
                dt: dts[k],
                modes: modes[k],
                value: v,
                observed_order: order,
                bracket,
                within: k == 0 || inside(order),
            }
        })
        .collect();
    let fit = fitted_order(values);
    let last = values.len() - 1;
    rows.push(ConvergenceRow {
        study: format!("{study}_fit"),
        level: values.len(),
        dt: dts[last],
        modes: modes[last],
        value: fit,
        observed_order: fit,
        bracket,
        within: inside(fit),
    });
    rows
}

/// The configuration at another resolution.
fn resolution(cfg: &SimConfig, modes: [usize; 3], em: [usize; 3], dt: f64) -> SimConfig {
    SimConfig {
        modes,
        em_wavenumber: em,
        quad_nodes: None,
        dt,
        ..cfg.clone()
    }
}

/// Refinement studies over `convergence_levels` dt halvings:
///
/// - `twin`: strong Heun / Euler–Maruyama difference at `T` on shared paths,
///   bracket `[0.8, ∞)`.
/// - `energy`: noise-free accumulated energy-identity residual, bracket
///   `[1.7, 2.5]`.
/// - `norm`: noise-free `‖M‖_H` drift over `[0, T]`, bracket `[1.8, ∞)`.
/// - `sphere`: max node deviation of `|M|` from 1 at `T` along the ladder
///   `(modes − 2(L−1−k), dt/2ᵏ)` on shared paths; it must decrease at
///   every rung.
pub fn convergence_table(cfg: &SimConfig) -> Result<Vec<ConvergenceRow>> {
    let levels = cfg.convergence_levels.max(2);
    let paths = cfg.convergence_paths.max(1);
    let fine_factor = 1usize << (levels - 1);
    let fine_dt = cfg.dt / fine_factor as f64;
    let fine_steps = cfg.steps() * fine_factor;
    let dts: Vec<f64> = (0..levels).map(|k| cfg.dt / (1usize << k) as f64).collect();
    let coarsening = |k: usize| 1usize << (levels - 1 - k);
    let mut rows = Vec::new();

    let model = cfg.model()?;
    let initial = cfg.initial_state(&model.bases)?;
    let modes = vec![cfg.modes[0]; levels];
    let opts_at = |k: usize, scheme: Scheme| SimOptions {
        scheme,
        dt: dts[k],
        steps: fine_steps / coarsening(k),
        record_every: fine_steps / coarsening(k),
        row_identities: false,
        ..SimOptions::default()
    };

    let mut twin = vec![0.0; levels];
    for p in 0..paths as u64 {
        let fine = brownian_path(&model, cfg.seed, p, fine_dt, fine_steps)?;
        for (k, acc) in twin.iter_mut().enumerate() {
            let path = fine.coarsen(coarsening(k))?;
            let h = simulate(&model, &initial, &path, &opts_at(k, Scheme::Heun))?.final_state;
            let e = simulate(&model, &initial, &path, &opts_at(k, Scheme::EulerMaruyama))?.final_state;
            *acc += h.distance_sq(&e).sqrt() / paths as f64;
        }
    }
    rows.extend(study_rows("twin", &dts, &modes, &twin, (0.8, f64::INFINITY)));

    let quiet = without_noise(&model);
    let mut energy = Vec::new();
    let mut norm = Vec::new();
    for k in 0..levels {
        let o = opts_at(k, cfg.scheme);
        let traj = simulate(&quiet, &initial, &BrownianPath::zero(o.dt, o.steps, 0)?, &o)?;
        energy.push(traj.energy_residual_l1());
        norm.push(norm_drift(&traj, &initial));
    }
    rows.extend(study_rows("energy", &dts, &modes, &energy, (1.7, 2.5)));
    rows.extend(study_rows("norm", &dts, &modes, &norm, (1.8, f64::INFINITY)));

    let mut sphere = Vec::new();
    let mut ladder_modes = Vec::new();
    for p in 0..paths as u64 {
        for k in 0..levels {
            let drop = 2 * (levels - 1 - k);
            let n = cfg.modes.map(|m| m.saturating_sub(drop).max(2));
            let kk = cfg.em_wavenumber.map(|m| m.saturating_sub(drop).max(2));
            let rung = resolution(cfg, n, kk, dts[k]);
            let model = rung.model()?;
            let initial = rung.initial_state(&model.bases)?;
            let fine = brownian_path(&model, cfg.seed, p, fine_dt, fine_steps)?;
            let traj = simulate(&model, &initial, &fine.coarsen(coarsening(k))?, &opts_at(k, cfg.scheme))?;
            let (dev, _) = diagnostics::sphere_deviation(&model.bases.mag, &traj.final_state.m)?;
            if p == 0 {
                sphere.push(0.0);
                ladder_modes.push(n[0]);
            }
            sphere[k] += dev / paths as f64;
        }
    }
    // the ladder must decrease at every rung, not just on average
    let mut sphere_rows = study_rows("sphere", &dts, &ladder_modes, &sphere, (0.0, f64::INFINITY));
    for r in sphere_rows.iter_mut().skip(1) {
        r.within = r.observed_order > 0.0;
    }
    let monotone = sphere.windows(2).all(|w| w[1] < w[0]);
    if let Some(fit) = sphere_rows.last_mut() {
        fit.within = monotone && fit.value > 0.0;
    }
    rows.extend(sphere_rows);
    Ok(rows)
}

/// Writes `convergence.csv`; fails when a fitted order leaves its bracket.
pub fn convergence(cfg: &SimConfig) -> Result<Status> {
    let rows = convergence_table(cfg)?;
    create_dir(&cfg.output_dir)?;
    output::write_convergence(&cfg.output_dir.join("convergence.csv"), &rows)?;
    let pass = rows.iter().filter(|r| r.study.ends_with("_fit")).all(|r| r.within);
    Ok(Status::from_pass(pass))
}
