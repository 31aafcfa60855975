//! Brownian paths and the two time steppers: stochastic Heun on the
//! Stratonovich form and Euler–Maruyama on the Itô form.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::diagnostics;
use crate::dynamics::{Evaluation, Model, StateDerivative};
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::math;
use crate::spectral::CoeffsH;
use crate::state::GalerkinState;

/// Increments `ΔW_j` of `J` independent Wiener processes on a uniform grid.
///
/// Row `k` holds the increments over `[k·dt, (k+1)·dt]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    dt: f64,
    steps: usize,
    count: usize,
    increments: Vec<f64>,
}

impl BrownianPath {
    /// Draws a path from ChaCha8 seeded with `seed` on stream `stream`.
    /// Distinct streams give independent paths for the same seed.
    pub fn generate(seed: u64, stream: u64, dt: f64, steps: usize, count: usize) -> Result<Self> {
        check_dt(dt)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let sd = math::sqrt(dt);
        let increments = (0..steps * count)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            })
            .collect();
        Ok(BrownianPath {
            dt,
            steps,
            count,
            increments,
        })
    }

    pub fn zero(dt: f64, steps: usize, count: usize) -> Result<Self> {
        check_dt(dt)?;
        Ok(BrownianPath {
            dt,
            steps,
            count,
            increments: alloc::vec![0.0; steps * count],
        })
    }

    pub fn from_increments(dt: f64, count: usize, increments: Vec<f64>) -> Result<Self> {
        check_dt(dt)?;
        if count == 0 {
            if !increments.is_empty() {
                return Err(Error::InvalidParameter(
                    "increments given for an empty noise family".into(),
                ));
            }
            return BrownianPath::zero(dt, 0, 0);
        }
        if !increments.len().is_multiple_of(count) {
            return Err(Error::ShapeMismatch {
                expected: (increments.len() / count + 1) * count,
                found: increments.len(),
            });
        }
        Ok(BrownianPath {
            dt,
            steps: increments.len() / count,
            count,
            increments,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of Wiener processes `J`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn increment(&self, step: usize) -> &[f64] {
        &self.increments[step * self.count..(step + 1) * self.count]
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// The same path sampled with step `factor·dt` (increments summed).
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps.is_multiple_of(factor) {
            return Err(Error::InvalidParameter(format!(
                "cannot coarsen {} steps by {factor}",
                self.steps
            )));
        }
        let steps = self.steps / factor;
        let mut increments = alloc::vec![0.0; steps * self.count];
        for k in 0..steps {
            for sub in 0..factor {
                let src = self.increment(k * factor + sub);
                for (d, s) in increments[k * self.count..(k + 1) * self.count]
                    .iter_mut()
                    .zip(src)
                {
                    *d += s;
                }
            }
        }
        Ok(BrownianPath {
            dt: self.dt * factor as f64,
            steps,
            count: self.count,
            increments,
        })
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Predictor–corrector on the Stratonovich form.
    #[default]
    Heun,
    /// Euler–Maruyama on the Itô form (drift includes the correction).
    EulerMaruyama,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub scheme: Scheme,
    pub dt: f64,
    pub steps: usize,
    /// Emit a trajectory row every `record_every` steps (and at the end).
    pub record_every: usize,
    /// Renormalize `|M| = 1` at the nodes after every step (comparison only).
    pub renormalize: bool,
    /// Evaluate the norm identity at recorded rows (costs `2J` transforms).
    pub row_identities: bool,
    pub blowup_guard: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            scheme: Scheme::Heun,
            dt: 0.01,
            steps: 100,
            record_every: 1,
            renormalize: false,
            row_identities: true,
            blowup_guard: 1e12,
        }
    }
}

/// One recorded time of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub h_norm_m: f64,
    pub v_norm_m: f64,
    pub energy: EnergyBreakdown,
    /// `max_κ |κ·b̂_κ(t) − κ·b̂_κ(0)|`
    pub div_b_resid: f64,
    /// `max_x ||M(x)| − 1|` over the nodes.
    pub sphere_max_dev: f64,
    /// Relative residual of `2⟨M,F_n⟩ + Σ‖G_jn‖² = 0` (NaN when not evaluated).
    pub norm_ident_resid: f64,
    /// Accumulated residual of the discrete energy balance up to `t`.
    pub energy_ident_resid: f64,
}

/// Path functionals accumulated over every step (not only recorded rows).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathStats {
    pub sup_v_norm_sq: f64,
    /// `sup_t ‖B_n − π^Y M̄_n‖²`
    pub sup_zeeman_sq: f64,
    pub sup_e_sq: f64,
    /// `∫₀ᵀ ‖M_n × ρ_n‖² dt` (trapezoid rule).
    pub int_m_cross_rho_sq: f64,
    pub max_sphere_dev: f64,
    pub max_div_b_resid: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    /// `M_n` at the recorded rows.
    pub m_history: Vec<CoeffsH>,
    /// Total energy after every step, starting with the initial state.
    pub step_energies: Vec<f64>,
    /// Signed per-step residual of the energy balance
    /// `ΔE − ½(r_k + r_{k+1})dt − Σ_j ½(p_{j,k} + p_{j,k+1})ΔW_j`.
    pub step_energy_residuals: Vec<f64>,
    pub stats: PathStats,
    pub final_state: GalerkinState,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// `Σ_k |residual_k|`.
    pub fn energy_residual_l1(&self) -> f64 {
        self.step_energy_residuals.iter().map(|r| r.abs()).sum()
    }
}

/// One Heun step (evaluates both stages from scratch).
pub fn step_heun(model: &Model, s: &GalerkinState, dt: f64, dw: &[f64]) -> Result<GalerkinState> {
    check_increment(model, dw)?;
    let ev = model.evaluate_with(s, false, Some(dw))?;
    heun_from(model, s, &ev, dt, dw)
}

/// One Euler–Maruyama step on the Itô form.
pub fn step_em_ito(model: &Model, s: &GalerkinState, dt: f64, dw: &[f64]) -> Result<GalerkinState> {
    check_increment(model, dw)?;
    let ev = model.evaluate_with(s, false, Some(dw))?;
    Ok(em_from(model, s, &ev, dt, dw))
}

fn check_increment(model: &Model, dw: &[f64]) -> Result<()> {
    if dw.len() != model.noise.len() {
        return Err(Error::ShapeMismatch {
            expected: model.noise.len(),
            found: dw.len(),
        });
    }
    Ok(())
}

/// The increment cached in `ev` (computed for the same `dw`), or a fresh one.
fn increment_of(model: &Model, ev: &Evaluation, dw: &[f64]) -> CoeffsH {
    match &ev.noise_increment {
        Some(g) => g.clone(),
        None if model.noise.is_empty() => model.bases.mag.zeros(),
        None => model.diffusion_increment(&ev.field.m_values, dw),
    }
}

fn heun_from(
    model: &Model,
    s: &GalerkinState,
    ev: &Evaluation,
    dt: f64,
    dw: &[f64],
) -> Result<GalerkinState> {
    check_increment(model, dw)?;
    let g0 = increment_of(model, ev, dw);
    let mut pred = s.plus_scaled(dt, &ev.drift);
    pred.m = pred.m.plus_scaled(1.0, &g0);
    pred.t = s.t + dt;
    let ev_p = model.evaluate_with(&pred, false, Some(dw))?;
    let g1 = increment_of(model, &ev_p, dw);
    let avg = ev.drift.plus_scaled(1.0, &ev_p.drift);
    let mut next = s.plus_scaled(0.5 * dt, &avg);
    next.m = next.m.plus_scaled(0.5, &g0).plus_scaled(0.5, &g1);
    next.t = s.t + dt;
    Ok(next)
}

fn em_from(model: &Model, s: &GalerkinState, ev: &Evaluation, dt: f64, dw: &[f64]) -> GalerkinState {
    let corr = model
        .diffusion()
        .correction_from_values(model.params.correction, &ev.field.m_values);
    let g0 = increment_of(model, ev, dw);
    let drift = StateDerivative {
        dm: ev.drift.dm.plus_scaled(1.0, &corr),
        db: ev.drift.db.clone(),
        de: ev.drift.de.clone(),
    };
    let mut next = s.plus_scaled(dt, &drift);
    next.m = next.m.plus_scaled(1.0, &g0);
    next.t = s.t + dt;
    next
}

fn renormalize(model: &Model, s: &mut GalerkinState) {
    let mag = &model.bases.mag;
    let values: Vec<_> = mag
        .synth_values(s.m.as_slice())
        .into_iter()
        .map(|v| {
            let n = math::norm(v);
            if n > 0.0 {
                math::scale(1.0 / n, v)
            } else {
                v
            }
        })
        .collect();
    s.m = CoeffsH::from_vec(mag.project_values(&values));
}

fn divergence_residual(model: &Model, div0: &[f64], s: &GalerkinState) -> Result<f64> {
    let div = model.bases.em.divergence(&s.b)?;
    Ok(div
        .iter()
        .zip(div0)
        .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs())))
}

fn sphere_dev(ev: &Evaluation) -> f64 {
    ev.field
        .m_values
        .iter()
        .fold(0.0, |m: f64, v| m.max((math::norm(*v) - 1.0).abs()))
}

/// Integrates `steps` steps from `initial` along `path`.
///
/// The result depends only on its inputs; identical inputs give bit-identical
/// trajectories.
pub fn simulate(
    model: &Model,
    initial: &GalerkinState,
    path: &BrownianPath,
    opts: &SimOptions,
) -> Result<Trajectory> {
    simulate_observed(model, initial, path, opts, |_, _| Ok(()))
}

/// [`simulate`], calling `observe(k, state)` with the initial state (`k = 0`)
/// and after every step `k`. An error from `observe` aborts the run.
pub fn simulate_observed<F>(
    model: &Model,
    initial: &GalerkinState,
    path: &BrownianPath,
    opts: &SimOptions,
    mut observe: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, &GalerkinState) -> Result<()>,
{
    initial.check_shape(&model.bases)?;
    check_dt(opts.dt)?;
    if path.count() != model.noise.len() {
        return Err(Error::ShapeMismatch {
            expected: model.noise.len(),
            found: path.count(),
        });
    }
    if !model.noise.is_empty() && (path.steps() < opts.steps || path.dt() != opts.dt) {
        return Err(Error::InvalidParameter(format!(
            "Brownian path has {} steps of {}, run needs {} steps of {}",
            path.steps(),
            path.dt(),
            opts.steps,
            opts.dt
        )));
    }
    if opts.record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be at least 1".into()));
    }
    let dt = opts.dt;
    let zero_dw = alloc::vec![0.0; model.noise.len()];
    let div0 = model.bases.em.divergence(&initial.b)?;
    let mut s = initial.clone();
    let dw_at = |k: usize| -> Option<&[f64]> {
        (!model.noise.is_empty() && k < opts.steps).then(|| path.increment(k))
    };
    let mut ev = model.evaluate_with(&s, true, dw_at(0))?;
    let mut stats = PathStats::default();
    let mut accumulated = 0.0;
    let mut traj = Trajectory {
        rows: Vec::new(),
        m_history: Vec::new(),
        step_energies: alloc::vec![ev.energy.total],
        step_energy_residuals: Vec::with_capacity(opts.steps),
        stats,
        final_state: s.clone(),
    };

    let record = |traj: &mut Trajectory, s: &GalerkinState, ev: &Evaluation, acc: f64| -> Result<()> {
        let mag = &model.bases.mag;
        let norm_ident = if opts.row_identities {
            diagnostics::norm_identity_residuals(model, s)?.0
        } else {
            f64::NAN
        };
        traj.rows.push(TrajectoryRow {
            t: s.t,
            h_norm_m: s.m.norm(),
            v_norm_m: math::sqrt(mag.v_norm_sq(&s.m)),
            energy: ev.energy,
            div_b_resid: divergence_residual(model, &div0, s)?,
            sphere_max_dev: sphere_dev(ev),
            norm_ident_resid: norm_ident,
            energy_ident_resid: acc.abs(),
        });
        traj.m_history.push(s.m.clone());
        Ok(())
    };

    let update_sups = |stats: &mut PathStats, s: &GalerkinState, ev: &Evaluation| -> Result<()> {
        stats.sup_v_norm_sq = stats.sup_v_norm_sq.max(model.bases.mag.v_norm_sq(&s.m));
        stats.sup_zeeman_sq = stats.sup_zeeman_sq.max(ev.field.zeeman_residual.norm_sq());
        stats.sup_e_sq = stats.sup_e_sq.max(s.e.norm_sq());
        stats.max_sphere_dev = stats.max_sphere_dev.max(sphere_dev(ev));
        stats.max_div_b_resid = stats.max_div_b_resid.max(divergence_residual(model, &div0, s)?);
        Ok(())
    };

    update_sups(&mut stats, &s, &ev)?;
    record(&mut traj, &s, &ev, 0.0)?;
    observe(0, &s)?;

    for k in 0..opts.steps {
        let dw = if model.noise.is_empty() {
            &zero_dw[..]
        } else {
            path.increment(k)
        };
        let mut next = match opts.scheme {
            Scheme::Heun => heun_from(model, &s, &ev, dt, dw)?,
            Scheme::EulerMaruyama => {
                check_increment(model, dw)?;
                em_from(model, &s, &ev, dt, dw)
            }
        };
        // avoid drift of t from repeated addition
        next.t = initial.t + (k + 1) as f64 * dt;
        if opts.renormalize {
            renormalize(model, &mut next);
        }
        if !next.is_finite() {
            return Err(Error::NonFinite { step: k + 1 });
        }
        let norm = next.coefficient_norm();
        if norm > opts.blowup_guard {
            return Err(Error::BlowUp { step: k + 1, norm });
        }
        let ev_next = model.evaluate_with(&next, true, dw_at(k + 1))?;

        let noise_term: f64 = ev
            .noise_pairings
            .iter()
            .zip(&ev_next.noise_pairings)
            .zip(dw)
            .map(|((a, b), w)| 0.5 * (a + b) * w)
            .sum();
        let residual = ev_next.energy.total
            - ev.energy.total
            - 0.5 * dt * (ev.energy_rate + ev_next.energy_rate)
            - noise_term;
        accumulated += residual;
        traj.step_energy_residuals.push(residual);
        traj.step_energies.push(ev_next.energy.total);
        stats.int_m_cross_rho_sq += 0.5 * dt * (ev.m_cross_rho_sq + ev_next.m_cross_rho_sq);
        update_sups(&mut stats, &next, &ev_next)?;

        observe(k + 1, &next)?;
        s = next;
        ev = ev_next;
        if (k + 1) % opts.record_every == 0 || k + 1 == opts.steps {
            record(&mut traj, &s, &ev, accumulated)?;
        }
    }
    traj.stats = stats;
    traj.final_state = s;
    Ok(traj)
}
