//! Monte-Carlo ensembles: per-path summaries and their aggregation.

use alloc::vec::Vec;

use crate::dynamics::Model;
use crate::error::{Error, Result};
use crate::integrator::{simulate, BrownianPath, PathStats, SimOptions};
use crate::math;
use crate::state::GalerkinState;

/// Seed of one path: ChaCha8 key and stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSeed {
    pub seed: u64,
    pub stream: u64,
}

impl PathSeed {
    /// Seeds `(master, 0), (master, 1), …` for `count` paths.
    pub fn derive(master: u64, count: usize) -> Vec<PathSeed> {
        (0..count as u64)
            .map(|stream| PathSeed {
                seed: master,
                stream,
            })
            .collect()
    }
}

/// The path functionals whose moments are bounded independently of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathSummary {
    pub sup_v_norm_sq: f64,
    pub sup_zeeman_sq: f64,
    pub sup_e_sq: f64,
    pub int_m_cross_rho_sq: f64,
    pub final_energy: f64,
    pub max_sphere_dev: f64,
}

impl PathSummary {
    pub const NAMES: [&'static str; 4] = [
        "sup_M_V_sq",
        "sup_B_minus_PM_sq",
        "sup_E_sq",
        "int_M_cross_rho_sq",
    ];

    pub fn from_stats(stats: &PathStats, final_energy: f64) -> Self {
        PathSummary {
            sup_v_norm_sq: stats.sup_v_norm_sq,
            sup_zeeman_sq: stats.sup_zeeman_sq,
            sup_e_sq: stats.sup_e_sq,
            int_m_cross_rho_sq: stats.int_m_cross_rho_sq,
            final_energy,
            max_sphere_dev: stats.max_sphere_dev,
        }
    }

    /// The four bounded functionals, each a squared norm.
    pub fn functionals(&self) -> [f64; 4] {
        [
            self.sup_v_norm_sq,
            self.sup_zeeman_sq,
            self.sup_e_sq,
            self.int_m_cross_rho_sq,
        ]
    }
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    /// Summation in index order, so the result is reproducible bit for bit.
    /// Deviations are taken from the first sample, so identical samples give
    /// exactly zero spread.
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanSe {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let x0 = xs[0];
        let mean = x0 + xs.iter().map(|x| x - x0).sum::<f64>() / n as f64;
        if n < 2 {
            return MeanSe { mean, se: f64::NAN };
        }
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        MeanSe {
            mean,
            se: math::sqrt(var / n as f64),
        }
    }

    /// `|a − b| ≤ k·√(SE_a² + SE_b²)`.
    pub fn agrees_with(&self, other: &MeanSe, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * math::sqrt(self.se * self.se + other.se * other.se)
    }
}

/// Moments `E[X^{p/2}]` for `p ∈ {2, 4}` of one squared-norm functional `X`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentRow {
    pub p2: MeanSe,
    pub p4: MeanSe,
}

impl MomentRow {
    pub fn of(xs: &[f64]) -> Self {
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        MomentRow {
            p2: MeanSe::of(xs),
            p4: MeanSe::of(&sq),
        }
    }

    /// Power-mean ordering `(E X)^{1/2} ≤ (E X²)^{1/4}`.
    pub fn jensen_ordered(&self) -> bool {
        math::sqrt(self.p2.mean) <= math::powf(self.p4.mean, 0.25) * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub paths: usize,
    /// One row per entry of [`PathSummary::NAMES`].
    pub moments: [MomentRow; 4],
    pub final_energy: MeanSe,
    pub max_sphere_dev: MeanSe,
}

impl EnsembleStats {
    pub fn aggregate(summaries: &[PathSummary]) -> Self {
        let column = |i: usize| -> Vec<f64> { summaries.iter().map(|s| s.functionals()[i]).collect() };
        let energies: Vec<f64> = summaries.iter().map(|s| s.final_energy).collect();
        let sphere: Vec<f64> = summaries.iter().map(|s| s.max_sphere_dev).collect();
        EnsembleStats {
            paths: summaries.len(),
            moments: [0, 1, 2, 3].map(|i| MomentRow::of(&column(i))),
            final_energy: MeanSe::of(&energies),
            max_sphere_dev: MeanSe::of(&sphere),
        }
    }
}

/// Result of a batch of paths: successes in input order and the failures.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutcome {
    pub summaries: Vec<PathSummary>,
    pub failures: Vec<(usize, Error)>,
}

impl EnsembleOutcome {
    pub fn stats(&self) -> EnsembleStats {
        EnsembleStats::aggregate(&self.summaries)
    }
}

/// Runs one path of an ensemble.
pub fn run_path(
    model: &Model,
    initial: &GalerkinState,
    opts: &SimOptions,
    seed: PathSeed,
) -> Result<PathSummary> {
    let path = BrownianPath::generate(seed.seed, seed.stream, opts.dt, opts.steps, model.noise.len())?;
    let mut o = *opts;
    o.row_identities = false;
    o.record_every = opts.steps.max(1);
    let traj = simulate(model, initial, &path, &o)?;
    let final_energy = *traj.step_energies.last().expect("at least the initial energy");
    Ok(PathSummary::from_stats(&traj.stats, final_energy))
}

/// Runs the paths sequentially; failures are collected, not dropped.
pub fn run_ensemble(
    model: &Model,
    initial: &GalerkinState,
    opts: &SimOptions,
    seeds: &[PathSeed],
) -> Result<EnsembleOutcome> {
    if seeds.len() < 2 {
        return Err(Error::InvalidParameter(
            "an ensemble needs at least two paths".into(),
        ));
    }
    let mut summaries = Vec::with_capacity(seeds.len());
    let mut failures = Vec::new();
    for (i, seed) in seeds.iter().enumerate() {
        match run_path(model, initial, opts, *seed) {
            Ok(s) => summaries.push(s),
            Err(e) => failures.push((i, e)),
        }
    }
    Ok(EnsembleOutcome {
        summaries,
        failures,
    })
}
