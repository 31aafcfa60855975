//! Ensemble paths on a rayon pool sized by `SPINWELL_THREADS`.

use rayon::prelude::*;
use spinwell_core::ensemble::{run_path, EnsembleOutcome, PathSeed};
use spinwell_core::{GalerkinState, Model, SimOptions};

use crate::error::{ConfigError, Result};

pub const THREADS_VAR: &str = "SPINWELL_THREADS";

/// Worker count: `SPINWELL_THREADS` if set, else rayon's default.
pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ConfigError::Invalid(format!("{THREADS_VAR} must be a positive integer, got `{v}`")).into()),
        },
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

/// Runs every path; summaries come back in seed order, so the aggregate does
/// not depend on scheduling.
pub fn run_ensemble(
    model: &Model,
    initial: &GalerkinState,
    opts: &SimOptions,
    seeds: &[PathSeed],
) -> Result<EnsembleOutcome> {
    if seeds.len() < 2 {
        return Err(ConfigError::Invalid("an ensemble needs at least two paths".into()).into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("cannot start worker threads: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        seeds
            .par_iter()
            .map(|s| run_path(model, initial, opts, *s))
            .collect()
    });
    let mut outcome = EnsembleOutcome {
        summaries: Vec::with_capacity(seeds.len()),
        failures: Vec::new(),
    };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => outcome.summaries.push(s),
            Err(e) => outcome.failures.push((i, e)),
        }
    }
    Ok(outcome)
}
