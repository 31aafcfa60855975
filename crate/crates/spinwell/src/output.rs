//! CSV outputs. Column sets are fixed per schema version; floats are written
//! in shortest round-trip form so identical runs give identical bytes.

use std::path::Path;

use spinwell_core::diagnostics::InvariantReport;
use spinwell_core::ensemble::{EnsembleStats, PathSummary};
use spinwell_core::integrator::TrajectoryRow;

use crate::error::{Error, Result};

/// Version of the trajectory, ensemble, check and convergence CSV schemas.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_COLUMNS: [&str; 12] = [
    "t",
    "H_norm_M",
    "V_norm_M",
    "E_aniso",
    "E_exch",
    "E_zeeman",
    "E_elec",
    "E_total",
    "divB_resid",
    "sphere_max_dev",
    "norm_ident_resid",
    "energy_ident_resid",
];

pub const ENSEMBLE_COLUMNS: [&str; 5] = ["quantity", "moment", "mean", "se", "paths"];

pub const CHECK_COLUMNS: [&str; 4] = ["name", "residual", "tolerance", "passed"];

pub const CONVERGENCE_COLUMNS: [&str; 9] = [
    "study",
    "level",
    "dt",
    "modes",
    "value",
    "observed_order",
    "bracket_lo",
    "bracket_hi",
    "within",
];

/// Shortest round-trip text of `x`, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.into(),
        source,
    })
}

fn write_all(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn trajectory_record(r: &TrajectoryRow) -> Vec<String> {
    [
        r.t,
        r.h_norm_m,
        r.v_norm_m,
        r.energy.anisotropy,
        r.energy.exchange,
        r.energy.zeeman,
        r.energy.electric,
        r.energy.total,
        r.div_b_resid,
        r.sphere_max_dev,
        r.norm_ident_resid,
        r.energy_ident_resid,
    ]
    .into_iter()
    .map(fmt_f64)
    .collect()
}

pub fn write_trajectory(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    write_all(path, &TRAJECTORY_COLUMNS, rows.iter().map(trajectory_record))
}

pub fn write_ensemble(path: &Path, stats: &EnsembleStats) -> Result<()> {
    let paths = stats.paths.to_string();
    let mut rows = Vec::new();
    for (name, row) in PathSummary::NAMES.iter().zip(&stats.moments) {
        for (moment, m) in [("p2", row.p2), ("p4", row.p4)] {
            rows.push(vec![name.to_string(), moment.into(), fmt_f64(m.mean), fmt_f64(m.se), paths.clone()]);
        }
    }
    for (name, m) in [("final_energy", stats.final_energy), ("max_sphere_dev", stats.max_sphere_dev)] {
        rows.push(vec![name.into(), "mean".into(), fmt_f64(m.mean), fmt_f64(m.se), paths.clone()]);
    }
    write_all(path, &ENSEMBLE_COLUMNS, rows)
}

pub fn write_check(path: &Path, report: &InvariantReport) -> Result<()> {
    write_all(
        path,
        &CHECK_COLUMNS,
        report.entries.iter().map(|e| {
            vec![
                e.name.clone(),
                fmt_f64(e.residual),
                fmt_f64(e.tolerance),
                e.passed.to_string(),
            ]
        }),
    )
}

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub study: String,
    pub level: usize,
    pub dt: f64,
    pub modes: usize,
    pub value: f64,
    /// `log₂(value_{level−1} / value_level)`; NaN on the first level.
    pub observed_order: f64,
    pub bracket: (f64, f64),
    pub within: bool,
}

pub fn write_convergence(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    write_all(
        path,
        &CONVERGENCE_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.study.clone(),
                r.level.to_string(),
                fmt_f64(r.dt),
                r.modes.to_string(),
                fmt_f64(r.value),
                fmt_f64(r.observed_order),
                fmt_f64(r.bracket.0),
                fmt_f64(r.bracket.1),
                r.within.to_string(),
            ]
        }),
    )
}
