use std::path::Path;

use projlab_core::covering::covering_number;
use projlab_core::incidence::{kaufman_witness, kaufman_witness_exhaustive, projection_sweep, SweepRow};
use projlab_core::projection::project;
use projlab_core::{DirectionSet, PointSet2D, Scale};

use super::directions;
use crate::config::ExperimentConfig;
use crate::csvio::{self, fmt};
use crate::error::{LabError, LabResult};
use crate::report::Report;

fn load(cfg: &mut ExperimentConfig) -> LabResult<(PointSet2D, DirectionSet, Scale)> {
    let (set, meta) = csvio::read_points(&cfg.require_path("input")?)?;
    cfg.absorb_meta(&meta);
    let dirs = directions(cfg)?;
    Ok((set, dirs, cfg.delta()?))
}

/// Cauchy-Schwarz: `close_pairs >= |P|^2 / N - |P|` per direction.
pub(super) fn cauchy_schwarz_rows(report: &mut Report, n: usize, rows: &[SweepRow]) {
    let n = n as f64;
    let bad = rows.iter().position(|r| {
        let bound = n * n / r.covering as f64 - n;
        (r.close_pairs as f64) < bound * (1.0 - 1e-12)
    });
    let detail = match bad {
        None => format!("{} directions", rows.len()),
        Some(i) => format!("direction {i} (theta {}) has {} close pairs", rows[i].theta, rows[i].close_pairs),
    };
    report.check("cauchy-schwarz", bad.is_none(), detail);
}

pub fn project_sweep(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let (set, dirs, delta) = load(cfg)?;
    let rows = projection_sweep(&set, &dirs, delta);
    csvio::write_csv(
        &out.join("sweep.csv"),
        &[],
        &["theta", "N_projection", "close_pairs"],
        rows.iter()
            .map(|r| vec![fmt(r.theta), r.covering.to_string(), r.close_pairs.to_string()]),
    )?;
    let mut report = Report::new(cfg);
    report.line("points", set.len());
    report.line("directions", dirs.len());
    if let Some((i, r)) = rows.iter().enumerate().max_by(|a, b| a.1.covering.cmp(&b.1.covering).then(b.0.cmp(&a.0))) {
        report.line("max_N", r.covering);
        report.line("max_N_index", i);
        report.line("max_N_theta", fmt(r.theta));
    }
    let total: u64 = rows.iter().map(|r| r.close_pairs).sum();
    let l = delta.log_inv();
    report.line("close_pairs_total", total);
    report.line("direction_sum_constant", fmt(total as f64 * delta.value() * delta.value() / (l * l)));
    cauchy_schwarz_rows(&mut report, set.len(), &rows);
    report.write(&out.join("summary.txt"))?;
    report.verdict()?;
    Ok(report.text())
}

pub fn kaufman(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let (set, dirs, delta) = load(cfg)?;
    if dirs.is_empty() {
        return Err(LabError::parameter("directions", "the direction set is empty"));
    }
    let s = cfg.s()?;
    let fast = kaufman_witness(&set, &dirs, delta, s)?;
    let full = kaufman_witness_exhaustive(&set, &dirs, delta, s)?;
    csvio::write_csv(
        &out.join("profile.csv"),
        &[],
        &["theta", "N"],
        dirs.iter()
            .map(|e| vec![fmt(e.theta()), covering_number(&project(&set, e), delta).to_string()]),
    )?;
    let mut report = Report::new(cfg);
    report.line("points", set.len());
    report.line("directions", dirs.len());
    report.line("witness_index", fast.index);
    report.line("witness_theta", fmt(fast.direction.theta()));
    report.line("witness_N", fast.covering);
    report.check(
        "early-exit agrees with exhaustive sweep",
        fast.covering == full.covering,
        format!("{} vs {} (exhaustive index {})", fast.covering, full.covering, full.index),
    );
    report.write(&out.join("summary.txt"))?;
    report.verdict()?;
    Ok(report.text())
}
