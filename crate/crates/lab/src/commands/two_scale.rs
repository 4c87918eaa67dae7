use std::fs;
use std::path::Path;

use projlab_core::blowup::{frostman_weights, two_scale_decomposition};
use projlab_core::Error;

use super::dyadic_even;
use crate::config::ExperimentConfig;
use crate::csvio::{self, fmt};
use crate::error::{LabError, LabResult};
use crate::report::Report;

/// Frostman weights (or the `w` column when present), then the two-scale
/// decomposition, written as a directory.
pub fn run(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let path = cfg.require_path("input")?;
    let table = csvio::read_table(&path)?;
    cfg.absorb_meta(&table.meta);
    let delta = cfg.delta()?;
    dyadic_even(delta)?;
    let exponent = cfg.f64_where("exponent", "(0, 2]", |x| x > 0.0 && x <= 2.0)?;
    let mu = if table.header.len() == 3 {
        csvio::read_weighted(&path)?.0
    } else {
        frostman_weights(&csvio::read_points(&path)?.0, exponent, delta)?
    };
    let ts = match two_scale_decomposition(mu.points(), &mu, delta) {
        Ok(ts) => ts,
        Err(e @ Error::NonConcentration { .. }) => return Err(LabError::Invariant(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    fs::create_dir_all(out).map_err(|e| LabError::io(out, e))?;
    csvio::write_points(&out.join("anchors.csv"), &ts.coarse, &[])?;
    csvio::write_points(&out.join("fine.csv"), &ts.fine, &[])?;
    let w = ts.sqrt_delta.value();
    csvio::write_csv(
        &out.join("balls.csv"),
        &[],
        &["cx", "cy", "level", "mass", "fine_points"],
        ts.balls.iter().map(|b| {
            let c = b.center(w);
            vec![fmt(c.x), fmt(c.y), ts.level.to_string(), fmt(b.mass), b.fine.len().to_string()]
        }),
    )?;
    let mut report = Report::new(cfg);
    report.line("delta", fmt(delta.value()));
    report.line("sqrt_delta", fmt(w));
    report.line("level", ts.level);
    report.line("good_mass", fmt(ts.good_mass));
    report.line("balls", ts.balls.len());
    report.line("fine_points", ts.fine.len());
    report.line("threshold", fmt(ts.threshold.constant));
    report.line("coarse_ratio", fmt(ts.coarse_report.worst_ratio));
    report.line("fine_ratio", fmt(ts.fine_report.worst_ratio));
    report.write(&out.join("manifest"))?;
    Ok(report.text())
}
