use std::path::Path;

use projlab_core::covering::covering_number;
use projlab_core::product::{build_product_like, good_triple_scan, product_experiment, ProductLikeSet};

use super::directions;
use crate::config::ExperimentConfig;
use crate::csvio::{self, fmt};
use crate::error::LabResult;
use crate::report::Report;

pub fn run(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let (base, fibers, meta) = csvio::read_product_rows(&cfg.require_path("input")?)?;
    cfg.absorb_meta(&meta);
    let (delta, s, tau, eps0) = (cfg.delta()?, cfg.s()?, cfg.tau()?, cfg.eps0()?);
    let set = if cfg.flag("validate")? {
        build_product_like(base, fibers, delta, s, tau, cfg.threshold()?)?
    } else {
        ProductLikeSet::assemble(base, fibers, delta, s, tau)?
    };
    let dirs = directions(cfg)?;
    let exp = product_experiment(&set, &dirs, delta, s, eps0);
    csvio::write_csv(
        &out.join("profile.csv"),
        &[],
        &["theta", "N"],
        exp.profile.iter().map(|(t, n)| vec![fmt(*t), n.to_string()]),
    )?;

    let mut report = Report::new(cfg);
    report.line("points", set.len());
    report.line("base_points", set.base().len());
    report.line("directions", dirs.len());
    report.line("target", fmt(exp.target));
    report.line("max_N", exp.max_n);
    match exp.witness {
        Some((i, e)) => report.line("witness", format!("index {i}, theta {}", fmt(e.theta()))),
        None => report.line("witness", "none"),
    }
    for w in &exp.warnings {
        report.line("warning", w);
    }

    let sep = cfg.f64_where("separation_min", "[0, inf)", |x| x >= 0.0)?;
    let thr = cfg.f64_where("triple_threshold", "[0, inf)", |x| x >= 0.0)?;
    match good_triple_scan(&set, &dirs, delta, sep, thr) {
        Ok(scan) => {
            csvio::write_csv(
                &out.join("triples.csv"),
                &[],
                &["b1", "b2", "b3", "intersection_size"],
                scan.triples.iter().map(|t| {
                    vec![
                        fmt(t.base_values.0),
                        fmt(t.base_values.1),
                        fmt(t.base_values.2),
                        t.intersection_size.to_string(),
                    ]
                }),
            )?;
            report.line("good_triples", scan.triples.len());
            report.line("triple_total", scan.total);
        }
        Err(e) => report.line("triple_scan", format!("skipped ({e})")),
    }

    if dirs.contains_horizontal() {
        let fiber_max = set.fibers().iter().map(|f| covering_number(f, delta)).max().unwrap_or(0);
        report.check(
            "containment bound",
            exp.max_n >= fiber_max,
            format!("max_N {} >= max fiber covering {fiber_max}", exp.max_n),
        );
    }
    report.write(&out.join("summary.txt"))?;
    report.verdict()?;
    Ok(report.text())
}
