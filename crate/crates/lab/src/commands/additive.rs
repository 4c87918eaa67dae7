use std::collections::BTreeSet;
use std::path::Path;

use projlab_core::additive::{bsg_extract, plunnecke_report, PairGraph};

use crate::config::ExperimentConfig;
use crate::csvio::{self, fmt};
use crate::error::LabResult;
use crate::report::Report;

pub fn bsg(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let a = csvio::read_gridset(&cfg.require_path("a")?)?;
    let b = csvio::read_gridset(&cfg.require_path("b")?)?;
    let (edges, meta) = csvio::read_pairs(&cfg.require_path("input")?)?;
    cfg.absorb_meta(&meta);
    let k = cfg.f64_where("k", "[1, inf)", |x| x >= 1.0)?;
    let g = PairGraph::new(a, b, edges)?;
    let res = bsg_extract(&g, k)?;
    csvio::write_gridset(&out.join("a_sub.csv"), &res.a_sub)?;
    csvio::write_gridset(&out.join("b_sub.csv"), &res.b_sub)?;

    let mut report = Report::new(cfg);
    report.line("edges", g.edges().len());
    report.line("a_sub", res.a_sub.len());
    report.line("b_sub", res.b_sub.len());
    report.line("achieved_density", fmt(res.achieved_density));
    report.line("achieved_sumset", res.achieved_sumset);
    report.line("achieved_edge_fraction", fmt(res.achieved_edge_fraction));
    report.line("measured_exponent", fmt(res.measured_exponent));
    let recheck = recompute(&g, &res.a_indices, &res.b_indices);
    report.check(
        "statistics recomputed",
        recheck == (res.achieved_density, res.achieved_sumset, res.achieved_edge_fraction),
        format!("density {}, sumset {}, edge fraction {}", fmt(recheck.0), recheck.1, fmt(recheck.2)),
    );
    report.write(&out.join("summary.txt"))?;
    report.verdict()?;
    Ok(report.text())
}

/// Density, full sumset size and edge fraction of `A' x B'`, from scratch.
pub(crate) fn recompute(g: &PairGraph, ai: &[usize], bi: &[usize]) -> (f64, usize, f64) {
    let (na, nb) = (g.left().len() as f64, g.right().len() as f64);
    let density = (ai.len() as f64 / na).min(bi.len() as f64 / nb);
    let sums: BTreeSet<i64> = ai
        .iter()
        .flat_map(|&i| bi.iter().map(move |&j| g.left().members()[i] + g.right().members()[j]))
        .collect();
    let inside = g
        .edges()
        .iter()
        .filter(|(i, j)| ai.binary_search(i).is_ok() && bi.binary_search(j).is_ok())
        .count();
    (density, sums.len(), inside as f64 / (na * nb))
}

pub fn plunnecke(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let a = csvio::read_gridset(&cfg.require_path("a")?)?;
    let b = csvio::read_gridset(&cfg.require_path("b")?)?;
    let m = cfg.u64_where("m", "[0, 16]", |x| x <= 16)? as u32;
    let n = cfg.u64_where("n", "[0, 16]", |x| x <= 16)? as u32;
    if m + n == 0 {
        return Err(crate::error::LabError::parameter("m", "m + n must be at least 1"));
    }
    let rep = plunnecke_report(&a, &b, m, n)?;
    let mut report = Report::new(cfg);
    report.line("a", a.len());
    report.line("b", b.len());
    report.line("c", fmt(rep.c));
    report.line("lhs", rep.lhs);
    report.line("rhs", fmt(rep.rhs));
    report.check("plunnecke", rep.holds, format!("|{m}B - {n}B| = {} <= {}", rep.lhs, fmt(rep.rhs)));
    report.write(&out.join("summary.txt"))?;
    report.verdict()?;
    Ok(report.text())
}
