//! Re-checks every CSV in a directory against the invariants its format
//! promises. Files are visited in sorted order and classified by header.

use std::fs;
use std::path::{Path, PathBuf};

use projlab_core::additive::{bsg_extract, iterated_sumset, plunnecke_report, sumset, PairGraph, Sign};
use projlab_core::blowup::{frostman_weights, two_scale_decomposition};
use projlab_core::covering::{covering_number, optimal_interval_cover};
use projlab_core::incidence::{kaufman_witness, kaufman_witness_exhaustive, projection_sweep};
use projlab_core::nonconc::check_delta_t;
use projlab_core::product::{build_product_like, product_experiment};
use projlab_core::{DirectionSet, ScalarSet, Scale};

use super::additive::recompute;
use super::sweep::cauchy_schwarz_rows;
use crate::config::ExperimentConfig;
use crate::csvio::{self, fmt, Meta};
use crate::error::{LabError, LabResult};
use crate::report::Report;

pub fn run(cfg: &mut ExperimentConfig, out: &Path) -> LabResult<String> {
    let dir = cfg.require_path("input")?;
    let report = verify_dir(&dir, cfg)?;
    report.write(&out.join("verify.txt"))?;
    report.verdict()?;
    Ok(report.text())
}

/// Runs every applicable check and returns the report without judging it.
pub fn verify_dir(dir: &Path, cfg: &ExperimentConfig) -> LabResult<Report> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| LabError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    let mut report = Report::new(cfg);
    for path in &files {
        let table = csvio::read_table(path)?;
        let mut local = cfg.clone();
        local.absorb_meta(&table.meta);
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
        let mut ctx = Ctx { report: &mut report, name: &name, cfg: &local, meta: &table.meta };
        match header.as_slice() {
            ["x", "y"] => ctx.points(path)?,
            ["v"] => ctx.scalars(path)?,
            ["theta"] => ctx.directions(path)?,
            ["b", "a"] => ctx.product(path)?,
            ["k"] => ctx.gridset(path)?,
            ["a_index", "b_index"] => ctx.graph(dir, path)?,
            ["x", "y", "w"] => ctx.weighted(path)?,
            _ => ctx.report.line(&name, "skipped (unrecognised header)"),
        }
    }
    if files.is_empty() {
        report.line("files", 0);
    }
    Ok(report)
}

struct Ctx<'a> {
    report: &'a mut Report,
    name: &'a str,
    cfg: &'a ExperimentConfig,
    meta: &'a Meta,
}

impl Ctx<'_> {
    fn check(&mut self, what: &str, ok: bool, detail: impl std::fmt::Display) {
        self.report.check(&format!("{} {what}", self.name), ok, detail);
    }

    fn delta_s(&mut self, set: &dyn Fn(Scale, f64) -> projlab_core::Result<projlab_core::nonconc::NonConcentrationReport>) -> LabResult<()> {
        if !self.meta.contains_key("s") {
            return Ok(());
        }
        let (delta, s, thr) = (self.cfg.delta()?, self.cfg.s()?, self.cfg.threshold()?);
        let r = set(delta, s)?;
        self.check(
            "(delta, s)",
            r.within(thr, delta),
            format!("worst ratio {} against {}", fmt(r.worst_ratio), fmt(thr.bound(delta))),
        );
        Ok(())
    }

    fn sandwich(&mut self, set: &ScalarSet, delta: Scale) {
        let (opt, grid) = (optimal_interval_cover(set, delta), covering_number(set, delta));
        self.check("covering sandwich", opt <= grid && grid <= 2 * opt, format!("{opt} <= {grid} <= {}", 2 * opt));
    }

    fn points(&mut self, path: &Path) -> LabResult<()> {
        let (set, _) = csvio::read_points(path)?;
        let delta = self.cfg.delta()?;
        let sep = set.separation_violation(delta.value());
        self.check("separation", sep.is_none(), witness(sep, delta));
        self.delta_s(&|d, s| check_delta_t(&set, d, s))?;

        let n = self.cfg.u64_where("net", "[1, 10^6]", |n| (1..=1_000_000).contains(&n))? as usize;
        let rows = projection_sweep(&set, &DirectionSet::half_circle_net(n), delta);
        let mut sub = Report::new(self.cfg);
        cauchy_schwarz_rows(&mut sub, set.len(), &rows);
        self.check("cauchy-schwarz", sub.failures().is_empty(), format!("{n} directions"));

        self.sandwich(&ScalarSet::from_values(set.x_values())?, delta);

        let dirs = DirectionSet::half_circle_net(n);
        let s = self.cfg.s()?;
        if let (Ok(fast), Ok(full)) =
            (kaufman_witness(&set, &dirs, delta, s), kaufman_witness_exhaustive(&set, &dirs, delta, s))
        {
            self.check(
                "kaufman early exit",
                fast.covering == full.covering,
                format!("{} vs {}", fast.covering, full.covering),
            );
        }

        if self.meta.get("two_scale").is_some_and(|v| v == "true") {
            let exponent = self.cfg.f64_where("exponent", "(0, 2]", |x| x > 0.0 && x <= 2.0)?;
            let mu = frostman_weights(&set, exponent, delta)?;
            match two_scale_decomposition(&set, &mu, delta) {
                Ok(ts) => {
                    let thr = self.cfg.threshold()?;
                    let ok = ts.coarse_report.within(thr, ts.sqrt_delta) && ts.fine_report.within(thr, delta);
                    self.check(
                        "two-scale",
                        ok,
                        format!(
                            "{} balls, ratios {} and {}",
                            ts.balls.len(),
                            fmt(ts.coarse_report.worst_ratio),
                            fmt(ts.fine_report.worst_ratio)
                        ),
                    );
                }
                Err(e) => self.check("two-scale", false, e),
            }
        }
        Ok(())
    }

    fn scalars(&mut self, path: &Path) -> LabResult<()> {
        let (set, _) = csvio::read_scalars(path)?;
        let delta = self.cfg.delta()?;
        let sep = set.separation_violation(delta.value());
        self.check("separation", sep.is_none(), witness(sep, delta));
        self.delta_s(&|d, s| check_delta_t(&set, d, s))?;
        self.sandwich(&set, delta);
        Ok(())
    }

    fn directions(&mut self, path: &Path) -> LabResult<()> {
        let dirs = csvio::read_directions(path)?;
        let delta = self.cfg.delta()?;
        match dirs.check_separated(delta.value()) {
            Ok(()) => self.check("direction separation", true, format!("{} directions", dirs.len())),
            Err(e) => self.check("direction separation", false, e),
        }
        Ok(())
    }

    fn product(&mut self, path: &Path) -> LabResult<()> {
        let (base, fibers, _) = csvio::read_product_rows(path)?;
        let (delta, s, tau) = (self.cfg.delta()?, self.cfg.s()?, self.cfg.tau()?);
        let set = match build_product_like(base, fibers, delta, s, tau, self.cfg.threshold()?) {
            Ok(set) => set,
            Err(e) => {
                self.check("product validation", false, e);
                return Ok(());
            }
        };
        self.check("product validation", true, format!("{} points", set.len()));
        let n = self.cfg.u64_where("net", "[1, 10^6]", |n| (1..=1_000_000).contains(&n))? as usize;
        let dirs = DirectionSet::half_circle_net(n);
        let exp = product_experiment(&set, &dirs, delta, s, self.cfg.eps0()?);
        let fiber_max = set.fibers().iter().map(|f| covering_number(f, delta)).max().unwrap_or(0);
        self.check(
            "containment",
            !dirs.contains_horizontal() || exp.max_n >= fiber_max,
            format!("max_N {} vs fiber {fiber_max}", exp.max_n),
        );
        let pts = set.point_set();
        let rows = projection_sweep(&pts, &dirs, delta);
        let mut sub = Report::new(self.cfg);
        cauchy_schwarz_rows(&mut sub, pts.len(), &rows);
        self.check("cauchy-schwarz", sub.failures().is_empty(), format!("{n} directions"));
        Ok(())
    }

    fn gridset(&mut self, path: &Path) -> LabResult<()> {
        let g = csvio::read_gridset(path)?;
        for m in 0..=3u32 {
            for n in 0..=3 - m {
                if m + n == 0 {
                    continue;
                }
                let r = plunnecke_report(&g, &g, m, n)?;
                debug_assert_eq!(r.lhs, iterated_sumset(&g, m, n)?.len());
                self.check(
                    &format!("plunnecke m={m} n={n}"),
                    r.holds,
                    format!("{} <= {}", r.lhs, fmt(r.rhs)),
                );
            }
        }
        let gg = sumset(&g, &g, Sign::Plus)?.len();
        self.check("sumset lower bound", gg + 1 >= 2 * g.len(), format!("|G+G| = {gg}, |G| = {}", g.len()));
        Ok(())
    }

    fn graph(&mut self, dir: &Path, path: &Path) -> LabResult<()> {
        let (edges, _) = csvio::read_pairs(path)?;
        let side = |key: &str| -> LabResult<PathBuf> {
            self.meta
                .get(key)
                .map(|f| dir.join(f))
                .ok_or_else(|| LabError::parameter(key, format!("missing from {}", path.display())))
        };
        let a = csvio::read_gridset(&side("left")?)?;
        let b = csvio::read_gridset(&side("right")?)?;
        let k = self.cfg.f64_where("k", "[1, inf)", |x| x >= 1.0)?;
        let g = PairGraph::new(a, b, edges)?;
        match bsg_extract(&g, k) {
            Ok(res) => {
                let again = recompute(&g, &res.a_indices, &res.b_indices);
                self.check(
                    "bsg statistics",
                    again == (res.achieved_density, res.achieved_sumset, res.achieved_edge_fraction),
                    format!("|A'| = {}, |B'| = {}, sumset {}", res.a_sub.len(), res.b_sub.len(), again.1),
                );
            }
            Err(e) => self.check("bsg statistics", false, e),
        }
        Ok(())
    }

    fn weighted(&mut self, path: &Path) -> LabResult<()> {
        let (mut mu, _) = csvio::read_weighted(path)?;
        let exponent = self.cfg.f64_where("exponent", "(0, 2]", |x| x > 0.0 && x <= 2.0)?;
        let cert = mu.certify(exponent, self.cfg.delta()?);
        self.check(
            "frostman certificate",
            cert.max_ratio <= 1.0 + 1e-12,
            format!("max ratio {} at exponent {}", fmt(cert.max_ratio), fmt(exponent)),
        );
        Ok(())
    }
}

fn witness(v: Option<(usize, usize, f64)>, delta: Scale) -> String {
    match v {
        None => format!("all gaps >= {}", fmt(delta.value())),
        Some((i, j, d)) => format!("points {i} and {j} are {} apart", fmt(d)),
    }
}
