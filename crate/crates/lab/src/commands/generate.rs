use std::path::Path;

use projlab_core::generators::{Generated, GeneratorSpec};

use crate::config::ExperimentConfig;
use crate::csvio;
use crate::error::{LabError, LabResult};
use crate::report::Report;

/// Reads a generator spec (`--input`), applies `--seed` if given, writes the
/// generated set plus the canonical spec.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> LabResult<String> {
    let path = cfg.require_path("input")?;
    let text = std::fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    let mut spec = GeneratorSpec::parse(&text).map_err(|e| LabError::io(&path, e))?;
    if cfg.has_explicit("seed") {
        spec.seed = cfg.seed()?;
    }
    let generated = spec.run()?;
    let mut report = Report::new(cfg);
    report.line("kind", spec.kind.name());
    report.line("seed", spec.seed);
    let (file, size) = match &generated {
        Generated::Scalars(s) => {
            csvio::write_scalars(&out.join("scalars.csv"), s, &[])?;
            ("scalars.csv", s.len())
        }
        Generated::Points(p) => {
            csvio::write_points(&out.join("points.csv"), p, &[])?;
            ("points.csv", p.len())
        }
        Generated::Product(p) => {
            csvio::write_product(&out.join("product.csv"), p)?;
            for w in p.warnings() {
                report.line("warning", w);
            }
            ("product.csv", p.len())
        }
    };
    let spec_path = out.join("spec.txt");
    std::fs::write(&spec_path, spec.to_text()).map_err(|e| LabError::io(&spec_path, e))?;
    report.line("file", file);
    report.line("points", size);
    report.write(&out.join("summary.txt"))?;
    Ok(report.text())
}
