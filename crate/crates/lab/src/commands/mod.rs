//! One runner per subcommand. Each writes its files into the output
//! directory and returns the summary text.

mod additive;
mod generate;
mod product;
mod sweep;
mod two_scale;
mod verify;

use std::fs;
use std::path::PathBuf;

use projlab_core::{DirectionSet, Scale};

use crate::config::{Command, ExperimentConfig};
use crate::csvio;
use crate::error::{LabError, LabResult};

pub use verify::verify_dir;

pub fn run(cfg: &mut ExperimentConfig) -> LabResult<String> {
    let out = output_dir(cfg)?;
    match cfg.command {
        Command::Generate => generate::run(cfg, &out),
        Command::ProjectSweep => sweep::project_sweep(cfg, &out),
        Command::Kaufman => sweep::kaufman(cfg, &out),
        Command::ProductExperiment => product::run(cfg, &out),
        Command::Bsg => additive::bsg(cfg, &out),
        Command::Plunnecke => additive::plunnecke(cfg, &out),
        Command::TwoScale => two_scale::run(cfg, &out),
        Command::Verify => verify::run(cfg, &out),
    }
}

fn output_dir(cfg: &ExperimentConfig) -> LabResult<PathBuf> {
    let out = cfg.require_path("output")?;
    fs::create_dir_all(&out).map_err(|e| LabError::io(&out, e))?;
    Ok(out)
}

/// The `directions` file if given, else a half-circle net of `net` directions.
fn directions(cfg: &ExperimentConfig) -> LabResult<DirectionSet> {
    match cfg.path("directions") {
        Some(p) => csvio::read_directions(&p),
        None => {
            let n = cfg.u64_where("net", "[1, 10^6]", |n| (1..=1_000_000).contains(&n))?;
            Ok(DirectionSet::half_circle_net(n as usize))
        }
    }
}

fn dyadic_even(delta: Scale) -> LabResult<()> {
    match delta.dyadic_exponent() {
        Some(j) if j % 2 == 0 => Ok(()),
        _ => Err(LabError::parameter("delta", format!("{} is not of the form 2^-2j", delta.value()))),
    }
}
