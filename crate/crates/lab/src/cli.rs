//! Command-line parsing. Every option is forwarded to the configuration
//! layer as a string, so flags, config files and CSV metadata share one
//! validator.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{Command, ExperimentConfig};
use crate::error::{LabError, LabResult};

#[derive(Debug, Parser)]
#[command(name = "projlab", version, about = "Discretised projection experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// Run a generator spec file (`--input`) and write its output.
    Generate,
    /// Covering number and close pairs for every direction.
    ProjectSweep,
    /// Direction maximising the projected covering number.
    Kaufman,
    /// Projection sweep and triple scan on a product-like set.
    ProductExperiment,
    /// Structured subsets from a partial sumset graph.
    Bsg,
    /// Iterated sumset bound for two grid sets.
    Plunnecke,
    /// Two-scale decomposition of a weighted planar set.
    TwoScale,
    /// Re-check every CSV in the `--input` directory.
    Verify,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::Generate => Command::Generate,
            Sub::ProjectSweep => Command::ProjectSweep,
            Sub::Kaufman => Command::Kaufman,
            Sub::ProductExperiment => Command::ProductExperiment,
            Sub::Bsg => Command::Bsg,
            Sub::Plunnecke => Command::Plunnecke,
            Sub::TwoScale => Command::TwoScale,
            Sub::Verify => Command::Verify,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Options {
    /// `key=value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input file (or directory for `verify`).
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Output directory; created if missing.
    #[arg(long, global = true)]
    pub output: Option<String>,
    /// CSV of directions (`theta` column).
    #[arg(long, global = true)]
    pub directions: Option<String>,
    /// Scale, in (0, 1).
    #[arg(long, global = true)]
    pub delta: Option<String>,
    /// Fiber or set dimension exponent.
    #[arg(long, global = true)]
    pub s: Option<String>,
    /// Base dimension exponent.
    #[arg(long, global = true)]
    pub tau: Option<String>,
    /// Thinning threshold for the product experiment.
    #[arg(long, global = true)]
    pub eps0: Option<String>,
    /// Overrides the seed of a generator spec.
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Constant C of the ratio threshold C * ln(1/delta)^p.
    #[arg(long, global = true)]
    pub threshold_constant: Option<String>,
    /// Power p of the ratio threshold.
    #[arg(long, global = true)]
    pub threshold_log_power: Option<String>,
    /// First grid set (`k` column with `# delta=`).
    #[arg(long, global = true)]
    pub a: Option<String>,
    /// Second grid set.
    #[arg(long, global = true)]
    pub b: Option<String>,
    /// Constant K of the sumset hypotheses.
    #[arg(long, global = true)]
    pub k: Option<String>,
    /// Number of added copies in mB - nB.
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Number of subtracted copies in mB - nB.
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Size of the default half-circle direction net.
    #[arg(long, global = true)]
    pub net: Option<String>,
    /// Frostman exponent.
    #[arg(long, global = true)]
    pub exponent: Option<String>,
    /// Any other configuration key, as `key=value`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Options {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("input", &self.input),
            ("output", &self.output),
            ("directions", &self.directions),
            ("delta", &self.delta),
            ("s", &self.s),
            ("tau", &self.tau),
            ("eps0", &self.eps0),
            ("seed", &self.seed),
            ("threshold_constant", &self.threshold_constant),
            ("threshold_log_power", &self.threshold_log_power),
            ("a", &self.a),
            ("b", &self.b),
            ("k", &self.k),
            ("m", &self.m),
            ("n", &self.n),
            ("net", &self.net),
            ("exponent", &self.exponent),
        ]
    }
}

pub fn build_config(cli: &Cli) -> LabResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(cli.command.into());
    if let Some(path) = &cli.opts.config {
        cfg.load_file(path)?;
    }
    for kv in &cli.opts.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| LabError::parameter("set", format!("`{kv}` is not key=value")))?;
        cfg.set_flag(k, v.trim())?;
    }
    for (k, v) in cli.opts.pairs() {
        if let Some(v) = v {
            cfg.set_flag(k, v)?;
        }
    }
    Ok(cfg)
}

/// Parses `args`, runs the command, prints the summary to stdout and any
/// error to stderr. Returns the process exit code.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match build_config(&cli).and_then(|mut cfg| commands::run(&mut cfg)) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
