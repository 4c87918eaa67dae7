//! Experiment configuration: defaults, input metadata, config file, flags.
//!
//! Later layers win. Every effective value is echoed into report headers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use projlab_core::nonconc::Threshold;
use projlab_core::Scale;

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    ProjectSweep,
    Kaufman,
    ProductExperiment,
    Bsg,
    Plunnecke,
    TwoScale,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::ProjectSweep => "project-sweep",
            Command::Kaufman => "kaufman",
            Command::ProductExperiment => "product-experiment",
            Command::Bsg => "bsg",
            Command::Plunnecke => "plunnecke",
            Command::TwoScale => "two-scale",
            Command::Verify => "verify",
        }
    }
}

/// Keys with their default values. Keys absent here have no default.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("delta", "0.00390625"),
    ("eps0", "0.1"),
    ("exponent", "1"),
    ("k", "4"),
    ("m", "1"),
    ("n", "1"),
    ("net", "64"),
    ("s", "1"),
    ("seed", "0"),
    ("separation_min", "0.25"),
    ("tau", "0.5"),
    ("threshold_constant", "8"),
    ("threshold_log_power", "0"),
    ("triple_threshold", "1"),
    ("validate", "false"),
];

/// Path-valued keys. They are never echoed, so reports stay identical when
/// only the output location changes.
pub const PATH_KEYS: &[&str] = &["a", "b", "directions", "input", "output"];

fn known(key: &str) -> bool {
    DEFAULTS.iter().any(|(k, _)| *k == key) || PATH_KEYS.contains(&key)
}

pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    defaults: BTreeMap<String, String>,
    meta: BTreeMap<String, String>,
    file: BTreeMap<String, String>,
    flags: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            defaults: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            meta: BTreeMap::new(),
            file: BTreeMap::new(),
            flags: BTreeMap::new(),
        }
    }

    /// Parses a `key=value` config file; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> LabResult<()> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::at_line(path, i as u64 + 1, "expected key=value"))?;
            let key = normalize_key(k);
            if !known(&key) {
                return Err(LabError::at_line(path, i as u64 + 1, format!("unknown key `{key}`")));
            }
            self.file.insert(key, v.trim().to_string());
        }
        Ok(())
    }

    pub fn set_flag(&mut self, key: &str, value: impl ToString) -> LabResult<()> {
        let key = normalize_key(key);
        if !known(&key) {
            return Err(LabError::parameter(&key, "unknown key"));
        }
        self.flags.insert(key, value.to_string());
        Ok(())
    }

    /// Metadata from an input CSV, used where neither file nor flags decide.
    pub fn absorb_meta(&mut self, meta: &BTreeMap<String, String>) {
        for (k, v) in meta {
            let key = normalize_key(k);
            if DEFAULTS.iter().any(|(d, _)| *d == key) {
                self.meta.insert(key, v.clone());
            }
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        [&self.flags, &self.file, &self.meta, &self.defaults]
            .into_iter()
            .find_map(|m| m.get(key))
            .map(String::as_str)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> LabResult<PathBuf> {
        self.path(key)
            .ok_or_else(|| LabError::parameter(key, format!("required by `{}`", self.command.name())))
    }

    pub fn has_explicit(&self, key: &str) -> bool {
        self.flags.contains_key(key) || self.file.contains_key(key)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> LabResult<T> {
        let raw = self
            .raw(key)
            .ok_or_else(|| LabError::parameter(key, "missing"))?;
        raw.parse()
            .map_err(|_| LabError::parameter(key, format!("cannot parse `{raw}`")))
    }

    /// A float that must satisfy `ok`; `range` names the admissible set.
    pub fn f64_where(&self, key: &str, range: &str, ok: impl Fn(f64) -> bool) -> LabResult<f64> {
        let x: f64 = self.parse(key)?;
        if x.is_finite() && ok(x) {
            Ok(x)
        } else {
            Err(LabError::parameter(key, format!("{x} is outside {range}")))
        }
    }

    pub fn u64_where(&self, key: &str, range: &str, ok: impl Fn(u64) -> bool) -> LabResult<u64> {
        let x: u64 = self.parse(key)?;
        if ok(x) {
            Ok(x)
        } else {
            Err(LabError::parameter(key, format!("{x} is outside {range}")))
        }
    }

    pub fn flag(&self, key: &str) -> LabResult<bool> {
        self.parse(key)
    }

    pub fn delta(&self) -> LabResult<Scale> {
        let d = self.f64_where("delta", "(0, 1)", |x| x > 0.0 && x < 1.0)?;
        Ok(Scale::new(d)?)
    }

    pub fn s(&self) -> LabResult<f64> {
        self.f64_where("s", "(0, 2]", |x| x > 0.0 && x <= 2.0)
    }

    pub fn tau(&self) -> LabResult<f64> {
        self.f64_where("tau", "[0, 2]", |x| (0.0..=2.0).contains(&x))
    }

    pub fn eps0(&self) -> LabResult<f64> {
        self.f64_where("eps0", "[0, 1]", |x| (0.0..=1.0).contains(&x))
    }

    pub fn seed(&self) -> LabResult<u64> {
        self.parse("seed")
    }

    pub fn threshold(&self) -> LabResult<Threshold> {
        Ok(Threshold {
            constant: self.f64_where("threshold_constant", "(0, inf)", |x| x > 0.0)?,
            log_power: self.f64_where("threshold_log_power", "[0, inf)", |x| x >= 0.0)?,
        })
    }

    /// Effective non-path values as `# key=value` lines, sorted by key.
    pub fn echo(&self) -> String {
        let mut keys: Vec<&String> = self
            .defaults
            .keys()
            .chain(self.meta.keys())
            .chain(self.file.keys())
            .chain(self.flags.keys())
            .filter(|k| !PATH_KEYS.contains(&k.as_str()))
            .collect();
        keys.sort();
        keys.dedup();
        let mut out = String::new();
        for k in keys {
            out.push_str(&format!("# {k}={}\n", self.raw(k).unwrap_or("")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_meta_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("c.txt");
        fs::write(&f, "# comment\ndelta = 0.125\ns=0.5\n").unwrap();
        let mut c = ExperimentConfig::new(Command::Kaufman);
        c.absorb_meta(&[("delta".to_string(), "0.25".to_string()), ("tau".to_string(), "1".to_string())].into());
        c.load_file(&f).unwrap();
        c.set_flag("s", 0.75).unwrap();
        assert_eq!(c.delta().unwrap().value(), 0.125);
        assert_eq!(c.s().unwrap(), 0.75);
        assert_eq!(c.tau().unwrap(), 1.0);
        assert_eq!(c.eps0().unwrap(), 0.1);
        assert!(c.echo().contains("# s=0.75\n"));
    }

    #[test]
    fn errors_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("c.txt");
        fs::write(&f, "delta=0.5\nbogus=1\n").unwrap();
        let mut c = ExperimentConfig::new(Command::Verify);
        let e = c.load_file(&f).unwrap_err().to_string();
        assert!(e.contains(":2:") && e.contains("bogus"), "{e}");
        c.set_flag("delta", 2).unwrap();
        let e = c.delta().unwrap_err().to_string();
        assert!(e.contains("`delta`"), "{e}");
        assert!(c.set_flag("nope", 1).is_err());
        c.set_flag("threshold-constant", "x").unwrap();
        assert!(c.threshold().unwrap_err().to_string().contains("threshold_constant"));
    }
}
