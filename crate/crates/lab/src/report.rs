use std::fmt::Display;
use std::fs;
use std::path::Path;

use projlab_core::blowup::{GOOD_BALL_CONSTANT, PIGEONHOLE_CONSTANT, TWO_SCALE_THRESHOLD};

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};

/// Plain-text summary block: a `#` header echoing every parameter and
/// built-in constant, then `key: value` lines.
#[derive(Debug, Clone)]
pub struct Report {
    header: String,
    lines: Vec<String>,
    failures: Vec<String>,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        let mut header = format!("# projlab {}\n", cfg.command.name());
        header.push_str(&cfg.echo());
        header.push_str(&format!("# good_ball_constant={GOOD_BALL_CONSTANT}\n"));
        header.push_str(&format!("# pigeonhole_constant={PIGEONHOLE_CONSTANT}\n"));
        header.push_str(&format!("# two_scale_threshold={TWO_SCALE_THRESHOLD}\n"));
        Report {
            header,
            lines: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn line(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    pub fn raw(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    /// Records a check; failures are kept in order for the exit status.
    pub fn check(&mut self, name: &str, ok: bool, detail: impl Display) {
        let tag = if ok { "PASS" } else { "FAIL" };
        self.lines.push(format!("{tag} {name}: {detail}"));
        if !ok {
            self.failures.push(format!("{name}: {detail}"));
        }
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn text(&self) -> String {
        let mut out = self.header.clone();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> LabResult<()> {
        fs::write(path, self.text()).map_err(|e| LabError::io(path, e))
    }

    /// `Err(Invariant)` naming the first failing check, if any.
    pub fn verdict(&self) -> LabResult<()> {
        match self.failures.first() {
            Some(first) => Err(LabError::Invariant(first.clone())),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    #[test]
    fn first_failure_decides_the_verdict() {
        let mut r = Report::new(&ExperimentConfig::new(Command::Verify));
        r.line("points", 3);
        r.check("one", true, "fine");
        assert!(r.verdict().is_ok());
        r.check("two", false, "broken");
        r.check("three", false, "also broken");
        let err = r.verdict().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("two: broken"));
        let text = r.text();
        assert!(text.starts_with("# projlab verify\n# delta=0.00390625\n"));
        assert!(text.ends_with("points: 3\nPASS one: fine\nFAIL two: broken\nFAIL three: also broken\n"));
    }
}
