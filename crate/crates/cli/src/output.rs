//! Run reports and atomic artifact writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::{CliError, Format};

/// One rendered output file, held in memory until every artifact of the run
/// has been produced.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub format: Format,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(file: &str, format: Format, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact { file: file.to_string(), format, bytes: bytes.into() }
    }

    pub fn json<T: Serialize>(file: &str, value: &T) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
        text.push('\n');
        Artifact::new(file, Format::Json, text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: Value,
    pub expected: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, measured: impl Serialize, expected: &str, pass: bool) -> Self {
        Check {
            name: name.to_string(),
            measured: serde_json::to_value(measured).expect("measurements serialize"),
            expected: expected.to_string(),
            pass,
        }
    }

    /// `measured < bound`.
    pub fn below(name: &str, measured: f64, bound: f64) -> Self {
        Check::new(name, measured, &format!("< {bound:e}"), measured < bound)
    }
}

/// What a command produced, before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub config: Value,
    pub artifacts: Vec<Artifact>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub format: Format,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config: Value,
    pub output_dir: PathBuf,
    pub artifacts: Vec<ArtifactEntry>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    pub status: &'static str,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const REPORT_FILE: &str = "run_report.json";

/// Write to a temporary file in the target directory, then rename over the
/// target, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes the artifacts, then the report, and returns the report.
pub fn persist(command: &str, output_dir: &Path, outcome: Outcome, wall_time_s: f64) -> Result<RunReport, CliError> {
    let mut written = Vec::with_capacity(outcome.artifacts.len());
    for a in &outcome.artifacts {
        write_atomic(&output_dir.join(&a.file), &a.bytes)?;
        written.push(ArtifactEntry { file: a.file.clone(), format: a.format, bytes: a.bytes.len() });
    }
    let mut report = RunReport {
        tool: "kleinian",
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config: outcome.config,
        output_dir: output_dir.to_path_buf(),
        artifacts: written,
        checks: outcome.checks,
        notes: outcome.notes,
        wall_time_s,
        status: "pass",
    };
    if !report.all_passed() {
        report.status = "check_failed";
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_atomic(&output_dir.join(REPORT_FILE), text.as_bytes())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.txt");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        let entries: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().collect();
        assert_eq!(entries.len(), 1);
    }

    #[test]
    fn failed_checks_mark_the_report() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = Outcome { checks: vec![Check::below("x", 2.0, 1.0)], ..Default::default() };
        let report = persist("demo", dir.path(), outcome, 0.0).unwrap();
        assert_eq!(report.status, "check_failed");
        assert!(dir.path().join(REPORT_FILE).exists());
    }
}
