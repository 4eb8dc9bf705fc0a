//! Running suites and writing deterministic report files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use caplab_core::{params, CheckReport, RandomSource};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use crate::suites::{Settings, Suite, Task};
use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything that determines a run. Identical manifests give identical
/// report files.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunManifest {
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub settings: Settings,
    /// Record wall-clock `runtime_ms`; off by default so reports stay byte-stable.
    pub timings: bool,
    /// Appends a check that always fails.
    pub inject_failure: bool,
}

#[derive(Debug, Default)]
pub struct RunOutcome {
    pub reports: Vec<CheckReport>,
    pub artifacts: BTreeMap<String, serde_json::Value>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

fn manifest_tasks(manifest: &RunManifest) -> Vec<Task> {
    let mut suites: Vec<Suite> = manifest.suites.iter().flat_map(|s| s.expand()).collect();
    suites.sort();
    suites.dedup();
    suites.into_iter().flat_map(Suite::tasks).collect()
}

fn sort_key(r: &CheckReport) -> (String, String) {
    let params = serde_json::to_string(&r.params).expect("params serialize");
    (r.check_name.clone(), params)
}

/// Runs every task of the manifest's suites in parallel. Each task draws
/// from `RandomSource::new(seed).derive(task_name)`, so results do not
/// depend on scheduling.
pub fn run_suite(manifest: &RunManifest) -> Result<RunOutcome, CliError> {
    let root = RandomSource::new(manifest.seed);
    let results: Vec<_> = manifest_tasks(manifest)
        .par_iter()
        .map(|task| {
            let mut rng = root.derive(task.name);
            let start = Instant::now();
            let out = (task.run)(&manifest.settings, &mut rng)
                .map_err(|source| CliError::Check { task: task.name, source })?;
            Ok((out, start.elapsed().as_millis() as u64))
        })
        .collect::<Result<_, CliError>>()?;

    let mut outcome = RunOutcome::default();
    for (out, ms) in results {
        for mut r in out.reports {
            if manifest.timings {
                r.runtime_ms = ms;
            }
            outcome.reports.push(r);
        }
        outcome.artifacts.extend(out.artifacts);
    }
    if manifest.inject_failure {
        outcome
            .reports
            .push(CheckReport::at_most("harness.injected_failure", params! {}, 1.0, 0.0));
    }
    outcome.reports.sort_by_cached_key(sort_key);
    Ok(outcome)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check_name: &'a str,
    params: String,
    value: f64,
    bound: f64,
    comparator: String,
    tolerance: f64,
    pass: bool,
    runtime_ms: u64,
}

pub fn render_reports(reports: &[CheckReport], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(reports)?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(CsvRow {
                    check_name: &r.check_name,
                    params: serde_json::to_string(&r.params)?,
                    value: r.value,
                    bound: r.bound,
                    comparator: r.comparator.to_string(),
                    tolerance: r.tolerance,
                    pass: r.pass,
                    runtime_ms: r.runtime_ms,
                })?;
            }
            w.into_inner().map_err(|e| CliError::Io {
                path: PathBuf::from("<buffer>"),
                source: e.into_error(),
            })
        }
    }
}

/// `born.json` → `born.data.json`.
pub fn artifact_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.data.json"))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// Writes reports to `manifest.out` (or stdout) and, next to a report file,
/// the data artifacts.
pub fn write_outcome(manifest: &RunManifest, outcome: &RunOutcome) -> Result<(), CliError> {
    let bytes = render_reports(&outcome.reports, manifest.format)?;
    match &manifest.out {
        Some(path) => {
            write_file(path, &bytes)?;
            if !outcome.artifacts.is_empty() {
                let mut data = serde_json::to_vec_pretty(&outcome.artifacts)?;
                data.push(b'\n');
                write_file(&artifact_path(path), &data)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&bytes)
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn artifact_path_replaces_extension() {
        assert_eq!(artifact_path(Path::new("/tmp/born.json")), PathBuf::from("/tmp/born.data.json"));
        assert_eq!(artifact_path(Path::new("out")), PathBuf::from("out.data.json"));
    }

    #[test]
    fn injected_failure_fails() {
        let m = RunManifest { suites: vec![Suite::Mub], inject_failure: true, ..Default::default() };
        let out = run_suite(&m).unwrap();
        assert!(!out.all_pass());
        assert_eq!(out.failures().count(), 1);
    }

    #[test]
    fn reports_are_sorted() {
        let m = RunManifest { suites: vec![Suite::Capacity], ..Default::default() };
        let out = run_suite(&m).unwrap();
        let keys: Vec<_> = out.reports.iter().map(sort_key).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        assert!(out.reports.iter().all(|r| r.runtime_ms == 0));
    }

    #[test]
    fn csv_has_header() {
        let r = vec![CheckReport::at_most("x", params! {"N" => 2usize}, 0.0, 1.0)];
        let text = String::from_utf8(render_reports(&r, Format::Csv).unwrap()).unwrap();
        assert!(text.starts_with("check_name,params,value,bound,comparator,tolerance,pass,runtime_ms\n"));
        assert!(text.contains("\"{\"\"N\"\":2}\""));
    }
}
