//! JSON reports and their CSV sidecars.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Mode, RunConfig};

pub const SCHEMA: &str = "gcrsi-report/1";

/// A comparison `lhs ≤ rhs + slack`. `holds` is recomputable from the three
/// numbers it travels with.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    /// Whether a failure counts against the exit status.
    pub asserted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl Entry {
    pub fn value(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, stderr: None, label: None, verdict: None }
    }

    pub fn with_stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Attaches `lhs ≤ rhs + slack`.
    pub fn check(mut self, lhs: f64, rhs: f64, slack: f64, asserted: bool) -> Self {
        let holds = lhs <= rhs + slack;
        self.verdict = Some(Verdict { lhs, rhs, slack, holds, asserted });
        self
    }
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    seed: u64,
    samples: usize,
    mode: Mode,
    params: BTreeMap<String, String>,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub asserted: usize,
    pub passed: usize,
    pub failed: usize,
    pub exploratory: usize,
}

#[derive(Debug, Serialize)]
struct Document<'a> {
    schema: &'static str,
    subcommand: &'a str,
    config: ConfigEcho,
    results: &'a [Entry],
    sidecars: Vec<String>,
    summary: Summary,
}

#[derive(Debug)]
pub struct Report {
    pub subcommand: &'static str,
    pub results: Vec<Entry>,
    sidecars: Vec<(String, String)>,
}

impl Report {
    pub fn new(subcommand: &'static str) -> Self {
        Self { subcommand, results: Vec::new(), sidecars: Vec::new() }
    }

    pub fn push(&mut self, e: Entry) {
        self.results.push(e);
    }

    /// Registers CSV content under a short name such as `diagnostics`.
    pub fn sidecar(&mut self, name: &str, csv: String) {
        self.sidecars.push((name.to_string(), csv));
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for v in self.results.iter().filter_map(|e| e.verdict.as_ref()) {
            if v.asserted {
                s.asserted += 1;
                if v.holds {
                    s.passed += 1;
                } else {
                    s.failed += 1;
                }
            } else {
                s.exploratory += 1;
            }
        }
        s
    }

    fn sidecar_path(out: &Path, name: &str) -> PathBuf {
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        out.with_file_name(format!("{stem}.{name}.csv"))
    }

    /// Renders the JSON document. Sidecar names are relative to the report
    /// so identical runs produce identical bytes wherever they are written.
    pub fn render(&self, cfg: &RunConfig, out: Option<&Path>) -> Result<String> {
        let sidecars = match out {
            Some(p) => self
                .sidecars
                .iter()
                .map(|(n, _)| Self::sidecar_path(p, n).file_name().unwrap().to_string_lossy().into_owned())
                .collect(),
            None => Vec::new(),
        };
        let doc = Document {
            schema: SCHEMA,
            subcommand: self.subcommand,
            config: ConfigEcho { seed: cfg.seed, samples: cfg.samples, mode: cfg.mode, params: cfg.resolved() },
            results: &self.results,
            sidecars,
            summary: self.summary(),
        };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes the report to `out` (and sidecars beside it) or prints it.
    pub fn emit(&self, cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
        let text = self.render(cfg, out)?;
        match out {
            Some(p) => {
                std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
                for (name, csv) in &self.sidecars {
                    let path = Self::sidecar_path(p, name);
                    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
                }
            }
            None => {
                print!("{text}");
                if !self.sidecars.is_empty() {
                    eprintln!("note: {} CSV sidecar(s) are only written with --out", self.sidecars.len());
                }
            }
        }
        Ok(())
    }
}
