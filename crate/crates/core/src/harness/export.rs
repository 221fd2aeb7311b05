// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::{Aggregation, ExperimentConfig};
use super::record::RunRecord;
use super::summary::{CostSummary, SummaryStats};
use crate::error::{Error, Result};
use crate::evolution::Scenario;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SUMMARY_HEADER: &str = "scenario,task,mean_ada,stderr_ada,mean_reco,fail_frac,n";

/// Provenance line heading every output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metadata {
    pub config_hash: String,
    pub master_seed: u64,
    pub aggregation: Aggregation,
}

impl Metadata {
    pub fn of(config: &ExperimentConfig) -> Self {
        Metadata {
            config_hash: config.hash(),
            master_seed: config.run.master_seed,
            aggregation: config.run.aggregation,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "# config_hash={} master_seed={} aggregation={}",
            self.config_hash,
            self.master_seed,
            self.aggregation.name()
        )
    }

    pub fn parse(line: &str) -> Option<Self> {
        let body = line.strip_prefix('#')?.trim();
        let mut hash = None;
        let mut seed = None;
        let mut aggregation = Aggregation::Exclude;
        for field in body.split_whitespace() {
            match field.split_once('=')? {
                ("config_hash", v) => hash = Some(v.to_string()),
                ("master_seed", v) => seed = v.parse().ok(),
                ("aggregation", v) => aggregation = Aggregation::parse(v)?,
                _ => {}
            }
        }
        Some(Metadata {
            config_hash: hash?,
            master_seed: seed?,
            aggregation,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Appends records to a JSONL file as they arrive.
pub struct RecordWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl RecordWriter {
    pub fn create(path: impl Into<PathBuf>, meta: &Metadata) -> Result<Self> {
        let path = path.into();
        let mut out = create(&path)?;
        writeln!(out, "{}", meta.line()).map_err(|e| Error::io(&path, e))?;
        Ok(RecordWriter { path, out })
    }

    pub fn append(&mut self, records: &[RunRecord]) -> Result<()> {
        for r in records {
            let line = serde_json::to_string(r).expect("record serializes");
            writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))?;
        }
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn write_records(path: &Path, records: &[RunRecord], meta: &Metadata) -> Result<()> {
    RecordWriter::create(path, meta)?.append(records)
}

/// Reads a JSONL record file. Lines starting with `#` are metadata or
/// comments; blank lines are skipped. Every malformed line is reported.
pub fn read_records(path: &Path) -> Result<(Option<Metadata>, Vec<RunRecord>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut meta = None;
    let mut records = Vec::new();
    let mut bad: Vec<(usize, String)> = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if meta.is_none() {
                meta = Metadata::parse(trimmed);
            }
            continue;
        }
        match serde_json::from_str::<RunRecord>(trimmed) {
            Ok(r) => records.push(r),
            Err(e) => bad.push((i + 1, e.to_string())),
        }
    }
    if let Some((line, msg)) = bad.first() {
        let lines: Vec<String> = bad.iter().map(|(l, _)| l.to_string()).collect();
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: *line,
            message: format!("{msg} (malformed lines: {})", lines.join(", ")),
        });
    }
    if records.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "no records".into(),
        });
    }
    Ok((meta, records))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

fn csv_row(scenario: Scenario, task: &str, c: &CostSummary) -> String {
    format!(
        "{},{},{},{},{},{:.6},{}",
        scenario.name(),
        task,
        fmt_opt(c.mean_ada),
        fmt_opt(c.stderr_ada),
        fmt_opt(c.mean_reco),
        c.fail_frac,
        c.n
    )
}

/// Summary table: one `all` row per scenario followed by its per-task rows.
pub fn summary_csv(stats: &SummaryStats, meta: &Metadata) -> String {
    let mut out = format!("{}\n{SUMMARY_HEADER}\n", meta.line());
    for s in &stats.scenarios {
        out.push_str(&csv_row(s.scenario, "all", &s.overall));
        out.push('\n');
        for (task, c) in &s.per_task {
            out.push_str(&csv_row(s.scenario, &task.to_string(), c));
            out.push('\n');
        }
    }
    out
}

/// Histogram of adaption costs for one scenario; failures on a `failed` row.
pub fn histogram_csv(records: &[RunRecord], scenario: Scenario, meta: &Metadata) -> String {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    let mut failed = 0;
    for r in records.iter().filter(|r| r.scenario == scenario) {
        if r.solved {
            *counts.entry(r.adaption_cost).or_default() += 1;
        } else {
            failed += 1;
        }
    }
    let mut out = format!("{}\nadaption_cost,count\n", meta.line());
    for (cost, n) in counts {
        out.push_str(&format!("{cost},{n}\n"));
    }
    out.push_str(&format!("failed,{failed}\n"));
    out
}

pub fn histogram_file(scenario: Scenario) -> String {
    format!("hist_{}.csv", scenario.name())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Writes `summary.csv` and one histogram per scenario present into `dir`.
/// Returns the paths written.
pub fn export_summary(
    dir: &Path,
    records: &[RunRecord],
    stats: &SummaryStats,
    meta: &Metadata,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let path = dir.join(SUMMARY_FILE);
    write_text(&path, &summary_csv(stats, meta))?;
    written.push(path);
    for s in &stats.scenarios {
        let path = dir.join(histogram_file(s.scenario));
        write_text(&path, &histogram_csv(records, s.scenario, meta))?;
        written.push(path);
    }
    Ok(written)
}
