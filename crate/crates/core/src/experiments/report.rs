use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::evaluation::{Confusion, EvalReport};
use super::latency::LatencyReport;
use super::scalability::ScalabilityRow;
use super::sweeps::CurvePoint;
use super::training::TrainingOutcome;
use crate::error::{Error, Result};

/// Short hash identifying a seed list.
pub fn seedset_hash(seeds: &[u64]) -> String {
    let text = seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    hex::encode(&Sha256::digest(text.as_bytes())[..6])
}

/// Writes one experiment's files as `<experiment>_<timestamp>_<seedset-hash>`
/// plus a suffix per table.
#[derive(Debug, Clone)]
pub struct ReportSink {
    dir: PathBuf,
    stem: String,
}

impl ReportSink {
    pub fn new(dir: &Path, experiment: &str, seeds: &[u64]) -> Result<Self> {
        let ts = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
        Self::at(dir, experiment, &ts, seeds)
    }

    /// Like [`ReportSink::new`] with a caller-chosen timestamp, which makes
    /// file names reproducible.
    pub fn at(dir: &Path, experiment: &str, timestamp: &str, seeds: &[u64]) -> Result<Self> {
        Self::with_stem(dir, format!("{experiment}_{timestamp}_{}", seedset_hash(seeds)))
    }

    pub fn with_stem(dir: &Path, stem: String) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(ReportSink {
            dir: dir.to_path_buf(),
            stem,
        })
    }

    pub fn stem(&self) -> &str {
        &self.stem
    }

    pub fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        match suffix {
            "" => self.dir.join(format!("{}.{ext}", self.stem)),
            s => self.dir.join(format!("{}_{s}.{ext}", self.stem)),
        }
    }

    pub fn write_json(&self, value: &impl Serialize) -> Result<PathBuf> {
        let path = self.path("", "json");
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn write_table(&self, suffix: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.path(suffix, "csv");
        let bytes = table_csv(header, rows)?;
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// CSV bytes of a header and rows.
pub fn table_csv(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::precondition(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::precondition(format!("csv: {e}")))
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn confusion_table(c: &Confusion) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["true".to_string()];
    header.extend(c.classes.iter().cloned());
    header.push("no_decision".into());
    let rows = c
        .classes
        .iter()
        .zip(&c.counts)
        .map(|(name, row)| {
            std::iter::once(name.clone())
                .chain(row.iter().map(u64::to_string))
                .collect()
        })
        .collect();
    (header, rows)
}

pub fn curve_table(curve: &[CurvePoint]) -> (Vec<String>, Vec<Vec<String>>) {
    let seeds = curve.first().map_or(0, |p| p.per_seed.len());
    let mut header = strings(["level_percent", "mean", "min", "max"]);
    header.extend((0..seeds).map(|i| format!("seed{i}")));
    let rows = curve
        .iter()
        .map(|p| {
            [p.level, p.mean, p.min, p.max]
                .iter()
                .chain(&p.per_seed)
                .map(f64::to_string)
                .collect()
        })
        .collect();
    (header, rows)
}

pub fn trajectory_table(t: &TrainingOutcome) -> (Vec<String>, Vec<Vec<String>>) {
    let tracked = t.trajectory.first().map_or(0, |s| s.tracked.len());
    let mut header = strings(["pattern", "group", "step", "at_max", "at_min", "mean"]);
    header.extend((0..tracked).map(|i| format!("w{i}")));
    let rows = t
        .trajectory
        .iter()
        .map(|s| {
            let mut r = vec![
                s.pattern.to_string(),
                s.group.to_string(),
                s.step.to_string(),
                s.at_max.to_string(),
                s.at_min.to_string(),
                s.mean.to_string(),
            ];
            r.extend(s.tracked.iter().map(i32::to_string));
            r
        })
        .collect();
    (header, rows)
}

pub fn trials_table(r: &EvalReport) -> (Vec<String>, Vec<Vec<String>>) {
    let groups = r.trials.first().map_or(0, |t| t.output_spikes.len());
    let mut header = strings(["seed", "pattern", "pre_wta", "post_wta", "onset_steps"]);
    header.extend((0..groups).map(|g| format!("out{g}")));
    header.extend((0..groups).map(|g| format!("wta{g}")));
    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    let rows = r
        .trials
        .iter()
        .map(|t| {
            let mut row = vec![
                t.seed.to_string(),
                t.pattern.to_string(),
                opt(t.pre_wta),
                opt(t.post_wta),
                t.onset_steps.map_or(String::new(), |v| v.to_string()),
            ];
            row.extend(t.output_spikes.iter().map(u64::to_string));
            row.extend(t.wta_spikes.iter().map(u64::to_string));
            row
        })
        .collect();
    (header, rows)
}

pub fn latency_table(l: &LatencyReport) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(["seed", "from", "to", "steps"]);
    let rows = l
        .recognition_switch_steps
        .iter()
        .map(|s| {
            vec![
                s.seed.to_string(),
                s.from.to_string(),
                s.to.to_string(),
                s.steps.map_or(String::new(), |v| v.to_string()),
            ]
        })
        .collect();
    (header, rows)
}

pub fn scalability_table(rows: &[ScalabilityRow]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings([
        "n_patterns",
        "neurons",
        "synapses",
        "fixed_synapses",
        "pattern_synapses",
        "disable_synapses",
        "delta_neurons",
        "delta_synapses",
        "delta_fixed_synapses",
        "delta_pattern_synapses",
        "delta_disable_synapses",
    ]);
    let body = rows
        .iter()
        .map(|r| {
            [
                r.n_patterns,
                r.size.neurons,
                r.size.synapses,
                r.size.fixed_synapses,
                r.size.pattern_synapses,
                r.size.disable_synapses,
                r.delta.neurons,
                r.delta.synapses,
                r.delta.fixed_synapses,
                r.delta.pattern_synapses,
                r.delta.disable_synapses,
            ]
            .iter()
            .map(usize::to_string)
            .collect()
        })
        .collect();
    (header, body)
}
