//! Run records and their serialized forms.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA: &str = "nonsep.run-record/1";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub index: usize,
    pub statistic: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Value>,
}

impl TrialResult {
    pub fn new(index: usize, statistic: f64, pass: bool) -> Self {
        TrialResult {
            index,
            statistic,
            pass,
            detail: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.detail.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// What `TrialResult::statistic` measures.
    pub statistic: String,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// The bound the statistic is checked against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    /// Largest deviation from the expected value over all trials.
    pub max_deviation: f64,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, Value>,
}

impl Aggregate {
    pub fn over(statistic: &str, trials: &[TrialResult]) -> Self {
        let values: Vec<f64> = trials.iter().map(|t| t.statistic).collect();
        let count = values.len();
        let (min, max, mean) = if count == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (
                values.iter().copied().fold(f64::INFINITY, f64::min),
                values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                values.iter().sum::<f64>() / count as f64,
            )
        };
        Aggregate {
            statistic: statistic.into(),
            count,
            min,
            max,
            mean,
            bound: None,
            max_deviation: 0.0,
            violations: trials.iter().filter(|t| !t.pass).count(),
            extras: BTreeMap::new(),
        }
    }

    pub fn extra(&mut self, key: &str, value: impl Into<Value>) {
        self.extras.insert(key.into(), value.into());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub artifact_version: String,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub aggregate: Aggregate,
    pub pass: bool,
    /// SHA-256 of the record without `duration_ms` and this field.
    pub payload_sha256: String,
    pub duration_ms: u64,
}

impl RunRecord {
    pub fn new(config: ExperimentConfig, trials: Vec<TrialResult>, aggregate: Aggregate, pass: bool) -> Self {
        let mut r = RunRecord {
            schema: SCHEMA.into(),
            artifact_version: ARTIFACT_VERSION.into(),
            config,
            trials,
            aggregate,
            pass,
            payload_sha256: String::new(),
            duration_ms: 0,
        };
        r.payload_sha256 = r.compute_digest();
        r
    }

    /// The deterministic part of the record as compact JSON.
    pub fn payload(&self) -> String {
        let mut v = serde_json::to_value(self).expect("record serializes");
        let obj = v.as_object_mut().expect("record is an object");
        obj.remove("duration_ms");
        obj.remove("payload_sha256");
        v.to_string()
    }

    pub fn compute_digest(&self) -> String {
        hex::encode(Sha256::digest(self.payload().as_bytes()))
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

pub fn write_json_lines<W: Write>(out: &mut W, records: &[RunRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

/// Reads every non-blank line as a record.
pub fn read_json_lines<R: BufRead>(input: R) -> Result<Vec<RunRecord>, CliError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::Io(format!("line {}: {e}", i + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RunRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::Config(format!("line {}: not a run record: {e}", i + 1)))?;
        out.push(r);
    }
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    kind: &'a str,
    seed: u64,
    statistic: &'a str,
    count: usize,
    min: f64,
    max: f64,
    mean: f64,
    bound: Option<f64>,
    max_deviation: f64,
    violations: usize,
    pass: bool,
    payload_sha256: &'a str,
}

/// One summary row per record.
pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        let a = &r.aggregate;
        w.serialize(CsvRow {
            kind: r.config.kind.as_str(),
            seed: r.config.seed,
            statistic: &a.statistic,
            count: a.count,
            min: a.min,
            max: a.max,
            mean: a.mean,
            bound: a.bound,
            max_deviation: a.max_deviation,
            violations: a.violations,
            pass: r.pass,
            payload_sha256: &r.payload_sha256,
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, ExperimentKind};

    fn sample() -> RunRecord {
        let trials = vec![
            TrialResult::new(0, 0.5, true),
            TrialResult::new(1, 1.5, false).with("note", "x"),
        ];
        let mut agg = Aggregate::over("g", &trials);
        agg.bound = Some(1.0);
        RunRecord::new(
            ExperimentConfig::new(ExperimentKind::GameFinite),
            trials,
            agg,
            false,
        )
    }

    #[test]
    fn aggregate_statistics() {
        let r = sample();
        assert_eq!(
            (r.aggregate.min, r.aggregate.max, r.aggregate.mean),
            (0.5, 1.5, 1.0)
        );
        assert_eq!(r.aggregate.violations, 1);
    }

    #[test]
    fn digest_ignores_duration() {
        let a = sample();
        let mut b = a.clone();
        b.duration_ms = 12345;
        assert_eq!(a.compute_digest(), b.compute_digest());
        assert_eq!(a.payload_sha256.len(), 64);
        b.trials[0].statistic = 0.25;
        assert_ne!(a.compute_digest(), b.compute_digest());
    }

    #[test]
    fn json_lines_roundtrip() {
        let recs = vec![sample(), sample()];
        let mut buf = Vec::new();
        write_json_lines(&mut buf, &recs).unwrap();
        let back = read_json_lines(buf.as_slice()).unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[sample()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("kind,seed,statistic"));
        assert!(lines[1].starts_with("game-finite,0,g,2,"));
    }
}
