//! Experiment output: per-replica rows, summary metrics and gates, written
//! as `<out>/<experiment>/replicas.csv` and `summary.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// `git describe`-style version of the build.
pub const VERSION: &str = env!("RMTLAB_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub pass: bool,
    /// The measured quantity; `null` in JSON when not finite.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub metrics: BTreeMap<String, Value>,
    pub gates: Vec<Gate>,
    pub failed_replicas: usize,
    pub runtime_seconds: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    version: &'static str,
    seed: u64,
    config: Value,
    metrics: &'a BTreeMap<String, Value>,
    gates: &'a [Gate],
    pass: bool,
    failed_replicas: usize,
    runtime_seconds: f64,
}

/// Shortest round-trip decimal; exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl ExperimentRecord {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metrics: BTreeMap::new(),
            gates: Vec::new(),
            failed_replicas: 0,
            runtime_seconds: 0.0,
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn metric(&mut self, key: impl Into<String>, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metrics.insert(key.into(), v);
    }

    pub fn gate(&mut self, name: impl Into<String>, pass: bool, value: f64, threshold: f64, detail: impl Into<String>) {
        self.gates.push(Gate {
            name: name.into(),
            pass,
            value,
            threshold,
            detail: detail.into(),
        });
    }

    pub fn gate_named(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }

    /// All gates pass (vacuously true without gates).
    pub fn pass(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }

    pub fn summary_json(&self) -> Value {
        let s = Summary {
            experiment: self.config.experiment.name(),
            version: VERSION,
            seed: self.config.master_seed,
            config: self.config.to_json(),
            metrics: &self.metrics,
            gates: &self.gates,
            pass: self.pass(),
            failed_replicas: self.failed_replicas,
            runtime_seconds: self.runtime_seconds,
        };
        serde_json::to_value(s).expect("summary serializes")
    }

    pub fn output_dir(&self, out: &Path) -> PathBuf {
        out.join(self.config.experiment.name())
    }

    /// Writes both files and returns the directory they went to.
    pub fn write(&self, out: &Path) -> Result<PathBuf> {
        let dir = self.output_dir(out);
        std::fs::create_dir_all(&dir)?;
        let mut w = csv::Writer::from_path(dir.join("replicas.csv"))?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        let mut json = serde_json::to_string_pretty(&self.summary_json())?;
        json.push('\n');
        std::fs::write(dir.join("summary.json"), json)?;
        Ok(dir)
    }
}
