use std::collections::BTreeMap;
use std::time::Instant;

use jnrlab::Tolerances;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToleranceSet {
    pub id: f64,
    pub root: f64,
    pub trim: f64,
    pub cluster: f64,
    pub sep: f64,
    pub near: f64,
}

impl From<&Tolerances> for ToleranceSet {
    fn from(t: &Tolerances) -> Self {
        Self { id: t.id, root: t.root, trim: t.trim, cluster: t.cluster, sep: t.sep, near: t.near }
    }
}

/// Machine-readable summary printed by every command.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_hash: String,
    pub tolerances: ToleranceSet,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub result: Value,
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl RunReport {
    pub fn new(command: &str, input: &[u8], tol: &Tolerances, timed: bool) -> Self {
        Self {
            command: command.into(),
            input_hash: sha256_hex(input),
            tolerances: tol.into(),
            pass: true,
            checks: Vec::new(),
            result: Value::Null,
            artifacts: Vec::new(),
            timings_ms: timed.then(BTreeMap::new),
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, defect: Option<f64>, detail: Option<String>) {
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), pass, defect: defect.filter(|d| d.is_finite()), detail });
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }

    /// Runs `f`, recording its wall time when timings are on.
    pub fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if let Some(t) = self.timings_ms.as_mut() {
            t.insert(label.into(), start.elapsed().as_secs_f64() * 1e3);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
