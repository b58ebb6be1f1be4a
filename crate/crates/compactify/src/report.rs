//! Report envelope shared by every subcommand.
//!
//! Everything that varies between identical runs (wall clock, timings) lives
//! in `header`; `config` and `result` are byte-identical for the same inputs
//! and seed.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use compactify_core::{BuildParams, Thresholds, BOND_TOLERANCE, DEFAULT_DELTAS};
use serde::{Deserialize, Serialize};

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub build_params: BuildParams,
    pub tolerances: Tolerances,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub deltas: Vec<f64>,
    pub thresholds: Thresholds,
    pub bond_tolerance: f64,
    pub membership_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            deltas: DEFAULT_DELTAS.to_vec(),
            thresholds: Thresholds::default(),
            bond_tolerance: BOND_TOLERANCE,
            membership_eps: 0.05,
        }
    }
}

impl RunConfig {
    pub fn new(subcommand: &str, build_params: BuildParams, seed: u64) -> Self {
        Self {
            subcommand: subcommand.to_owned(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            build_params,
            tolerances: Tolerances::default(),
            seed,
        }
    }

    pub fn input(mut self, name: &str, value: impl ToString) -> Self {
        self.inputs.insert(name.to_owned(), value.to_string());
        self
    }

    pub fn output(mut self, name: &str, value: impl ToString) -> Self {
        self.outputs.insert(name.to_owned(), value.to_string());
        self
    }

    /// Every tolerance must be positive and finite.
    pub fn validate(&self) -> Result<(), String> {
        let t = &self.tolerances;
        let mut all = t.deltas.clone();
        all.extend([
            t.thresholds.pass,
            t.thresholds.fail,
            t.bond_tolerance,
            t.membership_eps,
        ]);
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("tolerances must be positive and finite".into());
        }
        if t.thresholds.pass > t.thresholds.fail {
            return Err("pass threshold exceeds fail threshold".into());
        }
        self.build_params.validate().map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub timestamp_unix_ms: u128,
    pub elapsed_s: f64,
    /// Named wall-clock measurements, in the order taken.
    pub timings: Vec<Timing>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub seconds: f64,
}

impl Header {
    pub fn now(elapsed_s: f64, timings: Vec<Timing>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_millis()),
            elapsed_s,
            timings,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub header: Header,
    pub config: RunConfig,
    pub result: T,
}

/// The report with its header removed, for comparing runs.
pub fn strip_header(report: &serde_json::Value) -> serde_json::Value {
    let mut v = report.clone();
    if let Some(obj) = v.as_object_mut() {
        obj.remove("header");
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_the_only_difference() {
        let config = RunConfig::new("verify", BuildParams::default(), 7).input("all", true);
        let a = Report {
            header: Header::now(1.0, vec![]),
            config: config.clone(),
            result: 3,
        };
        let b = Report {
            header: Header::now(
                2.0,
                vec![Timing {
                    name: "x".into(),
                    seconds: 2.0,
                }],
            ),
            config,
            result: 3,
        };
        let (a, b) = (
            serde_json::to_value(&a).unwrap(),
            serde_json::to_value(&b).unwrap(),
        );
        assert_ne!(a, b);
        assert_eq!(strip_header(&a), strip_header(&b));
        assert_eq!(a["config"]["seed"], 7);
    }

    #[test]
    fn tolerances_must_be_positive() {
        let mut c = RunConfig::new("extend-check", BuildParams::default(), 0);
        assert!(c.validate().is_ok());
        c.tolerances.bond_tolerance = 0.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::new("extend-check", BuildParams::default(), 0);
        c.tolerances.thresholds.pass = 0.9;
        assert!(c.validate().is_err());
    }
}
