//! Machine-readable run reports.
//!
//! Every command emits one [`Report`]: a versioned envelope with an overall
//! status, the tolerance checks that decided it, and command-specific rows.
//! Reports carry no wall-clock data, so a fixed seed gives identical bytes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    /// Relative tolerance for `relative` checks, otherwise absolute.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn relative(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target,
            tolerance,
            passed: ((value - target) / target).abs() <= tolerance,
        }
    }

    pub fn absolute(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target,
            tolerance,
            passed: (value - target).abs() <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, min: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: min,
            tolerance: 0.0,
            passed: value >= min,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {:.6} (target {}, tol {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.target,
            self.tolerance
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn from_error(e: &crate::Error) -> Self {
        use crate::Error::*;
        let kind = match e {
            InvalidParameter(_) => "invalid_parameter",
            ShapeMismatch(_) => "shape_mismatch",
            PrecisionFault { .. } => "precision_fault",
            MessageOutOfRange { .. } => "message_out_of_range",
            Unsatisfiable(_) => "unsatisfiable",
            Workload(_) => "workload",
            KeyFormat(_) => "key_format",
            Io(_) => "io",
            Json(_) => "json",
            Csv(_) => "csv",
        };
        ErrorRecord {
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub status: Status,
    pub seed: Option<u64>,
    pub param_set: Option<String>,
    pub checks: Vec<Check>,
    pub rows: Rows,
    pub error: Option<ErrorRecord>,
}

impl Report {
    pub fn new(command: &str, rows: Rows, checks: Vec<Check>) -> Self {
        let status = if checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            status,
            seed: None,
            param_set: None,
            checks,
            rows,
            error: None,
        }
    }

    pub fn failure(command: &str, e: &crate::Error) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            status: Status::Error,
            seed: None,
            param_set: None,
            checks: Vec::new(),
            rows: Rows::None,
            error: Some(ErrorRecord::from_error(e)),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rows as CSV; an error report becomes a single `kind,message` record.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        match &self.rows {
            Rows::None => write_rows(w, self.error.iter()),
            Rows::Selftest(r) => write_rows(w, r),
            Rows::Microbench(r) => write_rows(w, r),
            Rows::Sweep(r) => write_rows(w, r),
            Rows::Nn(r) => write_rows(w, r),
            Rows::Gates(r) => write_rows(w, r),
            Rows::Trace(r) => write_rows(w, r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum Rows {
    None,
    Selftest(Vec<SelftestRow>),
    Microbench(Vec<MicrobenchRow>),
    Sweep(Vec<crate::archsim::SweepRow>),
    Nn(Vec<NnRow>),
    Gates(Vec<GateRow>),
    Trace(Vec<crate::archsim::TraceRow>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestRow {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicrobenchRow {
    pub param_set: String,
    pub num_ct: usize,
    pub epochs: usize,
    pub pbs_throughput_per_s: f64,
    pub pbs_latency_ms: f64,
    pub pbs_time_s: f64,
    pub total_time_s: f64,
    pub hbm_utilization: f64,
    pub required_bandwidth_gb_per_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NnRow {
    pub model: String,
    pub pbs_count: usize,
    pub levels: usize,
    pub time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRow {
    pub a: bool,
    pub b: bool,
    pub expected: bool,
    pub trials: usize,
    pub correct: usize,
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
