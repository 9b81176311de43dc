//! Check records and the serialized report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::real::Real;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

/// A floating residual compared against a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Measurement {
    pub name: String,
    pub residual: Real,
    pub tolerance: Real,
    pub passed: bool,
}

impl Measurement {
    pub fn new(name: impl Into<String>, residual: Real, tolerance: Real) -> Measurement {
        let passed = residual.abs() <= tolerance;
        Measurement {
            name: name.into(),
            residual,
            tolerance,
            passed,
        }
    }
}

/// An exact identity: passes when no residual term survives.
#[derive(Debug, Clone, Serialize)]
pub struct ExactCheck {
    pub name: String,
    pub nonzero_terms: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ExactCheck {
    pub fn new(name: impl Into<String>, nonzero_terms: usize, detail: Option<String>) -> ExactCheck {
        ExactCheck {
            name: name.into(),
            nonzero_terms,
            passed: nonzero_terms == 0,
            detail,
        }
    }

    /// An expected failure (negative control): passes when the identity does *not* hold.
    pub fn negative_control(name: impl Into<String>, nonzero_terms: usize, detail: Option<String>) -> ExactCheck {
        ExactCheck {
            name: name.into(),
            nonzero_terms,
            passed: nonzero_terms > 0,
            detail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub identity: String,
    pub parameters: BTreeMap<String, String>,
    pub measurements: Vec<Measurement>,
    pub exact: Vec<ExactCheck>,
    pub tail_bound: Option<Real>,
    pub flags: BTreeMap<String, bool>,
    pub notes: Vec<String>,
    pub inconclusive: Option<String>,
    pub error: Option<String>,
    pub verdict: Verdict,
    pub wall_time_ms: Option<u64>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, identity: impl Into<String>) -> CheckReport {
        CheckReport {
            id: id.into(),
            identity: identity.into(),
            parameters: BTreeMap::new(),
            measurements: Vec::new(),
            exact: Vec::new(),
            tail_bound: None,
            flags: BTreeMap::new(),
            notes: Vec::new(),
            inconclusive: None,
            error: None,
            verdict: Verdict::Pass,
            wall_time_ms: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn measure(&mut self, name: impl Into<String>, residual: Real, tolerance: Real) {
        self.measurements.push(Measurement::new(name, residual, tolerance));
    }

    pub fn exact(&mut self, check: ExactCheck) {
        self.exact.push(check);
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.insert(name.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn mark_inconclusive(&mut self, reason: impl Into<String>) {
        self.inconclusive = Some(reason.into());
    }

    pub fn measurement(&self, name: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.name == name)
    }

    /// Sets the verdict from the recorded residuals, exact checks and flags.
    pub fn finish(mut self) -> Self {
        let failed = self.measurements.iter().any(|m| !m.passed) || self.exact.iter().any(|e| !e.passed);
        self.verdict = if self.error.is_some() && self.inconclusive.is_none() {
            Verdict::Fail
        } else if self.inconclusive.is_some() {
            Verdict::Inconclusive
        } else if failed {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
    pub wall_time_ms: Option<u64>,
}

impl Report {
    pub fn new(config: serde_json::Value, mut checks: Vec<CheckReport>, wall_time_ms: Option<u64>) -> Report {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary {
            total: checks.len(),
            ..Default::default()
        };
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.passed += 1,
                Verdict::Fail => summary.failed += 1,
                Verdict::Inconclusive => summary.inconclusive += 1,
            }
        }
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            checks,
            summary,
            wall_time_ms,
        }
    }

    /// 0 all pass, 1 any failure, 2 only inconclusive issues.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            1
        } else if self.summary.inconclusive > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Serializes a rational as `"p/q"` (or `"p"` for integers).
pub mod rational_string {
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::poly::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(deserializer)?;
        Rational::from_str(&text).map_err(serde::de::Error::custom)
    }
}

pub mod rational_string_opt {
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    use crate::poly::Rational;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, serializer: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => serializer.serialize_some(&v.to_string()),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(deserializer)?
            .map(|text| Rational::from_str(&text).map_err(serde::de::Error::custom))
            .transpose()
    }
}
