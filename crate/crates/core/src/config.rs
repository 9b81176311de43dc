//! Run configuration: JSON file plus command-line overrides, validated
//! before any check runs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::poly::Rational;

/// Every selectable check family, in report order.
pub const CHECK_FAMILIES: &[&str] = &[
    "hurwitz-oracle",
    "schur-special-value",
    "linear-s-tbar1",
    "ba-linear",
    "log-eigen",
    "exp-identity",
    "reduced-lax",
    "toda-field",
    "canonical-commutation",
    "initial-route-equality",
    "log-string-equations",
    "string-equations-numeric",
    "reduction-exact",
    "reduction-numeric",
    "derivative-oracle",
];

/// Named groups accepted in the check list.
pub const CHECK_GROUPS: &[(&str, &[&str])] = &[
    (
        "exact",
        &[
            "hurwitz-oracle",
            "schur-special-value",
            "canonical-commutation",
            "initial-route-equality",
            "log-string-equations",
            "reduction-exact",
        ],
    ),
    (
        "initial-exact",
        &["canonical-commutation", "initial-route-equality", "log-string-equations"],
    ),
    (
        "dressing",
        &["ba-linear", "log-eigen", "exp-identity", "reduced-lax", "toda-field"],
    ),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: {field}: {message}")]
    Invalid {
        origin: String,
        field: String,
        message: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Parses `"p/q"`, integers and decimals with an optional exponent
/// (`"0.2"`, `"-1e-3"`) as exact rationals.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let bad = || format!("{text:?} is not a rational number");
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(format!("{text:?} has a zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let (negative, int_part) = match int_part.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let value = Rational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), shift.unsigned_abs() as usize));
    let value = if shift >= 0 { value * scale } else { value / scale };
    Ok(if negative { -value } else { value })
}

/// Rationals in config files: strings in any `parse_rational` form, or JSON numbers.
#[derive(Clone, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

struct ExactVisitor;

impl serde::de::Visitor<'_> for ExactVisitor {
    type Value = Exact;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational such as \"1/5\", \"0.2\" or \"1e-3\"")
    }

    fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Exact, E> {
        parse_rational(v).map(Exact).map_err(E::custom)
    }

    fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Exact, E> {
        Ok(Exact(Rational::from_integer(v.into())))
    }

    fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Exact, E> {
        Ok(Exact(Rational::from_integer(v.into())))
    }

    // Shortest round-trip decimal, so `0.2` reads as 1/5.
    fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Exact, E> {
        self.visit_str(&format!("{v:e}"))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Exact, D::Error> {
        deserializer.deserialize_any(ExactVisitor)
    }
}

fn r(text: &str) -> Exact {
    Exact(parse_rational(text).expect("literal rational"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub beta: Exact,
    #[serde(rename = "Q")]
    pub q: Exact,
    pub tbar1: Exact,
    /// Initial data `c_1..c_K` of the numeric string-equation check; defaults to `[-tbar1]`.
    pub c: Option<Vec<Exact>>,
    pub t_points: Vec<Vec<Exact>>,
    pub s_points: Vec<Exact>,
    pub z_values: Vec<Exact>,
    /// Tau truncation degree `D`.
    pub dmax: usize,
    /// Shift order kept in dressing operators.
    pub order: usize,
    pub n_exp: usize,
    /// Shift window `N` and number of times `K` for the exact initial-value suite.
    pub n_window: usize,
    pub k_times: usize,
    /// Shift window for the numeric string equations.
    pub n_numeric: usize,
    pub precision: u32,
    /// Also run dressing checks at `D + 2` and require the residual to halve.
    pub convergence: bool,
    pub fd_step: Exact,
    pub hurwitz_dmax: usize,
    pub hurwitz_rmax: usize,
    pub schur_max: usize,
    /// Check families or groups; empty selects everything.
    pub checks: Vec<String>,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub reproducible: bool,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            beta: r("1/5"),
            q: r("1/10"),
            tbar1: r("1/2"),
            c: None,
            t_points: vec![vec![r("1/10"), r("1/20")], vec![r("1/10")], vec![]],
            s_points: vec![r("1/3"), r("-1/2")],
            z_values: vec![r("2")],
            dmax: 8,
            order: 4,
            n_exp: 20,
            n_window: 8,
            k_times: 2,
            n_numeric: 12,
            precision: 50,
            convergence: true,
            fd_step: r("1e-10"),
            hurwitz_dmax: 4,
            hurwitz_rmax: 3,
            schur_max: 8,
            checks: Vec::new(),
            cache_dir: None,
            out: None,
            reproducible: false,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()).min(8),
        }
    }
}

/// Command-line values that replace file values when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub beta: Option<String>,
    pub q: Option<String>,
    pub tbar1: Option<String>,
    pub c: Option<String>,
    pub dmax: Option<usize>,
    pub order: Option<usize>,
    pub precision: Option<u32>,
    pub checks: Option<String>,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub reproducible: bool,
    pub workers: Option<usize>,
}

impl Overrides {
    /// Configuration keys set by these overrides.
    pub fn fields(&self) -> Vec<&'static str> {
        [
            ("beta", self.beta.is_some()),
            ("Q", self.q.is_some()),
            ("tbar1", self.tbar1.is_some()),
            ("c", self.c.is_some()),
            ("dmax", self.dmax.is_some()),
            ("order", self.order.is_some()),
            ("precision", self.precision.is_some()),
            ("checks", self.checks.is_some()),
            ("workers", self.workers.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, set)| set.then_some(k))
        .collect()
    }
}

fn flag_error(flag: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        origin: "command line".into(),
        field: format!("--{flag}"),
        message: message.into(),
    }
}

fn parse_flag(flag: &str, text: &str) -> Result<Exact, ConfigError> {
    parse_rational(text).map(Exact).map_err(|m| flag_error(flag, m))
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// 1-based line of the first occurrence of `"key"` in `source`.
fn key_line(source: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    source.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

impl RunConfig {
    fn parse(source: &str, origin: &str) -> Result<RunConfig, ConfigError> {
        serde_json::from_str(source).map_err(|e| ConfigError::Syntax {
            path: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Validation error with its origin: the file line holding the key, or
    /// the command line when a flag set the field.
    fn locate(&self, source: Option<(&str, &str)>, flagged: &[&str]) -> Result<(), ConfigError> {
        self.validate().map_err(|e| match e {
            ConfigError::Invalid { field, message, .. } => {
                let origin = match source {
                    _ if flagged.contains(&field.as_str()) => "command line".to_string(),
                    Some((text, origin)) => match key_line(text, &field) {
                        Some(line) => format!("{origin}: line {line}"),
                        None => origin.to_string(),
                    },
                    None => "configuration".to_string(),
                };
                ConfigError::Invalid { origin, field, message }
            }
            other => other,
        })
    }

    pub fn from_json(source: &str, origin: &str) -> Result<RunConfig, ConfigError> {
        let config = RunConfig::parse(source, origin)?;
        config.locate(Some((source, origin)), &[])?;
        Ok(config)
    }

    fn read(path: &Path) -> Result<String, ConfigError> {
        std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<RunConfig, ConfigError> {
        RunConfig::from_json(&RunConfig::read(path)?, &path.display().to_string())
    }

    /// Loads `path` (or the defaults), applies `overrides`, then validates the result.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
        let source = path.map(|p| RunConfig::read(p).map(|s| (s, p.display().to_string()))).transpose()?;
        let mut config = match &source {
            Some((text, origin)) => RunConfig::parse(text, origin)?,
            None => RunConfig::default(),
        };
        config.apply(overrides)?;
        config.locate(source.as_ref().map(|(t, o)| (t.as_str(), o.as_str())), &overrides.fields())?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(v) = &o.beta {
            self.beta = parse_flag("beta", v)?;
        }
        if let Some(v) = &o.q {
            self.q = parse_flag("Q", v)?;
        }
        if let Some(v) = &o.tbar1 {
            self.tbar1 = parse_flag("tbar1", v)?;
        }
        if let Some(v) = &o.c {
            self.c = Some(split_list(v).map(|x| parse_flag("c", x)).collect::<Result<_, _>>()?);
        }
        if let Some(v) = o.dmax {
            self.dmax = v;
        }
        if let Some(v) = o.order {
            self.order = v;
        }
        if let Some(v) = o.precision {
            self.precision = v;
        }
        if let Some(v) = &o.checks {
            self.checks = split_list(v).map(str::to_string).collect();
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = &o.cache_dir {
            self.cache_dir = Some(v.clone());
        }
        if o.reproducible {
            self.reproducible = true;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field: &str, message: String| ConfigError::Invalid {
            origin: "configuration".into(),
            field: field.into(),
            message,
        };
        if self.beta.0.is_zero() {
            return Err(invalid("beta", "beta must be nonzero".into()));
        }
        if !self.q.0.is_positive() {
            return Err(invalid("Q", format!("Q = {} must be positive", self.q.0)));
        }
        if let Some(c) = &self.c {
            if c.is_empty() {
                return Err(invalid("c", "the c-list must not be empty".into()));
            }
        }
        if self.s_points.is_empty() {
            return Err(invalid("s_points", "at least one s sample point is required".into()));
        }
        if self.t_points.is_empty() {
            return Err(invalid("t_points", "at least one t sample point is required".into()));
        }
        if self.z_values.is_empty() {
            return Err(invalid("z_values", "at least one z value is required".into()));
        }
        if let Some(z) = self.z_values.iter().find(|z| !z.0.is_positive()) {
            return Err(invalid("z_values", format!("z = {} must be positive", z.0)));
        }
        if !(1..=12).contains(&self.dmax) {
            return Err(invalid("dmax", format!("D = {} outside 1..=12", self.dmax)));
        }
        if self.order == 0 {
            return Err(invalid("order", "shift order must be at least 1".into()));
        }
        if self.n_exp == 0 || self.n_exp > 25 {
            return Err(invalid("n_exp", format!("N_exp = {} outside 1..=25", self.n_exp)));
        }
        if self.k_times == 0 || self.n_window <= self.k_times {
            return Err(invalid(
                "n_window",
                format!("window N = {} must exceed K = {}", self.n_window, self.k_times),
            ));
        }
        if self.n_numeric <= self.c().len() {
            return Err(invalid("n_numeric", format!("window N = {} must exceed K", self.n_numeric)));
        }
        if !(30..=2000).contains(&self.precision) {
            return Err(invalid("precision", format!("{} digits outside 30..=2000", self.precision)));
        }
        if !self.fd_step.0.is_positive() {
            return Err(invalid("fd_step", "finite-difference step must be positive".into()));
        }
        if self.hurwitz_dmax > 5 {
            return Err(invalid(
                "hurwitz_dmax",
                format!("degree {} exceeds the limit 5", self.hurwitz_dmax),
            ));
        }
        if self.schur_max > 10 {
            return Err(invalid("schur_max", format!("|lambda| = {} exceeds 10", self.schur_max)));
        }
        if self.workers == 0 {
            return Err(invalid("workers", "at least one worker is required".into()));
        }
        for name in &self.checks {
            let known = name == "all"
                || CHECK_FAMILIES.contains(&name.as_str())
                || CHECK_GROUPS.iter().any(|(g, _)| g == name);
            if !known {
                return Err(invalid("checks", format!("unknown check {name:?}")));
            }
        }
        Ok(())
    }

    pub fn c(&self) -> Vec<Rational> {
        match &self.c {
            Some(c) => c.iter().map(|x| x.0.clone()).collect(),
            None => vec![-self.tbar1.0.clone()],
        }
    }

    /// Selected families in canonical order.
    pub fn selected(&self) -> Vec<&'static str> {
        if self.checks.is_empty() || self.checks.iter().any(|c| c == "all") {
            return CHECK_FAMILIES.to_vec();
        }
        CHECK_FAMILIES
            .iter()
            .copied()
            .filter(|family| {
                self.checks.iter().any(|c| {
                    c == family || CHECK_GROUPS.iter().any(|(g, members)| g == c && members.contains(family))
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn s_values(&self) -> Vec<Rational> {
        self.s_points.iter().map(|x| x.0.clone()).collect()
    }

    pub fn z_list(&self) -> Vec<Rational> {
        self.z_values.iter().map(|x| x.0.clone()).collect()
    }

    pub fn t_values(&self) -> Vec<Vec<Rational>> {
        self.t_points.iter().map(|t| t.iter().map(|x| x.0.clone()).collect()).collect()
    }

}
