// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration files.
//!
//! A config is a TOML document with four required top-level keys:
//!
//! ```toml
//! experiment = "else_dtc"   # one of the catalog names
//! seed = 1                  # master seed, non-negative integer
//! output = "runs/else"      # output directory
//!
//! [params]                  # experiment parameters, see `chronolab --help`
//! sites = 8
//! epsilon = 0.02
//! ```
//!
//! The optional key `float_encoding` selects `"decimal"` (default) or
//! `"hex"` for doubles in JSON result files. Validation reports every
//! violation, each prefixed with the path of the offending key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use chronolab::disorder_lab::FloatEncoding;
use serde::Serialize;
use toml::Value;

use crate::catalog::{self, Experiment};

/// One schema violation, addressed by its dotted key path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

/// All violations found in a config.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<Violation>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl ConfigErrors {
    pub fn contains(&self, path: &str) -> bool {
        self.0.iter().any(|v| v.path == path)
    }
}

/// Parameter type together with its admissible range.
#[derive(Clone, Debug)]
pub enum Kind {
    Int { min: i64, max: i64 },
    Float { range: Range },
    FloatList { range: Range, min_len: usize },
    IntList { min: i64, max: i64, min_len: usize },
    Bool,
    Choice(&'static [&'static str]),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Int { min, max } => write!(f, "integer in [{min}, {max}]"),
            Kind::Float { range } => write!(f, "float in {range}"),
            Kind::FloatList { range, min_len } => {
                write!(f, "≥ {min_len} floats in {range}")
            }
            Kind::IntList { min, max, min_len } => {
                write!(f, "≥ {min_len} integers in [{min}, {max}]")
            }
            Kind::Bool => f.write_str("bool"),
            Kind::Choice(options) => write!(f, "one of {}", options.join(", ")),
        }
    }
}

/// Interval of admissible floats; bounds are inclusive unless marked open.
#[derive(Clone, Copy, Debug)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Range {
    pub const ANY: Range = Range::closed(f64::NEG_INFINITY, f64::INFINITY);
    pub const POSITIVE: Range = Range::open_lo(0.0, f64::INFINITY);
    pub const NON_NEGATIVE: Range = Range::closed(0.0, f64::INFINITY);
    pub const FRACTION: Range = Range {
        lo: 0.0,
        hi: 1.0,
        lo_open: false,
        hi_open: true,
    };

    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub const fn open_lo(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: false,
        }
    }

    fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open {
            x > self.lo
        } else {
            x >= self.lo
        };
        let below = if self.hi_open {
            x < self.hi
        } else {
            x <= self.hi
        };
        x.is_finite() && above && below
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = |x: f64| {
            if x.is_infinite() {
                format!("{}∞", if x < 0.0 { "−" } else { "" })
            } else {
                x.to_string()
            }
        };
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open || self.lo.is_infinite() {
                "("
            } else {
                "["
            },
            bound(self.lo),
            bound(self.hi),
            if self.hi_open || self.hi.is_infinite() {
                ")"
            } else {
                "]"
            }
        )
    }
}

/// Schema entry of one parameter. `default: None` makes it required.
#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<Value>,
    pub help: &'static str,
}

impl ParamSpec {
    pub fn required(name: &'static str, kind: Kind, help: &'static str) -> Self {
        Self {
            name,
            kind,
            default: None,
            help,
        }
    }

    pub fn optional(
        name: &'static str,
        kind: Kind,
        default: impl Into<Value>,
        help: &'static str,
    ) -> Self {
        Self {
            name,
            kind,
            default: Some(default.into()),
            help,
        }
    }

    fn check(&self, value: &Value) -> Result<Value, String> {
        match (&self.kind, value) {
            (Kind::Int { min, max }, Value::Integer(i)) => {
                if i < min || i > max {
                    Err(format!("{i} is outside [{min}, {max}]"))
                } else {
                    Ok(value.clone())
                }
            }
            (Kind::Float { range }, Value::Float(_) | Value::Integer(_)) => {
                let x = as_float(value).expect("numeric");
                if range.contains(x) {
                    Ok(Value::Float(x))
                } else {
                    Err(format!("{x} is outside {range}"))
                }
            }
            (Kind::FloatList { range, min_len }, Value::Array(items)) => {
                if items.len() < *min_len {
                    return Err(format!(
                        "expected at least {min_len} values, found {}",
                        items.len()
                    ));
                }
                let mut out = Vec::with_capacity(items.len());
                for (k, item) in items.iter().enumerate() {
                    let x = as_float(item).ok_or_else(|| {
                        format!("[{k}]: expected float, found {}", item.type_str())
                    })?;
                    if !range.contains(x) {
                        return Err(format!("[{k}]: {x} is outside {range}"));
                    }
                    out.push(Value::Float(x));
                }
                Ok(Value::Array(out))
            }
            (Kind::IntList { min, max, min_len }, Value::Array(items)) => {
                if items.len() < *min_len {
                    return Err(format!(
                        "expected at least {min_len} values, found {}",
                        items.len()
                    ));
                }
                for (k, item) in items.iter().enumerate() {
                    let i = item.as_integer().ok_or_else(|| {
                        format!("[{k}]: expected integer, found {}", item.type_str())
                    })?;
                    if i < *min || i > *max {
                        return Err(format!("[{k}]: {i} is outside [{min}, {max}]"));
                    }
                }
                Ok(value.clone())
            }
            (Kind::Bool, Value::Boolean(_)) => Ok(value.clone()),
            (Kind::Choice(options), Value::String(s)) => {
                if options.contains(&s.as_str()) {
                    Ok(value.clone())
                } else {
                    Err(format!("`{s}` is not one of {}", options.join(", ")))
                }
            }
            (kind, other) => Err(format!(
                "expected {}, found {}",
                kind_name(kind),
                other.type_str()
            )),
        }
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn kind_name(kind: &Kind) -> &'static str {
    match kind {
        Kind::Int { .. } => "integer",
        Kind::Float { .. } => "float",
        Kind::FloatList { .. } => "array of floats",
        Kind::IntList { .. } => "array of integers",
        Kind::Bool => "boolean",
        Kind::Choice(_) => "string",
    }
}

/// Validated parameter values, defaults filled in.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    fn value(&self, name: &str) -> &Value {
        self.0
            .get(name)
            .unwrap_or_else(|| panic!("parameter `{name}` is not in the experiment schema"))
    }

    pub fn float(&self, name: &str) -> f64 {
        as_float(self.value(name)).expect("validated float")
    }

    pub fn int(&self, name: &str) -> usize {
        self.value(name).as_integer().expect("validated integer") as usize
    }

    pub fn flag(&self, name: &str) -> bool {
        self.value(name).as_bool().expect("validated boolean")
    }

    pub fn choice(&self, name: &str) -> &str {
        self.value(name).as_str().expect("validated string")
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        let items = self.value(name).as_array().expect("validated array");
        items
            .iter()
            .map(|v| as_float(v).expect("validated float"))
            .collect()
    }

    pub fn ints(&self, name: &str) -> Vec<usize> {
        let items = self.value(name).as_array().expect("validated array");
        items
            .iter()
            .map(|v| v.as_integer().expect("validated integer") as usize)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output: PathBuf,
    pub float_encoding: FloatEncoding,
    pub params: Params,
}

fn violation(path: &str, message: String) -> Violation {
    Violation {
        path: path.to_string(),
        message,
    }
}

const TOP_LEVEL: [&str; 5] = ["experiment", "seed", "output", "params", "float_encoding"];

pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let doc: toml::Table = toml::from_str(text).map_err(|e| {
        ConfigErrors(vec![Violation {
            path: String::new(),
            message: format!("not a valid TOML document: {}", e.message()),
        }])
    })?;
    let mut errors = Vec::new();

    for key in doc.keys().filter(|k| !TOP_LEVEL.contains(&k.as_str())) {
        errors.push(violation(key, "unknown key".into()));
    }

    let experiment = match doc.get("experiment") {
        None => {
            errors.push(violation("experiment", "missing experiment name".into()));
            None
        }
        Some(Value::String(name)) => match Experiment::from_name(name) {
            Some(e) => Some(e),
            None => {
                errors.push(violation(
                    "experiment",
                    format!(
                        "unknown experiment `{name}` (expected one of {})",
                        catalog::names().join(", ")
                    ),
                ));
                None
            }
        },
        Some(other) => {
            errors.push(violation(
                "experiment",
                format!("expected string, found {}", other.type_str()),
            ));
            None
        }
    };

    let seed = match doc.get("seed") {
        None => {
            errors.push(violation("seed", "missing master seed".into()));
            None
        }
        Some(Value::Integer(s)) if *s >= 0 => Some(*s as u64),
        Some(Value::Integer(s)) => {
            errors.push(violation("seed", format!("{s} is negative")));
            None
        }
        Some(other) => {
            errors.push(violation(
                "seed",
                format!("expected integer, found {}", other.type_str()),
            ));
            None
        }
    };

    let output = match doc.get("output") {
        None => {
            errors.push(violation("output", "missing output directory".into()));
            None
        }
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(Value::String(_)) => {
            errors.push(violation("output", "empty path".into()));
            None
        }
        Some(other) => {
            errors.push(violation(
                "output",
                format!("expected string, found {}", other.type_str()),
            ));
            None
        }
    };

    let float_encoding = match doc.get("float_encoding") {
        None => FloatEncoding::Decimal,
        Some(Value::String(s)) if s == "decimal" => FloatEncoding::Decimal,
        Some(Value::String(s)) if s == "hex" => FloatEncoding::Hex,
        Some(other) => {
            errors.push(violation(
                "float_encoding",
                format!("expected \"decimal\" or \"hex\", found {other}"),
            ));
            FloatEncoding::Decimal
        }
    };

    let empty = toml::Table::new();
    let table = match doc.get("params") {
        None => {
            errors.push(violation("params", "missing parameter table".into()));
            None
        }
        Some(Value::Table(t)) => Some(t),
        Some(other) => {
            errors.push(violation(
                "params",
                format!("expected table, found {}", other.type_str()),
            ));
            None
        }
    };

    let mut params = BTreeMap::new();
    if let Some(exp) = experiment {
        let schema = exp.schema();
        let table = table.unwrap_or(&empty);
        for key in table.keys() {
            if !schema.iter().any(|p| p.name == key) {
                errors.push(violation(
                    &format!("params.{key}"),
                    "unknown parameter".into(),
                ));
            }
        }
        for p in &schema {
            let path = format!("params.{}", p.name);
            match (table.get(p.name), &p.default) {
                (Some(v), _) => match p.check(v) {
                    Ok(v) => {
                        params.insert(p.name.to_string(), v);
                    }
                    Err(m) => errors.push(violation(&path, m)),
                },
                (None, Some(d)) => {
                    params.insert(
                        p.name.to_string(),
                        p.check(d).expect("schema default is valid"),
                    );
                }
                (None, None) => errors.push(violation(&path, "missing required parameter".into())),
            }
        }
        if errors.is_empty() {
            errors.extend(exp.cross_check(&Params(params.clone())));
        }
    }

    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    Ok(ExperimentConfig {
        experiment: experiment.expect("checked"),
        seed: seed.expect("checked"),
        output: output.expect("checked"),
        float_encoding,
        params: Params(params),
    })
}

impl ExperimentConfig {
    /// Canonical JSON echo of the validated config, defaults included.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "experiment": self.experiment.name(),
            "seed": self.seed,
            "output": self.output,
            "float_encoding": match self.float_encoding {
                FloatEncoding::Decimal => "decimal",
                FloatEncoding::Hex => "hex",
            },
            "params": self.params,
        })
    }
}
