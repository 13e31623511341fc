//! Self-describing run reports and their JSON, CSV and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::tables::{MatchRule, ReproTable};
use super::RunConfig;
use crate::local::DeficitCoefficients;
use crate::norms::NormValue;
use crate::record::{Status, VerificationRecord};
use crate::sweep::P0Report;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Entry {
    Norm {
        value: NormValue,
    },
    Record {
        record: VerificationRecord,
    },
    Coefficients {
        coefficients: Vec<DeficitCoefficients>,
    },
    Threshold {
        report: P0Report,
    },
    Table {
        table: ReproTable,
    },
}

impl Entry {
    pub fn status(&self) -> Status {
        match self {
            Entry::Norm { .. } => Status::Pass,
            Entry::Record { record } => record.status,
            Entry::Coefficients { coefficients } => {
                Status::all(coefficients.iter().map(|c| c.status()))
            }
            Entry::Threshold { report } => report.status,
            Entry::Table { table } => table.status,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub timestamp: String,
    /// Canonical form of the command that produced the report.
    pub invocation: String,
    pub config: RunConfig,
    pub config_digest: String,
    pub entries: Vec<Entry>,
    pub status: Status,
}

/// SHA-256 of the canonical JSON form of a serialisable value.
pub fn digest<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(invocation: String, config: RunConfig, entries: Vec<Entry>) -> Self {
        let status = Status::all(entries.iter().map(Entry::status));
        Self {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            invocation,
            config_digest: digest(&config),
            config,
            entries,
            status,
        }
    }

    /// JSON with every floating-point number written as a 17-significant-digit
    /// decimal string.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).unwrap_or(Value::Null);
        stringify_floats(&mut value);
        serde_json::to_string_pretty(&value).unwrap_or_default() + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,params,value_lower,value_upper,status\n");
        for entry in &self.entries {
            for row in csv_rows(entry) {
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "bessel-hierarchy {}  {}",
            self.version, self.invocation
        );
        for entry in &self.entries {
            text_entry(&mut out, entry);
        }
        let _ = writeln!(out, "overall: {}", self.status);
        out
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_owned()
    } else if x > 0.0 {
        "inf".to_owned()
    } else {
        "-inf".to_owned()
    }
}

fn stringify_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = Value::String(format_float(n.as_f64().unwrap_or(f64::NAN)));
        }
        Value::Array(items) => items.iter_mut().for_each(stringify_floats),
        Value::Object(map) => map.values_mut().for_each(stringify_floats),
        _ => {}
    }
}

fn csv_rows(entry: &Entry) -> Vec<Vec<String>> {
    let status = entry.status().to_string();
    match entry {
        Entry::Norm { value } => {
            let k = value.key;
            vec![vec![
                "norm".into(),
                format!("d={};p={};k={};R={}", k.d(), k.p(), k.k(), value.r_used),
                format_float(value.enclosure.lower),
                format_float(value.enclosure.upper),
                status,
            ]]
        }
        Entry::Record { record } => {
            let params: Vec<String> = record
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            vec![vec![
                record.claim_id.to_string(),
                params.join(";"),
                String::new(),
                String::new(),
                status,
            ]]
        }
        Entry::Coefficients { coefficients } => coefficients
            .iter()
            .map(|c| {
                vec![
                    "deficit-coefficients".into(),
                    format!("d={};p={};k={}", c.d, c.p, c.k),
                    format_float(c.group_modulus),
                    format_float(c.group_combined),
                    c.status().to_string(),
                ]
            })
            .collect(),
        Entry::Threshold { report } => {
            let t = report.threshold.map(format_float).unwrap_or_default();
            vec![vec![
                "threshold".into(),
                format!("d={};published={}", report.d, report.published_threshold),
                t.clone(),
                t,
                status,
            ]]
        }
        Entry::Table { table } => table
            .rows
            .iter()
            .map(|r| {
                let v = r.engine.map(format_float).unwrap_or_default();
                vec![
                    format!("table:{:?}", table.table).to_lowercase(),
                    format!("{};published={}", r.label.replace(',', ";"), r.published),
                    v.clone(),
                    v,
                    if r.matches { "PASS" } else { "FAIL" }.into(),
                ]
            })
            .collect(),
    }
}

fn text_entry(out: &mut String, entry: &Entry) {
    match entry {
        Entry::Norm { value } => {
            let k = value.key;
            let _ = writeln!(
                out,
                "Λ_{{d={},p={}}}(k={}) ∈ [{:.12e}, {:.12e}]  method {:?}  R {}",
                k.d(),
                k.p(),
                k.k(),
                value.enclosure.lower,
                value.enclosure.upper,
                value.method,
                value.r_used
            );
            if let Some(pw) = value.power {
                let _ = writeln!(out, "  Λ^p ∈ [{:.12e}, {:.12e}]", pw.lower, pw.upper);
            }
        }
        Entry::Record { record } => {
            let params: Vec<String> = record
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let _ = writeln!(
                out,
                "{} [{}]: {}  (explicit k ≤ {}, dominated from k = {})",
                record.claim_id,
                params.join(", "),
                record.status,
                record.k_explicit,
                record.k_dominated_from
            );
            for n in &record.notes {
                let _ = writeln!(out, "  note: {n}");
            }
        }
        Entry::Coefficients { coefficients } => {
            let _ = writeln!(
                out,
                "  {:>3}  {:>22}  {:>22}  status",
                "k", "combined group", "modulus group"
            );
            for c in coefficients {
                let _ = writeln!(
                    out,
                    "  {:>3}  {:>22.12e}  {:>22.12e}  {}",
                    c.k,
                    c.group_combined,
                    c.group_modulus,
                    c.status()
                );
            }
        }
        Entry::Threshold { report } => {
            let t = report
                .threshold
                .map_or("none".to_owned(), |t| format!("{t}"));
            let _ = writeln!(
                out,
                "p0({}) ≤ {}  (published {})  {}",
                report.d, t, report.published_threshold, report.status
            );
            for s in &report.sweeps {
                let c = s
                    .certified_threshold
                    .map_or("none".to_owned(), |t| format!("{t}"));
                let _ = writeln!(
                    out,
                    "  {:?}: {} grid points, threshold {}  {}",
                    s.regime,
                    s.p_grid.len(),
                    c,
                    s.status
                );
            }
        }
        Entry::Table { table } => {
            let _ = writeln!(out, "{:?}", table.table);
            for r in &table.rows {
                let engine = r.engine.map_or("none".to_owned(), |v| match r.rule {
                    MatchRule::SixFigures => format!("{v:.6e}"),
                    MatchRule::AtMost => format!("{v}"),
                });
                let _ = writeln!(
                    out,
                    "  {:<24} published {:<12} engine {:<14} {}",
                    r.label,
                    r.published,
                    engine,
                    if r.matches { "match" } else { "MISMATCH" }
                );
            }
            let _ = writeln!(out, "  {}", table.status);
        }
    }
}
