use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use tchar_core::arith::parse_rational;
use tchar_core::witness::{Bound, Computed};
use tchar_core::{BoundInterval, BudgetCheck, Decision, Outcome, Verdict, WitnessEntry, WitnessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Csv,
    Pretty,
}

/// Treats `arg` as a path when such a file exists, otherwise as inline text.
pub fn load(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return fs::read_to_string(path).with_context(|| format!("reading {}", path.display()));
    }
    Ok(arg.to_string())
}

/// Non-empty, non-comment lines of an input.
pub fn lines(text: &str) -> Vec<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

/// Accepts `1e-6`, `0.000001` or `1/1000000`.
pub fn parse_tolerance(s: &str) -> Result<f64, String> {
    let v = match s.parse::<f64>() {
        Ok(v) => v,
        Err(_) => {
            let q = parse_rational(s).map_err(|e| e.to_string())?;
            q.to_f64().unwrap_or(f64::NAN)
        }
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("tolerance must be positive, got {s}"));
    }
    Ok(v)
}

pub fn interval(b: &BoundInterval) -> Value {
    if b.is_lower_only() {
        json!({ "lo": b.lo, "hi": null })
    } else {
        json!({ "lo": b.lo, "hi": b.hi, "exact": b.exact })
    }
}

pub fn verdict(v: &Verdict) -> Value {
    let mut m = Map::new();
    m.insert("outcome".into(), v.outcome.name().into());
    match &v.outcome {
        Outcome::NonMember { limit } => {
            m.insert("limit".into(), limit.to_string().into());
        }
        Outcome::Undetermined { horizon } => {
            m.insert("horizon".into(), (*horizon).into());
        }
        Outcome::Member => {}
    }
    m.insert("criterion".into(), v.criterion.name().into());
    m.insert("reason".into(), v.reason.clone().into());
    Value::Object(m)
}

pub fn decision(d: &Decision) -> Value {
    json!({
        "answer": if d.answer { "yes" } else { "no" },
        "branch": d.branch.name(),
        "reason": d.reason,
    })
}

pub fn budget_check(c: &BudgetCheck) -> Value {
    let (bound, bound_lo) = match &c.bound {
        Bound::Below(t) => (
            t.exact.as_ref().map_or_else(|| t.label.clone(), |q| q.to_string()),
            Value::from(t.lo),
        ),
        Bound::Zero => ("0".to_string(), Value::from(0.0)),
        Bound::Equals(q) => (q.to_string(), Value::Null),
    };
    let relation = match &c.bound {
        Bound::Below(_) => "<",
        Bound::Zero | Bound::Equals(_) => "=",
    };
    let (computed, lo, hi) = match &c.computed {
        Computed::Exact(q) => (q.to_string(), Value::Null, Value::Null),
        Computed::Interval(b) => (b.to_string(), Value::from(b.lo), if b.is_lower_only() { Value::Null } else { Value::from(b.hi) }),
    };
    json!({
        "type": "budget_check",
        "name": c.name,
        "index": c.index,
        "relation": relation,
        "bound": bound,
        "bound_label": match &c.bound { Bound::Below(t) => t.label.clone(), _ => String::new() },
        "bound_lo": bound_lo,
        "computed": computed,
        "computed_lo": lo,
        "computed_hi": hi,
        "pass": c.pass,
    })
}

pub fn witness_entry(w: &WitnessEntry) -> Value {
    json!({
        "index": w.index,
        "element": w.element.to_string(),
        "rho": interval(&w.rho),
        "verdict": w.verdict.name(),
        "cases": w.cases.iter().map(|(k, b)| json!({ "case": k, "max_norm": interval(b) })).collect::<Vec<_>>(),
        "limit_distance": [w.limit_distance.0.to_string(), w.limit_distance.1.to_string()],
    })
}

pub fn witness_summary(r: &WitnessReport) -> Value {
    let failed = r.failures().count();
    json!({
        "type": "summary",
        "family": r.family.letter(),
        "sequence": r.sequence.to_string(),
        "epsilon": r.parameters.epsilon.to_string(),
        "l": r.parameters.l,
        "s": r.parameters.s,
        "checks": r.budget_checks.len(),
        "failed": failed,
        "pass": failed == 0,
        "limit": r.limit.to_string(),
        "limit_verdict": verdict(&r.limit_verdict),
        "witnesses": r.witnesses.iter().map(witness_entry).collect::<Vec<_>>(),
    })
}

/// Writes records in the chosen format; CSV uses the keys of the first record
/// and renders nested values as JSON text.
pub fn emit(out: &mut dyn Write, format: Format, records: &[Value]) -> Result<()> {
    match format {
        Format::JsonLines => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
        Format::Pretty => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string_pretty(r)?)?;
            }
        }
        Format::Csv => {
            let Some(Value::Object(first)) = records.first() else { return Ok(()) };
            let keys: Vec<&String> = first.keys().collect();
            let mut w = csv::Writer::from_writer(out);
            w.write_record(keys.iter().map(|k| k.as_str()))?;
            for r in records {
                let row = keys.iter().map(|k| match r.get(k.as_str()) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                });
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
