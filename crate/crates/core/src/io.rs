//! JSON and CSV interchange for signals, tables and measurements.
//!
//! Floats are rounded to 12 significant digits on output. Complex table
//! entries in CSV are written as `a+bi`.

use serde_json::{json, Value};

use crate::adversary::CounterexampleBundle;
use crate::connectivity::{ConnectivityPartition, Relation};
use crate::error::{Error, Result};
use crate::recovery::{Decision, RecoveryOutcome, Tolerances};
use crate::signal::{ComplexTable, CyclicSignal, SpectrogramMeasurement, C64};
use crate::window::{OmegaMask, Threshold, WindowReport};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Shortest decimal text for `x` after rounding to 12 significant digits.
pub fn format_float(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn format_complex(z: C64) -> String {
    let im = round_sig(z.im);
    let sign = if im.is_sign_negative() && im != 0.0 { "-" } else { "+" };
    format!("{}{}{}i", format_float(z.re), sign, format_float(im.abs()))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Parses `a+bi`, `a-bi`, `bi` or a plain real number.
pub fn parse_complex(text: &str) -> Result<C64> {
    let t = text.trim();
    let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad complex entry {text:?}")));
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(parse(t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => {
            let im = match &body[p..] {
                "+" => 1.0,
                "-" => -1.0,
                s => parse(s)?,
            };
            Ok(C64::new(parse(&body[..p])?, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                s => parse(s)?,
            };
            Ok(C64::new(0.0, im))
        }
    }
}

fn float_array(v: impl Iterator<Item = f64>) -> Value {
    Value::Array(v.map(|x| json!(round_sig(x))).collect())
}

pub fn signal_to_json(f: &CyclicSignal) -> Value {
    let mut out = json!({
        "d": f.dim(),
        "re": float_array(f.entries().iter().map(|z| z.re)),
        "im": float_array(f.entries().iter().map(|z| z.im)),
    });
    if let Some(o) = f.origin_offset() {
        out["origin"] = json!(o);
    }
    out
}

fn floats(v: &Value, key: &str) -> Result<Vec<f64>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("missing array {key:?}")))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad(format!("non-numeric entry in {key:?}"))))
        .collect()
}

pub fn signal_from_json(v: &Value) -> Result<CyclicSignal> {
    let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| bad("missing integer \"d\""))? as usize;
    let re = floats(v, "re")?;
    let im = match v.get("im") {
        Some(_) => floats(v, "im")?,
        None => vec![0.0; re.len()],
    };
    if re.len() != d || im.len() != d {
        return Err(bad(format!("expected {d} entries, found re={} im={}", re.len(), im.len())));
    }
    let f = CyclicSignal::from_parts(&re, &im).map_err(|e| bad(e.to_string()))?;
    Ok(match v.get("origin").and_then(Value::as_i64) {
        Some(o) => f.with_origin(o),
        None => f,
    })
}

pub fn parse_signal_json(text: &str) -> Result<CyclicSignal> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    signal_from_json(&v)
}

/// One `a+bi` entry per line.
pub fn signal_to_csv(f: &CyclicSignal) -> String {
    f.entries().iter().map(|&z| format_complex(z) + "\n").collect()
}

fn csv_rows(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect::<Vec<_>>()).map_err(|e| bad(e.to_string())))
        .filter(|r| !matches!(r, Ok(cells) if cells.iter().all(String::is_empty)))
        .collect()
}

fn square<T>(rows: Vec<Vec<T>>) -> Result<Vec<Vec<T>>> {
    let d = rows.len();
    if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(bad(format!("row {k} has {} columns, expected {d}", r.len())));
    }
    Ok(rows)
}

pub fn parse_signal_csv(text: &str) -> Result<CyclicSignal> {
    let entries = csv_rows(text)?
        .into_iter()
        .flatten()
        .filter(|c| !c.is_empty())
        .map(|c| parse_complex(&c))
        .collect::<Result<Vec<_>>>()?;
    CyclicSignal::new(entries).map_err(|e| bad(e.to_string()))
}

/// Row `k`, column `l`.
pub fn table_to_csv(t: &ComplexTable) -> String {
    (0..t.dim()).map(|k| t.row(k).iter().map(|&z| format_complex(z)).collect::<Vec<_>>().join(",") + "\n").collect()
}

pub fn parse_table_csv(text: &str) -> Result<ComplexTable> {
    let rows = square(csv_rows(text)?)?;
    let rows = rows.into_iter().map(|r| r.iter().map(|c| parse_complex(c)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    ComplexTable::from_rows(rows).map_err(|e| bad(e.to_string()))
}

pub fn measurement_to_csv(x: &SpectrogramMeasurement) -> String {
    (0..x.dim()).map(|k| x.row(k).iter().map(|&v| format_float(v)).collect::<Vec<_>>().join(",") + "\n").collect()
}

pub fn parse_measurement_csv(text: &str) -> Result<SpectrogramMeasurement> {
    let rows = square(csv_rows(text)?)?;
    let rows = rows
        .into_iter()
        .map(|r| r.iter().map(|c| c.parse::<f64>().map_err(|_| bad(format!("bad float {c:?}")))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    SpectrogramMeasurement::from_rows(rows).map_err(|e| match e {
        Error::NegativeMeasurement { .. } => e,
        other => bad(other.to_string()),
    })
}

pub fn measurement_to_json(x: &SpectrogramMeasurement) -> Value {
    json!({
        "d": x.dim(),
        "rows": (0..x.dim()).map(|k| float_array(x.row(k).iter().copied())).collect::<Vec<_>>(),
    })
}

pub fn parse_measurement_json(text: &str) -> Result<SpectrogramMeasurement> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let rows = v.get("rows").and_then(Value::as_array).ok_or_else(|| bad("missing array \"rows\""))?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| bad("row is not an array"))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| bad("non-numeric measurement entry")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrogramMeasurement::from_rows(square(rows)?)
}

fn relation_to_json(r: &Relation) -> Value {
    match r {
        Relation::ModD { d, l } => json!({"kind": "mod-d", "d": d, "L": l}),
        Relation::Line { l } => json!({"kind": "line", "L": l}),
        Relation::LineDifferenceSet { members } => json!({"kind": "line-difference-set", "members": members}),
        Relation::Shifts { d, shifts } => json!({"kind": "shifts", "d": d, "shifts": shifts}),
    }
}

pub fn partition_to_json(p: &ConnectivityPartition) -> Value {
    json!({"relation": relation_to_json(&p.relation), "components": p.components})
}

pub fn threshold_to_json(t: &Threshold) -> Value {
    json!({"rule": t.rule.name(), "tau": t.tau})
}

pub fn tolerances_to_json(t: &Tolerances) -> Value {
    json!({
        "tau_supp": t.tau_supp,
        "phase_tol": t.phase_tol,
        "residual_tol": t.residual_tol,
        "zero_tol": t.zero_tol,
    })
}

pub fn mask_to_json(m: &OmegaMask) -> Value {
    json!({
        "d": m.dim(),
        "true_count": m.count_true(),
        "false_entries": m.false_entries().iter().map(|&(k, l)| [k, l]).collect::<Vec<_>>(),
        "threshold": threshold_to_json(&m.threshold()),
    })
}

pub fn window_report_to_json(r: &WindowReport) -> Value {
    json!({
        "d": r.dim(),
        "window": signal_to_json(&r.window),
        "support": r.support,
        "canonical_shift": r.canonical_shift,
        "short_l": r.short_l,
        "short_block": r.is_short_block(),
        "mask": mask_to_json(&r.omega),
        "difference_set": r.dg.members(),
        "is_generic_short": r.is_generic_short,
        "is_full": r.is_full,
        "real_valued": r.real_valued,
    })
}

pub fn outcome_to_json(o: &RecoveryOutcome, tol: &Tolerances, threshold: &Threshold) -> Value {
    json!({
        "status": o.status,
        "route": o.route.name(),
        "estimate": o.estimate.as_ref().map(signal_to_json),
        "residual": if o.residual.is_finite() { json!(round_sig(o.residual)) } else { Value::Null },
        "free_phases": o.free_phases,
        "partition": o.partition.as_ref().map(partition_to_json),
        "notes": o.notes,
        "thresholds": {"mask": threshold_to_json(threshold), "tolerances": tolerances_to_json(tol)},
    })
}

pub fn decision_to_json(dec: &Decision, tol: &Tolerances, threshold: &Threshold) -> Value {
    json!({
        "verdict": dec.verdict,
        "route": dec.route.name(),
        "partition": dec.partition.as_ref().map(partition_to_json),
        "notes": dec.notes,
        "thresholds": {"mask": threshold_to_json(threshold), "tolerances": tolerances_to_json(tol)},
    })
}

pub fn bundle_to_json(b: &CounterexampleBundle) -> Value {
    json!({
        "family": b.family,
        "window": signal_to_json(&b.window),
        "signals": b.signals.iter().map(signal_to_json).collect::<Vec<_>>(),
        "max_measurement_gap": round_sig(b.max_measurement_gap),
        "scale": round_sig(b.scale),
        "pairwise_phase_err": round_sig(b.pairwise_phase_err),
        "valid": b.is_valid(),
        "notes": b.notes,
    })
}
