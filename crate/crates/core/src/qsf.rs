//! QSF-JSON problem files.
//!
//! ```text
//! {"version":1,"n":..,"p":..,"l":..,"q":[..],
//!  "P":{"colptr":[..],"rowidx":[..],"vals":[..]},"c":[..],
//!  "A":{..}|null,"b":[..],"G":{..}|null,"h":[..]}
//! ```
//!
//! Indices are zero-based, matrices column-major CSC, `P` upper triangle
//! only. `A` may be `null` only when `p = 0`, `G` only when `m = 0`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::problem::{ConeSpec, ProblemData, ProblemError, SparseMat, SparseSym};

const TOP_KEYS: [&str; 11] = ["version", "n", "p", "l", "q", "P", "c", "A", "b", "G", "h"];
const MAT_KEYS: [&str; 3] = ["colptr", "rowidx", "vals"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QsfError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("schema error at key `{0}`")]
    Schema(String),
    #[error(transparent)]
    Invalid(#[from] ProblemError),
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut cur = 1;
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        if cur == line {
            break;
        }
        if b == b'\n' {
            cur += 1;
            start = i + 1;
        }
    }
    (start + column.saturating_sub(1)).min(bytes.len())
}

fn schema(key: &str) -> QsfError {
    QsfError::Schema(key.to_string())
}

fn check_keys(obj: &Map<String, Value>, keys: &[&str], prefix: &str) -> Result<(), QsfError> {
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(schema(&format!("{prefix}{k}")));
        }
    }
    if let Some(extra) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(schema(&format!("{prefix}{extra}")));
    }
    Ok(())
}

fn as_index(v: &Value, key: &str) -> Result<usize, QsfError> {
    v.as_u64().and_then(|u| usize::try_from(u).ok()).ok_or_else(|| schema(key))
}

fn index_list(v: &Value, key: &str) -> Result<Vec<usize>, QsfError> {
    v.as_array().ok_or_else(|| schema(key))?.iter().map(|e| as_index(e, key)).collect()
}

fn float_list(v: &Value, key: &str) -> Result<Vec<f64>, QsfError> {
    let out: Vec<f64> = v
        .as_array()
        .ok_or_else(|| schema(key))?
        .iter()
        .map(|e| e.as_f64().ok_or_else(|| schema(key)))
        .collect::<Result<_, _>>()?;
    if out.iter().any(|x| !x.is_finite()) {
        return Err(ProblemError::NonFinite(key.to_string()).into());
    }
    Ok(out)
}

type Csc = (Vec<usize>, Vec<usize>, Vec<f64>);

fn matrix(v: &Value, key: &str, cols: usize) -> Result<Csc, QsfError> {
    if v.is_null() {
        return Ok((vec![0; cols.saturating_add(1)], Vec::new(), Vec::new()));
    }
    let obj = v.as_object().ok_or_else(|| schema(key))?;
    check_keys(obj, &MAT_KEYS, &format!("{key}."))?;
    Ok((
        index_list(&obj["colptr"], &format!("{key}.colptr"))?,
        index_list(&obj["rowidx"], &format!("{key}.rowidx"))?,
        float_list(&obj["vals"], &format!("{key}.vals"))?,
    ))
}

/// Parses and validates a QSF-JSON document.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemData, QsfError> {
    let root: Value = serde_json::from_slice(bytes)
        .map_err(|e| QsfError::Parse { offset: byte_offset(bytes, e.line(), e.column()), message: e.to_string() })?;
    let obj = root.as_object().ok_or_else(|| schema("<root>"))?;
    check_keys(obj, &TOP_KEYS, "")?;
    if obj["version"].as_u64() != Some(1) {
        return Err(schema("version"));
    }
    let n = as_index(&obj["n"], "n")?;
    let p = as_index(&obj["p"], "p")?;
    let l = as_index(&obj["l"], "l")?;
    let q = index_list(&obj["q"], "q")?;
    let cones = ConeSpec::new(l, q);
    cones.validate()?;
    let m = cones.m();
    if n > bytes.len() || p > bytes.len() || m > bytes.len() {
        // Every dimension needs at least one serialized value; larger
        // counts cannot be consistent and would force huge allocations.
        return Err(ProblemError::DimensionMismatch("n".into()).into());
    }
    if obj["A"].is_null() && p != 0 {
        return Err(schema("A"));
    }
    if obj["G"].is_null() && m != 0 {
        return Err(schema("G"));
    }
    if obj["P"].is_null() {
        return Err(schema("P"));
    }
    let (pc, pr, pv) = matrix(&obj["P"], "P", n)?;
    let (ac, ar, av) = matrix(&obj["A"], "A", n)?;
    let (gc, gr, gv) = matrix(&obj["G"], "G", n)?;
    let prob = ProblemData {
        n,
        p,
        P: SparseSym { n, colptr: pc, rowidx: pr, vals: pv },
        c: float_list(&obj["c"], "c")?,
        A: SparseMat { rows: p, cols: n, colptr: ac, rowidx: ar, vals: av },
        b: float_list(&obj["b"], "b")?,
        G: SparseMat { rows: m, cols: n, colptr: gc, rowidx: gr, vals: gv },
        h: float_list(&obj["h"], "h")?,
        cones,
    };
    prob.validate()?;
    Ok(prob)
}

fn matrix_json(colptr: &[usize], rowidx: &[usize], vals: &[f64]) -> Value {
    json!({ "colptr": colptr, "rowidx": rowidx, "vals": vals })
}

/// Serializes a problem. Values round-trip exactly through [`parse_problem`].
pub fn write_problem(prob: &ProblemData) -> Vec<u8> {
    let a = if prob.p == 0 { Value::Null } else { matrix_json(&prob.A.colptr, &prob.A.rowidx, &prob.A.vals) };
    let g = if prob.m() == 0 { Value::Null } else { matrix_json(&prob.G.colptr, &prob.G.rowidx, &prob.G.vals) };
    let doc = json!({
        "version": 1,
        "n": prob.n,
        "p": prob.p,
        "l": prob.cones.l,
        "q": prob.cones.q,
        "P": matrix_json(&prob.P.colptr, &prob.P.rowidx, &prob.P.vals),
        "c": prob.c,
        "A": a,
        "b": prob.b,
        "G": g,
        "h": prob.h,
    });
    serde_json::to_vec(&doc).expect("JSON serialization of plain values cannot fail")
}
