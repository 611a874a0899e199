//! JSON document schemas: points, tangents, command results.

use infogeo::family::Point;
use infogeo::linalg::{SpdMatrix, SymMatrix};
use infogeo::metric::Tangent;
use infogeo::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

/// `{"n": 2, "D": [[...],[...]], "u": [...]}`
#[derive(Debug, Serialize, Deserialize)]
pub struct PointDocument {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    pub u: Vec<f64>,
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), message: message.into() }
}

pub fn parse_point(text: &str) -> Result<Point, Error> {
    let doc: PointDocument =
        serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    if doc.n == 0 {
        return Err(parse_err("n", "dimension must be positive"));
    }
    if doc.d.len() != doc.n {
        return Err(parse_err("D", format!("expected {} rows, found {}", doc.n, doc.d.len())));
    }
    for (i, row) in doc.d.iter().enumerate() {
        if row.len() != doc.n {
            return Err(parse_err(
                &format!("D[{i}]"),
                format!("expected {} columns, found {}", doc.n, row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(parse_err(&format!("D[{i}][{j}]"), "entry is not finite"));
            }
        }
    }
    if doc.u.len() != doc.n {
        return Err(parse_err("u", format!("expected {} entries, found {}", doc.n, doc.u.len())));
    }
    for (k, v) in doc.u.iter().enumerate() {
        if !v.is_finite() {
            return Err(parse_err(&format!("u[{k}]"), "entry is not finite"));
        }
    }
    let sym = SymMatrix::from_rows(&doc.d).map_err(|e| parse_err("D", e.to_string()))?;
    let d = SpdMatrix::new(sym).map_err(|e| parse_err("D", e.to_string()))?;
    Ok(Point::new(d, doc.u))
}

pub fn serialize_point(pt: &Point) -> String {
    let n = pt.dim();
    let d: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| pt.d().get(i, j)).collect()).collect();
    serde_json::to_string(&PointDocument { n, d, u: pt.u().to_vec() })
        .expect("point serialization")
}

/// `{"X": [[...],[...]], "x": [...]}`
#[derive(Debug, Serialize, Deserialize)]
pub struct TangentDocument {
    #[serde(rename = "X")]
    pub m: Vec<Vec<f64>>,
    pub x: Vec<f64>,
}

pub fn parse_tangent(text: &str, n: usize) -> Result<Tangent, Error> {
    let doc: TangentDocument =
        serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    if doc.m.len() != n || doc.m.iter().any(|r| r.len() != n) {
        return Err(parse_err("X", format!("expected {n}x{n} matrix")));
    }
    if doc.x.len() != n {
        return Err(parse_err("x", format!("expected {n} entries")));
    }
    let sym = SymMatrix::from_rows(&doc.m).map_err(|e| parse_err("X", e.to_string()))?;
    if doc.x.iter().any(|v| !v.is_finite())
        || (0..n).any(|i| (0..n).any(|j| !sym.get(i, j).is_finite()))
    {
        return Err(parse_err("$", "tangent entries must be finite"));
    }
    Ok(Tangent::new(sym, doc.x))
}

/// Result envelope written to standard output (one JSON document per run).
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Map<String, Value>,
}

#[derive(PartialEq, Eq, Clone, Copy)]
pub enum Status {
    Ok,
    Error,
}

impl CommandResult {
    pub fn ok(payload: Value) -> Self {
        CommandResult { status: Status::Ok, payload, diagnostics: Map::new() }
    }

    pub fn error(code: &str, message: &str) -> Self {
        CommandResult {
            status: Status::Error,
            payload: json!({"code": code, "message": message}),
            diagnostics: Map::new(),
        }
    }

    pub fn from_error(e: &Error) -> Self {
        CommandResult::error(e.code(), &e.to_string())
    }

    pub fn with_diagnostic(mut self, key: &str, value: Value) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "status": if self.status == Status::Ok { "ok" } else { "error" },
            "payload": self.payload,
            "diagnostics": Value::Object(self.diagnostics.clone()),
        })
    }

    pub fn exit_code(&self) -> i32 {
        if self.status == Status::Ok {
            0
        } else {
            1
        }
    }
}

/// Converts a finite float to JSON, turning NaN/inf into an error.
pub fn num(v: f64) -> Result<Value, Error> {
    if v.is_finite() {
        Ok(json!(v))
    } else {
        Err(Error::Numerical(format!("non-finite value {v} in payload")))
    }
}

pub fn tangent_json(t: &Tangent) -> Result<Value, Error> {
    let n = t.dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(num(t.m.get(i, j))?);
        }
        rows.push(Value::Array(row));
    }
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        v.push(num(t.v[k])?);
    }
    Ok(json!({"X": rows, "x": v}))
}
