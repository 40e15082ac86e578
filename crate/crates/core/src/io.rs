//! JSON formats for graphs, matrices and decomposition results.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major. Results
//! are written with sorted keys and every float as `{:.16e}` (17 significant
//! digits), so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::decomposer::{BlockTag, DecompositionResult};
use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::matrix::{MatrixC, C64};

#[derive(Deserialize)]
struct GraphFile {
    n: usize,
    #[serde(default)]
    directed: bool,
    edges: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
struct MatrixFile {
    n: usize,
    entries: Vec<Entry>,
}

fn vertex(x: f64) -> Result<usize> {
    if x.fract() != 0.0 || x < 1.0 {
        return Err(Error::InvalidGraph(format!(
            "vertex {x} is not a positive integer"
        )));
    }
    Ok(x as usize)
}

pub fn parse_graph(text: &str) -> Result<WeightedDigraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    let mut g = WeightedDigraph::new(file.n, file.directed)?;
    for e in file.edges {
        match e.as_slice() {
            [i, j] => g.add_edge(vertex(*i)?, vertex(*j)?, 1.0)?,
            [i, j, w] => g.add_edge(vertex(*i)?, vertex(*j)?, *w)?,
            _ => {
                return Err(Error::InvalidGraph(format!(
                    "edge {e:?} must be [i, j] or [i, j, w]"
                )))
            }
        }
    }
    Ok(g)
}

pub fn read_graph(path: &Path) -> Result<WeightedDigraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn parse_matrix(text: &str) -> Result<MatrixC> {
    let file: MatrixFile = serde_json::from_str(text)?;
    let data = file
        .entries
        .into_iter()
        .map(|e| match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        })
        .collect();
    MatrixC::from_vec(file.n, file.n, data)
}

pub fn read_matrix(path: &Path) -> Result<MatrixC> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

/// Seeds as nested lists `stage → round → vertices`.
pub fn parse_seeds(text: &str) -> Result<Vec<Vec<Vec<usize>>>> {
    Ok(serde_json::from_str(text)?)
}

pub fn graph_to_value(g: &WeightedDigraph) -> Value {
    let edges: Vec<Value> = g.edges().map(|(i, j, w)| json!([i, j, w])).collect();
    json!({ "n": g.n(), "directed": g.directed(), "edges": edges })
}

fn entries_value(m: &MatrixC) -> Value {
    Value::Array(m.as_slice().iter().map(|z| json!([z.re, z.im])).collect())
}

/// `{"n": rows, "entries": [[re, im], …]}` for a square matrix.
pub fn matrix_to_value(m: &MatrixC) -> Value {
    json!({ "n": m.rows(), "entries": entries_value(m) })
}

fn value_to_matrix(v: &Value, n: usize) -> Result<MatrixC> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix entries must be an array".into()))?;
    let data = arr
        .iter()
        .map(|e| match e.as_array().map(Vec::as_slice) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok(C64::new(re, im)),
                _ => Err(Error::Parse("matrix entry must hold numbers".into())),
            },
            _ => Err(Error::Parse("matrix entry must be [re, im]".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixC::from_vec(n, n, data)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("field {key:?} must be a nonnegative integer")))
}

fn labels_value(labels: &[usize]) -> Value {
    Value::Array(labels.iter().map(|&v| json!(v)).collect())
}

fn labels_field(v: &Value, key: &str) -> Result<Vec<usize>> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("field {key:?} must be an array")))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("bad label in {key:?}")))
        })
        .collect()
}

/// JSON document for a decomposition.
pub fn result_to_value(res: &DecompositionResult, verified: bool) -> Value {
    let blocks: Vec<Value> = res
        .blocks
        .iter()
        .map(|b| {
            json!({
                "stage": b.tag.stage,
                "round": b.tag.round,
                "j": b.tag.j,
                "lineage": b.lineage.iter().map(|t| json!([t.stage, t.round, t.j])).collect::<Vec<_>>(),
                "labels": labels_value(&b.labels),
                "n": b.matrix.rows(),
                "matrix": entries_value(&b.matrix),
            })
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("divisor".into(), matrix_to_value(&res.divisor));
    doc.insert("divisor_labels".into(), labels_value(&res.divisor_labels));
    doc.insert("blocks".into(), Value::Array(blocks));
    doc.insert("residual".into(), float_value(res.residual));
    doc.insert("verified".into(), Value::Bool(verified));
    if let Some(tt) = &res.total_transform {
        doc.insert(
            "transform".into(),
            json!({
                "t": matrix_to_value(&tt.t),
                "t_inv": matrix_to_value(&tt.t_inv),
                "order": labels_value(&tt.order),
                "residual": float_value(tt.residual),
            }),
        );
    }
    Value::Object(doc)
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// A decomposition read back from JSON.
#[derive(Clone, Debug)]
pub struct StoredResult {
    pub divisor: MatrixC,
    pub divisor_labels: Vec<usize>,
    pub blocks: Vec<(BlockTag, Vec<usize>, MatrixC)>,
    pub residual: f64,
    pub verified: bool,
}

pub fn parse_result(text: &str) -> Result<StoredResult> {
    let v: Value = serde_json::from_str(text)?;
    let div = field(&v, "divisor")?;
    let divisor = value_to_matrix(field(div, "entries")?, usize_field(div, "n")?)?;
    let divisor_labels = labels_field(&v, "divisor_labels")?;
    let blocks = field(&v, "blocks")?
        .as_array()
        .ok_or_else(|| Error::Parse("blocks must be an array".into()))?
        .iter()
        .map(|b| {
            let tag = BlockTag {
                stage: usize_field(b, "stage")?,
                round: usize_field(b, "round")?,
                j: usize_field(b, "j")?,
            };
            let m = value_to_matrix(field(b, "matrix")?, usize_field(b, "n")?)?;
            Ok((tag, labels_field(b, "labels")?, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StoredResult {
        divisor,
        divisor_labels,
        blocks,
        residual: field(&v, "residual")?.as_f64().unwrap_or(f64::NAN),
        verified: field(&v, "verified")?
            .as_bool()
            .ok_or_else(|| Error::Parse("verified must be a boolean".into()))?,
    })
}

/// Serializes with sorted keys, two-space indentation and floats as `{:.16e}`.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => {
            out.push_str(&serde_json::to_string(v).expect("scalar serializes"))
        }
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = num.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                let x = num.as_f64().expect("finite float");
                let _ = write!(out, "{x:.16e}");
            }
        }
        Value::Array(items) => {
            // short numeric arrays (complex pairs, label lists) stay on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push_str(": ");
                write_value(out, &map[*key], depth + 1);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, depth);
            out.push('}');
        }
    }
}
