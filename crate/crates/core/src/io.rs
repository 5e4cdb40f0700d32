//! JSON formats.
//!
//! Scalars are written as strings (`"3/4"`, `"-2"`, `"0.125"`); on input,
//! JSON numbers are accepted too. Errors name the offending field.
//!
//! * tensor: `{"dim": d, "metric": [[..]], "orientation": 1, "components": [[i,j,k,l,"v"], ..]}`
//!   with 0-based indices. `metric` defaults to the identity and
//!   `orientation` to `1`; unlisted components are zero.
//! * λ-table: `{"dim": d, "lambda": [[..]]}`
//! * critical data: `{"frame": [[..]], "secP": "v", "secStarP": "v", "hessian": [[..]]}`
//!   plus optional `"gradient"` and `"gradientStar"`; `frame` defaults to the identity.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::exterior::MetricFrame;
use crate::matrix::Matrix;
use crate::normalform4::CriticalData;
use crate::operator::OperatorMatrix;
use crate::pure::{CriterionReport, LambdaTable};
use crate::scalar::Scalar;
use crate::thorpe::StarCommutation;

fn scalar_at<S: Scalar>(v: &Value, field: &str) -> Result<S> {
    match v {
        Value::String(s) => S::parse_scalar(s).map_err(|e| Error::Parse(format!("{field}: {e}"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(S::from_i64(i)),
            None => S::parse_scalar(&n.to_string()).map_err(|e| Error::Parse(format!("{field}: {e}"))),
        },
        other => Err(Error::Parse(format!("{field}: expected a number or numeric string, found {other}"))),
    }
}

fn matrix_at<S: Scalar>(rows: &[Vec<Value>], field: &str, n: usize) -> Result<Matrix<S>> {
    if rows.len() != n {
        return Err(Error::Parse(format!("{field}: expected {n} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!("{field}[{i}]: expected {n} entries, found {}", row.len())));
        }
        out.push(row.iter().enumerate().map(|(j, v)| scalar_at(v, &format!("{field}[{i}][{j}]"))).collect::<Result<_>>()?);
    }
    Matrix::from_rows(out)
}

fn matrix_json<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    (0..m.nrows()).map(|i| m.row(i).iter().map(Scalar::to_repr).collect()).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<i8>,
    components: Vec<Vec<Value>>,
}

pub fn tensor_to_json<S: Scalar>(rm: &CurvatureTensor<S>) -> Value {
    let frame = rm.frame();
    let comps: Vec<Value> = rm
        .components()
        .into_iter()
        .map(|([i, j, k, l], v)| json!([i, j, k, l, v.to_repr()]))
        .collect();
    json!({
        "dim": rm.dim(),
        "metric": matrix_json(frame.metric()),
        "orientation": frame.orientation(),
        "components": comps,
    })
}

pub fn tensor_from_str<S: Scalar>(text: &str) -> Result<CurvatureTensor<S>> {
    let file: TensorFile = serde_json::from_str(text)?;
    let d = file.dim;
    if !(2..=crate::exterior::MAX_DIM).contains(&d) {
        return Err(Error::Parse(format!("dim: {d} is out of range")));
    }
    let metric = match &file.metric {
        Some(rows) => matrix_at(rows, "metric", d)?,
        None => Matrix::identity(d),
    };
    let frame = MetricFrame::new(metric, file.orientation.unwrap_or(1)).map_err(|e| Error::Parse(format!("metric: {e}")))?;
    let mut comps = Vec::with_capacity(file.components.len());
    for (n, c) in file.components.iter().enumerate() {
        let field = format!("components[{n}]");
        if c.len() != 5 {
            return Err(Error::Parse(format!("{field}: expected [i, j, k, l, value], found {} entries", c.len())));
        }
        let mut idx = [0usize; 4];
        for (slot, v) in idx.iter_mut().zip(c) {
            *slot = v
                .as_u64()
                .filter(|&i| (i as usize) < d)
                .ok_or_else(|| Error::Parse(format!("{field}: index {v} is not in 0..{d}")))? as usize;
        }
        comps.push((idx, scalar_at(&c[4], &format!("{field}[4]"))?));
    }
    CurvatureTensor::from_components(frame, &comps).map_err(|e| Error::Parse(format!("components: {e}")))
}

pub fn read_tensor<S: Scalar>(path: &Path) -> Result<CurvatureTensor<S>> {
    tensor_from_str(&std::fs::read_to_string(path)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    dim: usize,
    lambda: Vec<Vec<Value>>,
}

pub fn table_to_json<S: Scalar>(t: &LambdaTable<S>) -> Value {
    json!({ "dim": t.dim(), "lambda": matrix_json(t.matrix()) })
}

pub fn table_from_str<S: Scalar>(text: &str) -> Result<LambdaTable<S>> {
    let file: TableFile = serde_json::from_str(text)?;
    let m = matrix_at(&file.lambda, "lambda", file.dim)?;
    LambdaTable::new(m).map_err(|e| Error::Parse(format!("lambda: {e}")))
}

pub fn read_table<S: Scalar>(path: &Path) -> Result<LambdaTable<S>> {
    table_from_str(&std::fs::read_to_string(path)?)
}

/// Report with per-pair entries `{"I", "Ic", <left>, <right>, "pass"}`.
pub fn report_to_json<S: Scalar>(r: &CriterionReport<S>, left: &str, right: &str) -> Value {
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|p| {
            let mut m = serde_json::Map::new();
            m.insert("I".into(), json!(p.subset));
            m.insert("Ic".into(), json!(p.complement));
            m.insert(left.into(), json!(p.value.to_repr()));
            m.insert(right.into(), json!(p.complement_value.to_repr()));
            m.insert("pass".into(), json!(p.pass));
            Value::Object(m)
        })
        .collect();
    json!({ "dim": r.dim, "pass": r.pass, "pairs": pairs })
}

pub fn operator_to_json<S: Scalar>(op: &OperatorMatrix<S>) -> Value {
    let labels: Vec<String> = op.basis().blades().iter().map(|b| b.to_string()).collect();
    json!({ "dim": op.dim(), "degree": op.degree(), "basis": labels, "matrix": matrix_json(op.matrix()) })
}

pub fn commutation_to_json(r: &StarCommutation) -> Value {
    json!({
        "commutes": r.commutes,
        "maxViolation": r.max_violation,
        "witness": r.witness.map(|(i, o)| json!({ "input": i.to_string(), "output": o.to_string() })),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(rename_all = "camelCase")]
struct CriticalFile {
    #[serde(default)]
    frame: Option<Vec<Vec<Value>>>,
    #[serde(rename = "secP")]
    sec_p: Value,
    #[serde(rename = "secStarP")]
    sec_star_p: Value,
    hessian: Vec<Vec<Value>>,
    #[serde(default)]
    gradient: Option<Vec<Value>>,
    #[serde(default)]
    gradient_star: Option<Vec<Value>>,
}

fn vec4_at<S: Scalar>(v: &Option<Vec<Value>>, field: &str) -> Result<Option<[S; 4]>> {
    let Some(v) = v else { return Ok(None) };
    if v.len() != 4 {
        return Err(Error::Parse(format!("{field}: expected 4 entries, found {}", v.len())));
    }
    let parsed: Vec<S> = v.iter().enumerate().map(|(i, x)| scalar_at(x, &format!("{field}[{i}]"))).collect::<Result<_>>()?;
    Ok(Some(parsed.try_into().map_err(|_| Error::Parse(field.into()))?))
}

pub fn critical_from_str<S: Scalar>(text: &str) -> Result<CriticalData<S>> {
    let f: CriticalFile = serde_json::from_str(text)?;
    Ok(CriticalData {
        frame: match &f.frame {
            Some(rows) => matrix_at(rows, "frame", 4)?,
            None => Matrix::identity(4),
        },
        sec_p: scalar_at(&f.sec_p, "secP")?,
        sec_star_p: scalar_at(&f.sec_star_p, "secStarP")?,
        hessian: matrix_at(&f.hessian, "hessian", 4)?,
        gradient: vec4_at(&f.gradient, "gradient")?,
        gradient_star: vec4_at(&f.gradient_star, "gradientStar")?,
    })
}

pub fn critical_to_json<S: Scalar>(c: &CriticalData<S>) -> Value {
    let vec4 = |g: &Option<[S; 4]>| g.as_ref().map(|g| g.iter().map(Scalar::to_repr).collect::<Vec<_>>());
    let mut v = json!({
        "frame": matrix_json(&c.frame),
        "secP": c.sec_p.to_repr(),
        "secStarP": c.sec_star_p.to_repr(),
        "hessian": matrix_json(&c.hessian),
    });
    if let Some(g) = vec4(&c.gradient) {
        v["gradient"] = json!(g);
    }
    if let Some(g) = vec4(&c.gradient_star) {
        v["gradientStar"] = json!(g);
    }
    v
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
