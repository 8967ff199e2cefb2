//! JSON formats for arrangements and weight vectors.
//!
//! ```text
//! {"d": 3, "mode": "exact", "normals": [[["1/1", "0/1"], ...], ...], "labels": [...]}
//! {"weights": ["1/1", ...]}
//! ```
//!
//! Complex entries are `[re, im]` pairs; a bare scalar is read as a real entry.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::arrangement::{Arrangement, Normals};
use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Real, ScalarMode};
use crate::stability::WeightVector;

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
}

fn entry<R: Real>(v: &Value) -> Result<(R, R)> {
    match v {
        Value::Array(pair) if pair.len() == 2 => Ok((R::from_json(&pair[0])?, R::from_json(&pair[1])?)),
        Value::Array(_) => Err(Error::Parse("complex entries are [re, im] pairs".into())),
        other => Ok((R::from_json(other)?, R::zero())),
    }
}

fn rows<R: Real>(normals: &Value) -> Result<Vec<Vec<(R, R)>>> {
    let rows = normals
        .as_array()
        .ok_or_else(|| Error::Parse("`normals` must be an array of rows".into()))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("each normal must be an array of entries".into()))?
                .iter()
                .map(entry::<R>)
                .collect()
        })
        .collect()
}

pub fn arrangement_from_json(v: &Value) -> Result<Arrangement> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("arrangement must be a JSON object".into()))?;
    let dim = field(obj, "d")?
        .as_u64()
        .ok_or_else(|| Error::Parse("`d` must be a positive integer".into()))? as usize;
    let mode = match obj.get("mode") {
        Some(Value::String(s)) => ScalarMode::parse(s)?,
        Some(_) => return Err(Error::Parse("`mode` must be a string".into())),
        None => ScalarMode::Exact,
    };
    let labels = match obj.get("labels") {
        None | Some(Value::Null) => None,
        Some(Value::Array(items)) => Some(
            items
                .iter()
                .map(|l| {
                    l.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| Error::Parse("labels must be strings".into()))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        Some(_) => return Err(Error::Parse("`labels` must be an array".into())),
    };
    let normals = field(obj, "normals")?;
    match mode {
        ScalarMode::Exact => {
            let normals = rows::<BigRational>(normals)?
                .into_iter()
                .map(|r| r.into_iter().map(|(re, im)| GaussianRational::new(re, im)).collect())
                .collect();
            Arrangement::new_exact(dim, normals, labels)
        }
        ScalarMode::Float => {
            let normals = rows::<f64>(normals)?
                .into_iter()
                .map(|r| r.into_iter().map(|(re, im)| Complex64::new(re, im)).collect())
                .collect();
            Arrangement::new_float(dim, normals, labels)
        }
    }
}

pub fn arrangement_to_json(arr: &Arrangement) -> Value {
    let normals: Vec<Value> = match arr.normals() {
        Normals::Exact(rows) => rows
            .iter()
            .map(|r| json!(r.iter().map(|z| json!([z.re.to_json(), z.im.to_json()])).collect::<Vec<_>>()))
            .collect(),
        Normals::Float(rows) => rows
            .iter()
            .map(|r| json!(r.iter().map(|z| json!([z.re.to_json(), z.im.to_json()])).collect::<Vec<_>>()))
            .collect(),
    };
    let mut out = json!({
        "d": arr.dim(),
        "mode": arr.mode().as_str(),
        "normals": normals,
    });
    if let Some(labels) = arr.labels() {
        out["labels"] = json!(labels);
    }
    out
}

pub fn parse_arrangement(text: &str) -> Result<Arrangement> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    arrangement_from_json(&v)
}

/// Reads `{"weights": [...]}` and checks length and positivity.
pub fn weights_from_json<R: Real>(v: &Value, n: usize) -> Result<WeightVector<R>> {
    let items = v
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected {\"weights\": [...]}".into()))?;
    let values = items.iter().map(R::from_json).collect::<Result<Vec<_>>>()?;
    WeightVector::new(values, n)
}

pub fn parse_weights<R: Real>(text: &str, n: usize) -> Result<WeightVector<R>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    weights_from_json(&v, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn exact_round_trip() {
        for arr in [
            catalog::braid(4).unwrap(),
            catalog::full_monomial_b(3).unwrap(),
            catalog::generic(6, 3, 11).unwrap(),
        ] {
            let text = arrangement_to_json(&arr).to_string();
            assert_eq!(parse_arrangement(&text).unwrap(), arr);
        }
    }

    #[test]
    fn float_round_trip() {
        let arr = catalog::dihedral_lines(5).unwrap();
        let text = arrangement_to_json(&arr).to_string();
        assert_eq!(parse_arrangement(&text).unwrap(), arr);
    }

    #[test]
    fn complex_entries_and_defaults() {
        let text = r#"{"d": 2, "normals": [[["1/1","0/1"],["0/1","0/1"]], [0, 1], [["1/1","0/1"],["0/1","1/1"]]]}"#;
        let arr = parse_arrangement(text).unwrap();
        assert_eq!(arr.mode(), ScalarMode::Exact);
        assert_eq!(arr.len(), 3);
        assert!(parse_arrangement(r#"{"d": 2}"#).is_err());
        assert!(parse_arrangement(r#"{"d": 2, "normals": [[[1, 2, 3]]]}"#).is_err());
    }

    #[test]
    fn weights_validation() {
        let ok = parse_weights::<BigRational>(r#"{"weights": ["1/1","1/1","1/1","1/1","1/1","1/1"]}"#, 6);
        assert_eq!(ok.unwrap().len(), 6);
        assert_eq!(
            parse_weights::<BigRational>(r#"{"weights": ["0/1","1/1"]}"#, 2).unwrap_err(),
            Error::NonPositiveWeight { index: 0 }
        );
        assert_eq!(
            parse_weights::<f64>(r#"{"weights": [1.0, 2.5]}"#, 3).unwrap_err(),
            Error::LengthMismatch { expected: 3, found: 2 }
        );
        assert!(parse_weights::<f64>(r#"{"weights": [1.0, 2.5, 0.5]}"#, 3).is_ok());
        assert!(parse_weights::<f64>(r#"[1.0]"#, 1).is_err());
    }
}
