//! Matrix JSON: `{"n": <int>, "entries": [[re, im], ...]}` with `n²` row-major pairs.

use num_complex::Complex;
use serde_json::{json, Value};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn field_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        reason: reason.into(),
    }
}

impl<T: Real> ComplexMatrix<T> {
    pub fn to_json_value(&self) -> Value {
        let entries: Vec<Value> = self
            .entries()
            .iter()
            .map(|z| json!([z.re.as_f64(), z.im.as_f64()]))
            .collect();
        json!({ "n": self.dim(), "entries": entries })
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| field_err("<root>", "expected a JSON object"))?;
        let n = obj
            .get("n")
            .ok_or_else(|| field_err("n", "missing"))?
            .as_u64()
            .ok_or_else(|| field_err("n", "expected a positive integer"))? as usize;
        if n == 0 {
            return Err(field_err("n", "must be at least 1"));
        }
        let entries = obj
            .get("entries")
            .ok_or_else(|| field_err("entries", "missing"))?
            .as_array()
            .ok_or_else(|| field_err("entries", "expected an array of [re, im] pairs"))?;
        if entries.len() != n * n {
            return Err(field_err(
                "entries",
                format!("expected {} pairs for n = {n}, found {}", n * n, entries.len()),
            ));
        }
        let mut data = Vec::with_capacity(n * n);
        for (k, e) in entries.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| field_err(format!("entries[{k}]"), "expected a [re, im] pair"))?;
            let part = |idx: usize, what: &str| -> Result<f64> {
                let x = pair[idx]
                    .as_f64()
                    .ok_or_else(|| field_err(format!("entries[{k}].{what}"), "expected a number"))?;
                if !x.is_finite() {
                    return Err(field_err(format!("entries[{k}].{what}"), "must be finite"));
                }
                Ok(x)
            };
            let (re, im) = (part(0, "re")?, part(1, "im")?);
            data.push(Complex::new(T::lit(re), T::lit(im)));
        }
        ComplexMatrix::new(n, data)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| field_err("<root>", format!("invalid JSON: {e}")))?;
        Self::from_json_value(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn parses_and_round_trips() {
        let m = M::from_json_str(r#"{"n": 2, "entries": [[0,0],[2,0],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(m.get(0, 1), Complex::new(2.0, 0.0));
        let tricky = M::from_rows(&[&[(0.1, 1.0 / 3.0), (1e-300, -7.25)], &[(f64::MAX, 0.0), (-0.0, 5e-324)]]).unwrap();
        let text = serde_json::to_string(&tricky.to_json_value()).unwrap();
        assert_eq!(M::from_json_str(&text).unwrap(), tricky);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"entries": []}"#, "n"),
            (r#"{"n": 2}"#, "entries"),
            (r#"{"n": -1, "entries": []}"#, "n"),
            (r#"{"n": 2, "entries": [[0,0]]}"#, "entries"),
            (r#"{"n": 1, "entries": [[0]]}"#, "entries[0]"),
            (r#"{"n": 1, "entries": [["x", 0]]}"#, "entries[0].re"),
            (r#"{"n": 1, "entries": [[0, 1e999]]}"#, "<root>"),
            (r#"[1,2]"#, "<root>"),
            ("not json", "<root>"),
        ];
        for (text, field) in cases {
            match M::from_json_str(text) {
                Err(Error::Parse { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }
}
