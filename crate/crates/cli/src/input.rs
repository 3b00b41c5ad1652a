//! Parsing of forms, matrices and prime lists from command-line arguments.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use qform::{Error, QuadraticForm, Result};
use serde::Deserialize;
use serde_json::Value;

/// Reads `arg` as inline JSON when it starts with `{` or `[`, otherwise as a file path.
pub fn load_json(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(Path::new(arg)).map_err(|e| Error::Precondition(format!("cannot read `{arg}`: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Precondition(format!("malformed JSON: {e}")))
}

/// A form object `{"n": .., "hessian": [[..]]}` or a bare list of Hessian rows.
pub fn parse_form(value: Value) -> Result<QuadraticForm> {
    let repr: FormRepr = if value.is_array() {
        let hessian: Vec<Vec<i64>> = serde_json::from_value(value).map_err(|e| Error::Precondition(format!("malformed Hessian: {e}")))?;
        FormRepr { n: hessian.len(), hessian }
    } else {
        serde_json::from_value(value).map_err(|e| Error::Precondition(format!("malformed form: {e}")))?
    };
    if repr.hessian.len() != repr.n {
        return Err(Error::DimensionMismatch { expected: repr.n, found: repr.hessian.len() });
    }
    QuadraticForm::from_rows(repr.hessian)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormRepr {
    n: usize,
    hessian: Vec<Vec<i64>>,
}

pub fn load_form(arg: &str) -> Result<QuadraticForm> {
    parse_form(load_json(arg)?)
}

fn parse_rational(v: &Value) -> Result<BigRational> {
    let bad = || Error::Precondition(format!("not a rational: {v}"));
    match v {
        Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(i.into())).ok_or_else(bad),
        Value::String(s) => {
            let (num, den) = s.split_once('/').unwrap_or((s, "1"));
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
        Value::Object(o) => {
            let part = |k: &str| -> Result<BigInt> {
                match o.get(k).ok_or_else(bad)? {
                    Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
                    Value::String(s) => s.parse().map_err(|_| bad()),
                    _ => Err(bad()),
                }
            };
            let den = part("den")?;
            if den == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(part("num")?, den))
        }
        _ => Err(bad()),
    }
}

/// A square matrix given as rows whose entries are integers, `"a/b"` strings or `{"num","den"}` objects.
pub fn parse_matrix(value: &Value) -> Result<Vec<Vec<BigRational>>> {
    let rows = value.as_array().ok_or_else(|| Error::Precondition("matrix must be a list of rows".into()))?;
    let out = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(|| Error::Precondition("matrix rows must be lists".into()))?.iter().map(parse_rational).collect())
        .collect::<Result<Vec<Vec<BigRational>>>>()?;
    if out.iter().any(|r| r.len() != out.len()) {
        return Err(Error::Precondition("matrix must be square".into()));
    }
    Ok(out)
}

pub fn parse_primes(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::Precondition(format!("bad prime `{t}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qform::arith::rat;
    use serde_json::json;

    #[test]
    fn forms_round_trip() {
        let q = load_form(r#"{"n": 2, "hessian": [[2, 1], [1, 2]]}"#).unwrap();
        assert_eq!(q, load_form("[[2,1],[1,2]]").unwrap());
        assert_eq!(parse_form(serde_json::to_value(&q).unwrap()).unwrap(), q);
        assert!(load_form(r#"{"n": 2, "hessian": [[1, 0], [0, 2]]}"#).is_err());
        assert!(load_form("{not json").is_err());
        assert!(load_form("/nonexistent/form.json").is_err());
        assert_eq!(load_form(r#"{"n": 3, "hessian": [[2]]}"#), Err(Error::DimensionMismatch { expected: 3, found: 1 }));
    }

    #[test]
    fn matrices_and_primes() {
        let m = parse_matrix(&json!([[1, "1/2"], [{"num": -3, "den": 4}, "7"]])).unwrap();
        assert_eq!(m, vec![vec![rat(1, 1), rat(1, 2)], vec![rat(-3, 4), rat(7, 1)]]);
        assert!(parse_matrix(&json!([[1, 2]])).is_err());
        assert!(parse_matrix(&json!([["1/0"]])).is_err());
        assert_eq!(parse_primes("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert!(parse_primes("3,x").is_err());
    }
}
