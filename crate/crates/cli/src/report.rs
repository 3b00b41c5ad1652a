//! JSON rendering of exact values.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use qform::densities::RealValue;
use qform::QuadraticForm;
use serde_json::{json, Value};

const DECIMAL_DIGITS: usize = 15;

/// Integers that fit in `i64` become JSON numbers, larger ones strings.
pub fn int(n: &BigInt) -> Value {
    n.to_i64().map_or_else(|| Value::String(n.to_string()), Value::from)
}

/// `r` rounded toward zero to `digits` places.
pub fn decimal(r: &BigRational, digits: usize) -> String {
    let (whole, mut rem) = r.numer().abs().div_rem(r.denom());
    let mut s = String::new();
    if r.is_negative() {
        s.push('-');
    }
    s.push_str(&whole.to_string());
    if !rem.is_zero() {
        s.push('.');
        for _ in 0..digits {
            rem *= 10;
            let (d, r2) = rem.div_rem(r.denom());
            s.push_str(&d.to_string());
            rem = r2;
            if rem.is_zero() {
                break;
            }
        }
    }
    s
}

pub fn rational(r: &BigRational) -> Value {
    json!({"num": int(r.numer()), "den": int(r.denom()), "decimal": decimal(r, DECIMAL_DIGITS)})
}

/// `coefficient · √radicand · π^pi_exp`, with `pi_exp` possibly a half integer.
pub fn real(v: &RealValue) -> Value {
    let c = &v.coefficient;
    let pi_exp = if v.pi_halves % 2 == 0 { json!(v.pi_halves / 2) } else { json!(v.pi_halves as f64 / 2.0) };
    json!({
        "num": int(c.numer()),
        "den": int(c.denom()),
        "radicand": int(&v.radicand),
        "pi_exp": pi_exp,
        "exact": v.is_rational(),
        "decimal": v.as_rational().map_or_else(|| v.to_f64().to_string(), |r| decimal(&r, DECIMAL_DIGITS)),
    })
}

pub fn form(q: &QuadraticForm) -> Value {
    serde_json::to_value(q).expect("forms serialize")
}
