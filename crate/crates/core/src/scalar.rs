//! Scalar abstractions shared by the exact and floating-point code paths.
//!
//! Weights and every quantity derived from them (local weights, the quadratic
//! form, stability margins, LP data) are generic over [`Real`], which is
//! implemented for [`BigRational`] (exact) and `f64`. Normal covectors live in
//! a [`Field`]: Gaussian rationals `Complex<BigRational>` or `Complex64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Gaussian rational: a complex number with exact rational parts.
pub type GaussianRational = Complex<BigRational>;

/// Whether an arrangement (and its weights) use exact or float arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    Exact,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Float => "float",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ScalarMode::Exact),
            "float" => Ok(ScalarMode::Float),
            other => Err(Error::Parse(format!("unknown scalar mode `{other}`"))),
        }
    }
}

/// Ordered real scalar used for weights and everything linear in them.
pub trait Real: Clone + Debug + PartialOrd + Num + Signed {
    const EXACT: bool;
    const MODE: ScalarMode;

    fn from_int(v: i64) -> Self;
    fn ratio(p: i64, q: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_f64_lossy(v: f64) -> Self;
    fn from_rational(q: &BigRational) -> Self;

    /// `|self| <= rel * |scale|` in float mode, `self == 0` in exact mode.
    fn is_negligible(&self, scale: &Self, rel: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs().to_f64() <= rel * scale.abs().to_f64()
        }
    }

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl Real for BigRational {
    const EXACT: bool = true;
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_f64(v).unwrap_or_else(BigRational::zero)
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_int(i))
                } else {
                    Err(Error::Parse(format!(
                        "exact mode expects rational strings \"p/q\", got {n}"
                    )))
                }
            }
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }
}

impl Real for f64 {
    const EXACT: bool = false;
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }

    fn from_rational(q: &BigRational) -> Self {
        Real::to_f64(q)
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => {
                if s.contains('/') {
                    parse_rational(s).map(|q| Real::to_f64(&q))
                } else {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad float `{s}`")))
                }
            }
            other => Err(Error::Parse(format!("expected number, got {other}"))),
        }
    }
}

/// Reduced `p/q` form; integers keep the denominator `1`.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `p/q`, `p`, and finite decimals like `-1.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let q = BigRational::new(numer, denom);
        return Ok(if neg { -q } else { q });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

/// Complex scalar field for normal covectors.
pub trait Field: Clone + Debug + Num + std::ops::Neg<Output = Self> {
    const EXACT: bool;

    fn modulus(&self) -> f64;
    fn conj(&self) -> Self;
    fn to_complex64(&self) -> Complex64;
}

impl Field for GaussianRational {
    const EXACT: bool = true;

    fn modulus(&self) -> f64 {
        Real::to_f64(&self.norm_sqr()).sqrt()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_complex64(&self) -> Complex64 {
        Complex64::new(Real::to_f64(&self.re), Real::to_f64(&self.im))
    }
}

impl Field for Complex64 {
    const EXACT: bool = false;

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_complex64(&self) -> Complex64 {
        *self
    }
}

/// Sum of a slice of reals in index order.
pub fn sum<R: Real>(values: &[R]) -> R {
    values.iter().cloned().fold(R::zero(), |acc, v| acc + v)
}

/// Maximum absolute value, zero for an empty slice.
pub fn max_abs<R: Real>(values: &[R]) -> R {
    values
        .iter()
        .map(|v| v.abs())
        .fold(R::zero(), |acc, v| if v > acc { v } else { acc })
}
