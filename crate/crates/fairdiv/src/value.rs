//! Exact non-negative rationals and the extended ratio type.
//!
//! `Value` wraps a big rational kept in lowest terms with the invariant that
//! it is never negative. `Ratio` extends values with `Unbounded`, the result
//! of a fairness comparison whose constraint is vacuous (for example EF1
//! against an empty bundle); `Unbounded` compares greater than every finite
//! ratio so aggregate minima behave correctly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact non-negative rational, always in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(BigRational);

/// Error for text that does not denote a non-negative rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValueParseError {
    #[error("negative value `{0}` is not allowed")]
    Negative(String),
    #[error("`{0}` is not a rational of the form `p` or `p/q` with q >= 1")]
    Malformed(String),
}

impl Value {
    pub fn zero() -> Self {
        Value(BigRational::zero())
    }

    pub fn one() -> Self {
        Value(BigRational::one())
    }

    pub fn from_int(n: u64) -> Self {
        Value(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `num/den`. Panics if `den == 0`.
    pub fn from_fraction(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Value(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Builds `num/den` from big integers. Panics if `den` is zero.
    pub fn from_big(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Value(BigRational::new(
            BigInt::from_biguint(Sign::Plus, num),
            BigInt::from_biguint(Sign::Plus, den),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Numerator (the value is never negative, so this is a magnitude).
    pub fn numer(&self) -> BigUint {
        self.0.numer().magnitude().clone()
    }

    pub fn denom(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    pub fn checked_sub(&self, other: &Value) -> Option<Value> {
        if self >= other {
            Some(Value(&self.0 - &other.0))
        } else {
            None
        }
    }

    /// Decimal rendering with up to `sig` significant digits, trailing zeros
    /// trimmed. Display only; exact values always travel as `p/q` strings.
    pub fn to_decimal(&self, sig: u32) -> String {
        decimal_string(&self.0, sig)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

// Debug delegates to Display; the reduced fraction is the canonical form.
impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Value {
    type Err = ValueParseError;

    /// Accepts `p` or `p/q` with decimal digits and `q >= 1`. A leading `-`
    /// is reported as a negative value rather than a syntax error so that
    /// instance validation can name the real problem.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.strip_prefix('-').unwrap_or(s);
        let parse_part = |part: &str| -> Option<BigUint> {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            part.parse::<BigUint>().ok()
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => {
                let num = parse_part(n).ok_or_else(|| ValueParseError::Malformed(s.into()))?;
                let den = parse_part(d).ok_or_else(|| ValueParseError::Malformed(s.into()))?;
                if den.is_zero() {
                    return Err(ValueParseError::Malformed(s.into()));
                }
                (num, den)
            }
            None => {
                let num = parse_part(body).ok_or_else(|| ValueParseError::Malformed(s.into()))?;
                (num, BigUint::one())
            }
        };
        if s.starts_with('-') && !num.is_zero() {
            return Err(ValueParseError::Negative(s.into()));
        }
        Ok(Value::from_big(num, den))
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        Value(&self.0 + &rhs.0)
    }
}

impl Sub for &Value {
    type Output = Value;
    /// Panics if the result would be negative; callers subtract only items
    /// that belong to the bundle being reduced.
    fn sub(self, rhs: &Value) -> Value {
        self.checked_sub(rhs).expect("value subtraction underflow")
    }
}

impl Mul for &Value {
    type Output = Value;
    fn mul(self, rhs: &Value) -> Value {
        Value(&self.0 * &rhs.0)
    }
}

impl Div for &Value {
    type Output = Value;
    /// Panics on a zero divisor; ratio constructors test for zero first.
    fn div(self, rhs: &Value) -> Value {
        assert!(!rhs.is_zero(), "division by zero value");
        Value(&self.0 / &rhs.0)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        // Accept the canonical string form and, as a convenience, plain
        // non-negative JSON integers.
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(u64),
            Signed(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(DeError::custom),
            Raw::Int(n) => Ok(Value::from_int(n)),
            Raw::Signed(n) => Err(DeError::custom(ValueParseError::Negative(n.to_string()))),
        }
    }
}

/// A fairness ratio: a finite exact rational, or `Unbounded` when the
/// constraint being measured is vacuous. `Unbounded` is greater than every
/// finite ratio, and the aggregate over zero constituents is `Unbounded`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Ratio {
    Finite(Value),
    Unbounded,
}

impl Ratio {
    pub fn finite(num: u64, den: u64) -> Self {
        Ratio::Finite(Value::from_fraction(num, den))
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Ratio::Unbounded)
    }

    pub fn as_finite(&self) -> Option<&Value> {
        match self {
            Ratio::Finite(v) => Some(v),
            Ratio::Unbounded => None,
        }
    }

    /// Whether the ratio meets threshold `alpha` (`Unbounded` meets any).
    pub fn at_least(&self, alpha: &Value) -> bool {
        match self {
            Ratio::Finite(v) => v >= alpha,
            Ratio::Unbounded => true,
        }
    }

    /// Minimum of the constituents; `Unbounded` when the iterator is empty.
    pub fn aggregate<I: IntoIterator<Item = Ratio>>(parts: I) -> Ratio {
        parts
            .into_iter()
            .min()
            .unwrap_or(Ratio::Unbounded)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ratio::Unbounded, Ratio::Unbounded) => Ordering::Equal,
            (Ratio::Unbounded, Ratio::Finite(_)) => Ordering::Greater,
            (Ratio::Finite(_), Ratio::Unbounded) => Ordering::Less,
            (Ratio::Finite(a), Ratio::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v}"),
            Ratio::Unbounded => write!(f, "unbounded"),
        }
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Significant digits used for the display-only decimal rendering.
pub const DECIMAL_SIG_DIGITS: u32 = 15;

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Ratio::Unbounded => serializer.serialize_str("unbounded"),
            Ratio::Finite(v) => {
                use serde::ser::SerializeStruct;
                let mut s = serializer.serialize_struct("Ratio", 2)?;
                s.serialize_field("exact", &v.to_string())?;
                s.serialize_field("decimal", &v.to_decimal(DECIMAL_SIG_DIGITS))?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Literal(String),
            Exact { exact: String },
        }
        match Raw::deserialize(deserializer)? {
            Raw::Literal(s) if s == "unbounded" => Ok(Ratio::Unbounded),
            Raw::Literal(s) => s.parse().map(Ratio::Finite).map_err(DeError::custom),
            Raw::Exact { exact } => exact.parse().map(Ratio::Finite).map_err(DeError::custom),
        }
    }
}

/// Renders `r` with up to `sig` significant digits, rounding half away from
/// zero and trimming trailing fractional zeros.
fn decimal_string(r: &BigRational, sig: u32) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();

    // exponent e such that 10^e <= num/den < 10^(e+1)
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let pow = |k: u32| BigUint::from(10u32).pow(k);
    let scaled_ge = |e: i64| -> bool {
        // num/den >= 10^e
        if e >= 0 {
            num >= &den * pow(e as u32)
        } else {
            &num * pow((-e) as u32) >= den
        }
    };
    if scaled_ge(e + 1) {
        e += 1;
    } else if !scaled_ge(e) {
        e -= 1;
    }

    // digits = round(num/den * 10^(sig-1-e)), has exactly `sig` digits
    // unless rounding carries it to sig+1.
    let shift = sig as i64 - 1 - e;
    let (mut scaled_num, scaled_den) = if shift >= 0 {
        (&num * pow(shift as u32), den)
    } else {
        (num, &den * pow((-shift) as u32))
    };
    scaled_num = (&scaled_num * 2u32 + &scaled_den) / (&scaled_den * 2u32);
    let mut digits = scaled_num.to_string();
    if digits.len() as u32 > sig {
        digits.truncate(sig as usize);
        e += 1;
    }

    let mut out = String::new();
    if e >= 0 && (e as usize) < 30 {
        let point = e as usize + 1;
        if digits.len() <= point {
            out.push_str(&digits);
            out.extend(std::iter::repeat('0').take(point - digits.len()));
        } else {
            out.push_str(&digits[..point]);
            let frac = digits[point..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else if e < 0 && e > -10 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-e - 1) as usize));
        out.push_str(digits.trim_end_matches('0'));
    } else {
        // extreme magnitudes: fall back to exponent notation
        let frac = digits[1..].trim_end_matches('0');
        out.push_str(&digits[..1]);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "3", "1/2", "4/6", "1000", "123456789123456789/987654321"] {
            let val = v(s);
            let back: Value = val.to_string().parse().unwrap();
            assert_eq!(val, back);
        }
        assert_eq!(v("4/6").to_string(), "2/3");
    }

    #[test]
    fn parse_rejects_bad_forms() {
        for s in ["", "-1", "-1/2", "1/0", "1/-2", "a", "1.5", "1/2/3", " 1", "+1"] {
            assert!(s.parse::<Value>().is_err(), "accepted {s:?}");
        }
        assert!(matches!(
            "-3".parse::<Value>(),
            Err(ValueParseError::Negative(_))
        ));
        // -0 denotes zero; sign carries no information there
        assert_eq!(v("-0"), Value::zero());
    }

    #[test]
    fn arithmetic_matches_cross_multiplication() {
        // (a/b) + (c/d) recomputed as (ad + cb) / bd over big integers.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (a, b, c, d) = (
                rng.gen_range(0u64..1000),
                rng.gen_range(1u64..1000),
                rng.gen_range(0u64..1000),
                rng.gen_range(1u64..1000),
            );
            let sum = &Value::from_fraction(a, b) + &Value::from_fraction(c, d);
            let expect = Value::from_big(
                BigUint::from(a) * BigUint::from(d) + BigUint::from(c) * BigUint::from(b),
                BigUint::from(b) * BigUint::from(d),
            );
            assert_eq!(sum, expect);
        }
    }

    #[test]
    fn ratio_ordering_puts_unbounded_on_top() {
        let f = Ratio::finite(3, 4);
        assert!(Ratio::Unbounded > f);
        assert!(f.at_least(&v("3/4")));
        assert!(!f.at_least(&v("1")));
        assert!(Ratio::Unbounded.at_least(&v("1000000")));
        assert_eq!(Ratio::aggregate(std::iter::empty()), Ratio::Unbounded);
        assert_eq!(
            Ratio::aggregate(vec![Ratio::Unbounded, Ratio::finite(1, 2)]),
            Ratio::finite(1, 2)
        );
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(v("3/4").to_decimal(15), "0.75");
        assert_eq!(v("4/3").to_decimal(15), "1.33333333333333");
        assert_eq!(v("0").to_decimal(15), "0");
        assert_eq!(v("1").to_decimal(15), "1");
        assert_eq!(v("5/3").to_decimal(15), "1.66666666666667");
        assert_eq!(v("1/1000").to_decimal(15), "0.001");
        assert_eq!(v("2/3").to_decimal(3), "0.667");
        assert_eq!(v("1999/1000").to_decimal(3), "2");
        assert_eq!(v("123456").to_decimal(3), "123000");
    }

    #[test]
    fn serde_forms() {
        let r = Ratio::finite(3, 4);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"exact":"3/4","decimal":"0.75"}"#);
        let back: Ratio = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let u: Ratio = serde_json::from_str(r#""unbounded""#).unwrap();
        assert!(u.is_unbounded());
        assert_eq!(serde_json::to_string(&Ratio::Unbounded).unwrap(), r#""unbounded""#);
        let val: Value = serde_json::from_str("\"7/2\"").unwrap();
        assert_eq!(val, v("7/2"));
        let val: Value = serde_json::from_str("5").unwrap();
        assert_eq!(val, v("5"));
        assert!(serde_json::from_str::<Value>("-5").is_err());
    }
}
