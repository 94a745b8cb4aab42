//! Scalar abstraction for densities, masses and matrix data.
//!
//! Every quantity this crate reports is a ratio of two counts, so a scalar
//! only has to be a field that can be built from such a ratio. The exact
//! instantiation is [`Rational`](crate::Rational); `f64` and `f32` exist for
//! plotting and quick looks.

use std::fmt::{self, Debug};
use std::ops::{Add, Div, Mul, Rem, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Field-like scalar usable by every generic computation in the crate.
pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync {
    /// `num / den` for non-negative counts. `den` must be non-zero.
    fn from_ratio(num: u64, den: u64) -> Self;

    fn from_count(n: u64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn to_f64(&self) -> f64;

    /// Nearest value to an exact rational.
    fn from_rational(x: &BigRational) -> Self;

    /// Whether arithmetic in this scalar is exact.
    fn is_exact() -> bool;
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(x: &BigRational) -> Self {
        ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn from_rational(x: &BigRational) -> Self {
        ToPrimitive::to_f32(x).unwrap_or(f32::NAN)
    }

    fn is_exact() -> bool {
        false
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_rational(x: &BigRational) -> Self {
        x.clone()
    }

    fn is_exact() -> bool {
        true
    }
}

/// Exact rational that serializes as its `p/q` string.
///
/// Report structs are generic over the scalar; instantiating them at
/// `Fraction` makes them directly serializable without losing exactness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub BigRational);

impl Fraction {
    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl From<BigRational> for Fraction {
    fn from(x: BigRational) -> Self {
        Fraction(x)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fraction_string(&self.0))
    }
}

macro_rules! fraction_op {
    ($tr:ident, $f:ident) => {
        impl $tr for Fraction {
            type Output = Fraction;
            fn $f(self, rhs: Fraction) -> Fraction {
                Fraction($tr::$f(self.0, rhs.0))
            }
        }
    };
}

fraction_op!(Add, add);
fraction_op!(Sub, sub);
fraction_op!(Mul, mul);
fraction_op!(Div, div);
fraction_op!(Rem, rem);

impl Zero for Fraction {
    fn zero() -> Self {
        Fraction(BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Fraction {
    fn one() -> Self {
        Fraction(BigRational::one())
    }
}

impl Num for Fraction {
    type FromStrRadixErr = <BigRational as Num>::FromStrRadixErr;

    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(Fraction)
    }
}

impl Scalar for Fraction {
    fn from_ratio(num: u64, den: u64) -> Self {
        Fraction(BigRational::from_ratio(num, den))
    }

    fn to_f64(&self) -> f64 {
        Scalar::to_f64(&self.0)
    }

    fn from_rational(x: &BigRational) -> Self {
        Fraction(x.clone())
    }

    fn is_exact() -> bool {
        true
    }
}

impl Serialize for Fraction {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        s.serialize_str(&fraction_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_fraction(&s)
            .map(Fraction)
            .ok_or_else(|| serde::de::Error::custom(format!("not a fraction: {s}")))
    }
}

/// Canonical text form of an exact rational: `p/q` in lowest terms, `p/1` for integers.
pub fn fraction_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses the `p/q` form written by [`fraction_string`] (a bare integer is accepted).
pub fn parse_fraction(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Decimal rendering with 12 significant digits. Display only, never canonical.
pub fn decimal_string(x: &BigRational) -> String {
    let v = Scalar::to_f64(x);
    if v == 0.0 {
        return "0".to_string();
    }
    let digits = 12i32;
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    let s = format!("{:.*}", decimals, v);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Determinant of a square matrix by Gaussian elimination over the scalar field.
pub fn determinant<S: Scalar>(rows: &[Vec<S>]) -> S {
    let n = rows.len();
    let mut a: Vec<Vec<S>> = rows.to_vec();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return S::zero();
        };
        if p != col {
            a.swap(p, col);
            det = S::zero() - det;
        }
        let pv = a[col][col].clone();
        det = det * pv.clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / pv.clone();
            let (top, rest) = a.split_at_mut(r);
            for (x, p) in rest[0].iter_mut().zip(&top[col]).skip(col) {
                *x = x.clone() - p.clone() * factor.clone();
            }
        }
    }
    det
}
#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn fraction_text_round_trips() {
        for x in [q(19, 27), q(0, 1), q(-3, 4), q(6, 3)] {
            assert_eq!(parse_fraction(&fraction_string(&x)), Some(x));
        }
        assert_eq!(fraction_string(&q(6, 3)), "2/1");
        assert_eq!(parse_fraction("7"), Some(q(7, 1)));
        assert_eq!(parse_fraction("1/0"), None);
    }

    #[test]
    fn decimal_has_twelve_significant_digits() {
        assert_eq!(decimal_string(&q(1, 3)), "0.333333333333");
        assert_eq!(decimal_string(&q(19, 27)), "0.703703703704");
        assert_eq!(decimal_string(&q(5, 1)), "5");
    }

    #[test]
    fn determinant_matches_hand_values() {
        let m = vec![vec![q(2, 1), q(0, 1)], vec![q(1, 1), q(3, 1)]];
        assert_eq!(determinant(&m), q(6, 1));
        let singular = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert_eq!(determinant(&singular), q(0, 1));
        let swap = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]];
        assert_eq!(determinant(&swap), q(-1, 1));
        let f = vec![vec![2.0f64, 0.0], vec![1.0, 3.0]];
        assert!((determinant(&f) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn fraction_scalar_serializes_as_text() {
        let x = Fraction::from_ratio(10, 15);
        assert_eq!(serde_json::to_string(&x).unwrap(), "\"2/3\"");
        let back: Fraction = serde_json::from_str("\"2/3\"").unwrap();
        assert_eq!(back, x);
        let det = determinant(&[vec![Fraction::from_count(2), Fraction::zero()], vec![Fraction::one(), Fraction::from_count(3)]]);
        assert_eq!(det.to_string(), "6/1");
    }
}
