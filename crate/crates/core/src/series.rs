//! Exact rational scalars and truncated formal power series in `q`.
//!
//! A [`QSeries`] holds the coefficients `c_0, c_1, ..., c_N` of
//! `c_0 + c_1 q + ... + c_N q^N`. Binary operations never fail on a
//! truncation mismatch: the result is truncated to the smaller of the two.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::IntPoly;

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

pub fn rat(numer: i64, denom: i64) -> ExactRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: impl Into<BigInt>) -> ExactRational {
    BigRational::from_integer(n.into())
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &ExactRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            let q = BigInt::from_str(q.trim()).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("{t:?}: zero denominator")));
            }
            BigRational::new(p, q)
        }
        None => BigRational::from_integer(
            BigInt::from_str(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?,
        ),
    };
    Ok(parsed)
}

/// Least common multiple of the denominators of `xs` (1 for an empty slice).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a ExactRational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Truncated power series `c_0 + c_1 q + ... + c_N q^N` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<ExactRational>,
}

impl QSeries {
    pub fn zero(truncation: usize) -> Self {
        QSeries {
            coeffs: vec![BigRational::zero(); truncation + 1],
        }
    }

    pub fn one(truncation: usize) -> Self {
        Self::constant(BigRational::one(), truncation)
    }

    pub fn constant(c: ExactRational, truncation: usize) -> Self {
        let mut s = Self::zero(truncation);
        s.coeffs[0] = c;
        s
    }

    /// `c q^exponent`, which is the zero series when `exponent > truncation`.
    pub fn monomial(c: ExactRational, exponent: usize, truncation: usize) -> Self {
        let mut s = Self::zero(truncation);
        if exponent <= truncation {
            s.coeffs[exponent] = c;
        }
        s
    }

    /// Builds a series from its coefficient list; the truncation is
    /// `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<ExactRational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a series needs at least the constant coefficient"));
        }
        Ok(QSeries { coeffs })
    }

    pub fn from_integers<I, T>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::from_coeffs(coeffs.into_iter().map(|c| int(c.into())).collect())
    }

    /// Builds `c_0 + Σ_{n=1}^{N} f(n) q^n`.
    pub fn from_fn(truncation: usize, constant: ExactRational, f: impl Fn(usize) -> ExactRational) -> Self {
        let mut coeffs = Vec::with_capacity(truncation + 1);
        coeffs.push(constant);
        coeffs.extend((1..=truncation).map(f));
        QSeries { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &ExactRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ExactRational> {
        self.coeffs
    }

    pub fn truncate(&self, truncation: usize) -> QSeries {
        let n = truncation.min(self.truncation());
        QSeries {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The same series with its constant term replaced by zero.
    pub fn without_constant(&self) -> QSeries {
        let mut s = self.clone();
        s.coeffs[0] = BigRational::zero();
        s
    }

    pub fn scale(&self, c: &ExactRational) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.truncation());
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Adds `c * other` in place, truncating `self` to the common length.
    pub fn add_scaled(&mut self, c: &ExactRational, other: &QSeries) {
        let n = self.truncation().min(other.truncation());
        self.coeffs.truncate(n + 1);
        if c.is_zero() {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    /// Smallest exponent at which the two series differ, compared up to the
    /// common truncation.
    pub fn first_difference(&self, other: &QSeries) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .position(|(a, b)| a != b)
    }

    /// True when the series agree on every exponent `1..=N` of the common
    /// truncation. Constant terms are not compared.
    pub fn eq_positive(&self, other: &QSeries) -> bool {
        self.first_difference_positive(other).is_none()
    }

    pub fn first_difference_positive(&self, other: &QSeries) -> Option<usize> {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .skip(1)
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
    }

    /// Integer coefficients, if every coefficient is integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// `D^power`, where `D = q d/dq` sends `q^n` to `n q^n`.
    pub fn apply_d(&self, power: u32) -> QSeries {
        if power == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 || c.is_zero() {
                    BigRational::zero()
                } else {
                    c * BigInt::from(n).pow(power)
                }
            })
            .collect();
        QSeries { coeffs }
    }

    /// `p(D) f = Σ_j p_j D^j f`; the coefficient of `q^n` becomes `p(n) f_n`
    /// and the constant term becomes `p(0) f_0`.
    pub fn apply_poly_in_d(&self, p: &IntPoly) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if c.is_zero() {
                    BigRational::zero()
                } else {
                    c * p.eval(&BigInt::from(n))
                }
            })
            .collect();
        QSeries { coeffs }
    }

    /// Cauchy product, computed over a common denominator so that the inner
    /// loop only touches integers.
    pub fn mul_series(&self, other: &QSeries) -> QSeries {
        let n = self.truncation().min(other.truncation());
        let (fa, da) = integral_parts(&self.coeffs[..=n]);
        let (fb, db) = integral_parts(&other.coeffs[..=n]);
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, a) in fa.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in fb[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        let denom = da * db;
        QSeries {
            coeffs: out
                .into_iter()
                .map(|c| BigRational::new(c, denom.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> QSeries {
        (0..e).fold(QSeries::one(self.truncation()), |acc, _| acc.mul_series(self))
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        !self.coeffs.iter().any(Signed::is_negative)
    }
}

fn integral_parts(xs: &[ExactRational]) -> (Vec<BigInt>, BigInt) {
    let d = common_denominator(xs);
    let ints = xs
        .iter()
        .map(|x| x.numer() * (&d / x.denom()))
        .collect();
    (ints, d)
}

pub fn qs_add(f: &QSeries, g: &QSeries) -> QSeries {
    f + g
}

pub fn qs_mul(f: &QSeries, g: &QSeries) -> QSeries {
    f.mul_series(g)
}

pub fn apply_d(f: &QSeries, power: u32) -> QSeries {
    f.apply_d(power)
}

pub fn apply_poly_in_d(p: &IntPoly, f: &QSeries) -> QSeries {
    f.apply_poly_in_d(p)
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let mut out = self.clone();
        out.add_scaled(&BigRational::one(), rhs);
        out
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let mut out = self.clone();
        out.add_scaled(&-BigRational::one(), rhs);
        out
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "({})q", format_rational(c))?,
                _ => write!(f, "({})q^{n}", format_rational(c))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.truncation() + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    truncation: usize,
    coeffs: Vec<String>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesWire {
            truncation: self.truncation(),
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = SeriesWire::deserialize(d)?;
        if wire.coeffs.len() != wire.truncation + 1 {
            return Err(D::Error::custom(format!(
                "truncation {} requires {} coefficients, found {}",
                wire.truncation,
                wire.truncation + 1,
                wire.coeffs.len()
            )));
        }
        let coeffs = wire
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(QSeries { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(coeffs: &[i64]) -> QSeries {
        QSeries::from_integers(coeffs.iter().copied()).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&s(&[1, 1]) + &s(&[2, 3]), s(&[3, 4]));
        let f = s(&[5, -2, 7]);
        assert_eq!(&f + &QSeries::zero(2), f);
        assert!((&s(&[0, 1]) + &s(&[0, -1])).is_zero());
    }

    #[test]
    fn add_truncates_to_minimum() {
        let sum = &s(&[1, 1, 1, 1]) + &s(&[1, 1]);
        assert_eq!(sum, s(&[2, 2]));
        assert_eq!(sum.truncation(), 1);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&s(&[1, 1, 0]) * &s(&[1, 1, 0]), s(&[1, 2, 1]));
        let f = QSeries::from_coeffs(vec![rat(1, 3), rat(-2, 5), rat(7, 2)]).unwrap();
        assert_eq!(&f * &QSeries::one(2), f);
    }

    #[test]
    fn d_examples() {
        assert_eq!(s(&[0, 1, 0, 4]).apply_d(1), s(&[0, 1, 0, 12]));
        let f = s(&[3, 1, 2]);
        assert_eq!(f.apply_d(0), f);
        assert_eq!(f.apply_d(2), s(&[0, 1, 8]));
    }

    #[test]
    fn poly_in_d_keeps_p0_on_constant() {
        let p = IntPoly::from_i64(&[2, -3, 1]);
        assert_eq!(s(&[5, 1, 1, 1]).apply_poly_in_d(&p), s(&[10, 0, 0, 2]));
        assert_eq!(s(&[5, 1, 1]).apply_poly_in_d(&IntPoly::from_i64(&[1])), s(&[5, 1, 1]));
    }

    #[test]
    fn rational_format_roundtrip() {
        for (x, text) in [(rat(5, 6), "5/6"), (rat(-7, 1), "-7"), (rat(4, 8), "1/2")] {
            assert_eq!(format_rational(&x), text);
            assert_eq!(parse_rational(text).unwrap(), x);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_wire_format() {
        let f = QSeries::from_coeffs(vec![rat(-1, 24), int(1), int(3)]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"truncation":2,"coeffs":["-1/24","1","3"]}"#);
        let back: QSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<QSeries>(r#"{"truncation":3,"coeffs":["1"]}"#).is_err());
    }

    fn small_series(n: usize) -> impl Strategy<Value = QSeries> {
        prop::collection::vec((-9i64..=9, 1i64..=6), n + 1).prop_map(|v| {
            QSeries::from_coeffs(v.into_iter().map(|(p, q)| rat(p, q)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_axioms(f in small_series(8), g in small_series(8), h in small_series(8)) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &g, &g * &f);
            prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
            prop_assert_eq!(&f + &g, &g + &f);
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        }

        #[test]
        fn leibniz_rule(f in small_series(30), g in small_series(30)) {
            let lhs = (&f * &g).apply_d(1);
            let rhs = &(&f.apply_d(1) * &g) + &(&f * &g.apply_d(1));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn d_powers_compose(f in small_series(12), p in 0u32..4, r in 0u32..4) {
            let f = f.without_constant();
            prop_assert_eq!(f.apply_d(p).apply_d(r), f.apply_d(p + r));
        }
    }
}
