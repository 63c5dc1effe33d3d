//! Scalar tower used throughout the crate.
//!
//! Amplitudes, pencil entries and eigenvalues are either exact Gaussian
//! rationals (pairs of arbitrary-precision rationals) or approximate complex
//! doubles. Arithmetic between two exact values stays exact; as soon as an
//! approximate value enters an expression the result is approximate. The
//! extended scalar [`ExtScalar`] adds the point at infinity so eigenvalues of
//! singular pencils and Moebius images live in one type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as DeError;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of the field of Gaussian rationals `Q(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// Real rational `p/q`. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        GaussRational {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn add(&self, other: &Self) -> Self {
        GaussRational::new(&self.re + &other.re, &self.im + &other.im)
    }

    fn sub(&self, other: &Self) -> Self {
        GaussRational::new(&self.re - &other.re, &self.im - &other.im)
    }

    fn mul(&self, other: &Self) -> Self {
        GaussRational::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    fn neg(&self) -> Self {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRational::new(&self.re / &norm, -(&self.im / &norm)))
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// A complex scalar, exact when possible.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(GaussRational),
    Approx(Complex64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(GaussRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(GaussRational::from_int(n))
    }

    /// Exact real rational `p/q`. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(GaussRational::from_ratio(p, q))
    }

    /// Exact Gaussian rational `p/q + r/s i`.
    pub fn from_ratios(p: i64, q: i64, r: i64, s: i64) -> Self {
        Scalar::Exact(GaussRational::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::new(BigInt::from(r), BigInt::from(s)),
        ))
    }

    pub fn approx(re: f64, im: f64) -> Self {
        Scalar::Approx(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Approx(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Approx(c) => *c,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Multiplicative inverse. Fails on zero.
    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(g) => g
                .inv()
                .map(Scalar::Exact)
                .ok_or(Error::Singular("scalar zero")),
            Scalar::Approx(c) => {
                if self.is_zero() {
                    Err(Error::Singular("scalar zero"))
                } else {
                    Ok(Scalar::Approx(c.inv()))
                }
            }
        }
    }
}

impl PartialEq for Scalar {
    /// Structural equality: exact and approximate values never compare equal
    /// even when they denote the same number. Use [`approx_eq`] for tolerant
    /// comparison.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Approx(a), Scalar::Approx(b)) => a == b,
            _ => false,
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $exact:ident, $cx:expr) => {
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$exact(b)),
                    _ => {
                        let f: fn(Complex64, Complex64) -> Complex64 = $cx;
                        Scalar::Approx(f(self.to_complex(), rhs.to_complex()))
                    }
                }
            }
        }

        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, add, |a, b| a + b);
scalar_binop!(Sub, sub, sub, |a, b| a - b);
scalar_binop!(Mul, mul, mul, |a, b| a * b);

impl<'b> Div<&'b Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; callers guard pivots explicitly.
    fn div(self, rhs: &'b Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                let inv = b.inv().expect("division by zero scalar");
                Scalar::Exact(a.mul(&inv))
            }
            _ => Scalar::Approx(self.to_complex() / rhs.to_complex()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        (&self) / (&rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.neg()),
            Scalar::Approx(c) => Scalar::Approx(-c),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Approx(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", c.re)
                } else if c.re == 0.0 {
                    write!(f, "{}i", c.im)
                } else if c.im < 0.0 {
                    write!(f, "{}{}i", c.re, c.im)
                } else {
                    write!(f, "{}+{}i", c.re, c.im)
                }
            }
        }
    }
}

/// A point of the extended complex plane `C* = C + {inf}`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtScalar {
    Finite(Scalar),
    Infinity,
}

impl ExtScalar {
    pub fn from_int(n: i64) -> Self {
        ExtScalar::Finite(Scalar::from_int(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        ExtScalar::Finite(Scalar::from_ratio(p, q))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtScalar::Infinity)
    }

    pub fn is_exact(&self) -> bool {
        match self {
            ExtScalar::Finite(s) => s.is_exact(),
            ExtScalar::Infinity => true,
        }
    }

    pub fn as_finite(&self) -> Option<&Scalar> {
        match self {
            ExtScalar::Finite(s) => Some(s),
            ExtScalar::Infinity => None,
        }
    }

    /// Total order on `C*`: finite values lexicographically by
    /// (real part, imaginary part), infinity greater than everything.
    pub fn cstar_cmp(&self, other: &ExtScalar) -> Ordering {
        match (self, other) {
            (ExtScalar::Infinity, ExtScalar::Infinity) => Ordering::Equal,
            (ExtScalar::Infinity, _) => Ordering::Greater,
            (_, ExtScalar::Infinity) => Ordering::Less,
            (ExtScalar::Finite(a), ExtScalar::Finite(b)) => match (a, b) {
                (Scalar::Exact(x), Scalar::Exact(y)) => {
                    x.re.cmp(&y.re).then_with(|| x.im.cmp(&y.im))
                }
                _ => {
                    let x = a.to_complex();
                    let y = b.to_complex();
                    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
                }
            },
        }
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtScalar::Finite(s) => write!(f, "{s}"),
            ExtScalar::Infinity => write!(f, "inf"),
        }
    }
}

/// Tolerant comparison on `C*`: infinity only equals infinity, finite values
/// match when `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: &ExtScalar, b: &ExtScalar, tol: f64) -> bool {
    match (a, b) {
        (ExtScalar::Infinity, ExtScalar::Infinity) => true,
        (ExtScalar::Infinity, _) | (_, ExtScalar::Infinity) => false,
        (ExtScalar::Finite(x), ExtScalar::Finite(y)) => {
            if let (Scalar::Exact(gx), Scalar::Exact(gy)) = (x, y) {
                if gx == gy {
                    return true;
                }
            }
            let cx = x.to_complex();
            let cy = y.to_complex();
            let scale = 1f64.max(cx.norm()).max(cy.norm());
            (cx - cy).norm() <= tol * scale
        }
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued-fraction convergents.
fn best_rational(x: f64, max_den: u64) -> Option<(i64, u64)> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (1, 0, 0, 1);
    let mut val = x;
    for _ in 0..64 {
        let a = val.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p0 + p1;
        let q2 = ai * q0 + q1;
        if q2 > max_den as i128 {
            break;
        }
        p1 = p0;
        q1 = q0;
        p0 = p2;
        q0 = q2;
        let frac = val - a;
        if frac.abs() < 1e-15 {
            break;
        }
        val = 1.0 / frac;
    }
    if q0 == 0 {
        return None;
    }
    Some((i64::try_from(p0).ok()?, u64::try_from(q0).ok()?))
}

/// Snap an approximate complex number to a nearby Gaussian rational with both
/// denominators at most `max_den`, if one lies within `tol * max(1, |z|)`.
pub fn snap_to_gauss_rational(z: Complex64, tol: f64, max_den: u64) -> Option<GaussRational> {
    let (pr, qr) = best_rational(z.re, max_den)?;
    let (pi, qi) = best_rational(z.im, max_den)?;
    let cand = GaussRational::new(
        BigRational::new(BigInt::from(pr), BigInt::from(qr)),
        BigRational::new(BigInt::from(pi), BigInt::from(qi)),
    );
    let dist = (cand.to_complex() - z).norm();
    if dist <= tol * 1f64.max(z.norm()) {
        Some(cand)
    } else {
        None
    }
}

fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::InvalidStructure(format!("malformed rational `{s}`"));
    let mut parts = s.splitn(2, '/');
    let numer = BigInt::from_str(parts.next().ok_or_else(err)?.trim()).map_err(|_| err())?;
    let denom = match parts.next() {
        Some(d) => BigInt::from_str(d.trim()).map_err(|_| err())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(numer, denom))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Scalar", 2)?;
        match self {
            Scalar::Exact(g) => {
                st.serialize_field("re", &format_rational(&g.re))?;
                st.serialize_field("im", &format_rational(&g.im))?;
            }
            Scalar::Approx(c) => {
                st.serialize_field("re", &c.re)?;
                st.serialize_field("im", &c.im)?;
            }
        }
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawPart {
    Exact(String),
    Approx(f64),
}

#[derive(Deserialize)]
struct RawScalar {
    re: RawPart,
    im: RawPart,
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawScalar::deserialize(deserializer)?;
        match (raw.re, raw.im) {
            (RawPart::Exact(re), RawPart::Exact(im)) => Ok(Scalar::Exact(GaussRational::new(
                parse_rational(&re).map_err(D::Error::custom)?,
                parse_rational(&im).map_err(D::Error::custom)?,
            ))),
            (RawPart::Approx(re), RawPart::Approx(im)) => Ok(Scalar::approx(re, im)),
            _ => Err(D::Error::custom(
                "scalar parts must be both exact strings or both numbers",
            )),
        }
    }
}

impl Serialize for ExtScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtScalar::Infinity => serializer.serialize_str("inf"),
            ExtScalar::Finite(s) => s.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ExtScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum RawExt {
            Tag(String),
            Value(Scalar),
        }
        match RawExt::deserialize(deserializer)? {
            RawExt::Tag(s) if s == "inf" => Ok(ExtScalar::Infinity),
            RawExt::Tag(s) => Err(D::Error::custom(format!("unknown scalar tag `{s}`"))),
            RawExt::Value(v) => Ok(ExtScalar::Finite(v)),
        }
    }
}
