//! Real scalar abstraction. Every algebraic type in the crate is generic over
//! a [`Real`] and stores complex coefficients as `Complex<R>`; exact mode uses
//! `BigRational` (Gaussian rationals), approximate mode uses `f64` or `f32`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub trait Real:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// True when arithmetic is exact and zero tests need no tolerance.
    const EXACT: bool;

    fn to_f64(&self) -> f64;
    /// Exact rational value of `self`. Finite floats convert without rounding.
    fn to_exact(&self) -> BigRational;
    fn from_exact(q: &BigRational) -> Self;
    /// Exact for `BigRational` (binary expansion of the float), identity for floats.
    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn abs_val(&self) -> Self;
    /// Zero test. Exact scalars ignore `tol`.
    fn is_negligible(&self, tol: f64) -> bool;
    fn is_finite_val(&self) -> bool;
    /// Text form used by the rational-function grammar; must parse back
    /// to the identical value through [`Real::parse_literal`].
    fn literal(&self) -> String;
    /// Parses `p`, `p/q` or a decimal `a.b`, with optional sign.
    fn parse_literal(s: &str) -> Option<Self>;
}

fn parse_exact_literal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        BigRational::new(p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int}{frac}").parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        BigRational::new(digits, scale)
    } else {
        BigRational::from_integer(body.parse().ok()?)
    };
    Some(if neg { -value } else { value })
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_exact(&self) -> BigRational {
        self.clone()
    }
    fn from_exact(q: &BigRational) -> Self {
        q.clone()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn is_finite_val(&self) -> bool {
        true
    }
    fn literal(&self) -> String {
        self.to_string()
    }
    fn parse_literal(s: &str) -> Option<Self> {
        parse_exact_literal(s)
    }
}

macro_rules! impl_float_real {
    ($f:ty) => {
        impl Real for $f {
            const EXACT: bool = false;

            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn to_exact(&self) -> BigRational {
                BigRational::from_float(*self).expect("finite float")
            }
            fn from_exact(q: &BigRational) -> Self {
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $f
            }
            fn from_f64(x: f64) -> Self {
                x as $f
            }
            fn from_i64(n: i64) -> Self {
                n as $f
            }
            fn abs_val(&self) -> Self {
                self.abs()
            }
            fn is_negligible(&self, tol: f64) -> bool {
                (self.abs() as f64) <= tol
            }
            fn is_finite_val(&self) -> bool {
                self.is_finite()
            }
            fn literal(&self) -> String {
                // -0 prints as "-0", which the complex literal grammar cannot carry.
                if *self == 0.0 {
                    "0".to_string()
                } else {
                    format!("{}", self)
                }
            }
            fn parse_literal(s: &str) -> Option<Self> {
                let s = s.trim();
                if s.contains('/') {
                    let q = parse_exact_literal(s)?;
                    return Some(<$f as Real>::from_exact(&q));
                }
                s.parse().ok()
            }
        }
    };
}

impl_float_real!(f64);
impl_float_real!(f32);

pub fn cx<R: Real>(re: R, im: R) -> Complex<R> {
    Complex::new(re, im)
}

pub fn cx_int<R: Real>(re: i64, im: i64) -> Complex<R> {
    Complex::new(R::from_i64(re), R::from_i64(im))
}

pub fn cx_to_f64<R: Real>(c: &Complex<R>) -> Complex<f64> {
    Complex::new(c.re.to_f64(), c.im.to_f64())
}

pub fn cx_from_f64<R: Real>(c: Complex<f64>) -> Complex<R> {
    Complex::new(R::from_f64(c.re), R::from_f64(c.im))
}

pub fn cx_to_exact<R: Real>(c: &Complex<R>) -> Complex<BigRational> {
    Complex::new(c.re.to_exact(), c.im.to_exact())
}

pub fn cx_from_exact<R: Real>(c: &Complex<BigRational>) -> Complex<R> {
    Complex::new(R::from_exact(&c.re), R::from_exact(&c.im))
}

pub fn cx_is_negligible<R: Real>(c: &Complex<R>, tol: f64) -> bool {
    c.re.is_negligible(tol) && c.im.is_negligible(tol)
}

/// `|c|^2` computed in the scalar's own arithmetic.
pub fn norm_sqr<R: Real>(c: &Complex<R>) -> R {
    c.re.clone() * c.re.clone() + c.im.clone() * c.im.clone()
}

pub fn cx_literal<R: Real>(c: &Complex<R>) -> String {
    let im_neg = c.im < R::zero();
    let im_abs = if im_neg { -c.im.clone() } else { c.im.clone() };
    format!("({}{}{}i)", c.re.literal(), if im_neg { '-' } else { '+' }, im_abs.literal())
}

pub fn cx_finite<R: Real>(c: &Complex<R>) -> bool {
    c.re.is_finite_val() && c.im.is_finite_val()
}

pub fn i_unit<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::one())
}

pub fn half<R: Real>() -> R {
    R::one() / (R::one() + R::one())
}

/// Serializes a complex scalar as its grammar literal.
pub fn ser_cx<S: serde::Serializer, R: Real>(c: &Complex<R>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&cx_literal(c))
}

pub fn ser_cx_seq<S, R, T>(v: &T, s: S) -> Result<S::Ok, S::Error>
where
    S: serde::Serializer,
    R: Real,
    T: AsRef<[Complex<R>]>,
{
    s.collect_seq(v.as_ref().iter().map(cx_literal))
}
