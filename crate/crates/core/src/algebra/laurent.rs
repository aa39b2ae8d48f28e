use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::scalar::{cx_to_f64, Real};

/// Finite Laurent polynomial `sum_{n=lo}^{hi} c_n z^n`.
///
/// Both ends are trimmed, so `coeff(lo)` and `coeff(hi)` are nonzero unless
/// the polynomial is zero (then `lo = hi = 0` and no coefficients are stored).
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<R: Real> {
    lo: i64,
    coeffs: Vec<Complex<R>>,
}

impl<R: Real> LaurentPoly<R> {
    pub fn new(lo: i64, mut coeffs: Vec<Complex<R>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        coeffs.drain(..lead);
        Self { lo: lo + lead as i64, coeffs }
    }

    pub fn zero() -> Self {
        Self { lo: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: Complex<R>) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(c: Complex<R>, n: i64) -> Self {
        Self::new(n, vec![c])
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex<R>)>) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (n, c)| &acc + &Self::monomial(c, n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `z^n`; zero outside `[lo, hi]`.
    pub fn coeff(&self, n: i64) -> Complex<R> {
        if n < self.lo {
            return Complex::zero();
        }
        self.coeffs
            .get((n - self.lo) as usize)
            .cloned()
            .unwrap_or_else(Complex::zero)
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Complex<R>)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i64, c))
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Substitution `z -> z^k`.
    pub fn compose_power(&self, k: u32) -> Self {
        assert!(k >= 1, "compose_power needs k >= 1");
        if self.is_zero() {
            return Self::zero();
        }
        let k = k as i64;
        let mut out = vec![Complex::zero(); ((self.coeffs.len() as i64 - 1) * k + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k as usize] = c.clone();
        }
        Self::new(self.lo * k, out)
    }

    /// `conj(L(-1/conj z))`: the coefficient of `z^{-n}` becomes
    /// `(-1)^n conj(c_n)`.
    pub fn antipodal_reflect(&self) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| {
            let v = c.conj();
            (-n, if n.rem_euclid(2) == 1 { -v } else { v })
        }))
    }

    pub fn eval(&self, z: &Complex<R>) -> Option<Complex<R>> {
        if z.is_zero() && self.lo < 0 {
            return None;
        }
        let mut acc = Complex::zero();
        for (n, c) in self.terms() {
            acc = acc + c.clone() * powi_cx(z, n);
        }
        Some(acc)
    }

    pub fn to_f64(&self) -> LaurentPoly<f64> {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(cx_to_f64).collect() }
    }

    pub fn to_rational(&self) -> RationalFunction<R> {
        if self.is_zero() {
            return RationalFunction::zero();
        }
        let poly = Polynomial::new(self.coeffs.clone());
        &RationalFunction::from_poly(poly) * &RationalFunction::monomial(Complex::one(), self.lo)
    }

    /// Inverse of [`LaurentPoly::to_rational`]; the denominator must be a monomial.
    pub fn from_rational(r: &RationalFunction<R>) -> Result<Self> {
        let den = r.den();
        let shift = den.degree();
        if den.coeffs().iter().take(shift).any(|c| !c.is_zero()) {
            return Err(Error::InvalidLaurent(
                "denominator is not a monomial; only poles at 0 and infinity are allowed".into(),
            ));
        }
        let inv = Complex::<R>::one() / den.leading();
        Ok(Self::new(
            -(shift as i64),
            r.num().coeffs().iter().map(|c| c.clone() * inv.clone()).collect(),
        ))
    }
}

impl LaurentPoly<f64> {
    pub fn eval_f64(&self, z: Complex<f64>) -> Complex<f64> {
        // Horner on the polynomial part, then shift.
        let p = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c);
        p * z.powi(self.lo as i32)
    }
}

fn powi_cx<R: Real>(z: &Complex<R>, n: i64) -> Complex<R> {
    let mut acc = Complex::one();
    for _ in 0..n.unsigned_abs() {
        acc = acc * z.clone();
    }
    if n < 0 {
        Complex::<R>::one() / acc
    } else {
        acc
    }
}

impl<R: Real> Add for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;
    fn add(self, rhs: Self) -> LaurentPoly<R> {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        LaurentPoly::new(lo, (lo..=hi).map(|n| self.coeff(n) + rhs.coeff(n)).collect())
    }
}

impl<R: Real> Neg for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;
    fn neg(self) -> LaurentPoly<R> {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<R: Real> Sub for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;
    fn sub(self, rhs: Self) -> LaurentPoly<R> {
        self + &(-rhs)
    }
}

/// Exact convolution.
impl<R: Real> Mul for &LaurentPoly<R> {
    type Output = LaurentPoly<R>;
    fn mul(self, rhs: Self) -> LaurentPoly<R> {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        LaurentPoly::new(self.lo + rhs.lo, out)
    }
}

impl<R: Real> fmt::Display for LaurentPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "(0+0i)");
        }
        let terms: Vec<(i64, &Complex<R>)> = self.terms().collect();
        let parts: Vec<String> = terms
            .into_iter()
            .rev()
            .map(|(n, c)| {
                let lit = crate::scalar::cx_literal(c);
                match n {
                    0 => lit,
                    1 => format!("{lit}*z"),
                    _ => format!("{lit}*z^{n}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
