use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::roots::DEFAULT_CLUSTER_TOL;
use crate::error::{Error, Result};
use crate::scalar::{cx_is_negligible, Real};
use crate::sphere::SpherePoint;

/// Ratio of complex polynomials in canonical form.
///
/// The denominator is monic. In exact mode numerator and denominator are
/// also coprime, so structural equality is equality of functions. The point
/// at infinity is never stored; it is reached through the `w = 1/z` chart.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction<R: Real> {
    num: Polynomial<R>,
    den: Polynomial<R>,
}

impl<R: Real> RationalFunction<R> {
    pub fn new(num: Polynomial<R>, den: Polynomial<R>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(mut num: Polynomial<R>, mut den: Polynomial<R>) -> Self {
        if num.is_zero() {
            return Self { num, den: Polynomial::one() };
        }
        if R::EXACT && den.degree() > 0 {
            let g = num.gcd(&den);
            if g.degree() > 0 {
                num = num.exact_div(&g).expect("gcd divides");
                den = den.exact_div(&g).expect("gcd divides");
            }
        }
        let inv = Complex::<R>::one() / den.leading();
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: Polynomial<R>) -> Self {
        Self::normalized(p, Polynomial::one())
    }

    pub fn constant(c: Complex<R>) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    pub fn z() -> Self {
        Self::from_poly(Polynomial::z())
    }

    /// `c z^n` for any integer `n`.
    pub fn monomial(c: Complex<R>, n: i64) -> Self {
        if n >= 0 {
            Self::from_poly(Polynomial::monomial(c, n as usize))
        } else {
            Self::normalized(Polynomial::constant(c), Polynomial::monomial(Complex::one(), (-n) as usize))
        }
    }

    pub fn num(&self) -> &Polynomial<R> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<R> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Degree as a map of the sphere: `max(deg num, deg den)`.
    pub fn map_degree(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn to_f64(&self) -> RationalFunction<f64> {
        RationalFunction { num: self.num.to_f64(), den: self.den.to_f64() }
    }

    /// Value at a finite point; `None` at a pole.
    pub fn eval(&self, z: &Complex<R>) -> Option<Complex<R>> {
        let d = self.den.eval(z);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(z) / d)
    }

    /// Extended evaluation on the Riemann sphere.
    pub fn eval_sphere(&self, p: &SpherePoint<R>) -> SpherePoint<R> {
        match p {
            SpherePoint::Finite(z) => {
                let d = self.den.eval(z);
                let tol = DEFAULT_CLUSTER_TOL * self.den.norm_inf().max(1.0);
                if cx_is_negligible(&d, tol) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.num.eval(z) / d)
                }
            }
            SpherePoint::Infinity => {
                if self.num.is_zero() {
                    return SpherePoint::Finite(Complex::zero());
                }
                let (dn, dd) = (self.num.degree(), self.den.degree());
                if dn > dd {
                    SpherePoint::Infinity
                } else if dn < dd {
                    SpherePoint::Finite(Complex::zero())
                } else {
                    SpherePoint::Finite(self.num.leading() / self.den.leading())
                }
            }
        }
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::normalized(n, d)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    pub fn powi(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(Self::normalized(base.num.pow(e), base.den.pow(e)))
    }

    pub fn conj_coeffs(&self) -> Self {
        Self::normalized(self.num.conj(), self.den.conj())
    }

    /// The antipodal reflection `z -> conj(r(-1/conj z))`, again a rational
    /// function of `z`.
    pub fn antipodal_reflect(&self) -> Self {
        let (dn, dd) = (self.num.degree() as i64, self.den.degree() as i64);
        let base = Self::normalized(self.num.antipodal_reverse(), self.den.antipodal_reverse());
        if self.num.is_zero() {
            return base;
        }
        &base * &Self::monomial(Complex::one(), dd - dn)
    }

    /// Zero order at `p` (positive), pole order (negative) or 0.
    pub fn order_at(&self, p: &SpherePoint<R>) -> Result<i64> {
        self.order_at_tol(p, DEFAULT_CLUSTER_TOL)
    }

    pub fn order_at_tol(&self, p: &SpherePoint<R>, tol: f64) -> Result<i64> {
        if self.num.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        match p {
            SpherePoint::Infinity => Ok(self.den.degree() as i64 - self.num.degree() as i64),
            SpherePoint::Finite(z) => {
                let zeros = self.num.root_multiplicity(z, tol) as i64;
                let poles = self.den.root_multiplicity(z, tol) as i64;
                Ok(zeros - poles)
            }
        }
    }

    /// Coefficient of `(z - p)^{-1}` in the Laurent expansion at `p`.
    pub fn residue_at(&self, p: &SpherePoint<R>) -> Result<Complex<R>> {
        match p {
            SpherePoint::Infinity => Err(Error::UnsupportedPoint(
                "residue at infinity: use residue_at_infinity or the 1/z chart".into(),
            )),
            SpherePoint::Finite(z) => Ok(self.residue_at_finite(z)),
        }
    }

    pub fn residue_at_finite(&self, p: &Complex<R>) -> Complex<R> {
        if self.num.is_zero() {
            return Complex::zero();
        }
        let m = self.den.root_multiplicity(p, DEFAULT_CLUSTER_TOL);
        if m == 0 {
            return Complex::zero();
        }
        let mut q = self.den.clone();
        for _ in 0..m {
            q = super::poly::synthetic_division(&q, p).0;
        }
        // r = num / ((z-p)^m q); residue = [t^{m-1}] num(p+t)/q(p+t).
        let n = self.num.taylor_shift(p);
        let d = q.taylor_shift(p);
        let series = series_quotient(&n, &d, m);
        series[m - 1].clone()
    }

    /// Residue at infinity, `-Res_{w=0} r(1/w)/w^2`.
    pub fn residue_at_infinity(&self) -> Complex<R> {
        let chart = self.infinity_chart();
        let w2 = Self::monomial(Complex::one(), -2);
        -(&chart * &w2).residue_at_finite(&Complex::zero())
    }

    /// `r(1/w)` as a rational function of `w`.
    pub fn infinity_chart(&self) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let rev = |p: &Polynomial<R>| {
            let mut c = p.coeffs().to_vec();
            c.reverse();
            Polynomial::new(c)
        };
        let (dn, dd) = (self.num.degree() as i64, self.den.degree() as i64);
        let base = Self::normalized(rev(&self.num), rev(&self.den));
        &base * &Self::monomial(Complex::one(), dd - dn)
    }

    /// Identity test for exact data. The numerator is evaluated at
    /// `deg + 1` distinct integers; a polynomial of degree `d` vanishing at
    /// `d + 1` points is zero.
    pub fn is_identically_zero(&self) -> Result<bool> {
        if !R::EXACT {
            return Err(Error::RequiresExactMode);
        }
        let n = self.num.coeffs().len();
        Ok((0..n.max(1)).all(|k| {
            let z = Complex::new(R::from_i64(k as i64), R::zero());
            self.num.eval(&z).is_zero()
        }))
    }
}

impl RationalFunction<f64> {
    pub fn eval_f64(&self, z: Complex<f64>) -> Complex<f64> {
        self.num.eval_f64(z) / self.den.eval_f64(z)
    }
}

/// First `terms` coefficients of the power series `n(t)/d(t)`, `d(0) != 0`.
fn series_quotient<R: Real>(n: &Polynomial<R>, d: &Polynomial<R>, terms: usize) -> Vec<Complex<R>> {
    let d0 = d.coeff(0);
    let mut out: Vec<Complex<R>> = Vec::with_capacity(terms);
    for j in 0..terms {
        let mut acc = n.coeff(j);
        for i in 1..=j {
            acc = acc - d.coeff(i) * out[j - i].clone();
        }
        out.push(acc / d0.clone());
    }
    out
}

impl<R: Real> Add for &RationalFunction<R> {
    type Output = RationalFunction<R>;
    fn add(self, rhs: Self) -> RationalFunction<R> {
        if self.den == rhs.den {
            return RationalFunction::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::normalized(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl<R: Real> Sub for &RationalFunction<R> {
    type Output = RationalFunction<R>;
    fn sub(self, rhs: Self) -> RationalFunction<R> {
        self + &(-rhs)
    }
}

impl<R: Real> Mul for &RationalFunction<R> {
    type Output = RationalFunction<R>;
    fn mul(self, rhs: Self) -> RationalFunction<R> {
        RationalFunction::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by the zero function; see [`RationalFunction::checked_div`].
impl<R: Real> Div for &RationalFunction<R> {
    type Output = RationalFunction<R>;
    fn div(self, rhs: Self) -> RationalFunction<R> {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl<R: Real> Neg for &RationalFunction<R> {
    type Output = RationalFunction<R>;
    fn neg(self) -> RationalFunction<R> {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<R: Real> $tr for RationalFunction<R> {
            type Output = RationalFunction<R>;
            fn $m(self, rhs: Self) -> RationalFunction<R> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<R: Real> Neg for RationalFunction<R> {
    type Output = RationalFunction<R>;
    fn neg(self) -> RationalFunction<R> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx_int, Real};
    use crate::ExactRational as Q;
    use num_rational::BigRational;

    fn parse(s: &str) -> Q {
        s.parse().unwrap()
    }

    fn pt(re: i64, im: i64) -> SpherePoint<BigRational> {
        SpherePoint::Finite(cx_int(re, im))
    }

    #[test]
    fn order_examples() {
        assert_eq!(parse("1/(z-1)").order_at(&pt(1, 0)).unwrap(), -1);
        assert_eq!(parse("z^3/(z+1)").order_at(&SpherePoint::Infinity).unwrap(), -2);
        assert_eq!(parse("(z^2+1)^2").order_at(&pt(0, 1)).unwrap(), 2);
        assert_eq!(Q::zero().order_at(&pt(0, 0)), Err(Error::IdenticallyZero));
    }

    #[test]
    fn residue_examples() {
        let half = BigRational::parse_literal("1/2").unwrap();
        assert_eq!(parse("1/z").residue_at(&pt(0, 0)).unwrap(), cx_int(1, 0));
        // partial fractions: 1/((z-1)(z+1)) = (1/2)/(z-1) - (1/2)/(z+1)
        assert_eq!(
            parse("1/((z-1)*(z+1))").residue_at(&pt(1, 0)).unwrap(),
            Complex::new(half.clone(), BigRational::zero())
        );
        // limit (z - i) z/(z^2+1) = i/(2i)
        assert_eq!(
            parse("z/(z^2+1)").residue_at(&pt(0, 1)).unwrap(),
            Complex::new(half, BigRational::zero())
        );
        assert!(matches!(
            parse("1/z").residue_at(&SpherePoint::Infinity),
            Err(Error::UnsupportedPoint(_))
        ));
    }

    #[test]
    fn residue_of_double_pole() {
        // z^2/(z-1)^2 = 1 + 2/(z-1) + 1/(z-1)^2
        assert_eq!(parse("z^2/(z-1)^2").residue_at(&pt(1, 0)).unwrap(), cx_int(2, 0));
    }

    #[test]
    fn residue_at_infinity_of_one_over_z() {
        assert_eq!(parse("1/z").residue_at_infinity(), cx_int(-1, 0));
        assert_eq!(parse("z^2").residue_at_infinity(), cx_int(0, 0));
    }

    #[test]
    fn identically_zero() {
        assert!(parse("(z^2-1) - (z-1)*(z+1)").is_identically_zero().unwrap());
        assert!(!parse("z^2 - z").is_identically_zero().unwrap());
        let approx: RationalFunction<f64> = "z".parse().unwrap();
        assert_eq!(approx.is_identically_zero(), Err(Error::RequiresExactMode));
    }

    #[test]
    fn normal_form_is_canonical() {
        assert_eq!(parse("(2*z-2)/(4*z^2-4)"), parse("(1/2)/(z+1)"));
        assert_eq!(parse("(z^2-1)/(z-1)"), parse("z+1"));
    }

    #[test]
    fn antipodal_reflection_of_z() {
        // conj(-1/conj z) = -1/z
        assert_eq!(Q::z().antipodal_reflect(), parse("-1/z"));
        let r = parse("(z-(2+1i))/((3+0i)*z+(0+1i))");
        assert_eq!(r.antipodal_reflect().antipodal_reflect(), r);
    }

    #[test]
    fn extended_evaluation() {
        let r = parse("z^2/(z-1)");
        assert_eq!(r.eval_sphere(&pt(1, 0)), SpherePoint::Infinity);
        assert_eq!(r.eval_sphere(&SpherePoint::Infinity), SpherePoint::Infinity);
        assert_eq!(parse("(2*z+1)/(z-3)").eval_sphere(&SpherePoint::Infinity), pt(2, 0));
    }
}
