use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cx_is_negligible, cx_to_f64, Real};

/// Dense complex polynomial, coefficients in ascending degree.
///
/// Trailing coefficients that are exactly zero are always trimmed, so the
/// last stored coefficient is the leading one. The zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<R: Real> {
    coeffs: Vec<Complex<R>>,
}

impl<R: Real> Polynomial<R> {
    pub fn new(mut coeffs: Vec<Complex<R>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::one())
    }

    pub fn constant(c: Complex<R>) -> Self {
        Self::new(vec![c])
    }

    /// `c z^n`
    pub fn monomial(c: Complex<R>, n: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); n];
        coeffs.push(c);
        Self::new(coeffs)
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(Complex::one(), 1)
    }

    /// `z - root`
    pub fn linear(root: &Complex<R>) -> Self {
        Self::new(vec![-root.clone(), Complex::one()])
    }

    pub fn from_roots<'a>(roots: impl IntoIterator<Item = &'a Complex<R>>) -> Self {
        roots
            .into_iter()
            .fold(Self::one(), |acc, r| &acc * &Self::linear(r))
    }

    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex<R> {
        self.coeffs.get(n).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex<R> {
        self.coeffs.last().cloned().unwrap_or_else(Complex::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, z: &Complex<R>) -> Complex<R> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial::new(self.coeffs.iter().map(cx_to_f64).collect())
    }

    pub fn map<S: Real>(&self, f: impl Fn(&Complex<R>) -> Complex<S>) -> Polynomial<S> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.conj()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c.clone() * R::from_i64(n as i64))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = Complex::<R>::one() / self.leading();
        self.scale(&inv)
    }

    /// Euclidean division over the coefficient field.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let dd = divisor.degree();
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Complex::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone() / lead.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * d.clone();
            }
            // Exact cancellation of the leading term; keeps floats tidy too.
            rem[i + dd] = Complex::zero();
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Exact quotient; errors if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() && R::EXACT {
            return Err(Error::Stage {
                stage: "exact_div".into(),
                reason: "nonzero remainder".into(),
            });
        }
        Ok(q)
    }

    /// Monic greatest common divisor (Euclid). Meaningful in exact mode;
    /// floats get whatever Euclid produces.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Coefficients of `p(center + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, center: &Complex<R>) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1].clone() * center.clone();
                c[j] = c[j].clone() + t;
            }
        }
        Self::new(c)
    }

    /// Multiplicity of `point` as a root (0 when `p(point) != 0`).
    /// Exact scalars test remainders exactly; floats use `tol` relative to
    /// the coefficient scale.
    pub fn root_multiplicity(&self, point: &Complex<R>, tol: f64) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let scale = self
            .coeffs
            .iter()
            .map(|c| cx_to_f64(c).norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut p = self.clone();
        let mut m = 0;
        while p.degree() > 0 {
            let (q, r) = synthetic_division(&p, point);
            if !cx_is_negligible(&r, tol * scale) {
                break;
            }
            p = q;
            m += 1;
        }
        m
    }

    /// Coefficients of `conj(p(-1/conj(z))) * z^deg`, i.e. the reversed,
    /// conjugated polynomial with sign `(-1)^n` on the `z^{-n}` terms.
    pub fn antipodal_reverse(&self) -> Self {
        let d = self.degree();
        let mut out = vec![Complex::zero(); d + 1];
        for (n, c) in self.coeffs.iter().enumerate() {
            let v = c.conj();
            out[d - n] = if n % 2 == 1 { -v } else { v };
        }
        Self::new(out)
    }

    /// Largest coefficient modulus, as f64.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| cx_to_f64(c).norm())
            .fold(0.0, f64::max)
    }
}

/// Divides by `(z - point)`, returning quotient and remainder `p(point)`.
pub fn synthetic_division<R: Real>(p: &Polynomial<R>, point: &Complex<R>) -> (Polynomial<R>, Complex<R>) {
    let c = p.coeffs();
    if c.is_empty() {
        return (Polynomial::zero(), Complex::zero());
    }
    let mut q = vec![Complex::zero(); c.len() - 1];
    let mut acc = Complex::zero();
    for i in (0..c.len()).rev() {
        acc = acc * point.clone() + c[i].clone();
        if i > 0 {
            q[i - 1] = acc.clone();
        }
    }
    (Polynomial::new(q), acc)
}

impl Polynomial<f64> {
    pub fn eval_f64(&self, z: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

impl<R: Real> Add for &Polynomial<R> {
    type Output = Polynomial<R>;
    fn add(self, rhs: Self) -> Polynomial<R> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<R: Real> Sub for &Polynomial<R> {
    type Output = Polynomial<R>;
    fn sub(self, rhs: Self) -> Polynomial<R> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<R: Real> Mul for &Polynomial<R> {
    type Output = Polynomial<R>;
    fn mul(self, rhs: Self) -> Polynomial<R> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<R: Real> Neg for &Polynomial<R> {
    type Output = Polynomial<R>;
    fn neg(self) -> Polynomial<R> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<R: Real> $tr for Polynomial<R> {
            type Output = Polynomial<R>;
            fn $m(self, rhs: Self) -> Polynomial<R> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx_int;
    use num_rational::BigRational;

    type P = Polynomial<BigRational>;

    fn p(c: &[(i64, i64)]) -> P {
        P::new(c.iter().map(|&(a, b)| cx_int(a, b)).collect())
    }

    #[test]
    fn trims_leading_zeros() {
        let q = p(&[(1, 0), (0, 0), (0, 0)]);
        assert_eq!(q.degree(), 0);
        assert!(p(&[(0, 0)]).is_zero());
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[(1, 2), (-3, 0), (0, 1), (5, 0)]);
        let b = p(&[(2, 0), (1, -1)]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree() || r.is_zero());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = p(&[(-1, 0), (1, 0)]); // z - 1
        let a = &f * &p(&[(2, 0), (1, 0)]);
        let b = &f * &p(&[(0, 1), (1, 0)]);
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn taylor_shift_matches_eval() {
        let a = p(&[(1, 1), (2, 0), (0, -3), (4, 0)]);
        let c = cx_int(2, -1);
        let shifted = a.taylor_shift(&c);
        assert_eq!(shifted.coeff(0), a.eval(&c));
        let t = cx_int(-1, 3);
        assert_eq!(shifted.eval(&t), a.eval(&(c + t)));
    }

    #[test]
    fn multiplicity_of_cube() {
        let two = cx_int(2, 0);
        let cube = P::linear(&two).pow(3);
        assert_eq!(cube.root_multiplicity(&two, 0.0), 3);
        assert_eq!(cube.root_multiplicity(&cx_int(1, 0), 0.0), 0);
    }

    #[test]
    fn antipodal_reverse_identity() {
        // conj(p(-1/conj z)) * z^d  evaluated at z = 2+i
        let a = p(&[(1, 2), (3, -1), (0, 1)]);
        let z = cx_int::<BigRational>(2, 1);
        let w = -(Complex::<BigRational>::one() / z.conj());
        let lhs = a.eval(&w).conj() * z.clone() * z.clone();
        assert_eq!(lhs, a.antipodal_reverse().eval(&z));
    }
}
