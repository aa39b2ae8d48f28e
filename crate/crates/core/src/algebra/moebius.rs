use num_complex::Complex;
use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sphere::SpherePoint;

/// `w -> (a w + b) / (c w + d)` with `ad - bc != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusTransform<R: Real> {
    a: Complex<R>,
    b: Complex<R>,
    c: Complex<R>,
    d: Complex<R>,
}

impl<R: Real> MoebiusTransform<R> {
    pub fn new(a: Complex<R>, b: Complex<R>, c: Complex<R>, d: Complex<R>) -> Result<Self> {
        let det = a.clone() * d.clone() - b.clone() * c.clone();
        if det.is_zero() {
            return Err(Error::SingularMoebius);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self { a: Complex::one(), b: Complex::zero(), c: Complex::zero(), d: Complex::one() }
    }

    pub fn coefficients(&self) -> [&Complex<R>; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }

    pub fn apply(&self, p: &SpherePoint<R>) -> SpherePoint<R> {
        match p {
            SpherePoint::Infinity => {
                if self.c.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a.clone() / self.c.clone())
                }
            }
            SpherePoint::Finite(w) => {
                let den = self.c.clone() * w.clone() + self.d.clone();
                if den.is_zero() {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a.clone() * w.clone() + self.b.clone()) / den)
                }
            }
        }
    }

    /// `T o g`, computed on numerator and denominator so no division by a
    /// vanishing function occurs.
    pub fn compose(&self, g: &RationalFunction<R>) -> RationalFunction<R> {
        let (n, d) = (g.num(), g.den());
        let num = &n.scale(&self.a) + &d.scale(&self.b);
        let den = &n.scale(&self.c) + &d.scale(&self.d);
        RationalFunction::new(num, den).expect("nonsingular transform keeps the denominator nonzero")
    }

    /// `T` itself as a rational function of `z`.
    pub fn as_rational(&self) -> RationalFunction<R> {
        self.compose(&RationalFunction::from_poly(Polynomial::z()))
    }
}
