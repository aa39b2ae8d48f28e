//! The Riemann sphere, its antipodal map `a -> -1/conj(a)` and the quotient
//! RP^2.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::algebra::text::parse_complex;
use crate::error::{Error, Result};
use crate::scalar::{cx_literal, cx_to_f64, norm_sqr, Real};

/// Relative tolerance for float comparisons on the sphere.
pub const SPHERE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum SpherePoint<R: Real> {
    Finite(Complex<R>),
    Infinity,
}

impl<R: Real> SpherePoint<R> {
    pub fn finite(re: R, im: R) -> Self {
        SpherePoint::Finite(Complex::new(re, im))
    }

    pub fn zero() -> Self {
        SpherePoint::Finite(Complex::zero())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Complex<R>> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> SpherePoint<f64> {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(cx_to_f64(z)),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    pub fn map<S: Real>(&self, f: impl Fn(&Complex<R>) -> Complex<S>) -> SpherePoint<S> {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(f(z)),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// `0 <-> inf`, otherwise `-1/conj(a)`.
    pub fn antipodal(&self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::zero(),
            SpherePoint::Finite(z) if z.is_zero() => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(-(Complex::<R>::one() / z.conj())),
        }
    }

    /// Equality; float points compare by chordal distance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if R::EXACT {
            self == other
        } else {
            chordal(self, other) <= SPHERE_TOL
        }
    }
}

/// Half the chordal distance: `|a-b| / (sqrt(1+|a|^2) sqrt(1+|b|^2))`, with
/// `|a, inf| = 1/sqrt(1+|a|^2)`. Values lie in `[0, 1]`.
pub fn chordal<R: Real>(a: &SpherePoint<R>, b: &SpherePoint<R>) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            1.0 / (1.0 + cx_to_f64(z).norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            if z == w {
                return 0.0;
            }
            let (z, w) = (cx_to_f64(z), cx_to_f64(w));
            (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
        }
    }
}

impl<R: Real> fmt::Display for SpherePoint<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}", cx_literal(z)),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

impl<R: Real> FromStr for SpherePoint<R> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(SpherePoint::Infinity),
            other => Ok(SpherePoint::Finite(parse_complex(other)?)),
        }
    }
}

impl<R: Real> Serialize for SpherePoint<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Class `{a, -1/conj(a)}` in RP^2, stored by a canonical representative:
/// `|rep| < 1`, or `|rep| = 1` with argument in `[0, pi)`. Infinity falls in
/// the class of 0.
#[derive(Clone, Debug, PartialEq)]
pub struct RP2Point<R: Real> {
    rep: Complex<R>,
}

impl<R: Real> RP2Point<R> {
    pub fn rep(&self) -> &Complex<R> {
        &self.rep
    }

    pub fn as_sphere(&self) -> SpherePoint<R> {
        SpherePoint::Finite(self.rep.clone())
    }
}

impl<R: Real> fmt::Display for RP2Point<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", cx_literal(&self.rep))
    }
}

impl<R: Real> Serialize for RP2Point<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn to_rp2<R: Real>(a: &SpherePoint<R>) -> RP2Point<R> {
    let z = match a {
        SpherePoint::Infinity => return RP2Point { rep: Complex::zero() },
        SpherePoint::Finite(z) => z.clone(),
    };
    let m = norm_sqr(&z) - R::one();
    let on_circle = if R::EXACT { m.is_zero() } else { m.is_negligible(SPHERE_TOL) };
    if on_circle {
        // The partner of a unit-modulus point is -a.
        let upper = z.im > R::zero() || (z.im.is_zero() && z.re > R::zero());
        let upper = upper && !(!R::EXACT && z.im.is_negligible(SPHERE_TOL) && z.re < R::zero());
        return RP2Point { rep: if upper { z } else { -z } };
    }
    if m < R::zero() {
        RP2Point { rep: z }
    } else {
        RP2Point { rep: -(Complex::<R>::one() / z.conj()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rp2Count {
    pub count: usize,
    /// Whether the input set was closed under the antipodal map.
    pub closed: bool,
}

/// Number of distinct RP^2 classes met by `points`. A warning is logged when
/// the set is not antipodally closed.
pub fn rp2_count<R: Real>(points: &[SpherePoint<R>]) -> Rp2Count {
    let mut classes: Vec<SpherePoint<R>> = Vec::new();
    for p in points {
        let c = to_rp2(p).as_sphere();
        if !classes.iter().any(|q| q.approx_eq(&c)) {
            classes.push(c);
        }
    }
    let closed = is_antipodally_closed(points);
    if !closed {
        log::warn!("point set is not closed under the antipodal map; RP^2 count may not halve");
    }
    Rp2Count { count: classes.len(), closed }
}

pub fn is_antipodally_closed<R: Real>(points: &[SpherePoint<R>]) -> bool {
    points
        .iter()
        .all(|p| {
            let a = p.antipodal();
            points.iter().any(|q| q.approx_eq(&a))
        })
}
