//! Minimal surfaces in R^4 from rational Weierstrass data.
//!
//! The algebra is generic over a [`Real`] scalar: `BigRational` for exact
//! identity, residue and symmetry checks, `f64` (or `f32`) for metrics,
//! quadrature and meshes. The aliases below name the usual instantiations.

pub mod algebra;
pub mod domain;
pub mod error;
pub mod falsify;
pub mod gauss_map;
pub mod lagrangian;
pub mod mesh;
pub mod metric;
pub mod nonorientable;
pub mod quadrature;
pub mod scalar;
pub mod sphere;
pub mod weierstrass;

pub use algebra::{LaurentPoly, MoebiusTransform, Polynomial, RationalFunction, Root};
pub use domain::{Annulus, BoundaryPoint, Domain, PuncturedPlane};
pub use error::{Error, Result};
pub use scalar::Real;
pub use sphere::{chordal, rp2_count, to_rp2, RP2Point, SpherePoint};

use num_complex::Complex;
use num_rational::BigRational;

pub type ExactScalar = BigRational;
pub type ExactComplex = Complex<BigRational>;
pub type ExactPoly = Polynomial<BigRational>;
pub type ExactRational = RationalFunction<BigRational>;
pub type ExactLaurent = LaurentPoly<BigRational>;
pub type ExactMoebius = MoebiusTransform<BigRational>;
pub type ExactPoint = SpherePoint<BigRational>;

pub type Poly64 = Polynomial<f64>;
pub type Rational64 = RationalFunction<f64>;
pub type Laurent64 = LaurentPoly<f64>;
pub type Point64 = SpherePoint<f64>;

pub type Rational32 = RationalFunction<f32>;
