//! Complex polynomial, rational-function and Laurent-polynomial algebra.

pub mod laurent;
pub mod moebius;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod text;

pub use laurent::LaurentPoly;
pub use moebius::MoebiusTransform;
pub use poly::Polynomial;
pub use rational::RationalFunction;
pub use roots::{roots, Root, DEFAULT_CLUSTER_TOL};
pub use text::{parse_complex, parse_rational};
