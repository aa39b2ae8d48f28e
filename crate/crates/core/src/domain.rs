//! Genus-zero domains: punctured planes and punctured annuli.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::roots::DEFAULT_CLUSTER_TOL;
use crate::error::{Error, Result};
use crate::scalar::{cx_literal, cx_to_f64, Real};

/// Punctures closer than this multiple of the cluster tolerance are rejected.
pub const PUNCTURE_SEPARATION: f64 = 10.0 * DEFAULT_CLUSTER_TOL;

fn check_distinct<R: Real>(punctures: &[Complex<R>]) -> Result<()> {
    for (i, a) in punctures.iter().enumerate() {
        for b in &punctures[..i] {
            let same = if R::EXACT {
                a == b
            } else {
                let (a, b) = (cx_to_f64(a), cx_to_f64(b));
                (a - b).norm() <= PUNCTURE_SEPARATION * a.norm().max(1.0)
            };
            if same {
                return Err(Error::InvalidDomain(format!("repeated puncture {}", cx_literal(a))));
            }
        }
    }
    Ok(())
}

/// `C` minus finitely many points.
#[derive(Clone, Debug, PartialEq)]
pub struct PuncturedPlane<R: Real> {
    punctures: Vec<Complex<R>>,
}

impl<R: Real> PuncturedPlane<R> {
    pub fn new(punctures: Vec<Complex<R>>) -> Result<Self> {
        check_distinct(&punctures)?;
        Ok(Self { punctures })
    }

    pub fn plane() -> Self {
        Self { punctures: Vec::new() }
    }

    pub fn punctures(&self) -> &[Complex<R>] {
        &self.punctures
    }
}

/// `{1/R < |z| < R}` minus finitely many points.
#[derive(Clone, Debug, PartialEq)]
pub struct Annulus<R: Real> {
    radius: f64,
    punctures: Vec<Complex<R>>,
}

impl<R: Real> Annulus<R> {
    pub fn new(radius: f64, punctures: Vec<Complex<R>>) -> Result<Self> {
        if !(radius.is_finite() && radius > 1.0) {
            return Err(Error::InvalidDomain(format!("annulus radius must exceed 1, got {radius}")));
        }
        for p in &punctures {
            let r = cx_to_f64(p).norm();
            if !(r > 1.0 / radius && r < radius) {
                return Err(Error::InvalidDomain(format!("puncture {} lies outside the annulus", cx_literal(p))));
            }
        }
        check_distinct(&punctures)?;
        Ok(Self { radius, punctures })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn punctures(&self) -> &[Complex<R>] {
        &self.punctures
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain<R: Real> {
    Plane(PuncturedPlane<R>),
    Annulus(Annulus<R>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum BoundaryPoint {
    Puncture(usize),
    Infinity,
    InnerCircle,
    OuterCircle,
}

impl<R: Real> Domain<R> {
    pub fn punctures(&self) -> &[Complex<R>] {
        match self {
            Domain::Plane(p) => p.punctures(),
            Domain::Annulus(a) => a.punctures(),
        }
    }

    /// Every end of the domain: punctures, then infinity or the two circles.
    pub fn boundary_points(&self) -> Vec<BoundaryPoint> {
        let mut out: Vec<BoundaryPoint> = (0..self.punctures().len()).map(BoundaryPoint::Puncture).collect();
        match self {
            Domain::Plane(_) => out.push(BoundaryPoint::Infinity),
            Domain::Annulus(_) => {
                out.push(BoundaryPoint::InnerCircle);
                out.push(BoundaryPoint::OuterCircle);
            }
        }
        out
    }

    /// Whether `z` lies in the open domain.
    pub fn contains(&self, z: Complex<f64>) -> bool {
        let off_punctures = self.punctures().iter().all(|p| (cx_to_f64(p) - z).norm() > 0.0);
        match self {
            Domain::Plane(_) => off_punctures,
            Domain::Annulus(a) => {
                let r = z.norm();
                off_punctures && r > 1.0 / a.radius && r < a.radius
            }
        }
    }

    /// `n` deterministic pseudo-random points of the domain, each farther
    /// than `exclusion` from every puncture. Planes are sampled in a square
    /// covering the punctures; annuli log-uniformly in the radius.
    pub fn sample_grid(&self, n: usize, exclusion: f64, seed: u64) -> Result<Vec<Complex<f64>>> {
        if n == 0 || exclusion.is_nan() || exclusion <= 0.0 {
            return Err(Error::InvalidDomain("sample_grid needs n >= 1 and a positive exclusion radius".into()));
        }
        let punctures: Vec<Complex<f64>> = self.punctures().iter().map(cx_to_f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half_width = punctures.iter().map(|p| p.norm()).fold(1.0f64, f64::max) * 2.0;
        let budget = 1000 * n + 10_000;
        let mut out = Vec::with_capacity(n);
        for _ in 0..budget {
            if out.len() == n {
                break;
            }
            let z = match self {
                Domain::Plane(_) => Complex::new(
                    rng.gen_range(-half_width..half_width),
                    rng.gen_range(-half_width..half_width),
                ),
                Domain::Annulus(a) => {
                    let log_r = a.radius.ln();
                    let r = rng.gen_range(-log_r..log_r).exp();
                    Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                }
            };
            if self.contains(z) && punctures.iter().all(|p| (p - z).norm() > exclusion) {
                out.push(z);
            }
        }
        if out.len() < n {
            return Err(Error::InfeasibleSampling { requested: n });
        }
        Ok(out)
    }
}

impl<R: Real> From<PuncturedPlane<R>> for Domain<R> {
    fn from(p: PuncturedPlane<R>) -> Self {
        Domain::Plane(p)
    }
}

impl<R: Real> From<Annulus<R>> for Domain<R> {
    fn from(a: Annulus<R>) -> Self {
        Domain::Annulus(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx_int;
    use num_rational::BigRational;

    type Plane = PuncturedPlane<BigRational>;

    #[test]
    fn boundary_counts() {
        let d: Domain<BigRational> = Plane::new(vec![cx_int(1, 0), cx_int(2, 0), cx_int(3, 0)]).unwrap().into();
        assert_eq!(d.boundary_points().len(), 4);
        let d: Domain<BigRational> = Plane::plane().into();
        assert_eq!(d.boundary_points(), vec![BoundaryPoint::Infinity]);
        let d: Domain<BigRational> = Annulus::new(2.0, vec![]).unwrap().into();
        assert_eq!(d.boundary_points(), vec![BoundaryPoint::InnerCircle, BoundaryPoint::OuterCircle]);
    }

    #[test]
    fn invalid_domains() {
        assert!(Plane::new(vec![cx_int(1, 0), cx_int(1, 0)]).is_err());
        assert!(Annulus::<f64>::new(1.0, vec![]).is_err());
        assert!(Annulus::<f64>::new(2.0, vec![Complex::new(3.0, 0.0)]).is_err());
        assert!(PuncturedPlane::<f64>::new(vec![Complex::new(1.0, 0.0), Complex::new(1.0 + 1e-12, 0.0)]).is_err());
    }

    #[test]
    fn sampling() {
        let d: Domain<f64> = PuncturedPlane::plane().into();
        assert_eq!(d.sample_grid(100, 0.1, 7).unwrap().len(), 100);

        let d: Domain<f64> = PuncturedPlane::new(vec![Complex::new(0.0, 0.0)]).unwrap().into();
        assert!(d.sample_grid(500, 0.1, 7).unwrap().iter().all(|z| z.norm() > 0.1));

        let d: Domain<f64> = Annulus::new(2.0, vec![]).unwrap().into();
        assert!(d.sample_grid(500, 0.1, 7).unwrap().iter().all(|z| z.norm() > 0.5 && z.norm() < 2.0));
        assert_eq!(d.sample_grid(50, 0.1, 3).unwrap(), d.sample_grid(50, 0.1, 3).unwrap());
    }

    #[test]
    fn crowded_domain_is_infeasible() {
        let d: Domain<f64> = PuncturedPlane::new(vec![Complex::new(0.0, 0.0)]).unwrap().into();
        assert_eq!(d.sample_grid(10, 100.0, 1), Err(Error::InfeasibleSampling { requested: 10 }));
    }
}
