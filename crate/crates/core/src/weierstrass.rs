//! Weierstrass data `(g1, g2, omega)` for minimal surfaces in R^4 and the
//! holomorphic forms `phi_1..phi_4` with `X = Re int phi`.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::poly::Polynomial;
use crate::algebra::rational::RationalFunction;
use crate::algebra::roots::{roots, DEFAULT_CLUSTER_TOL};
use crate::domain::{Domain, PuncturedPlane};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::scalar::{cx_to_exact, cx_to_f64, half, i_unit, ser_cx, ser_cx_seq, Real};

/// Imaginary parts below this count as real in float mode.
pub const RESIDUE_REAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData<R: Real> {
    pub g1: RationalFunction<R>,
    pub g2: RationalFunction<R>,
    pub omega_hat: RationalFunction<R>,
}

impl<R: Real> WeierstrassData<R> {
    pub fn new(g1: RationalFunction<R>, g2: RationalFunction<R>, omega_hat: RationalFunction<R>) -> Result<Self> {
        if omega_hat.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        Ok(Self { g1, g2, omega_hat })
    }
}

/// Coefficients of `dz` in `phi_1..phi_4`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiForms<R: Real> {
    phi: [RationalFunction<R>; 4],
}

impl<R: Real> PhiForms<R> {
    pub fn new(phi: [RationalFunction<R>; 4]) -> Result<Self> {
        if phi.iter().all(|p| p.is_zero()) {
            return Err(Error::IdenticallyZero);
        }
        Ok(Self { phi })
    }

    pub fn phi(&self) -> &[RationalFunction<R>; 4] {
        &self.phi
    }

    pub fn to_f64(&self) -> PhiForms<f64> {
        PhiForms { phi: self.phi.clone().map(|p| p.to_f64()) }
    }

    /// Applies a constant 4x4 matrix to the vector of forms.
    pub fn transform(&self, m: &[[Complex<R>; 4]; 4]) -> Result<Self> {
        let phi = std::array::from_fn(|i| {
            (0..4).fold(RationalFunction::zero(), |acc, j| &acc + &self.phi[j].scale(&m[i][j]))
        });
        Self::new(phi)
    }
}

pub fn eval_phi(phi: &[RationalFunction<f64>; 4], z: Complex<f64>) -> [Complex<f64>; 4] {
    std::array::from_fn(|i| phi[i].eval_f64(z))
}

pub fn phis_from_data<R: Real>(w: &WeierstrassData<R>) -> PhiForms<R> {
    let one = RationalFunction::<R>::one();
    let h = Complex::new(half::<R>(), R::zero());
    let ih = i_unit::<R>() * h.clone();
    let prod = &w.g1 * &w.g2;
    let om = &w.omega_hat;
    let phi = [
        (&(&one + &prod) * om).scale(&h),
        (&(&one - &prod) * om).scale(&ih),
        (&(&w.g1 - &w.g2) * om).scale(&h),
        (&(&w.g1 + &w.g2) * om).scale(&(-ih)),
    ];
    PhiForms { phi }
}

/// Inverse of [`phis_from_data`]: `omega = phi1 - i phi2`,
/// `g1 = (phi3 + i phi4)/omega`, `g2 = (-phi3 + i phi4)/omega`.
pub fn data_from_phis<R: Real>(p: &PhiForms<R>) -> Result<WeierstrassData<R>> {
    let i = i_unit::<R>();
    let [p1, p2, p3, p4] = &p.phi;
    let omega = p1 - &p2.scale(&i);
    if omega.is_zero() {
        return Err(Error::DegenerateFrame);
    }
    let ip4 = p4.scale(&i);
    let g1 = (p3 + &ip4).checked_div(&omega)?;
    let g2 = (&ip4 - p3).checked_div(&omega)?;
    WeierstrassData::new(g1, g2, omega)
}

/// `sum phi_i^2 == 0` as an exact identity.
pub fn check_conformality<R: Real>(p: &PhiForms<R>) -> Result<bool> {
    let sum = p.phi.iter().fold(RationalFunction::zero(), |acc, f| &acc + &(f * f));
    sum.is_identically_zero()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// Common zeros of the forms inside the domain, as `[re, im]`.
    pub offending: Vec<[f64; 2]>,
}

/// The forms must not vanish simultaneously inside the domain. Common zeros
/// are the roots of the gcd of the numerators, computed exactly.
pub fn check_regularity<R: Real>(p: &PhiForms<R>, d: &Domain<R>) -> Result<RegularityReport> {
    let nums: Vec<Polynomial<num_rational::BigRational>> =
        p.phi.iter().filter(|f| !f.is_zero()).map(|f| f.num().map(cx_to_exact)).collect();
    let g = nums.iter().skip(1).fold(nums[0].clone(), |acc, n| acc.gcd(n));
    let mut offending = Vec::new();
    if g.degree() > 0 {
        let punctures: Vec<Complex<f64>> = d.punctures().iter().map(cx_to_f64).collect();
        for r in roots(&g, DEFAULT_CLUSTER_TOL)? {
            let at_puncture = punctures.iter().any(|q| (q - r.value).norm() <= 1e3 * DEFAULT_CLUSTER_TOL * q.norm().max(1.0));
            if !at_puncture && d.contains(r.value) {
                offending.push([r.value.re, r.value.im]);
            }
        }
    }
    Ok(RegularityReport { regular: offending.is_empty(), offending })
}

/// Worst relative error of `2 sum |phi_i|^2 = (1+|g1|^2)(1+|g2|^2)|omega|^2`
/// over `samples`.
pub fn induced_metric_identity<R: Real>(p: &PhiForms<R>, samples: &[Complex<f64>]) -> Result<f64> {
    let w = data_from_phis(p)?;
    let (g1, g2, om) = (w.g1.to_f64(), w.g2.to_f64(), w.omega_hat.to_f64());
    let phi = p.phi.clone().map(|f| f.to_f64());
    let mut worst = 0.0f64;
    for &z in samples {
        let lhs: f64 = 2.0 * eval_phi(&phi, z).iter().map(|v| v.norm_sqr()).sum::<f64>();
        let rhs = (1.0 + g1.eval_f64(z).norm_sqr()) * (1.0 + g2.eval_f64(z).norm_sqr()) * om.eval_f64(z).norm_sqr();
        let err = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(err);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PunctureResidues<R: Real> {
    #[serde(serialize_with = "ser_cx")]
    pub puncture: Complex<R>,
    #[serde(serialize_with = "ser_cx_seq")]
    pub residues: [Complex<R>; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct PeriodReport<R: Real> {
    pub punctures: Vec<PunctureResidues<R>>,
    /// All residues real, so every period of `Re int phi` vanishes.
    pub well_defined: bool,
}

fn is_real<R: Real>(c: &Complex<R>) -> bool {
    if R::EXACT {
        c.im.is_zero()
    } else {
        c.im.is_negligible(RESIDUE_REAL_TOL)
    }
}

/// Residues of each form at each puncture. A loop around a puncture changes
/// `int phi_j` by `2 pi i Res`, whose real part vanishes iff the residue is real.
pub fn period_residues<R: Real>(p: &PhiForms<R>, d: &PuncturedPlane<R>) -> PeriodReport<R> {
    residues_at(p, d.punctures())
}

/// Residues at every hole of `d`, including the origin of an annulus.
pub fn period_residues_domain<R: Real>(p: &PhiForms<R>, d: &Domain<R>) -> PeriodReport<R> {
    residues_at(p, &holes(d))
}

fn residues_at<R: Real>(p: &PhiForms<R>, points: &[Complex<R>]) -> PeriodReport<R> {
    let punctures: Vec<PunctureResidues<R>> = points
        .iter()
        .map(|a| PunctureResidues { puncture: a.clone(), residues: std::array::from_fn(|j| p.phi[j].residue_at_finite(a)) })
        .collect();
    let well_defined = punctures.iter().all(|r| r.residues.iter().all(is_real));
    PeriodReport { punctures, well_defined }
}

/// Holes of the domain around which periods can appear.
fn holes<R: Real>(d: &Domain<R>) -> Vec<Complex<R>> {
    let mut h = d.punctures().to_vec();
    if let Domain::Annulus(_) = d {
        if !h.iter().any(|p| p.is_zero()) {
            h.push(Complex::zero());
        }
    }
    h
}

fn segment_distance(p: Complex<f64>, a: Complex<f64>, b: Complex<f64>) -> f64 {
    let d = b - a;
    let t = if d.norm_sqr() == 0.0 { 0.0 } else { ((p - a) * d.conj()).re / d.norm_sqr() };
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// Shortest polyline from `a` to `b` keeping distance `> rho` from every
/// obstacle, over a visibility graph whose nodes are octagons of radius
/// `2 rho` around the obstacles.
pub fn route(a: Complex<f64>, b: Complex<f64>, obstacles: &[Complex<f64>], rho: f64) -> Result<Vec<Complex<f64>>> {
    let clear = |p: Complex<f64>, q: Complex<f64>| obstacles.iter().all(|o| segment_distance(*o, p, q) > rho);
    if clear(a, b) {
        return Ok(vec![a, b]);
    }
    let mut nodes = vec![a, b];
    for o in obstacles {
        for k in 0..8 {
            let v = o + Complex::from_polar(2.0 * rho, std::f64::consts::TAU * k as f64 / 8.0 + 0.1);
            if obstacles.iter().all(|q| (q - v).norm() > rho) {
                nodes.push(v);
            }
        }
    }
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[0] = 0.0;
    for _ in 0..n {
        let Some(u) = (0..n).filter(|&i| !done[i] && dist[i].is_finite()).min_by(|&i, &j| dist[i].total_cmp(&dist[j])) else {
            break;
        };
        done[u] = true;
        if u == 1 {
            break;
        }
        for v in 0..n {
            if done[v] || !clear(nodes[u], nodes[v]) {
                continue;
            }
            let alt = dist[u] + (nodes[u] - nodes[v]).norm();
            if alt < dist[v] {
                dist[v] = alt;
                prev[v] = u;
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(Error::InvalidPath(format!("no clear route to ({}, {})", b.re, b.im)));
    }
    let mut path = vec![b];
    let mut cur = 1;
    while cur != 0 {
        cur = prev[cur];
        path.push(nodes[cur]);
    }
    path.reverse();
    Ok(path)
}

/// `int phi` along a polyline, each component to `tol` (absolute, split
/// evenly over segments).
pub fn integrate_along(phi: &[RationalFunction<f64>; 4], path: &[Complex<f64>], tol: f64) -> Result<[Complex<f64>; 4]> {
    let nseg = path.len().saturating_sub(1).max(1) as f64;
    let mut acc = [Complex::new(0.0, 0.0); 4];
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dz = b - a;
        for j in 0..4 {
            if phi[j].is_zero() {
                continue;
            }
            acc[j] += integrate(|t| phi[j].eval_f64(a + dz * t) * dz, 0.0, 1.0, tol / nseg, 0.0)?;
        }
    }
    Ok(acc)
}

/// Obstacles and clearance used for integration paths in `d`.
pub(crate) fn obstacles<R: Real>(p: &PhiForms<f64>, d: &Domain<R>) -> Vec<Complex<f64>> {
    let mut obs: Vec<Complex<f64>> = holes(d).iter().map(cx_to_f64).collect();
    for f in p.phi.iter() {
        if f.den().degree() == 0 {
            continue;
        }
        for r in roots(f.den(), DEFAULT_CLUSTER_TOL).unwrap_or_default() {
            if !obs.iter().any(|o| (o - r.value).norm() <= 1e3 * DEFAULT_CLUSTER_TOL * o.norm().max(1.0)) {
                obs.push(r.value);
            }
        }
    }
    obs
}

fn clearance(obs: &[Complex<f64>], a: Complex<f64>, b: Complex<f64>) -> f64 {
    let mut m = 1.0f64;
    for (i, o) in obs.iter().enumerate() {
        for q in &obs[..i] {
            m = m.min((o - q).norm());
        }
        m = m.min((o - a).norm()).min((o - b).norm());
    }
    0.25 * m
}

/// `X(z) = Re int_base^z phi` for each target, along puncture-avoiding
/// polylines. Targets are evaluated in parallel.
pub fn immerse<R: Real>(
    p: &PhiForms<R>,
    d: &Domain<R>,
    base: Complex<f64>,
    targets: &[Complex<f64>],
    tol: f64,
) -> Result<Vec<[f64; 4]>> {
    if !residues_at(p, &holes(d)).well_defined {
        return Err(Error::MultivaluedImmersion);
    }
    let pf = p.to_f64();
    let obs = obstacles(&pf, d);
    if obs.iter().any(|o| (o - base).norm() == 0.0) {
        return Err(Error::InvalidPath("base point is a pole".into()));
    }
    targets
        .par_iter()
        .map(|&z| {
            if z == base {
                return Ok([0.0; 4]);
            }
            let path = route(base, z, &obs, clearance(&obs, base, z))?;
            let v = integrate_along(&pf.phi, &path, tol)?;
            Ok(v.map(|c| c.re))
        })
        .collect()
}

/// `oint phi` over the circle `|z - center| = radius`, counterclockwise.
pub fn loop_period<R: Real>(p: &PhiForms<R>, center: Complex<f64>, radius: f64, tol: f64) -> Result<[Complex<f64>; 4]> {
    let pf = p.to_f64();
    let mut out = [Complex::new(0.0, 0.0); 4];
    for (slot, f) in out.iter_mut().zip(&pf.phi) {
        if f.is_zero() {
            continue;
        }
        let mut total = Complex::new(0.0, 0.0);
        for q in 0..4 {
            let (a, b) = (q as f64 * std::f64::consts::FRAC_PI_2, (q + 1) as f64 * std::f64::consts::FRAC_PI_2);
            total += integrate(
                |t| {
                    let e = Complex::from_polar(radius, t);
                    f.eval_f64(center + e) * e * Complex::new(0.0, 1.0)
                },
                a,
                b,
                tol / 4.0,
                0.0,
            )?;
        }
        *slot = total;
    }
    Ok(out)
}

impl<R: Real> std::fmt::Display for PhiForms<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, p) in self.phi.iter().enumerate() {
            writeln!(f, "phi{} = {}", i + 1, p)?;
        }
        Ok(())
    }
}

/// `g1 = z, g2 = -z, omega_hat = 1/z^2`: a catenoid in an R^3 slice.
pub fn catenoid<R: Real>() -> WeierstrassData<R> {
    WeierstrassData {
        g1: RationalFunction::z(),
        g2: -RationalFunction::z(),
        omega_hat: RationalFunction::monomial(Complex::one(), -2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx_int;
    use num_rational::BigRational;

    type Q = BigRational;
    type F = RationalFunction<Q>;

    fn rf(s: &str) -> F {
        s.parse().unwrap()
    }

    #[test]
    fn flat_plane() {
        let w = WeierstrassData::new(F::zero(), F::zero(), F::one()).unwrap();
        let p = phis_from_data(&w);
        assert_eq!(p.phi()[0], rf("1/2"));
        assert_eq!(p.phi()[1], rf("(0+1/2i)"));
        assert!(p.phi()[2].is_zero() && p.phi()[3].is_zero());
        assert_eq!(data_from_phis(&p).unwrap(), w);
        assert!(induced_metric_identity(&p, &[Complex::new(0.0, 0.0)]).unwrap() < 1e-15);
    }

    #[test]
    fn catenoid_forms() {
        let w = catenoid::<Q>();
        let p = phis_from_data(&w);
        assert_eq!(p.phi()[2], rf("1/z"));
        assert!(p.phi()[3].is_zero());
        assert_eq!(data_from_phis(&p).unwrap(), w);
        assert!(check_conformality(&p).unwrap());
        let d = PuncturedPlane::new(vec![cx_int(0, 0)]).unwrap();
        assert!(check_regularity(&p, &Domain::Plane(d.clone())).unwrap().regular);
        let rep = period_residues(&p, &d);
        assert!(rep.well_defined);
        assert_eq!(rep.punctures[0].residues, [cx_int(0, 0), cx_int(0, 0), cx_int(1, 0), cx_int(0, 0)]);
        let err = induced_metric_identity(&p, &[Complex::new(1.0, 0.0)]).unwrap();
        assert!(err < 1e-15);
    }

    #[test]
    fn doubled_phi4_breaks_conformality() {
        let w = WeierstrassData::new(rf("z^2+1"), rf("1/(z-3)"), rf("2z")).unwrap();
        let p = phis_from_data(&w);
        assert!(check_conformality(&p).unwrap());
        let [a, b, c, d] = p.phi().clone();
        let bad = PhiForms::new([a, b, c, d.scale(&cx_int(2, 0))]).unwrap();
        assert!(!check_conformality(&bad).unwrap());
        assert_eq!(check_conformality(&p.to_f64()), Err(Error::RequiresExactMode));
    }

    #[test]
    fn degenerate_frame() {
        let p = PhiForms::new([rf("1"), rf("-i"), rf("0"), rf("0")]).unwrap();
        assert_eq!(data_from_phis(&p), Err(Error::DegenerateFrame));
    }

    #[test]
    fn irregular_common_zero() {
        let p = phis_from_data(&catenoid::<Q>());
        let factor = rf("z-1");
        let scaled = PhiForms::new(p.phi().clone().map(|f| &f * &factor)).unwrap();
        let d = Domain::Plane(PuncturedPlane::new(vec![cx_int(0, 0)]).unwrap());
        let rep = check_regularity(&scaled, &d).unwrap();
        assert!(!rep.regular);
        assert!((rep.offending[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn imaginary_residue_is_multivalued() {
        let p = phis_from_data(&catenoid::<Q>());
        let [a, b, _, d] = p.phi().clone();
        let bad = PhiForms::new([a, b, rf("i/z"), d]).unwrap();
        let plane = PuncturedPlane::new(vec![cx_int(0, 0)]).unwrap();
        assert!(!period_residues(&bad, &plane).well_defined);
        let dom = Domain::Plane(plane);
        assert_eq!(
            immerse(&bad, &dom, Complex::new(1.0, 0.0), &[Complex::new(2.0, 0.0)], 1e-10),
            Err(Error::MultivaluedImmersion)
        );
        assert!(period_residues(&bad, &PuncturedPlane::plane()).well_defined);
    }

    #[test]
    fn flat_immersion_is_linear() {
        let p = phis_from_data(&WeierstrassData::new(F::zero(), F::zero(), F::one()).unwrap());
        let d = Domain::Plane(PuncturedPlane::plane());
        let x = immerse(&p, &d, Complex::new(0.0, 0.0), &[Complex::new(2.0, 0.0), Complex::new(0.0, 0.0)], 1e-12).unwrap();
        for (a, b) in x[0].iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(x[1], [0.0; 4]);
    }

    #[test]
    fn catenoid_loop_has_no_real_period() {
        let p = phis_from_data(&catenoid::<Q>());
        let per = loop_period(&p, Complex::new(0.0, 0.0), 1.0, 1e-12).unwrap();
        for c in per {
            assert!(c.re.abs() < 1e-10);
        }
        assert!((per[2].im - std::f64::consts::TAU).abs() < 1e-10);
    }

    #[test]
    fn route_avoids_obstacle() {
        let path = route(Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0), &[Complex::new(0.0, 0.0)], 0.25).unwrap();
        assert!(path.len() > 2);
        for w in path.windows(2) {
            assert!(segment_distance(Complex::new(0.0, 0.0), w[0], w[1]) > 0.25);
        }
    }

    #[test]
    fn immersion_is_path_independent_around_puncture() {
        let p = phis_from_data(&catenoid::<Q>());
        let d = Domain::Plane(PuncturedPlane::new(vec![cx_int(0, 0)]).unwrap());
        let x = immerse(&p, &d, Complex::new(1.0, 0.0), &[Complex::new(-1.0, 0.0)], 1e-12).unwrap()[0];
        let direct = integrate_along(
            &p.to_f64().phi,
            &[Complex::new(1.0, 0.0), Complex::new(0.0, -1.0), Complex::new(-1.0, 0.0)],
            1e-12,
        )
        .unwrap();
        for j in 0..4 {
            assert!((x[j] - direct[j].re).abs() < 1e-9, "{j}: {} vs {}", x[j], direct[j].re);
        }
    }
}
