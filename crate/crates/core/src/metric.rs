//! Conformal metrics `ds^2 = prod (1+|g_i|^2)^{m_i} |omega_hat|^2 |dz|^2`.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::poly::Polynomial;
use crate::algebra::rational::RationalFunction;
use crate::algebra::roots::{roots, DEFAULT_CLUSTER_TOL};
use crate::domain::{BoundaryPoint, Domain, PuncturedPlane};
use crate::error::{Error, Result};
use crate::quadrature::integrate_real;
use crate::scalar::{cx_literal, cx_to_exact, cx_to_f64, Real};
use crate::sphere::SpherePoint;

/// Partial length beyond which a path is declared divergent.
pub const DIVERGENCE_CAP: f64 = 1e6;

/// Piece-to-piece growth ratio treated as non-summable.
const DIVERGENT_RATIO: f64 = 0.97;
const RATIO_WINDOW: usize = 12;
const MAX_PIECES: usize = 900;

pub const COMPLETENESS_RULE: &str = "near an end b the conformal factor behaves like |z-b|^sigma with \
sigma = ord_b(omega_hat) - sum_i m_i max(0, pole order of g_i at b); at infinity the chart w = 1/z \
contributes a further -2 from |dz| = |dw|/|w|^2. Only poles of g_i matter since 1+|g_i|^2 >= 1. \
int_0 t^sigma dt diverges iff sigma <= -1, and every path into b is at least as long as the radial one \
because |dz| >= d|z-b|; so the metric is complete at b iff sigma <= -1.";

#[derive(Clone, Debug, PartialEq)]
pub struct MetricFactor<R: Real> {
    pub g: RationalFunction<R>,
    pub m: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec<R: Real> {
    factors: Vec<MetricFactor<R>>,
    omega_hat: RationalFunction<R>,
}

impl<R: Real> MetricSpec<R> {
    pub fn new(factors: Vec<MetricFactor<R>>, omega_hat: RationalFunction<R>) -> Result<Self> {
        if omega_hat.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        Ok(Self { factors, omega_hat })
    }

    /// `g_i = z` with exponents `m`, and `omega_hat = 1 / prod (z - a_j)`.
    pub fn sharpness_family(punctures: &[Complex<R>], m: &[u32]) -> Result<(Self, PuncturedPlane<R>)> {
        let plane = PuncturedPlane::new(punctures.to_vec())?;
        let omega = RationalFunction::new(Polynomial::one(), Polynomial::from_roots(punctures))?;
        let factors = m.iter().map(|&m| MetricFactor { g: RationalFunction::z(), m }).collect();
        Ok((Self::new(factors, omega)?, plane))
    }

    pub fn factors(&self) -> &[MetricFactor<R>] {
        &self.factors
    }

    pub fn omega_hat(&self) -> &RationalFunction<R> {
        &self.omega_hat
    }

    pub fn total_m(&self) -> u32 {
        self.factors.iter().map(|f| f.m).sum()
    }

    pub fn scaled(&self, c: &Complex<R>) -> Result<Self> {
        Self::new(self.factors.clone(), self.omega_hat.scale(c))
    }

    pub fn numeric(&self) -> NumericMetric {
        NumericMetric {
            factors: self.factors.iter().filter(|f| f.m > 0).map(|f| (f.g.to_f64(), f.m)).collect(),
            omega: self.omega_hat.to_f64(),
        }
    }

    fn exact(&self) -> MetricSpec<BigRational> {
        MetricSpec {
            factors: self.factors.iter().map(|f| MetricFactor { g: lift(&f.g), m: f.m }).collect(),
            omega_hat: lift(&self.omega_hat),
        }
    }
}

fn lift<R: Real>(r: &RationalFunction<R>) -> RationalFunction<BigRational> {
    RationalFunction::new(r.num().map(cx_to_exact), r.den().map(cx_to_exact)).expect("denominator nonzero")
}

/// Double-precision copy of a metric, `lambda = |omega| prod (1+|g|^2)^{m/2}`.
#[derive(Clone, Debug)]
pub struct NumericMetric {
    factors: Vec<(RationalFunction<f64>, u32)>,
    omega: RationalFunction<f64>,
}

fn eval_or_pole(r: &RationalFunction<f64>, z: Complex<f64>) -> Option<Complex<f64>> {
    let d = r.den().eval_f64(z);
    if d.norm_sqr() == 0.0 {
        return None;
    }
    let v = r.num().eval_f64(z) / d;
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

impl NumericMetric {
    /// Conformal factor at `z`; `+inf` at poles.
    pub fn lambda(&self, z: Complex<f64>) -> f64 {
        let Some(w) = eval_or_pole(&self.omega, z) else {
            return f64::INFINITY;
        };
        let mut v = w.norm();
        for (g, m) in &self.factors {
            match eval_or_pole(g, z) {
                Some(gz) => v *= (1.0 + gz.norm_sqr()).powf(*m as f64 / 2.0),
                None => return f64::INFINITY,
            }
        }
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }

    /// Finite poles of `omega_hat` and of the weighted `g_i`.
    pub fn singular_points(&self) -> Vec<Complex<f64>> {
        let mut out: Vec<Complex<f64>> = Vec::new();
        let dens = std::iter::once(self.omega.den()).chain(self.factors.iter().map(|(g, _)| g.den()));
        for d in dens {
            if d.degree() == 0 {
                continue;
            }
            for r in roots(d, DEFAULT_CLUSTER_TOL).unwrap_or_default() {
                if !out.iter().any(|p| (p - r.value).norm() <= DEFAULT_CLUSTER_TOL * p.norm().max(1.0)) {
                    out.push(r.value);
                }
            }
        }
        out
    }
}

pub fn conformal_factor<R: Real>(spec: &MetricSpec<R>, z: Complex<f64>) -> f64 {
    spec.numeric().lambda(z)
}

fn pole_order<R: Real>(g: &RationalFunction<R>, p: &SpherePoint<R>) -> Result<i64> {
    if g.is_zero() {
        return Ok(0);
    }
    Ok((-g.order_at(p)?).max(0))
}

/// The integer `sigma` with `lambda ~ |z - b|^sigma` near the end `b`.
pub fn boundary_exponent<R: Real>(spec: &MetricSpec<R>, d: &Domain<R>, b: BoundaryPoint) -> Result<i64> {
    let point = match b {
        BoundaryPoint::Puncture(i) => SpherePoint::Finite(
            d.punctures()
                .get(i)
                .cloned()
                .ok_or_else(|| Error::InvalidDomain(format!("no puncture with index {i}")))?,
        ),
        BoundaryPoint::Infinity => SpherePoint::Infinity,
        BoundaryPoint::InnerCircle | BoundaryPoint::OuterCircle => return Err(Error::ExponentUndefined),
    };
    exponent_at(spec, &point)
}

fn exponent_at<R: Real>(spec: &MetricSpec<R>, p: &SpherePoint<R>) -> Result<i64> {
    let mut sigma = spec.omega_hat.order_at(p)?;
    for f in &spec.factors {
        sigma -= f.m as i64 * pole_order(&f.g, p)?;
    }
    if p.is_infinity() {
        sigma -= 2;
    }
    Ok(sigma)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndExponent {
    pub end: BoundaryPoint,
    pub location: String,
    pub sigma: i64,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteriorSingularity {
    pub re: f64,
    pub im: f64,
    pub sigma: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub ends: Vec<EndExponent>,
    pub overall: bool,
    pub rule: String,
    /// Interior points where the conformal factor vanishes or blows up.
    pub interior_singularities: Vec<InteriorSingularity>,
}

pub fn is_complete<R: Real>(spec: &MetricSpec<R>, d: &PuncturedPlane<R>) -> Result<CompletenessReport> {
    let domain = Domain::Plane(d.clone());
    let mut ends = Vec::new();
    for b in domain.boundary_points() {
        let sigma = boundary_exponent(spec, &domain, b)?;
        let location = match b {
            BoundaryPoint::Puncture(i) => cx_literal(&d.punctures()[i]),
            _ => "inf".to_string(),
        };
        ends.push(EndExponent { end: b, location, sigma, complete: sigma <= -1 });
    }
    Ok(CompletenessReport {
        overall: ends.iter().all(|e| e.complete),
        ends,
        rule: COMPLETENESS_RULE.to_string(),
        interior_singularities: interior_singularities(spec, d)?,
    })
}

fn interior_singularities<R: Real>(spec: &MetricSpec<R>, d: &PuncturedPlane<R>) -> Result<Vec<InteriorSingularity>> {
    let near = |a: Complex<f64>, b: Complex<f64>| (a - b).norm() <= 1e3 * DEFAULT_CLUSTER_TOL * a.norm().max(1.0);
    // (polynomial, weight): sigma gains weight * multiplicity at each root.
    let mut weighted: Vec<(&Polynomial<R>, i64)> = vec![(spec.omega_hat.num(), 1), (spec.omega_hat.den(), -1)];
    for f in spec.factors.iter().filter(|f| f.m > 0 && !f.g.is_zero()) {
        weighted.push((f.g.den(), -(f.m as i64)));
    }
    let punctures: Vec<Complex<f64>> = d.punctures().iter().map(cx_to_f64).collect();
    let mut acc: Vec<(Complex<f64>, i64)> = Vec::new();
    for (p, w) in weighted {
        if p.degree() == 0 {
            continue;
        }
        for r in roots(p, DEFAULT_CLUSTER_TOL)? {
            if punctures.iter().any(|q| near(*q, r.value)) {
                continue;
            }
            match acc.iter_mut().find(|(z, _)| near(*z, r.value)) {
                Some(e) => e.1 += w * r.multiplicity as i64,
                None => acc.push((r.value, w * r.multiplicity as i64)),
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, s)| *s != 0)
        .map(|(z, sigma)| InteriorSingularity { re: z.re, im: z.im, sigma })
        .collect())
}

/// A path for [`path_length`]: a closed polyline, or a segment from `start`
/// running into the end `end` (a radial ray when `end` is infinity).
#[derive(Clone, Debug, PartialEq)]
pub enum MetricPath<R: Real> {
    Polyline(Vec<Complex<f64>>),
    Ray { start: Complex<f64>, end: SpherePoint<R> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PathLength {
    Finite { length: f64, pieces: usize },
    Diverged { partial: f64, pieces: usize, ratio: f64 },
}

impl PathLength {
    pub fn is_diverged(&self) -> bool {
        matches!(self, PathLength::Diverged { .. })
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            PathLength::Finite { length, .. } => Some(*length),
            PathLength::Diverged { .. } => None,
        }
    }
}

fn segment_distance(p: Complex<f64>, a: Complex<f64>, b: Complex<f64>) -> f64 {
    let d = b - a;
    let t = if d.norm_sqr() == 0.0 { 0.0 } else { ((p - a) * d.conj()).re / d.norm_sqr() };
    (p - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// Length of `path` in the metric, to relative accuracy `tol`.
///
/// Rays are cut into dyadic pieces toward their open end. Piece lengths
/// shrink geometrically when the end exponent is above -1 and stay level or
/// grow otherwise; the walk stops when the remaining geometric tail is below
/// `tol` of the total, or reports divergence when the last pieces stop
/// shrinking or the partial length passes [`DIVERGENCE_CAP`].
pub fn path_length<R: Real>(spec: &MetricSpec<R>, path: &MetricPath<R>, tol: f64) -> Result<PathLength> {
    match path {
        MetricPath::Polyline(pts) => {
            let metric = spec.numeric();
            let singular = metric.singular_points();
            let mut total = 0.0;
            for w in pts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let scale = a.norm().max(b.norm()).max(1.0);
                if let Some(s) = singular.iter().find(|s| segment_distance(**s, a, b) <= 1e-12 * scale) {
                    return Err(Error::InvalidPath(format!("({}, {})", s.re, s.im)));
                }
                let len = (b - a).norm();
                let piece = integrate_real(|t| metric.lambda(a + (b - a) * t) * len, 0.0, 1.0, 0.0, tol)
                    .map_err(|_| Error::InvalidPath(format!("segment ({}, {}) -> ({}, {})", a.re, a.im, b.re, b.im)))?;
                total += piece;
            }
            Ok(PathLength::Finite { length: total, pieces: pts.len().saturating_sub(1) })
        }
        MetricPath::Ray { start, end } => {
            let exact = spec.exact();
            let (chart, u0) = match end {
                SpherePoint::Finite(b) => {
                    let b = cx_to_exact(b);
                    let shift = |r: &RationalFunction<BigRational>| {
                        RationalFunction::new(r.num().taylor_shift(&b), r.den().taylor_shift(&b)).expect("nonzero")
                    };
                    let chart = MetricSpec {
                        factors: exact.factors.iter().map(|f| MetricFactor { g: shift(&f.g), m: f.m }).collect(),
                        omega_hat: shift(&exact.omega_hat),
                    };
                    (chart, start - cx_to_f64(&b))
                }
                SpherePoint::Infinity => {
                    if start.norm_sqr() == 0.0 {
                        return Err(Error::InvalidPath("a ray to infinity cannot start at 0".into()));
                    }
                    let w2 = RationalFunction::monomial(Complex::one(), -2);
                    let chart = MetricSpec {
                        factors: exact
                            .factors
                            .iter()
                            .map(|f| MetricFactor { g: f.g.infinity_chart(), m: f.m })
                            .collect(),
                        omega_hat: &exact.omega_hat.infinity_chart() * &w2,
                    };
                    (chart, Complex::new(1.0, 0.0) / start)
                }
            };
            if u0.norm_sqr() == 0.0 {
                return Err(Error::InvalidPath("ray starts at its end point".into()));
            }
            let metric = chart.numeric();
            for s in metric.singular_points() {
                if s.norm() > 1e-12 * u0.norm() && segment_distance(s, Complex::zero(), u0) <= 1e-12 * u0.norm() {
                    return Err(Error::InvalidPath(format!("({}, {}) in the end chart", s.re, s.im)));
                }
            }
            dyadic_length(&metric, u0, tol)
        }
    }
}

fn dyadic_length(metric: &NumericMetric, u0: Complex<f64>, tol: f64) -> Result<PathLength> {
    let speed = u0.norm();
    let mut pieces: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut hi = 1.0f64;
    for k in 0..MAX_PIECES {
        let lo = hi * 0.5;
        let piece = integrate_real(|t| metric.lambda(u0 * t) * speed, lo, hi, 0.0, tol * 1e-2)
            .map_err(|_| Error::InvalidPath(format!("quadrature failed on dyadic piece {k}")))?;
        pieces.push(piece);
        total += piece;
        hi = lo;
        if total > DIVERGENCE_CAP {
            let ratio = last_ratio(&pieces);
            return Ok(PathLength::Diverged { partial: total, pieces: pieces.len(), ratio });
        }
        if pieces.len() <= RATIO_WINDOW {
            continue;
        }
        let window: Vec<f64> = pieces[pieces.len() - RATIO_WINDOW - 1..]
            .windows(2)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect();
        let r_max = window.iter().cloned().fold(0.0f64, f64::max);
        if window.iter().all(|&r| r >= DIVERGENT_RATIO) {
            return Ok(PathLength::Diverged { partial: total, pieces: pieces.len(), ratio: window[window.len() - 1] });
        }
        if r_max < 0.9 {
            let tail = piece * r_max / (1.0 - r_max);
            if tail <= tol * total {
                return Ok(PathLength::Finite { length: total + tail, pieces: pieces.len() });
            }
        }
    }
    let ratio = last_ratio(&pieces);
    if ratio >= DIVERGENT_RATIO {
        Ok(PathLength::Diverged { partial: total, pieces: pieces.len(), ratio })
    } else {
        Ok(PathLength::Finite { length: total, pieces: pieces.len() })
    }
}

fn last_ratio(pieces: &[f64]) -> f64 {
    match pieces {
        [.., a, b] if *a > 0.0 => b / a,
        _ => 0.0,
    }
}

/// `K = -lambda^{-2} Laplacian(log lambda)` by the 5-point stencil.
pub fn gauss_curvature_numeric<R: Real>(spec: &MetricSpec<R>, z: Complex<f64>, h: f64) -> Result<f64> {
    curvature_of(|w| spec.numeric().lambda(w), z, h)
}

/// Same stencil for any conformal factor.
pub fn curvature_of<F: Fn(Complex<f64>) -> f64>(lambda: F, z: Complex<f64>, h: f64) -> Result<f64> {
    let pts = [
        z,
        z + Complex::new(h, 0.0),
        z - Complex::new(h, 0.0),
        z + Complex::new(0.0, h),
        z - Complex::new(0.0, h),
    ];
    let mut logs = [0.0; 5];
    for (l, p) in logs.iter_mut().zip(pts) {
        let v = lambda(p);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::BadStencil);
        }
        *l = v.ln();
    }
    let lap = (logs[1] + logs[2] + logs[3] + logs[4] - 4.0 * logs[0]) / (h * h);
    let l0 = logs[0].exp();
    Ok(-lap / (l0 * l0))
}
