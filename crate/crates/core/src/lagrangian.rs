//! Minimal Lagrangian surfaces in C^2 from a holomorphic pair `(F1, F2)`.
//!
//! With `S1 = F2'` and `S2 = -F1'` the map
//! `f = e^{i beta/2} / sqrt 2 * (F1 - i conj F2, F2 + i conj F1)`
//! is a conformal minimal Lagrangian immersion wherever `|S1|^2 + |S2|^2 > 0`,
//! with metric `(|S1|^2 + |S2|^2)|dz|^2`.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex;
use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::roots::{roots, DEFAULT_CLUSTER_TOL};
use crate::algebra::{Polynomial, RationalFunction};
use crate::domain::{Domain, PuncturedPlane};
use crate::error::{Error, Result};
use crate::gauss_map::{exceptional_values, Verdict};
use crate::metric::{is_complete, MetricFactor, MetricSpec};
use crate::scalar::{cx_to_exact, Real};
use crate::sphere::SpherePoint;

type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicPair<R: Real> {
    pub f1: RationalFunction<R>,
    pub f2: RationalFunction<R>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianSpec<R: Real> {
    pair: HolomorphicPair<R>,
    beta: f64,
    s1: RationalFunction<R>,
    s2: RationalFunction<R>,
}

pub fn spinors<R: Real>(pair: &HolomorphicPair<R>) -> (RationalFunction<R>, RationalFunction<R>) {
    (pair.f2.derivative(), -pair.f1.derivative())
}

impl<R: Real> LagrangianSpec<R> {
    /// `beta` is an angle mod `2 pi` and is stored reduced to `[0, 2 pi)`.
    pub fn new(pair: HolomorphicPair<R>, beta: f64) -> Self {
        let (s1, s2) = spinors(&pair);
        Self { pair, beta: beta.rem_euclid(TAU), s1, s2 }
    }

    pub fn pair(&self) -> &HolomorphicPair<R> {
        &self.pair
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn s1(&self) -> &RationalFunction<R> {
        &self.s1
    }

    pub fn s2(&self) -> &RationalFunction<R> {
        &self.s2
    }

    pub fn numeric(&self) -> NumericLagrangian {
        NumericLagrangian {
            f1: self.pair.f1.to_f64(),
            f2: self.pair.f2.to_f64(),
            s1: self.s1.to_f64(),
            s2: self.s2.to_f64(),
            ds1: self.s1.derivative().to_f64(),
            ds2: self.s2.derivative().to_f64(),
            phase: C64::from_polar(1.0, self.beta / 2.0),
        }
    }
}

/// Floating-point evaluator for a [`LagrangianSpec`].
#[derive(Clone, Debug)]
pub struct NumericLagrangian {
    f1: RationalFunction<f64>,
    f2: RationalFunction<f64>,
    s1: RationalFunction<f64>,
    s2: RationalFunction<f64>,
    ds1: RationalFunction<f64>,
    ds2: RationalFunction<f64>,
    phase: C64,
}

/// Deliberate defects for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// The phase factor is left off the second component.
    DropPhaseSecond,
    /// The phase factor is left off the `F1` term of the first component.
    DropPhaseTerm,
}

impl NumericLagrangian {
    pub fn f(&self, z: C64) -> [C64; 2] {
        let (a, b) = (self.f1.eval_f64(z), self.f2.eval_f64(z));
        let i = C64::i();
        let k = self.phase / SQRT_2;
        [k * (a - i * b.conj()), k * (b + i * a.conj())]
    }

    pub fn f_corrupted(&self, z: C64, mode: Corruption) -> [C64; 2] {
        let (a, b) = (self.f1.eval_f64(z), self.f2.eval_f64(z));
        let i = C64::i();
        let s = 1.0 / SQRT_2;
        match mode {
            Corruption::DropPhaseSecond => [self.phase * s * (a - i * b.conj()), s * (b + i * a.conj())],
            Corruption::DropPhaseTerm => [s * (a - self.phase * i * b.conj()), self.phase * s * (b + i * a.conj())],
        }
    }

    /// `|S1|^2 + |S2|^2`.
    pub fn lambda2(&self, z: C64) -> f64 {
        self.s1.eval_f64(z).norm_sqr() + self.s2.eval_f64(z).norm_sqr()
    }

    /// `(lambda^2, K)` with `K = -2 |S1 S2' - S2 S1'|^2 / (|S1|^2 + |S2|^2)^3`.
    pub fn metric_curvature(&self, z: C64) -> Result<(f64, f64)> {
        let (l2, w) = self.wronskian(z)?;
        Ok((l2, -2.0 * w.norm_sqr() / l2.powi(3)))
    }

    /// The variant with `|S1 S2' - S2 S1'|` unsquared in the numerator.
    pub fn unsquared_curvature(&self, z: C64) -> Result<(f64, f64)> {
        let (l2, w) = self.wronskian(z)?;
        Ok((l2, -2.0 * w.norm() / l2.powi(3)))
    }

    fn wronskian(&self, z: C64) -> Result<(f64, C64)> {
        let l2 = self.lambda2(z);
        if !(l2.is_finite() && l2 > 0.0) {
            return Err(Error::Degenerate);
        }
        let w = self.s1.eval_f64(z) * self.ds2.eval_f64(z) - self.s2.eval_f64(z) * self.ds1.eval_f64(z);
        Ok((l2, w))
    }
}

pub fn immersion_f<R: Real>(spec: &LagrangianSpec<R>, z: C64) -> [C64; 2] {
    spec.numeric().f(z)
}

pub fn metric_curvature<R: Real>(spec: &LagrangianSpec<R>, z: C64) -> Result<(f64, f64)> {
    spec.numeric().metric_curvature(z)
}

pub fn unsquared_curvature<R: Real>(spec: &LagrangianSpec<R>, z: C64) -> Result<(f64, f64)> {
    spec.numeric().unsquared_curvature(z)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    pub nondegenerate: bool,
    /// `S1` and `S2` both vanish identically.
    pub everywhere_degenerate: bool,
    pub offending: Vec<[f64; 2]>,
}

/// `S1` and `S2` have no common zero in `d`; exact gcd of the numerators.
pub fn nondegenerate<R: Real>(spec: &LagrangianSpec<R>, d: &Domain<R>) -> Result<NondegeneracyReport> {
    let (a, b) = (&spec.s1, &spec.s2);
    if a.is_zero() && b.is_zero() {
        return Ok(NondegeneracyReport { nondegenerate: false, everywhere_degenerate: true, offending: vec![] });
    }
    let exact = |r: &RationalFunction<R>| -> Polynomial<BigRational> { r.num().map(cx_to_exact) };
    let g = match (a.is_zero(), b.is_zero()) {
        (true, _) => exact(b),
        (_, true) => exact(a),
        _ => exact(a).gcd(&exact(b)),
    };
    let mut offending = Vec::new();
    if g.degree() > 0 {
        for r in roots(&g, DEFAULT_CLUSTER_TOL)? {
            if d.contains(r.value) {
                offending.push([r.value.re, r.value.im]);
            }
        }
    }
    Ok(NondegeneracyReport { nondegenerate: offending.is_empty(), everywhere_degenerate: false, offending })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimalityWitness {
    /// `|sum_k Im(conj(f_x,k) f_y,k)| / (|f_x| |f_y|)`.
    pub symplectic: f64,
    /// Largest 5-point Laplacian among the four real coordinates.
    pub harmonic: f64,
    /// `max(||f_x|^2 - |f_y|^2|, 2|Re <f_x, f_y>|) / (|f_x|^2 + |f_y|^2)`.
    pub conformality: f64,
}

/// Finite-difference witnesses that `eval` is Lagrangian, harmonic and
/// conformal at `z`.
pub fn minimality_witness<F: Fn(C64) -> [C64; 2]>(eval: F, z: C64, h: f64) -> Result<MinimalityWitness> {
    let (dx, dy) = (C64::new(h, 0.0), C64::new(0.0, h));
    let pts = [z, z + dx, z - dx, z + dy, z - dy];
    let v: Vec<[C64; 2]> = pts.iter().map(|&p| eval(p)).collect();
    if v.iter().flatten().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::BadStencil);
    }
    let fx: [C64; 2] = std::array::from_fn(|k| (v[1][k] - v[2][k]) / (2.0 * h));
    let fy: [C64; 2] = std::array::from_fn(|k| (v[3][k] - v[4][k]) / (2.0 * h));
    let (nx, ny) = (fx[0].norm_sqr() + fx[1].norm_sqr(), fy[0].norm_sqr() + fy[1].norm_sqr());
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::Degenerate);
    }
    let herm: C64 = (0..2).map(|k| fx[k].conj() * fy[k]).sum();
    let harmonic = (0..2)
        .flat_map(|k| {
            let lap = (v[1][k] + v[2][k] + v[3][k] + v[4][k] - 4.0 * v[0][k]) / (h * h);
            [lap.re.abs(), lap.im.abs()]
        })
        .fold(0.0, f64::max);
    Ok(MinimalityWitness {
        symplectic: herm.im.abs() / (nx * ny).sqrt(),
        harmonic,
        conformality: (nx - ny).abs().max(2.0 * herm.re.abs()) / (nx + ny),
    })
}

pub fn lagrangian_minimality_check<R: Real>(spec: &LagrangianSpec<R>, z: C64, h: f64) -> Result<MinimalityWitness> {
    let n = spec.numeric();
    minimality_witness(|w| n.f(w), z, h)
}

pub fn corrupted_minimality_check<R: Real>(spec: &LagrangianSpec<R>, z: C64, h: f64, mode: Corruption) -> Result<MinimalityWitness> {
    let n = spec.numeric();
    minimality_witness(|w| n.f_corrupted(w, mode), z, h)
}

/// `(g, e^{i beta})` with `g = -S2/S1`; `g` is `None` when `S1` vanishes
/// identically.
pub fn gauss_map_pair<R: Real>(spec: &LagrangianSpec<R>) -> (Option<RationalFunction<R>>, C64) {
    let g = (-&spec.s2).checked_div(&spec.s1).ok();
    (g, C64::from_polar(1.0, spec.beta))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct GaussBoundReport<R: Real> {
    pub complete: Option<bool>,
    pub omitted: Vec<SpherePoint<R>>,
    pub q: Option<usize>,
    pub holds: Option<bool>,
    pub verdict: Verdict,
}

/// The metric `(1 + |g|^2)|omega_hat|^2` has `m = 1`; when complete, `g`
/// omits at most 3 values.
pub fn gauss_bound_from_data<R: Real>(
    g: &RationalFunction<R>,
    omega_hat: &RationalFunction<R>,
    d: &PuncturedPlane<R>,
) -> Result<GaussBoundReport<R>> {
    if g.is_constant() {
        return Ok(GaussBoundReport { complete: None, omitted: vec![], q: None, holds: None, verdict: Verdict::NotApplicable });
    }
    let spec = MetricSpec::new(vec![MetricFactor { g: g.clone(), m: 1 }], omega_hat.clone())?;
    let complete = is_complete(&spec, d)?.overall;
    let omitted = exceptional_values(g, d)?;
    let q = omitted.len();
    let (holds, verdict) = if !complete {
        (None, Verdict::HypothesisFailed)
    } else if q <= 3 {
        (Some(true), Verdict::Consistent)
    } else {
        (Some(false), Verdict::Counterexample)
    };
    Ok(GaussBoundReport { complete: Some(complete), omitted, q: Some(q), holds, verdict })
}

/// Bound check with `g = -S2/S1` and `omega_hat = S1`. A constant `g`
/// (including `S1 = 0`) is the Lagrangian plane case and is not applicable.
pub fn gauss_bound_check<R: Real>(spec: &LagrangianSpec<R>, d: &PuncturedPlane<R>) -> Result<GaussBoundReport<R>> {
    match gauss_map_pair(spec).0 {
        Some(g) if !g.is_constant() => gauss_bound_from_data(&g, &spec.s1, d),
        _ => Ok(GaussBoundReport { complete: None, omitted: vec![], q: None, holds: None, verdict: Verdict::NotApplicable }),
    }
}

/// Poles of `F1` or `F2` inside `d`; the pair must have none.
pub fn poles_in_domain<R: Real>(pair: &HolomorphicPair<R>, d: &Domain<R>) -> Result<Vec<C64>> {
    let mut out = Vec::new();
    for f in [&pair.f1, &pair.f2] {
        if f.den().degree() > 0 {
            for r in roots(f.den(), DEFAULT_CLUSTER_TOL)? {
                if d.contains(r.value) {
                    out.push(r.value);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::curvature_of;
    use crate::scalar::cx_int;
    use std::f64::consts::PI;

    type F = RationalFunction<BigRational>;

    fn pair(a: &str, b: &str) -> HolomorphicPair<BigRational> {
        HolomorphicPair { f1: a.parse().unwrap(), f2: b.parse().unwrap() }
    }

    fn plane() -> Domain<BigRational> {
        Domain::Plane(PuncturedPlane::plane())
    }

    #[test]
    fn spinor_examples() {
        let (s1, s2) = spinors(&pair("z", "0"));
        assert!(s1.is_zero());
        assert_eq!(s2, F::constant(cx_int(-1, 0)));
        let (s1, s2) = spinors(&pair("z", "z^2/2"));
        assert_eq!(s1, F::z());
        assert_eq!(s2, F::constant(cx_int(-1, 0)));
        let (s1, s2) = spinors(&pair("3", "1+2i"));
        assert!(s1.is_zero() && s2.is_zero());
    }

    #[test]
    fn nondegeneracy_examples() {
        let ok = LagrangianSpec::new(pair("z", "z^2/2"), 0.0);
        assert!(nondegenerate(&ok, &plane()).unwrap().nondegenerate);
        let bad = LagrangianSpec::new(pair("z^2/2", "z^2/2"), 0.0);
        let r = nondegenerate(&bad, &plane()).unwrap();
        assert_eq!(r.offending, vec![[0.0, 0.0]]);
        let flat = LagrangianSpec::new(pair("1", "2"), 0.0);
        assert!(nondegenerate(&flat, &plane()).unwrap().everywhere_degenerate);
    }

    #[test]
    fn immersion_examples() {
        let s = LagrangianSpec::new(pair("z", "0"), 0.0);
        let f = immersion_f(&s, C64::new(1.0, 0.0));
        assert!((f[0] - C64::new(1.0 / SQRT_2, 0.0)).norm() < 1e-15);
        assert!((f[1] - C64::new(0.0, 1.0 / SQRT_2)).norm() < 1e-15);
        let s = LagrangianSpec::new(pair("z-1", "z^2-1"), 1.3);
        assert_eq!(immersion_f(&s, C64::new(1.0, 0.0)), [C64::new(0.0, 0.0); 2]);
        let z = C64::new(0.3, -0.7);
        let a = immersion_f(&LagrangianSpec::new(pair("z", "z^2/2"), 0.4), z);
        let b = immersion_f(&LagrangianSpec::new(pair("z", "z^2/2"), 0.4 + 2.0 * PI), z);
        assert!((a[0] - b[0]).norm() < 1e-15 && (a[1] - b[1]).norm() < 1e-15);
    }

    #[test]
    fn curvature_examples() {
        let s = LagrangianSpec::new(pair("z", "z^2/2"), 0.0);
        assert_eq!(metric_curvature(&s, C64::new(0.0, 0.0)).unwrap(), (1.0, -2.0));
        assert_eq!(metric_curvature(&s, C64::new(1.0, 0.0)).unwrap(), (2.0, -0.25));
        let plane_spec = LagrangianSpec::new(pair("z", "0"), 0.0);
        assert_eq!(metric_curvature(&plane_spec, C64::new(2.0, 1.0)).unwrap(), (1.0, 0.0));
        let flat = LagrangianSpec::new(pair("1", "2"), 0.0);
        assert_eq!(metric_curvature(&flat, C64::new(0.0, 0.0)), Err(Error::Degenerate));
    }

    #[test]
    fn curvature_matches_stencil_but_unsquared_variant_does_not() {
        let s = LagrangianSpec::new(pair("z", "z^3/3"), 0.0);
        let n = s.numeric();
        let z = C64::new(1.0, 0.0);
        let oracle = curvature_of(|w| n.lambda2(w).sqrt(), z, 1e-3).unwrap();
        let (_, k) = n.metric_curvature(z).unwrap();
        let (_, unsquared) = n.unsquared_curvature(z).unwrap();
        assert!((k - oracle).abs() < 1e-4, "{k} vs {oracle}");
        assert!((k + 1.0).abs() < 1e-12);
        assert!((unsquared + 0.5).abs() < 1e-12);
    }

    #[test]
    fn minimality_witnesses() {
        let z = C64::new(1.0, 1.0);
        for beta in [0.0, PI / 3.0] {
            let s = LagrangianSpec::new(pair("z", "z^2/2"), beta);
            let w = lagrangian_minimality_check(&s, z, 1e-3).unwrap();
            assert!(w.symplectic < 1e-5 && w.harmonic < 1e-5 && w.conformality < 1e-5, "{w:?}");
        }
        let flat = LagrangianSpec::new(pair("z", "0"), 0.0);
        let w = lagrangian_minimality_check(&flat, z, 1e-3).unwrap();
        assert!(w.symplectic < 1e-12 && w.harmonic < 1e-6);
    }

    #[test]
    fn corrupted_phase_breaks_conformality() {
        let s = LagrangianSpec::new(pair("z", "z^2/2"), PI / 2.0);
        let z = C64::new(1.0, 1.0);
        let w = corrupted_minimality_check(&s, z, 1e-3, Corruption::DropPhaseTerm).unwrap();
        assert!(w.conformality > 1e-2, "{w:?}");
    }

    #[test]
    fn gauss_bound_examples() {
        let d = PuncturedPlane::new(vec![cx_int(1, 0), cx_int(-1, 0)]).unwrap();
        let om: F = "1/((z-1)(z+1))".parse().unwrap();
        let r = gauss_bound_from_data(&F::z(), &om, &d).unwrap();
        assert_eq!(r.complete, Some(true));
        assert_eq!(r.q, Some(3));
        assert_eq!(r.verdict, Verdict::Consistent);

        let flat = LagrangianSpec::new(pair("z", "0"), 0.0);
        assert_eq!(gauss_bound_check(&flat, &d).unwrap().verdict, Verdict::NotApplicable);

        let poly = LagrangianSpec::new(pair("z", "z^2/2"), 0.0);
        let r = gauss_bound_check(&poly, &PuncturedPlane::plane()).unwrap();
        assert_eq!((r.q, r.verdict), (Some(1), Verdict::Consistent));
        let one = PuncturedPlane::new(vec![cx_int(1, 0)]).unwrap();
        assert_eq!(gauss_bound_check(&poly, &one).unwrap().verdict, Verdict::HypothesisFailed);
    }

    #[test]
    fn gauss_pair() {
        let s = LagrangianSpec::new(pair("z", "z^2/2"), PI);
        let (g, e) = gauss_map_pair(&s);
        assert_eq!(g.unwrap(), "1/z".parse::<F>().unwrap());
        assert!((e - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }
}
