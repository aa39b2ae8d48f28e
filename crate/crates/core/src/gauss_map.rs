//! Exceptional values of rational Gauss maps and instance checks of the
//! omitted-value inequalities.
//!
//! A nonconstant rational map `g` of degree `d` takes every value of the
//! sphere exactly `d` times counted with multiplicity. On a punctured plane
//! the value `a` is omitted iff all `d` preimages lie among the punctures
//! and infinity, so every omitted value is the image of a boundary point and
//! the candidates `g(b)` form a complete finite list.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::algebra::poly::Polynomial;
use crate::algebra::rational::RationalFunction;
use crate::algebra::roots::DEFAULT_CLUSTER_TOL;
use crate::domain::PuncturedPlane;
use crate::error::{Error, Result};
use crate::metric::{is_complete, CompletenessReport, MetricFactor, MetricSpec};
use crate::scalar::Real;
use crate::sphere::SpherePoint;
use crate::weierstrass::WeierstrassData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The inequality holds with equality.
    Equality,
    /// The inequality holds strictly.
    Strict,
    /// A bound of the form `q <= c` holds.
    Consistent,
    /// The metric is not complete.
    HypothesisFailed,
    /// Complete, but the counts fall outside the statement's hypothesis.
    NotApplicable,
    /// A complete instance violating the inequality (an implementation bug).
    Counterexample,
    /// Counts that no surface can realise.
    ImpossibleConfiguration,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Equality => "equality",
            Verdict::Strict => "strict",
            Verdict::Consistent => "consistent",
            Verdict::HypothesisFailed => "hypothesis-failed",
            Verdict::NotApplicable => "not-applicable",
            Verdict::Counterexample => "counterexample",
            Verdict::ImpossibleConfiguration => "impossible-configuration",
        };
        f.write_str(s)
    }
}

pub fn ser_ratio<S: Serializer>(r: &Option<Ratio<i64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Number of preimages of `alpha` (with multiplicity) that lie at
/// boundary points of `d`.
fn boundary_preimages<R: Real>(g: &RationalFunction<R>, alpha: &SpherePoint<R>, d: &PuncturedPlane<R>) -> usize {
    let p: Polynomial<R> = match alpha {
        SpherePoint::Infinity => g.den().clone(),
        SpherePoint::Finite(a) => g.num() - &g.den().scale(a),
    };
    let deg = g.map_degree();
    let at_infinity = if p.is_zero() { deg } else { deg - p.degree() };
    let tol = if R::EXACT { 0.0 } else { DEFAULT_CLUSTER_TOL };
    let at_punctures: usize = d.punctures().iter().map(|b| p.root_multiplicity(b, tol)).sum();
    at_infinity + at_punctures
}

/// Exact set of values of the sphere that `g` omits on `d`.
pub fn exceptional_values<R: Real>(g: &RationalFunction<R>, d: &PuncturedPlane<R>) -> Result<Vec<SpherePoint<R>>> {
    if g.is_constant() {
        return Err(Error::ConstantMap);
    }
    let deg = g.map_degree();
    let boundary = d
        .punctures()
        .iter()
        .map(|b| SpherePoint::Finite(b.clone()))
        .chain(std::iter::once(SpherePoint::Infinity));
    let mut out: Vec<SpherePoint<R>> = Vec::new();
    for b in boundary {
        let alpha = g.eval_sphere(&b);
        if out.iter().any(|o| o.approx_eq(&alpha)) {
            continue;
        }
        if boundary_preimages(g, &alpha, d) == deg {
            out.push(alpha);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct FactorReport<R: Real> {
    pub m: u32,
    pub is_constant: bool,
    pub omitted: Vec<SpherePoint<R>>,
    pub q: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct ExceptionalReport<R: Real> {
    pub factors: Vec<FactorReport<R>>,
    pub completeness: CompletenessReport,
    /// `sum m_i/(q_i - 2)` over nonconstant factors with `m_i > 0`; defined
    /// when each of them has `q_i > 2`.
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: Option<Ratio<i64>>,
    pub inequality_applicable: bool,
    pub inequality_holds: Option<bool>,
    pub verdict: Verdict,
}

fn factor_reports<R: Real>(factors: &[MetricFactor<R>], d: &PuncturedPlane<R>) -> Result<Vec<FactorReport<R>>> {
    factors
        .iter()
        .map(|f| {
            if f.g.is_constant() {
                return Ok(FactorReport { m: f.m, is_constant: true, omitted: vec![], q: None });
            }
            let omitted = exceptional_values(&f.g, d)?;
            Ok(FactorReport { m: f.m, is_constant: false, q: Some(omitted.len()), omitted })
        })
        .collect()
}

/// Checks `sum m_i/(q_i - 2) >= 1` on one instance. Factors with `m = 0`
/// do not enter the metric and are left out of the hypothesis and the sum.
pub fn verify_main_inequality<R: Real>(spec: &MetricSpec<R>, d: &PuncturedPlane<R>) -> Result<ExceptionalReport<R>> {
    let completeness = is_complete(spec, d)?;
    let factors = factor_reports(spec.factors(), d)?;
    let active: Vec<&FactorReport<R>> = factors.iter().filter(|f| !f.is_constant && f.m > 0).collect();
    let lhs = if active.iter().all(|f| f.q.unwrap_or(0) > 2) {
        Some(
            active
                .iter()
                .map(|f| Ratio::new(f.m as i64, f.q.unwrap() as i64 - 2))
                .fold(Ratio::zero(), |a, b| a + b),
        )
    } else {
        None
    };
    let applicable = completeness.overall && !active.is_empty() && lhs.is_some();
    let (holds, verdict) = if !completeness.overall {
        (None, Verdict::HypothesisFailed)
    } else if !applicable {
        (None, Verdict::NotApplicable)
    } else {
        let l = lhs.unwrap();
        if l > Ratio::one() {
            (Some(true), Verdict::Strict)
        } else if l == Ratio::one() {
            (Some(true), Verdict::Equality)
        } else {
            (Some(false), Verdict::Counterexample)
        }
    };
    Ok(ExceptionalReport { factors, completeness, lhs, inequality_applicable: applicable, inequality_holds: holds, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct R4Report<R: Real> {
    /// `both-nonconstant` or `one-constant`.
    pub case: String,
    pub factors: Vec<FactorReport<R>>,
    pub complete: bool,
    /// `1/(q1-2) + 1/(q2-2)` in the first case.
    #[serde(serialize_with = "ser_ratio")]
    pub sum: Option<Ratio<i64>>,
    pub holds: Option<bool>,
    pub verdict: Verdict,
}

/// Gauss-map bounds in R^4 for the induced metric
/// `(1+|g1|^2)(1+|g2|^2)|omega|^2`: `1/(q1-2) + 1/(q2-2) >= 1` when both
/// components vary, and `q <= 3` for the other when one is constant.
pub fn fujimoto_r4_check<R: Real>(w: &WeierstrassData<R>, d: &PuncturedPlane<R>) -> Result<R4Report<R>> {
    let (c1, c2) = (w.g1.is_constant(), w.g2.is_constant());
    if c1 && c2 {
        return Err(Error::FlatSurface);
    }
    let spec = MetricSpec::new(
        vec![MetricFactor { g: w.g1.clone(), m: 1 }, MetricFactor { g: w.g2.clone(), m: 1 }],
        w.omega_hat.clone(),
    )?;
    let complete = is_complete(&spec, d)?.overall;
    let factors = factor_reports(spec.factors(), d)?;
    if !(c1 || c2) {
        let (q1, q2) = (factors[0].q.unwrap(), factors[1].q.unwrap());
        let sum = (q1 > 2 && q2 > 2).then(|| Ratio::new(1, q1 as i64 - 2) + Ratio::new(1, q2 as i64 - 2));
        let (holds, verdict) = match (complete, sum) {
            (false, _) => (None, Verdict::HypothesisFailed),
            (true, None) => (None, Verdict::NotApplicable),
            (true, Some(s)) if s > Ratio::one() => (Some(true), Verdict::Strict),
            (true, Some(s)) if s == Ratio::one() => (Some(true), Verdict::Equality),
            (true, Some(_)) => (Some(false), Verdict::Counterexample),
        };
        return Ok(R4Report { case: "both-nonconstant".into(), factors, complete, sum, holds, verdict });
    }
    let q = factors[if c1 { 1 } else { 0 }].q.unwrap();
    let (holds, verdict) = if !complete {
        (None, Verdict::HypothesisFailed)
    } else if q <= 3 {
        (Some(true), Verdict::Consistent)
    } else {
        (Some(false), Verdict::Counterexample)
    };
    Ok(R4Report { case: "one-constant".into(), factors, complete, sum: None, holds, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonorientableReport {
    pub q1: usize,
    pub q2: usize,
    pub both_nonconstant: bool,
    /// `1/(q1-1) + 1/(q2-1)`.
    #[serde(serialize_with = "ser_ratio")]
    pub sum: Option<Ratio<i64>>,
    /// `1/(2 q1 - 2) + 1/(2 q2 - 2)`, the bound for the lifted maps.
    #[serde(serialize_with = "ser_ratio")]
    pub lifted_sum: Option<Ratio<i64>>,
    /// Whether the RP^2 bound and the lifted sphere bound agree.
    pub lift_equivalent: bool,
    pub holds: Option<bool>,
    pub verdict: Verdict,
    /// Under finite total curvature at most one count may exceed 1.
    pub finite_total_curvature_consistent: bool,
    pub note: String,
}

/// Checks RP^2 omitted-point counts of a generalized Gauss map. With
/// `both_nonconstant = false`, `q1` is the count of the nonconstant component.
pub fn nonorientable_check(q1: usize, q2: usize, both_nonconstant: bool) -> NonorientableReport {
    let note = "each omitted RP^2 point lifts to an antipodal pair, so q points lift to 2q omitted values \
and the R^4 bound 1/(2q1-2) + 1/(2q2-2) >= 1 becomes 1/(q1-1) + 1/(q2-1) >= 2"
        .to_string();
    if !both_nonconstant {
        let holds = q1 <= 1;
        // Lifted: one-constant case of R^4 allows at most 3 omitted values, and 2 q1 <= 3 iff q1 <= 1.
        let lift_equivalent = (2 * q1 <= 3) == holds;
        return NonorientableReport {
            q1,
            q2,
            both_nonconstant,
            sum: None,
            lifted_sum: None,
            lift_equivalent,
            holds: Some(holds),
            verdict: if holds { Verdict::Consistent } else { Verdict::ImpossibleConfiguration },
            finite_total_curvature_consistent: q1 <= 1,
            note,
        };
    }
    let ftc = q1.min(q2) <= 1;
    if q1 <= 1 || q2 <= 1 {
        return NonorientableReport {
            q1,
            q2,
            both_nonconstant,
            sum: None,
            lifted_sum: None,
            lift_equivalent: true,
            holds: None,
            verdict: Verdict::NotApplicable,
            finite_total_curvature_consistent: ftc,
            note,
        };
    }
    let (a, b) = (q1 as i64, q2 as i64);
    let sum = Ratio::new(1, a - 1) + Ratio::new(1, b - 1);
    let lifted = Ratio::new(1, 2 * a - 2) + Ratio::new(1, 2 * b - 2);
    let two = Ratio::from_integer(2);
    let holds = sum >= two;
    let verdict = if sum == two {
        Verdict::Equality
    } else if holds {
        Verdict::Strict
    } else {
        Verdict::ImpossibleConfiguration
    };
    NonorientableReport {
        q1,
        q2,
        both_nonconstant,
        sum: Some(sum),
        lifted_sum: Some(lifted),
        lift_equivalent: (lifted >= Ratio::one()) == holds,
        holds: Some(holds),
        verdict,
        finite_total_curvature_consistent: ftc,
        note,
    }
}

/// Omitted values pushed through a Moebius map, for equivariance checks.
pub fn apply_to_set<R: Real>(t: &crate::algebra::MoebiusTransform<R>, set: &[SpherePoint<R>]) -> Vec<SpherePoint<R>> {
    set.iter().map(|p| t.apply(p)).collect()
}

/// Set equality up to order.
pub fn same_set<R: Real>(a: &[SpherePoint<R>], b: &[SpherePoint<R>]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| x.approx_eq(y))) && b.iter().all(|y| a.iter().any(|x| x.approx_eq(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx_int;
    use num_complex::Complex;
    use num_rational::BigRational;

    type Q = BigRational;
    type F = RationalFunction<Q>;

    fn plane(pts: &[(i64, i64)]) -> PuncturedPlane<Q> {
        PuncturedPlane::new(pts.iter().map(|&(a, b)| cx_int(a, b)).collect()).unwrap()
    }

    fn fin(a: i64, b: i64) -> SpherePoint<Q> {
        SpherePoint::Finite(cx_int(a, b))
    }

    #[test]
    fn identity_omits_punctures_and_infinity() {
        let d = plane(&[(1, 0), (2, 0), (3, 0)]);
        let om = exceptional_values(&F::z(), &d).unwrap();
        assert!(same_set(&om, &[fin(1, 0), fin(2, 0), fin(3, 0), SpherePoint::Infinity]));
        assert_eq!(exceptional_values(&F::z(), &PuncturedPlane::plane()).unwrap(), vec![SpherePoint::Infinity]);
    }

    #[test]
    fn square_on_punctured_plane() {
        let g: F = "z^2".parse().unwrap();
        let om = exceptional_values(&g, &plane(&[(0, 0)])).unwrap();
        assert!(same_set(&om, &[fin(0, 0), SpherePoint::Infinity]));
        // One preimage of 1 removed is not enough.
        let om = exceptional_values(&g, &plane(&[(0, 0), (1, 0)])).unwrap();
        assert_eq!(om.len(), 2);
        let om = exceptional_values(&g, &plane(&[(0, 0), (1, 0), (-1, 0)])).unwrap();
        assert!(same_set(&om, &[fin(0, 0), fin(1, 0), SpherePoint::Infinity]));
    }

    #[test]
    fn constant_map_is_an_error() {
        assert_eq!(exceptional_values(&F::one(), &plane(&[])), Err(Error::ConstantMap));
    }

    #[test]
    fn main_inequality_examples() {
        let pts: Vec<Complex<Q>> = vec![cx_int(1, 0), cx_int(2, 0), cx_int(3, 0)];
        let (spec, d) = MetricSpec::sharpness_family(&pts, &[1, 1]).unwrap();
        let rep = verify_main_inequality(&spec, &d).unwrap();
        assert_eq!(rep.lhs, Some(Ratio::one()));
        assert_eq!(rep.verdict, Verdict::Equality);
        assert!(rep.inequality_applicable);

        let (spec, d) = MetricSpec::sharpness_family(&pts, &[2]).unwrap();
        let rep = verify_main_inequality(&spec, &d).unwrap();
        assert_eq!(rep.lhs, Some(Ratio::one()));
        assert_eq!(rep.verdict, Verdict::Equality);

        let pts5: Vec<Complex<Q>> = (1..5).map(|j| cx_int(j, 0)).collect();
        let (spec, d) = MetricSpec::sharpness_family(&pts5, &[1, 1]).unwrap();
        let rep = verify_main_inequality(&spec, &d).unwrap();
        assert!(!rep.inequality_applicable);
        assert_eq!(rep.verdict, Verdict::HypothesisFailed);
        assert_eq!(rep.lhs, Some(Ratio::new(2, 3)));
    }

    #[test]
    fn r4_examples() {
        let d = plane(&[(1, 0), (2, 0), (3, 0)]);
        let om: F = "1/((z-1)(z-2)(z-3))".parse().unwrap();
        let w = WeierstrassData::new(F::z(), F::z(), om).unwrap();
        let rep = fujimoto_r4_check(&w, &d).unwrap();
        assert_eq!(rep.sum, Some(Ratio::one()));
        assert_eq!(rep.verdict, Verdict::Equality);

        let d1 = plane(&[(1, 0)]);
        let w = WeierstrassData::new(F::z(), F::constant(cx_int(5, 0)), "1/(z-1)".parse().unwrap()).unwrap();
        let rep = fujimoto_r4_check(&w, &d1).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.factors[0].q, Some(2));
        assert_eq!(rep.verdict, Verdict::Consistent);

        let w = WeierstrassData::new(F::z(), F::z(), F::one()).unwrap();
        let pts5 = plane(&[(1, 0), (2, 0), (3, 0), (4, 0)]);
        assert_eq!(fujimoto_r4_check(&w, &pts5).unwrap().verdict, Verdict::HypothesisFailed);

        let flat = WeierstrassData::new(F::one(), F::one(), F::one()).unwrap();
        assert_eq!(fujimoto_r4_check(&flat, &d), Err(Error::FlatSurface));
    }

    #[test]
    fn nonorientable_examples() {
        let r = nonorientable_check(2, 2, true);
        assert_eq!(r.verdict, Verdict::Equality);
        assert_eq!(r.sum, Some(Ratio::from_integer(2)));
        assert_eq!(r.lifted_sum, Some(Ratio::one()));
        let r = nonorientable_check(3, 2, true);
        assert_eq!(r.sum, Some(Ratio::new(3, 2)));
        assert_eq!(r.verdict, Verdict::ImpossibleConfiguration);
        assert!(r.lift_equivalent);
        assert_eq!(nonorientable_check(1, 0, false).verdict, Verdict::Consistent);
        assert_eq!(nonorientable_check(2, 0, false).verdict, Verdict::ImpossibleConfiguration);
    }
}
