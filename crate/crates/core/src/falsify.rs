//! Randomized consistency harness for the main omitted-value inequality.
//!
//! Each instance picks punctures and Gauss maps `g_i = T_i o h_i`, where `h_i`
//! is built so that chosen values have all their preimages at punctures, and
//! `T_i` is a random Moebius map. The form is
//! `omega_hat = prod D_i^{m_i} / prod (z - b)^{e_b}` with `D_i` the
//! denominator of `g_i`, so the conformal factor is finite and nonzero
//! inside the domain. A flagged counterexample means a bug in this crate.

use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{MoebiusTransform, Polynomial, RationalFunction};
use crate::domain::PuncturedPlane;
use crate::error::Result;
use crate::gauss_map::{ser_ratio, verify_main_inequality, Verdict};
use crate::metric::{MetricFactor, MetricSpec};
use crate::scalar::cx_int;

type Q = BigRational;
type Cq = Complex<Q>;

const BATCH: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifyBounds {
    pub punctures_max: usize,
    pub m_max: u32,
    pub factors_max: usize,
    pub e_min: u32,
    pub e_max: u32,
    /// Attempts allowed per requested complete instance.
    pub attempts_per_instance: usize,
}

impl Default for FalsifyBounds {
    fn default() -> Self {
        Self { punctures_max: 10, m_max: 3, factors_max: 3, e_min: 1, e_max: 1, attempts_per_instance: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifyRow {
    pub instance: u64,
    pub seed: u64,
    pub p: usize,
    pub m: String,
    pub q: String,
    #[serde(serialize_with = "ser_ratio")]
    pub lhs: Option<Ratio<i64>>,
    pub complete: bool,
    pub applicable: bool,
    pub holds: Option<bool>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FalsifySummary {
    pub seed: u64,
    pub requested: usize,
    pub attempts: usize,
    pub complete: usize,
    pub applicable: usize,
    pub equality: usize,
    pub strict: usize,
    pub counterexamples: usize,
    pub counterexample_instances: Vec<u64>,
    pub bounds: FalsifyBounds,
}

/// One generated instance, before checking.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: MetricSpec<Q>,
    pub plane: PuncturedPlane<Q>,
}

fn small_point(rng: &mut ChaCha8Rng) -> Cq {
    cx_int(rng.gen_range(-3..=3), rng.gen_range(-3..=3))
}

fn push_unique(list: &mut Vec<Cq>, z: Cq) {
    if !list.contains(&z) {
        list.push(z);
    }
}

fn random_moebius(rng: &mut ChaCha8Rng) -> MoebiusTransform<Q> {
    loop {
        let c: Vec<Cq> = (0..4).map(|_| cx_int(rng.gen_range(-2..=2), rng.gen_range(-1..=1))).collect();
        if let Ok(t) = MoebiusTransform::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()) {
            return t;
        }
    }
}

/// `w i^j` for `j` in steps of `4/d`: the roots of `z^d = w^d`.
fn rotations(w: &Cq, d: u32) -> Vec<Cq> {
    let i = cx_int::<Q>(0, 1);
    let step = 4 / d;
    let mut out = Vec::new();
    let mut r = w.clone();
    for j in 0..4 {
        if j % step == 0 {
            out.push(r.clone());
        }
        r *= i.clone();
    }
    out
}

/// Draws instance `index` of the stream selected by `seed`.
pub fn generate(seed: u64, index: u64, bounds: &FalsifyBounds) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n_factors = rng.gen_range(1..=bounds.factors_max.max(1));
    let mut punctures: Vec<Cq> = Vec::new();
    let mut hs: Vec<RationalFunction<Q>> = Vec::new();
    for _ in 0..n_factors {
        let kind = rng.gen_range(0..5);
        let h = match kind {
            0 => RationalFunction::constant(small_point(&mut rng)),
            1 => {
                // Product over punctures: omits 0 and infinity.
                let count = rng.gen_range(1..=3);
                let mut p = Polynomial::one();
                for _ in 0..count {
                    let b = small_point(&mut rng);
                    let e = rng.gen_range(1..=2);
                    p = &p * &Polynomial::linear(&b).pow(e);
                    push_unique(&mut punctures, b);
                }
                RationalFunction::from_poly(p)
            }
            _ => {
                let d = [1u32, 2, 4][rng.gen_range(0..3)];
                let c = small_point(&mut rng);
                if rng.gen_bool(0.5) {
                    push_unique(&mut punctures, c.clone());
                }
                for _ in 0..rng.gen_range(0..=2) {
                    let w = small_point(&mut rng);
                    if w.is_zero() {
                        continue;
                    }
                    for r in rotations(&w, d) {
                        push_unique(&mut punctures, c.clone() + r);
                    }
                }
                RationalFunction::from_poly(Polynomial::linear(&c).pow(d))
            }
        };
        hs.push(h);
    }
    for _ in 0..rng.gen_range(0..=2) {
        push_unique(&mut punctures, small_point(&mut rng));
    }
    punctures.truncate(bounds.punctures_max);

    let mut factors = Vec::new();
    let mut num = Polynomial::one();
    for h in hs {
        let g = if h.is_constant() { h } else { random_moebius(&mut rng).compose(&h) };
        let m = rng.gen_range(0..=bounds.m_max);
        num = &num * &g.den().pow(m);
        factors.push(MetricFactor { g, m });
    }
    let mut den = Polynomial::one();
    for b in &punctures {
        let e = rng.gen_range(bounds.e_min..=bounds.e_max.max(bounds.e_min));
        den = &den * &Polynomial::linear(b).pow(e);
    }
    let omega = RationalFunction::new(num, den)?;
    Ok(Instance { spec: MetricSpec::new(factors, omega)?, plane: PuncturedPlane::new(punctures)? })
}

/// Generates and checks instance `index`.
pub fn check_instance(seed: u64, index: u64, bounds: &FalsifyBounds) -> Result<FalsifyRow> {
    let inst = generate(seed, index, bounds)?;
    let rep = verify_main_inequality(&inst.spec, &inst.plane)?;
    let m: Vec<String> = inst.spec.factors().iter().map(|f| f.m.to_string()).collect();
    let q: Vec<String> = rep
        .factors
        .iter()
        .map(|f| f.q.map_or_else(|| "const".to_string(), |q| q.to_string()))
        .collect();
    let regular = rep.completeness.interior_singularities.is_empty();
    let complete = rep.completeness.overall && regular;
    let (holds, verdict) = if regular { (rep.inequality_holds, rep.verdict) } else { (None, Verdict::HypothesisFailed) };
    Ok(FalsifyRow {
        instance: index,
        seed,
        p: inst.plane.punctures().len(),
        m: m.join(";"),
        q: q.join(";"),
        lhs: rep.lhs,
        complete,
        applicable: complete && rep.inequality_applicable,
        holds,
        verdict,
    })
}

/// Draws instances until `n` complete ones are found or the attempt budget
/// runs out. Rows cover every attempt, in index order; the result does not
/// depend on the number of worker threads.
pub fn falsify(seed: u64, n: usize, bounds: &FalsifyBounds) -> Result<(FalsifySummary, Vec<FalsifyRow>)> {
    let cap = n.saturating_mul(bounds.attempts_per_instance.max(1));
    let mut rows: Vec<FalsifyRow> = Vec::new();
    let mut complete = 0;
    let mut next = 0u64;
    'outer: while complete < n && (next as usize) < cap {
        let end = (next + BATCH as u64).min(cap as u64);
        let batch: Vec<Result<FalsifyRow>> = (next..end).into_par_iter().map(|i| check_instance(seed, i, bounds)).collect();
        next = end;
        for row in batch {
            let row = row?;
            complete += row.complete as usize;
            rows.push(row);
            if complete == n {
                break 'outer;
            }
        }
    }
    let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
    let summary = FalsifySummary {
        seed,
        requested: n,
        attempts: rows.len(),
        complete,
        applicable: rows.iter().filter(|r| r.applicable).count(),
        equality: count(Verdict::Equality),
        strict: count(Verdict::Strict),
        counterexamples: count(Verdict::Counterexample),
        counterexample_instances: rows.iter().filter(|r| r.verdict == Verdict::Counterexample).map(|r| r.instance).collect(),
        bounds: bounds.clone(),
    };
    Ok((summary, rows))
}
