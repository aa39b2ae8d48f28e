//! Nonorientable quotients under the involution `I(z) = -1/conj z`.
//!
//! Forms on an annulus are written `phi_j = (varphi_j / z) dz` with finite
//! Laurent data `varphi_j`. `I* phi_j = conj phi_j` holds iff each
//! `varphi_j` has `a_{-n} = (-1)^{n+1} conj(a_n)` and an imaginary constant
//! term, which is the same as `reflect(varphi_j) = -varphi_j` for the
//! antipodal reflection `r -> conj(r(-1/conj z))`.
//!
//! A Laurent polynomial `f` with poles only at 0 and infinity, `f o I_0 =
//! conj f` and no zeros on `|z| = 1` is pulled back along `T_k(z) = z^k`:
//! `psi_j = k f(z) varphi_j(z^k) dz/z`. For odd `k > m` all residues vanish
//! and the symmetry survives, so `Re int psi` descends to a Moebius strip.

use std::f64::consts::TAU;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::roots::{roots, DEFAULT_CLUSTER_TOL};
use crate::algebra::{LaurentPoly, RationalFunction};
use crate::domain::{Annulus, Domain};
use crate::error::{Error, Result};
use crate::gauss_map::{nonorientable_check, NonorientableReport};
use crate::mesh::{export_mesh, Grid, Mesh};
use crate::quadrature::integrate;
use crate::scalar::{cx_int, cx_literal, ser_cx, ser_cx_seq, Real};
use crate::sphere::{is_antipodally_closed, rp2_count, SpherePoint};
use crate::weierstrass::{data_from_phis, PhiForms, WeierstrassData};

type Q = BigRational;
type Cq = Complex<Q>;
type L = LaurentPoly<Q>;

/// Root moduli within this distance of 1 violate condition (c).
pub const CIRCLE_TOL: f64 = 1e-6;
pub const K_CAP: u32 = 99;
/// Relative safety margin on the bound `c`.
pub const BOUND_MARGIN: f64 = 0.01;
const SWEEP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub g1: bool,
    pub g2: bool,
    pub omega: bool,
}

impl SymmetryReport {
    pub fn all(&self) -> bool {
        self.g1 && self.g2 && self.omega
    }
}

fn gauss_symmetric(g: &RationalFunction<Q>) -> bool {
    match g.recip() {
        Ok(r) => g.antipodal_reflect() == -r,
        Err(_) => false,
    }
}

/// `g_k o I = -1/conj g_k` for both components and `I* omega = conj(g1 g2 omega)`,
/// the latter as `reflect(omega_hat) / z^2 = g1 g2 omega_hat`. Exact only.
pub fn check_weierstrass_symmetry<R: Real>(w: &WeierstrassData<R>) -> Result<SymmetryReport> {
    if !R::EXACT {
        return Err(Error::RequiresExactMode);
    }
    let ex = |r: &RationalFunction<R>| -> RationalFunction<Q> {
        RationalFunction::new(r.num().map(crate::scalar::cx_to_exact), r.den().map(crate::scalar::cx_to_exact))
            .expect("nonzero denominator")
    };
    let (g1, g2, om) = (ex(&w.g1), ex(&w.g2), ex(&w.omega_hat));
    let lhs = &om.antipodal_reflect() * &RationalFunction::monomial(Complex::one(), -2);
    let rhs = &(&g1 * &g2) * &om;
    Ok(SymmetryReport { g1: gauss_symmetric(&g1), g2: gauss_symmetric(&g2), omega: lhs == rhs })
}

/// Whether an omitted set is closed under the antipodal map.
pub fn involution_omitted_closure<R: Real>(omitted: &[SpherePoint<R>]) -> bool {
    is_antipodally_closed(omitted)
}

/// `coeff(-n) = (-1)^{n+1} conj(coeff(n))` and an imaginary constant term.
pub fn validate_symmetric_laurent<R: Real>(phi: &LaurentPoly<R>) -> bool {
    phi.antipodal_reflect() == -phi
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricLaurentData {
    phi: [L; 4],
}

impl SymmetricLaurentData {
    pub fn new(phi: [L; 4]) -> Result<Self> {
        for (j, p) in phi.iter().enumerate() {
            if !validate_symmetric_laurent(p) {
                return Err(Error::InvalidLaurent(format!("varphi_{} is not symmetric", j + 1)));
            }
        }
        Ok(Self { phi })
    }

    pub fn phi(&self) -> &[L; 4] {
        &self.phi
    }

    /// Imaginary constant terms `a_0^j`.
    pub fn a0(&self) -> [Cq; 4] {
        std::array::from_fn(|j| self.phi[j].coeff(0))
    }

    /// `sum varphi_j^2 == 0`.
    pub fn is_conformal(&self) -> bool {
        self.phi.iter().fold(L::zero(), |acc, p| &acc + &(p * p)).is_zero()
    }

    /// The forms `phi_j = varphi_j / z` as rational functions.
    pub fn forms(&self) -> Result<PhiForms<Q>> {
        let zinv = RationalFunction::monomial(Complex::one(), -1);
        PhiForms::new(self.phi.clone().map(|p| &p.to_rational() * &zinv))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FCandidate {
    #[serde(serialize_with = "ser_cx_seq")]
    pub b: Vec<Cq>,
    pub m: usize,
    #[serde(serialize_with = "ser_laurent")]
    pub f: L,
    /// `f o I_0 = conj f`, re-checked on the built polynomial.
    pub condition_b: bool,
    /// Moduli of the zeros of `z^m f`.
    pub root_moduli: Vec<f64>,
    /// `min |f|` on the unit circle.
    pub circle_min: f64,
}

pub fn ser_laurent<S: serde::Serializer, R: Real>(l: &LaurentPoly<R>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&l.to_string())
}

/// Minimum of `h` on `[0, 2 pi)`: dense sweep, then golden-section search
/// around the best sample.
fn circle_minimum(h: impl Fn(f64) -> f64) -> f64 {
    let step = TAU / SWEEP as f64;
    let (best, _) = (0..SWEEP)
        .map(|i| (i, h(i as f64 * step)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let (mut a, mut b) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (h(c), h(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = h(d);
        }
    }
    fc.min(fd).min(h(best as f64 * step))
}

/// `f = sum_{n=1}^m (b_n z^n + (-1)^n conj(b_n) z^{-n})`, with condition (c)
/// checked on the roots of `z^m f`.
pub fn build_f(b: &[Cq]) -> Result<FCandidate> {
    let m = b.len();
    if m == 0 || b[m - 1].is_zero() {
        return Err(Error::InvalidLaurent("b_m must be nonzero".into()));
    }
    let f = L::from_terms(b.iter().enumerate().flat_map(|(i, bn)| {
        let n = i as i64 + 1;
        let c = bn.conj();
        [(n, bn.clone()), (-n, if n % 2 == 1 { -c } else { c })]
    }));
    let condition_b = f.antipodal_reflect() == f;
    let poly = (&f * &L::monomial(Complex::one(), m as i64)).to_rational();
    let mut root_moduli = Vec::new();
    for r in roots(poly.num(), DEFAULT_CLUSTER_TOL)? {
        if (r.value.norm() - 1.0).abs() <= CIRCLE_TOL {
            return Err(Error::ConditionCViolated(format!("{}", r.value)));
        }
        root_moduli.extend(std::iter::repeat_n(r.value.norm(), r.multiplicity));
    }
    root_moduli.sort_by(f64::total_cmp);
    let ff = f.to_f64();
    let circle_min = circle_minimum(|t| ff.eval_f64(Complex::from_polar(1.0, t)).norm());
    Ok(FCandidate { b: b.to_vec(), m, f, condition_b, root_moduli, circle_min })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueCheck {
    pub holds: bool,
    /// Constant term of `varphi(z^k) f(z)`.
    #[serde(serialize_with = "ser_cx")]
    pub residue: Cq,
}

/// `Res_{z=0} varphi(z^k) f(z) dz/z = 0`.
pub fn residue_condition(phi: &L, f: &FCandidate, k: u32) -> ResidueCheck {
    let residue = (&phi.compose_power(k) * &f.f).coeff(0);
    ResidueCheck { holds: residue.is_zero(), residue }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverSpec {
    k: u32,
}

impl CoverSpec {
    pub fn new(k: u32, m: usize) -> Result<Self> {
        if k.is_multiple_of(2) {
            return Err(Error::InvalidCover { k, reason: "k must be odd".into() });
        }
        if k as usize <= m {
            return Err(Error::InvalidCover { k, reason: format!("k must exceed m = {m}") });
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiForms {
    /// `chi_j = k f varphi_j(z^k)`, so that `psi_j = chi_j dz/z`.
    pub chi: [L; 4],
    pub symmetric: bool,
}

impl PsiForms {
    pub fn forms(&self) -> Result<PhiForms<Q>> {
        let zinv = RationalFunction::monomial(Complex::one(), -1);
        PhiForms::new(self.chi.clone().map(|p| &p.to_rational() * &zinv))
    }
}

pub fn pullback_psi(data: &SymmetricLaurentData, f: &FCandidate, cover: &CoverSpec) -> Result<PsiForms> {
    let k = cover.k();
    for (j, p) in data.phi.iter().enumerate() {
        let r = residue_condition(p, f, k);
        if !r.holds {
            return Err(Error::PeriodObstruction(format!("varphi_{}: {}", j + 1, cx_literal(&r.residue))));
        }
    }
    let kc: Cq = cx_int(k as i64, 0);
    let chi = data.phi.clone().map(|p| (&p.compose_power(k) * &f.f).scale(&kc));
    let symmetric = chi.iter().all(validate_symmetric_laurent);
    Ok(PsiForms { chi, symmetric })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FBounds {
    pub k_requested: u32,
    pub k: u32,
    pub inner: f64,
    pub outer: f64,
    pub min_mod: f64,
    pub max_mod: f64,
    pub c: f64,
}

/// Bounds `1/c < |f| < c` on the annulus `R^{-1/k} <= |z| <= R^{1/k}`,
/// raising `k` in odd steps while zeros of `f` meet the closed annulus.
pub fn f_bounds(f: &FCandidate, r: f64, k: u32, cap: u32) -> Result<FBounds> {
    if r.is_nan() || r <= 1.0 {
        return Err(Error::InvalidDomain(format!("R = {r} must exceed 1")));
    }
    let mut kk = if k.is_multiple_of(2) { k + 1 } else { k };
    loop {
        if kk > cap {
            return Err(Error::KSearchExhausted { cap });
        }
        let outer = r.powf(1.0 / kk as f64);
        let inner = 1.0 / outer;
        if f.root_moduli.iter().all(|&m| m < inner || m > outer) {
            let ff = f.f.to_f64();
            let mut min_mod = f64::INFINITY;
            let mut max_mod = 0.0f64;
            for rad in [inner, outer] {
                for t in (0..SWEEP).map(|i| i as f64 * TAU / SWEEP as f64) {
                    let v = ff.eval_f64(Complex::from_polar(rad, t)).norm();
                    min_mod = min_mod.min(v);
                    max_mod = max_mod.max(v);
                }
            }
            let c = max_mod.max(1.0 / min_mod) * (1.0 + BOUND_MARGIN);
            return Ok(FBounds { k_requested: k, k: kk, inner, outer, min_mod, max_mod, c });
        }
        log::info!("zeros of f meet the annulus for k = {kk}; trying k = {}", kk + 2);
        kk += 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub slack: f64,
    /// Smallest `lambda_0^2 - lambda_pulled^2 / c^2`, relative to `lambda_0^2`.
    pub lower_margin: f64,
    /// Smallest `c^2 lambda_pulled^2 - lambda_0^2`, relative to `lambda_0^2`.
    pub upper_margin: f64,
    pub holds: bool,
}

/// `(1/c^2) lambda_pulled^2 <= lambda_0^2 <= c^2 lambda_pulled^2` at each
/// sample, with `lambda_0^2 = sum |chi_j|^2/|z|^2` and
/// `lambda_pulled^2 = sum |k varphi_j(z^k)|^2/|z|^2`.
pub fn sandwich_check(data: &SymmetricLaurentData, psi: &PsiForms, k: u32, c: f64, samples: &[Complex<f64>], slack: f64) -> SandwichReport {
    let chi: Vec<LaurentPoly<f64>> = psi.chi.iter().map(|l| l.to_f64()).collect();
    let phi: Vec<LaurentPoly<f64>> = data.phi.iter().map(|l| l.to_f64()).collect();
    let (mut lower, mut upper) = (f64::INFINITY, f64::INFINITY);
    for &z in samples {
        let zk = z.powu(k);
        let r2 = z.norm_sqr();
        let l0: f64 = chi.iter().map(|p| p.eval_f64(z).norm_sqr()).sum::<f64>() / r2;
        let lp: f64 = phi.iter().map(|p| (p.eval_f64(zk) * k as f64).norm_sqr()).sum::<f64>() / r2;
        lower = lower.min((l0 - lp / (c * c)) / l0);
        upper = upper.min((c * c * lp - l0) / l0);
    }
    let holds = !samples.is_empty() && lower >= -slack && upper >= -slack;
    SandwichReport { samples: samples.len(), slack, lower_margin: lower, upper_margin: upper, holds }
}

/// `|oint_{|z|=1} psi_j|` for each `j`.
pub fn loop_periods(psi: &PsiForms, tol: f64) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (j, l) in psi.chi.iter().enumerate() {
        let lf = l.to_f64();
        // psi = chi(z) dz/z and dz/z = i dt on the unit circle.
        let v = integrate(|t| lf.eval_f64(Complex::from_polar(1.0, t)) * Complex::i(), 0.0, TAU, tol, 0.0)?;
        out[j] = v.norm();
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssembleInput {
    pub phi: [L; 4],
    pub b: Vec<Cq>,
    pub k: u32,
    pub r: f64,
    /// Declared omitted sets of `g_1` and `g_2`.
    pub omitted: [Vec<SpherePoint<Q>>; 2],
    pub check_conformality: bool,
    pub samples: usize,
    pub slack: f64,
    pub seed: u64,
    pub tol: f64,
    /// `(nr, ntheta)` of the half-annulus mesh, if wanted.
    pub mesh: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rp2Report {
    pub closed: [bool; 2],
    pub counts: [usize; 2],
    pub check: NonorientableReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoebiusReport {
    pub stages: Vec<String>,
    /// `None` when the conformality stage was skipped.
    pub conformal: Option<bool>,
    pub symmetry: SymmetryReport,
    pub f: FCandidate,
    pub bounds: FBounds,
    pub residues: Vec<ResidueCheck>,
    pub psi: Vec<String>,
    pub psi_symmetric: bool,
    pub sandwich: SandwichReport,
    pub loop_periods: [f64; 4],
    pub rp2: Rp2Report,
    pub identification: String,
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage { stage: name.to_string(), reason: e.to_string() })
}

fn fail(name: &str, reason: impl Into<String>) -> Error {
    Error::Stage { stage: name.to_string(), reason: reason.into() }
}

/// Runs every stage in order; the first failure aborts with its stage name.
pub fn assemble_report(input: &AssembleInput) -> Result<(MoebiusReport, Option<Mesh>)> {
    let mut stages = Vec::new();
    let data = stage("laurent-data", SymmetricLaurentData::new(input.phi.clone()))?;
    stages.push("laurent-data".to_string());

    let conformal = if input.check_conformality {
        if !data.is_conformal() {
            return Err(fail("conformality", Error::NotConformal.to_string()));
        }
        stages.push("conformality".to_string());
        Some(true)
    } else {
        log::warn!("conformality check skipped on request");
        None
    };

    let w = stage("weierstrass-symmetry", data.forms().and_then(|p| data_from_phis(&p)))?;
    let symmetry = stage("weierstrass-symmetry", check_weierstrass_symmetry(&w))?;
    if !symmetry.all() {
        return Err(fail("weierstrass-symmetry", format!("{symmetry:?}")));
    }
    stages.push("weierstrass-symmetry".to_string());

    let f = stage("build-f", build_f(&input.b))?;
    if !f.condition_b {
        return Err(fail("build-f", "f o I_0 != conj f"));
    }
    stages.push("build-f".to_string());

    stage("cover", CoverSpec::new(input.k, f.m))?;
    stages.push("cover".to_string());

    let bounds = stage("f-bounds", f_bounds(&f, input.r, input.k, K_CAP))?;
    let cover = stage("f-bounds", CoverSpec::new(bounds.k, f.m))?;
    stages.push("f-bounds".to_string());

    let residues: Vec<ResidueCheck> = data.phi.iter().map(|p| residue_condition(p, &f, cover.k())).collect();
    if let Some(bad) = residues.iter().find(|r| !r.holds) {
        return Err(fail("residues", format!("residue {}", cx_literal(&bad.residue))));
    }
    stages.push("residues".to_string());

    let psi = stage("pullback", pullback_psi(&data, &f, &cover))?;
    if !psi.symmetric {
        return Err(fail("pullback", "psi is not symmetric"));
    }
    stages.push("pullback".to_string());

    let annulus: Domain<Q> = stage("sandwich", Annulus::new(bounds.outer, vec![]))?.into();
    let samples = stage("sandwich", annulus.sample_grid(input.samples, 1e-9, input.seed))?;
    let sandwich = sandwich_check(&data, &psi, cover.k(), bounds.c, &samples, input.slack);
    if !sandwich.holds {
        return Err(fail("sandwich", format!("{sandwich:?}")));
    }
    stages.push("sandwich".to_string());

    let periods = stage("loop-period", loop_periods(&psi, input.tol))?;
    if periods.iter().any(|p| *p > input.tol.max(1e-9) * 10.0) {
        return Err(fail("loop-period", format!("{periods:?}")));
    }
    stages.push("loop-period".to_string());

    let closed = [involution_omitted_closure(&input.omitted[0]), involution_omitted_closure(&input.omitted[1])];
    if !(closed[0] && closed[1]) {
        return Err(fail("rp2", "declared omitted sets are not antipodally closed"));
    }
    let counts = [rp2_count(&input.omitted[0]).count, rp2_count(&input.omitted[1]).count];
    let check = nonorientable_check(counts[0], counts[1], !(w.g1.is_constant() || w.g2.is_constant()));
    if check.holds == Some(false) {
        return Err(fail("rp2", format!("{:?}", check.verdict)));
    }
    stages.push("rp2".to_string());

    let identification = "z ~ -1/conj(z); the mesh covers 1 <= |z| < R^(1/k), with z ~ -z on |z| = 1".to_string();
    let mesh = match input.mesh {
        None => None,
        Some((nr, ntheta)) => {
            let forms = stage("mesh", psi.forms())?;
            let r1 = 1.0 + (bounds.outer - 1.0) * (nr.saturating_sub(1)) as f64 / nr.max(1) as f64;
            let grid = Grid::Polar { center: [0.0, 0.0], r0: 1.0, r1, nr, ntheta };
            let meta = vec![
                ("identification".to_string(), identification.clone()),
                ("k".to_string(), cover.k().to_string()),
                ("R".to_string(), format!("{}", input.r)),
                ("outer".to_string(), format!("{:.15e}", bounds.outer)),
            ];
            let m = stage("mesh", export_mesh(&forms, &annulus, &grid, Complex::new(1.0, 0.0), input.tol, meta))?;
            stages.push("mesh".to_string());
            Some(m)
        }
    };

    let report = MoebiusReport {
        stages,
        conformal,
        symmetry,
        f,
        bounds,
        residues,
        psi: psi.chi.iter().map(|l| l.to_string()).collect(),
        psi_symmetric: psi.symmetric,
        sandwich,
        loop_periods: periods,
        rp2: Rp2Report { closed, counts, check },
        identification,
    };
    Ok((report, mesh))
}

/// Sample value of `|f|` at `z`, for diagnostics.
pub fn f_modulus(f: &FCandidate, z: Complex<f64>) -> f64 {
    f.f.to_f64().eval_f64(z).norm()
}
