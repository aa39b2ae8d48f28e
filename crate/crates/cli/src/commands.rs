use std::f64::consts::PI;

use anyhow::{anyhow, bail, Context, Result};
use minsurf4::falsify::{falsify, FalsifyBounds};
use minsurf4::gauss_map::{verify_main_inequality, Verdict};
use minsurf4::lagrangian::{
    gauss_bound_check, gauss_map_pair, lagrangian_minimality_check, nondegenerate, poles_in_domain, HolomorphicPair,
    LagrangianSpec, MinimalityWitness,
};
use minsurf4::mesh::{build_mesh, export_mesh, sha256_hex, Grid};
use minsurf4::metric::{curvature_of, MetricFactor, MetricSpec};
use minsurf4::nonorientable::{assemble_report, AssembleInput, CIRCLE_TOL};
use minsurf4::scalar::cx_to_f64;
use minsurf4::weierstrass::{phis_from_data, WeierstrassData, RESIDUE_REAL_TOL};
use minsurf4::{Domain, ExactScalar};
use num_complex::Complex;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{self, require, DomainCfg, FactorCfg, FalsifyCfg, Loaded, MetricCfg, RunConfig};
use crate::report::{Report, Sink};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_H: f64 = 1e-3;
/// Relative agreement required between closed-form and stencil curvature.
pub const CURVATURE_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub struct Ctx {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub format: Format,
    pub sink: Sink,
}

impl Ctx {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }
}

fn inputs(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn finish(mut r: Report, verdict: impl ToString, failed: bool, result: impl Serialize) -> Result<Report> {
    r.verdict = verdict.to_string();
    r.exit_code = if failed { 2 } else { 0 };
    r.result = serde_json::to_value(result)?;
    Ok(r)
}

pub fn verify_main(loaded: &Loaded, command: &str) -> Result<Report> {
    let cfg = &loaded.cfg;
    let d = require(&cfg.domain, "domain")?.plane()?;
    let mc = require(&cfg.metric, "metric")?;
    if mc.factors.is_empty() {
        bail!("[metric] needs at least one [[metric.factors]] entry");
    }
    let factors = mc
        .factors
        .iter()
        .map(|f| Ok(MetricFactor { g: config::rational(&f.g)?, m: f.m }))
        .collect::<Result<Vec<_>>>()?;
    let spec = MetricSpec::new(factors, config::rational(&mc.omega_hat)?)?;
    let rep = verify_main_inequality(&spec, &d)?;
    let r = Report::new(command, &loaded.text, inputs(cfg));
    finish(r, rep.verdict, rep.verdict == Verdict::Counterexample, &rep)
}

/// Exact points on the unit circle near the `n`-th roots of unity: the
/// Cayley image of `tan(theta/2)` rounded to three decimals. The 1st, 2nd
/// and 4th roots come out exactly.
pub fn circle_points(n: usize) -> Vec<String> {
    (0..n)
        .map(|j| {
            let mut theta = 2.0 * PI * j as f64 / n as f64;
            if theta > PI + 1e-12 {
                theta -= 2.0 * PI;
            }
            if (theta - PI).abs() < 1e-12 {
                return "-1".to_string();
            }
            let t = BigRational::new(((theta / 2.0).tan() * 1000.0).round().to_string().parse().unwrap(), 1000.into());
            let one = BigRational::from_integer(1.into());
            let den = &one + &t * &t;
            let re = (&one - &t * &t) / &den;
            let im = (BigRational::from_integer(2.into()) * t) / den;
            minsurf4::scalar::cx_literal(&Complex::new(re, im))
        })
        .collect()
}

/// Config of the sharpness family with `p` ends: `p - 1` finite punctures
/// plus infinity.
pub fn example_config(p: usize, m: &[u32]) -> Result<String> {
    if p < 2 {
        bail!("p must be at least 2, got {p}");
    }
    if m.is_empty() {
        bail!("m needs at least one entry");
    }
    let punctures = circle_points(p - 1);
    let pts = config::complexes(&punctures)?;
    let (spec, _) = MetricSpec::<ExactScalar>::sharpness_family(&pts, m)?;
    let cfg = RunConfig {
        domain: Some(DomainCfg { punctures, annulus_radius: None }),
        metric: Some(MetricCfg {
            omega_hat: spec.omega_hat().to_string(),
            factors: m.iter().map(|&m| FactorCfg { g: "z".into(), m }).collect(),
        }),
        ..Default::default()
    };
    Ok(toml::to_string(&cfg)?)
}

pub fn gen_example(ctx: &Ctx, p: usize, m: &[u32]) -> Result<Report> {
    let text = example_config(p, m)?;
    ctx.sink.artifact("gen-example.toml", text.as_bytes())?;
    let loaded = Loaded { cfg: config::parse(&text)?, text };
    verify_main(&loaded, "gen-example")
}

fn bounds(c: &FalsifyCfg) -> FalsifyBounds {
    let d = FalsifyBounds::default();
    FalsifyBounds {
        punctures_max: c.punctures_max.unwrap_or(d.punctures_max),
        m_max: c.m_max.unwrap_or(d.m_max),
        factors_max: c.factors_max.unwrap_or(d.factors_max),
        e_min: c.e_min.unwrap_or(d.e_min),
        e_max: c.e_max.unwrap_or(d.e_max),
        attempts_per_instance: c.attempts_per_instance.unwrap_or(d.attempts_per_instance),
    }
}

pub fn run_falsify(ctx: &Ctx, loaded: Option<&Loaded>, n: Option<usize>) -> Result<Report> {
    let fc = loaded.and_then(|l| l.cfg.falsify.clone()).unwrap_or_default();
    let seed = ctx
        .seed
        .or(fc.seed)
        .ok_or_else(|| anyhow!("falsify needs an explicit seed (--seed or [falsify] seed)"))?;
    let n = n.or(fc.n).unwrap_or(1000);
    let b = bounds(&fc);
    if b.e_min > b.e_max || b.punctures_max == 0 || b.factors_max == 0 {
        bail!("inconsistent falsify bounds: {b:?}");
    }
    let echo = json!({ "n": n, "seed": seed, "bounds": &b });
    let text = match loaded {
        Some(l) => l.text.clone(),
        None => echo.to_string(),
    };
    let (summary, rows) = falsify(seed, n, &b)?;
    match ctx.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row)?;
            }
            ctx.sink.artifact("falsify.csv", &w.into_inner()?)?;
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            ctx.sink.artifact("falsify-rows.json", s.as_bytes())?;
        }
    }
    let mut r = Report::new("falsify", &text, echo);
    r.seed = Some(seed);
    let verdict = if summary.counterexamples > 0 { "counterexample" } else { "consistent" };
    if summary.complete < n {
        log::warn!("only {} of {n} complete instances found in {} attempts", summary.complete, summary.attempts);
    }
    finish(r, verdict, summary.counterexamples > 0, &summary)
}

#[derive(Serialize)]
struct CurvatureSample {
    z: String,
    lambda2: Option<f64>,
    curvature: Option<f64>,
    /// Literal variant with the unsquared Wronskian.
    curvature_unsquared: Option<f64>,
    curvature_stencil: Option<f64>,
    agrees: Option<bool>,
    witness: Option<MinimalityWitness>,
    note: Option<String>,
}

fn curvature_sample(spec: &LagrangianSpec<ExactScalar>, label: &str, z: Complex<f64>, h: f64) -> CurvatureSample {
    let num = spec.numeric();
    let mut s = CurvatureSample {
        z: label.to_string(),
        lambda2: None,
        curvature: None,
        curvature_unsquared: None,
        curvature_stencil: None,
        agrees: None,
        witness: None,
        note: None,
    };
    match num.metric_curvature(z) {
        Ok((l2, k)) => {
            s.lambda2 = Some(l2);
            s.curvature = Some(k);
            s.curvature_unsquared = num.unsquared_curvature(z).ok().map(|x| x.1);
            match curvature_of(|w| num.lambda2(w).sqrt(), z, h) {
                Ok(st) => {
                    s.curvature_stencil = Some(st);
                    s.agrees = Some((st - k).abs() <= CURVATURE_TOL * k.abs().max(1.0));
                }
                Err(e) => s.note = Some(e.to_string()),
            }
        }
        Err(e) => s.note = Some(e.to_string()),
    }
    match lagrangian_minimality_check(spec, z, h) {
        Ok(w) => s.witness = Some(w),
        Err(e) => s.note = Some(e.to_string()),
    }
    s
}

fn grid_of(cfg: &RunConfig) -> Option<&Grid> {
    cfg.mesh.as_ref().map(|m| &m.grid)
}

fn render_mesh(mesh: &minsurf4::mesh::Mesh) -> (String, String) {
    let text = mesh.render();
    let hash = sha256_hex(&text);
    (text, hash)
}

pub fn lagrangian(ctx: &Ctx, loaded: &Loaded) -> Result<Report> {
    let cfg = &loaded.cfg;
    let lc = require(&cfg.lagrangian, "lagrangian")?;
    let pair = HolomorphicPair { f1: config::rational(&lc.f1)?, f2: config::rational(&lc.f2)? };
    let beta = PI * lc.beta_over_pi.f64()?;
    let h = match &lc.h {
        Some(h) => h.positive("h")?,
        None => DEFAULT_H,
    };
    let plane = config::plane(&lc.punctures)?;
    let domain: Domain<ExactScalar> = plane.clone().into();
    let poles = poles_in_domain(&pair, &domain)?;
    if !poles.is_empty() {
        bail!("F has poles in the domain at {poles:?}; puncture them");
    }
    if lc.samples.is_empty() {
        bail!("[lagrangian] samples must not be empty");
    }
    let spec = LagrangianSpec::new(pair, beta);
    let nondeg = nondegenerate(&spec, &domain)?;
    let samples = lc
        .samples
        .iter()
        .map(|s| {
            let z = cx_to_f64(&config::complex(s)?);
            if !domain.contains(z) {
                bail!("sample {s} lies outside the domain");
            }
            Ok(curvature_sample(&spec, s, z, h))
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = gauss_bound_check(&spec, &plane)?;
    let (g, phase) = gauss_map_pair(&spec);

    let mut mesh_info = Value::Null;
    if let Some(grid) = grid_of(cfg) {
        let n = spec.numeric();
        let source = format!("{}\n{}\nbeta {beta:e}\n{grid:?}\n", spec.pair().f1, spec.pair().f2);
        let meta = vec![("command".to_string(), "lagrangian".to_string())];
        let mesh = build_mesh(grid, &source, meta, |pts| {
            Ok(pts
                .iter()
                .map(|&z| {
                    domain.contains(z).then(|| {
                        let f = n.f(z);
                        [f[0].re, f[0].im, f[1].re, f[1].im]
                    })
                })
                .collect())
        })?;
        let (text, hash) = render_mesh(&mesh);
        ctx.sink.artifact("lagrangian.obj", text.as_bytes())?;
        mesh_info = json!({ "vertices": mesh.vertices.len(), "faces": mesh.faces.len(), "skipped": mesh.skipped, "sha256": hash });
    }

    let mismatch = samples.iter().any(|s| s.agrees == Some(false));
    let failed = mismatch || bound.verdict == Verdict::Counterexample;
    let mut r = Report::new("lagrangian", &loaded.text, inputs(cfg));
    r.tolerances.finite_difference_step = Some(h);
    r.tolerances.curvature_agreement = Some(CURVATURE_TOL);
    let verdict = if mismatch { "curvature-mismatch".to_string() } else { bound.verdict.to_string() };
    let result = json!({
        "beta": spec.beta(),
        "spinors": { "s1": spec.s1().to_string(), "s2": spec.s2().to_string() },
        "gauss_map": { "g": g.map(|g| g.to_string()), "phase": [phase.re, phase.im] },
        "nondegeneracy": nondeg,
        "samples": samples,
        "gauss_bound": bound,
        "mesh": mesh_info,
    });
    finish(r, verdict, failed, result)
}

pub fn nonorientable(ctx: &Ctx, loaded: &Loaded, check_conformality: bool) -> Result<Report> {
    let cfg = &loaded.cfg;
    let nc = require(&cfg.nonorientable, "nonorientable")?;
    if nc.phi.len() != 4 {
        bail!("[nonorientable] phi needs exactly 4 entries, got {}", nc.phi.len());
    }
    let phi: Vec<_> = nc.phi.iter().map(|s| config::laurent(s)).collect::<Result<_>>()?;
    let seed = ctx
        .seed
        .or(nc.seed)
        .ok_or_else(|| anyhow!("nonorientable needs an explicit seed (--seed or [nonorientable] seed)"))?;
    let points = |l: &[String]| l.iter().map(|s| config::point(s)).collect::<Result<Vec<_>>>();
    let mesh = match (nc.mesh_nr, nc.mesh_ntheta) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => bail!("mesh_nr and mesh_ntheta must be given together"),
    };
    let slack = nc.slack.f64()?;
    if slack.is_nan() || slack < 0.0 {
        bail!("slack must be nonnegative");
    }
    let input = AssembleInput {
        phi: phi.try_into().map_err(|_| anyhow!("phi needs 4 entries"))?,
        b: config::complexes(&nc.b)?,
        k: nc.k,
        r: nc.radius.positive("radius")?,
        omitted: [points(&nc.omitted_g1)?, points(&nc.omitted_g2)?],
        check_conformality,
        samples: nc.samples,
        slack,
        seed,
        tol: ctx.tol(),
        mesh,
    };
    let (rep, mesh) = assemble_report(&input).context("nonorientable pipeline")?;
    let mut mesh_info = Value::Null;
    if let Some(m) = &mesh {
        let (text, hash) = render_mesh(m);
        ctx.sink.artifact("nonorientable.obj", text.as_bytes())?;
        mesh_info = json!({ "vertices": m.vertices.len(), "faces": m.faces.len(), "skipped": m.skipped, "sha256": hash });
    }
    let mut r = Report::new("nonorientable", &loaded.text, inputs(cfg));
    r.seed = Some(seed);
    r.tolerances.quadrature = Some(ctx.tol());
    r.tolerances.unit_circle = Some(CIRCLE_TOL);
    r.tolerances.sandwich_slack = Some(slack);
    let v = rep.rp2.check.verdict;
    let failed = matches!(v, Verdict::Counterexample | Verdict::ImpossibleConfiguration);
    finish(r, v, failed, json!({ "report": rep, "mesh": mesh_info }))
}

pub fn mesh(ctx: &Ctx, loaded: &Loaded) -> Result<Report> {
    let cfg = &loaded.cfg;
    let wc = require(&cfg.weierstrass, "weierstrass")?;
    let mc = require(&cfg.mesh, "mesh")?;
    let domain = require(&cfg.domain, "domain")?.build()?;
    let w = WeierstrassData::new(config::rational(&wc.g1)?, config::rational(&wc.g2)?, config::rational(&wc.omega_hat)?)?;
    let phi = phis_from_data(&w);
    let base = match &mc.base {
        Some(s) => cx_to_f64(&config::complex(s)?),
        None => *mc
            .grid
            .points()
            .iter()
            .find(|z| domain.contains(**z))
            .ok_or_else(|| anyhow!("no grid point lies in the domain"))?,
    };
    let meta = vec![
        ("command".to_string(), "mesh".to_string()),
        ("config_sha256".to_string(), sha256_hex(&loaded.text)),
    ];
    let m = export_mesh(&phi, &domain, &mc.grid, base, ctx.tol(), meta)?;
    let (text, hash) = render_mesh(&m);
    ctx.sink.artifact("mesh.obj", text.as_bytes())?;
    let finite = m.vertices.iter().all(|v| v.iter().all(|x| x.is_finite()));
    let mut r = Report::new("mesh", &loaded.text, inputs(cfg));
    r.tolerances.quadrature = Some(ctx.tol());
    r.tolerances.residue_real = Some(RESIDUE_REAL_TOL);
    let result = json!({
        "phi": phi.to_string(),
        "base": [base.re, base.im],
        "vertices": m.vertices.len(),
        "faces": m.faces.len(),
        "skipped": m.skipped,
        "source_sha256": m.source_hash,
        "mesh_sha256": hash,
        "finite": finite,
    });
    finish(r, if finite { "ok" } else { "non-finite" }, !finite, result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_are_exact_where_possible() {
        assert_eq!(circle_points(4).len(), 4);
        let pts = config::complexes(&circle_points(4)).unwrap();
        let expect = [(1, 0), (0, 1), (-1, 0), (0, -1)].map(|(a, b)| minsurf4::scalar::cx_int::<ExactScalar>(a, b));
        assert_eq!(pts, expect.to_vec());
        for n in 1..12 {
            let pts = config::complexes(&circle_points(n)).unwrap();
            assert!(minsurf4::PuncturedPlane::new(pts.clone()).is_ok());
            for p in pts {
                assert_eq!(minsurf4::scalar::norm_sqr(&p), BigRational::from_integer(1.into()));
            }
        }
    }

    #[test]
    fn example_config_round_trips() {
        let text = example_config(4, &[1, 1]).unwrap();
        let cfg = config::parse(&text).unwrap();
        assert_eq!(cfg.metric.unwrap().factors.len(), 2);
        assert!(example_config(1, &[1]).is_err());
    }
}
