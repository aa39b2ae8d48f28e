//! Run configuration: one TOML file per run, with a section per pipeline.
//!
//! Every number may be written as a TOML number or as an exact string such
//! as `"1/3"` or `"(1/2-3/4i)"`. Expressions in `z` follow the core text
//! grammar.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use minsurf4::algebra::{parse_complex, parse_rational};
use minsurf4::mesh::Grid;
use minsurf4::{Annulus, Domain, ExactComplex, ExactLaurent, ExactRational, ExactScalar, PuncturedPlane, SpherePoint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn exact(&self) -> Result<ExactScalar> {
        match self {
            Number::Int(n) => Ok(ExactScalar::from_integer((*n).into())),
            Number::Float(x) => ExactScalar::from_float(*x).ok_or_else(|| anyhow!("{x} is not finite")),
            Number::Text(s) => {
                let c: ExactComplex = parse_complex(s).with_context(|| format!("bad number {s:?}"))?;
                if !c.im.is_zero() {
                    bail!("expected a real number, got {s:?}");
                }
                Ok(c.re)
            }
        }
    }

    pub fn f64(&self) -> Result<f64> {
        match self {
            Number::Float(x) => Ok(*x),
            _ => self.exact()?.to_f64().ok_or_else(|| anyhow!("number out of range")),
        }
    }

    pub fn positive(&self, what: &str) -> Result<f64> {
        let x = self.f64()?;
        if !(x.is_finite() && x > 0.0) {
            bail!("{what} must be positive, got {x}");
        }
        Ok(x)
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<DomainCfg>,
    pub metric: Option<MetricCfg>,
    pub weierstrass: Option<WeierstrassCfg>,
    pub falsify: Option<FalsifyCfg>,
    pub lagrangian: Option<LagrangianCfg>,
    pub nonorientable: Option<NonorientableCfg>,
    pub mesh: Option<MeshCfg>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainCfg {
    #[serde(default)]
    pub punctures: Vec<String>,
    /// Present for the annulus `1/R < |z| < R`.
    pub annulus_radius: Option<Number>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MetricCfg {
    pub omega_hat: String,
    #[serde(default)]
    pub factors: Vec<FactorCfg>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FactorCfg {
    pub g: String,
    pub m: u32,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeierstrassCfg {
    pub g1: String,
    pub g2: String,
    pub omega_hat: String,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FalsifyCfg {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub punctures_max: Option<usize>,
    pub m_max: Option<u32>,
    pub factors_max: Option<usize>,
    pub e_min: Option<u32>,
    pub e_max: Option<u32>,
    pub attempts_per_instance: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianCfg {
    pub f1: String,
    pub f2: String,
    /// The Lagrangian angle divided by pi.
    pub beta_over_pi: Number,
    #[serde(default)]
    pub punctures: Vec<String>,
    /// Points where curvature and minimality witnesses are evaluated.
    pub samples: Vec<String>,
    /// Finite-difference step.
    pub h: Option<Number>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NonorientableCfg {
    /// Laurent data `varphi_1..4`, with `phi_j = varphi_j dz / z`.
    pub phi: Vec<String>,
    pub b: Vec<String>,
    pub k: u32,
    pub radius: Number,
    pub omitted_g1: Vec<String>,
    pub omitted_g2: Vec<String>,
    pub samples: usize,
    pub slack: Number,
    pub seed: Option<u64>,
    pub mesh_nr: Option<usize>,
    pub mesh_ntheta: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MeshCfg {
    pub grid: Grid,
    /// Base point of the integration; defaults to the first grid point.
    pub base: Option<String>,
}

/// The config text, its parsed form and its hash.
pub struct Loaded {
    pub text: String,
    pub cfg: RunConfig,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg = parse(&text).with_context(|| format!("malformed config {}", path.display()))?;
    Ok(Loaded { text, cfg })
}

pub fn parse(text: &str) -> Result<RunConfig> {
    Ok(toml::from_str(text)?)
}

pub fn rational(s: &str) -> Result<ExactRational> {
    parse_rational(s).with_context(|| format!("cannot parse {s:?}"))
}

pub fn complex(s: &str) -> Result<ExactComplex> {
    parse_complex(s).with_context(|| format!("cannot parse {s:?}"))
}

pub fn laurent(s: &str) -> Result<ExactLaurent> {
    ExactLaurent::from_rational(&rational(s)?).with_context(|| format!("{s:?} is not a Laurent polynomial"))
}

pub fn point(s: &str) -> Result<SpherePoint<ExactScalar>> {
    s.parse().with_context(|| format!("cannot parse point {s:?}"))
}

pub fn complexes(list: &[String]) -> Result<Vec<ExactComplex>> {
    list.iter().map(|s| complex(s)).collect()
}

pub fn plane(punctures: &[String]) -> Result<PuncturedPlane<ExactScalar>> {
    Ok(PuncturedPlane::new(complexes(punctures)?)?)
}

impl DomainCfg {
    pub fn build(&self) -> Result<Domain<ExactScalar>> {
        let pts = complexes(&self.punctures)?;
        Ok(match &self.annulus_radius {
            Some(r) => Annulus::new(r.f64()?, pts)?.into(),
            None => PuncturedPlane::new(pts)?.into(),
        })
    }

    pub fn plane(&self) -> Result<PuncturedPlane<ExactScalar>> {
        match self.build()? {
            Domain::Plane(p) => Ok(p),
            Domain::Annulus(_) => bail!("this command needs a punctured plane, not an annulus"),
        }
    }
}

pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
    section.as_ref().ok_or_else(|| anyhow!("config has no [{name}] section"))
}
