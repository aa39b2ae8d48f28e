//! Triangulated grids of 4D immersions, written as ASCII Wavefront-style text.
//!
//! Layout:
//!
//! ```text
//! # minsurf4 mesh v1
//! # sha256 <hash of the generating data>
//! # meta <key> <value>
//! v <x1> <x2> <x3>
//! # x4 <x4>
//! vt <x4>
//! f a/a b/b c/c
//! ```
//!
//! Each vertex line is followed by its fourth coordinate, once as a comment
//! and once as a texture coordinate so ordinary viewers can color by it.
//! Face indices are 1-based. Numbers use `{:.15e}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::weierstrass::{check_regularity, immerse, obstacles, period_residues_domain, PhiForms};

pub const HEADER: &str = "# minsurf4 mesh v1";
/// Grid points closer than this to a pole or puncture are skipped.
pub const POLE_CLEARANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Grid {
    /// `nx * ny` vertices on `[x0, x1] x [y0, y1]`.
    Rect { x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize },
    /// Rings `r0..=r1` around `center`, periodic in the angle.
    Polar { center: [f64; 2], r0: f64, r1: f64, nr: usize, ntheta: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<Complex<f64>> {
        match *self {
            Grid::Rect { x0, x1, y0, y1, nx, ny } => {
                let step = |a: f64, b: f64, n: usize, i: usize| if n <= 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
                (0..ny)
                    .flat_map(|j| (0..nx).map(move |i| Complex::new(step(x0, x1, nx, i), step(y0, y1, ny, j))))
                    .collect()
            }
            Grid::Polar { center, r0, r1, nr, ntheta } => {
                let c = Complex::new(center[0], center[1]);
                (0..nr)
                    .flat_map(|j| {
                        let r = if nr <= 1 { r0 } else { r0 + (r1 - r0) * j as f64 / (nr - 1) as f64 };
                        (0..ntheta).map(move |i| c + Complex::from_polar(r, std::f64::consts::TAU * i as f64 / ntheta as f64))
                    })
                    .collect()
            }
        }
    }

    /// Triangles over grid indices (0-based).
    pub fn faces(&self) -> Vec<[usize; 3]> {
        let (cols, rows, periodic) = match *self {
            Grid::Rect { nx, ny, .. } => (nx, ny, false),
            Grid::Polar { nr, ntheta, .. } => (ntheta, nr, true),
        };
        let mut out = Vec::new();
        let ncell = if periodic { cols } else { cols.saturating_sub(1) };
        for j in 0..rows.saturating_sub(1) {
            for i in 0..ncell {
                let i1 = (i + 1) % cols;
                let (a, b, c, d) = (j * cols + i, j * cols + i1, (j + 1) * cols + i1, (j + 1) * cols + i);
                out.push([a, b, c]);
                out.push([a, c, d]);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 4]>,
    pub faces: Vec<[usize; 3]>,
    pub meta: Vec<(String, String)>,
    pub source_hash: String,
    /// Grid points dropped because they hit a pole.
    pub skipped: usize,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Builds a mesh from grid values. `eval` returns `None` for points to skip;
/// faces touching a skipped point are dropped.
pub fn build_mesh<F>(grid: &Grid, source: &str, meta: Vec<(String, String)>, eval: F) -> Result<Mesh>
where
    F: FnOnce(&[Complex<f64>]) -> Result<Vec<Option<[f64; 4]>>>,
{
    let pts = grid.points();
    let vals = eval(&pts)?;
    let mut index = vec![usize::MAX; pts.len()];
    let mut vertices = Vec::new();
    let mut skipped = 0;
    for (k, (z, v)) in pts.iter().zip(vals).enumerate() {
        match v.filter(|x| x.iter().all(|c| c.is_finite())) {
            Some(x) => {
                index[k] = vertices.len();
                vertices.push(x);
            }
            None => {
                log::warn!("skipping grid point {z} (pole or outside the domain)");
                skipped += 1;
            }
        }
    }
    let faces = grid
        .faces()
        .into_iter()
        .filter(|f| f.iter().all(|&i| index[i] != usize::MAX))
        .map(|f| f.map(|i| index[i]))
        .collect();
    Ok(Mesh { vertices, faces, meta, source_hash: sha256_hex(source), skipped })
}

/// Mesh of `X = Re int phi` over `grid`, integrated from `base`.
pub fn export_mesh<R: Real>(
    p: &PhiForms<R>,
    d: &Domain<R>,
    grid: &Grid,
    base: Complex<f64>,
    tol: f64,
    meta: Vec<(String, String)>,
) -> Result<Mesh> {
    let reg = check_regularity(p, d)?;
    if !reg.regular {
        return Err(Error::ExportRefused(format!("forms vanish together at {:?}", reg.offending)));
    }
    if !period_residues_domain(p, d).well_defined {
        return Err(Error::ExportRefused("immersion is multivalued".into()));
    }
    let pf = p.to_f64();
    let obs = obstacles(&pf, d);
    let source = format!("{p}{grid:?}\nbase {base}\ntol {tol:e}\n");
    build_mesh(grid, &source, meta, |pts| {
        let keep: Vec<Complex<f64>> = pts
            .iter()
            .copied()
            .filter(|z| d.contains(*z) && obs.iter().all(|o| (o - z).norm() > POLE_CLEARANCE))
            .collect();
        let xs = immerse(p, d, base, &keep, tol)?;
        let mut it = xs.into_iter();
        Ok(pts
            .iter()
            .map(|z| {
                if d.contains(*z) && obs.iter().all(|o| (o - z).norm() > POLE_CLEARANCE) {
                    it.next()
                } else {
                    None
                }
            })
            .collect())
    })
}

fn num(x: f64) -> String {
    format!("{x:.15e}")
}

impl Mesh {
    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(HEADER);
        s.push('\n');
        s.push_str(&format!("# sha256 {}\n", self.source_hash));
        for (k, v) in &self.meta {
            s.push_str(&format!("# meta {k} {v}\n"));
        }
        for v in &self.vertices {
            s.push_str(&format!("v {} {} {}\n# x4 {}\nvt {}\n", num(v[0]), num(v[1]), num(v[2]), num(v[3]), num(v[3])));
        }
        for f in &self.faces {
            let (a, b, c) = (f[0] + 1, f[1] + 1, f[2] + 1);
            s.push_str(&format!("f {a}/{a} {b}/{b} {c}/{c}\n"));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Mesh> {
        let bad = |line: usize, msg: &str| Error::MeshFormat { line: line + 1, msg: msg.to_string() };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == HEADER => {}
            _ => return Err(bad(0, "missing header")),
        }
        let mut mesh = Mesh { vertices: vec![], faces: vec![], meta: vec![], source_hash: String::new(), skipped: 0 };
        let mut pending: Option<[f64; 3]> = None;
        let float = |t: Option<&str>, n: usize| -> Result<f64> {
            t.and_then(|x| x.parse().ok()).ok_or_else(|| bad(n, "expected a number"))
        };
        for (n, line) in lines {
            let mut tok = line.split_whitespace();
            match (tok.next(), tok.next()) {
                (Some("#"), Some("sha256")) => mesh.source_hash = tok.next().unwrap_or_default().to_string(),
                (Some("#"), Some("meta")) => {
                    let key = tok.next().ok_or_else(|| bad(n, "meta without key"))?;
                    mesh.meta.push((key.to_string(), tok.collect::<Vec<_>>().join(" ")));
                }
                (Some("#"), Some("x4")) => {
                    let xyz = pending.take().ok_or_else(|| bad(n, "x4 without vertex"))?;
                    mesh.vertices.push([xyz[0], xyz[1], xyz[2], float(tok.next(), n)?]);
                }
                (Some("v"), first) => pending = Some([float(first, n)?, float(tok.next(), n)?, float(tok.next(), n)?]),
                (Some("vt"), _) => {}
                (Some("f"), first) => {
                    let idx = |t: Option<&str>| -> Result<usize> {
                        t.and_then(|x| x.split('/').next())
                            .and_then(|x| x.parse::<usize>().ok())
                            .filter(|&i| i >= 1 && i <= mesh.vertices.len())
                            .map(|i| i - 1)
                            .ok_or_else(|| bad(n, "bad face index"))
                    };
                    let f = [idx(first)?, idx(tok.next())?, idx(tok.next())?];
                    mesh.faces.push(f);
                }
                (None, _) => {}
                _ => return Err(bad(n, "unknown line")),
            }
        }
        if pending.is_some() {
            return Err(bad(text.lines().count(), "vertex without x4"));
        }
        Ok(mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Annulus, PuncturedPlane};
    use crate::weierstrass::{catenoid, phis_from_data, WeierstrassData};
    use crate::RationalFunction;
    use num_rational::BigRational;

    type F = RationalFunction<BigRational>;

    fn flat() -> PhiForms<BigRational> {
        phis_from_data(&WeierstrassData::new(F::zero(), F::zero(), F::one()).unwrap())
    }

    #[test]
    fn flat_grid_counts() {
        let d = Domain::Plane(PuncturedPlane::plane());
        let grid = Grid::Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0, nx: 10, ny: 10 };
        let m = export_mesh(&flat(), &d, &grid, Complex::new(0.0, 0.0), 1e-10, vec![]).unwrap();
        assert_eq!(m.vertices.len(), 100);
        assert_eq!(m.faces.len(), 162);
        // X = (x/2, -y/2, 0, 0)
        let v = m.vertices[0];
        assert!((v[0] + 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn catenoid_annulus_is_finite_and_round_trips() {
        let d: Domain<BigRational> = Annulus::new(3.0, vec![]).unwrap().into();
        let p = phis_from_data(&catenoid::<BigRational>());
        let grid = Grid::Polar { center: [0.0, 0.0], r0: 0.5, r1: 2.0, nr: 6, ntheta: 12 };
        let meta = vec![("surface".to_string(), "catenoid".to_string())];
        let m = export_mesh(&p, &d, &grid, Complex::new(1.0, 0.0), 1e-10, meta).unwrap();
        assert_eq!(m.vertices.len(), 72);
        assert_eq!(m.faces.len(), 2 * 5 * 12);
        assert!(m.vertices.iter().all(|v| v.iter().all(|x| x.is_finite())));
        let text = m.render();
        let back = Mesh::parse(&text).unwrap();
        assert_eq!(back.render(), text);
        assert_eq!(back.meta, m.meta);
    }

    #[test]
    fn pole_points_are_skipped() {
        let d = Domain::Plane(PuncturedPlane::new(vec![crate::scalar::cx_int(0, 0)]).unwrap());
        let p = phis_from_data(&catenoid::<BigRational>());
        let grid = Grid::Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0, nx: 3, ny: 3 };
        let m = export_mesh(&p, &d, &grid, Complex::new(1.0, 0.0), 1e-10, vec![]).unwrap();
        assert_eq!(m.skipped, 1);
        assert_eq!(m.vertices.len(), 8);
        // Cells split along the a-c diagonal; two triangles avoid the center.
        assert_eq!(m.faces.len(), 2);
    }

    #[test]
    fn irregular_data_is_refused() {
        let zm1: F = "z-1".parse().unwrap();
        let p = PhiForms::new(flat().phi().clone().map(|f| &f * &zm1)).unwrap();
        let d = Domain::Plane(PuncturedPlane::plane());
        let grid = Grid::Rect { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0, nx: 2, ny: 2 };
        assert!(matches!(export_mesh(&p, &d, &grid, Complex::new(0.0, 0.0), 1e-8, vec![]), Err(Error::ExportRefused(_))));
    }

    #[test]
    fn malformed_text() {
        assert!(Mesh::parse("v 1 2 3\n").is_err());
        assert!(Mesh::parse(&format!("{HEADER}\nv 1 2 3\n# x4 0\nf 1/1 2/2 1/1\n")).is_err());
    }
}
