//! Polynomial roots with multiplicities.
//!
//! Multiplicities are found exactly: coefficients are lifted to Gaussian
//! rationals (finite floats convert without rounding) and split into
//! square-free factors by Yun's algorithm. Each factor has simple roots,
//! which Aberth–Ehrlich iteration locates to full double precision. Roots
//! closer than the cluster tolerance are then merged.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::{cx_to_exact, cx_to_f64, Real};

/// Relative distance under which two numeric roots are considered equal.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    pub value: Complex<f64>,
    pub multiplicity: usize,
}

/// All roots of `p`, counted with multiplicity (the multiplicities sum to
/// `deg p`). Roots within `tol * max(1, |r|)` of each other are merged.
pub fn roots<R: Real>(p: &Polynomial<R>, tol: f64) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let exact: Polynomial<BigRational> = p.map(cx_to_exact);
    let mut found: Vec<Root> = Vec::new();
    for (factor, mult) in square_free_decomposition(&exact) {
        let coeffs: Vec<Complex<f64>> = factor.coeffs().iter().map(cx_to_f64).collect();
        for value in aberth(&coeffs, 500) {
            found.push(Root { value, multiplicity: mult });
        }
    }
    Ok(cluster(found, tol))
}

fn cluster(mut found: Vec<Root>, tol: f64) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::new();
    found.sort_by_key(|r| std::cmp::Reverse(r.multiplicity));
    for r in found {
        let near = out
            .iter_mut()
            .find(|o| (o.value - r.value).norm() <= tol * o.value.norm().max(1.0));
        match near {
            Some(o) => {
                let total = (o.multiplicity + r.multiplicity) as f64;
                o.value = (o.value * o.multiplicity as f64 + r.value * r.multiplicity as f64) / total;
                o.multiplicity += r.multiplicity;
            }
            None => out.push(r),
        }
    }
    out.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });
    out
}

/// Yun's algorithm: `p = c * prod f_i^i` with each `f_i` monic and square-free.
/// Factors of degree 0 are omitted.
pub fn square_free_decomposition(p: &Polynomial<BigRational>) -> Vec<(Polynomial<BigRational>, usize)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let p = p.monic();
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.exact_div(&a0).expect("gcd divides");
    let c = dp.exact_div(&a0).expect("gcd divides");
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).expect("gcd divides");
        let c = d.exact_div(&a).expect("gcd divides");
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Simultaneous Aberth–Ehrlich iteration on the coefficients (ascending).
/// Intended for square-free input; returns `deg` approximations.
pub fn aberth(coeffs: &[Complex<f64>], max_iter: usize) -> Vec<Complex<f64>> {
    let mut c: Vec<Complex<f64>> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    for x in c.iter_mut() {
        *x /= lead;
    }
    if n == 1 {
        return vec![-c[0]];
    }
    let dc: Vec<Complex<f64>> = (1..=n).map(|k| c[k] * k as f64).collect();
    let horner = |cs: &[Complex<f64>], z: Complex<f64>| -> Complex<f64> { cs.iter().rev().fold(Complex::<f64>::zero(), |acc, a| acc * z + a) };

    // Initial radius from the Cauchy-type bound max |a_{n-k}|^{1/k}.
    let radius = (1..=n)
        .map(|k| c[n - k].norm().powf(1.0 / k as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex::from_polar(radius, theta)
        })
        .collect();

    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let pz = horner(&c, z[k]);
            if pz.is_zero() {
                continue;
            }
            let ratio = pz / horner(&dc, z[k]);
            let repulsion: Complex<f64> = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step: Complex<f64> = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish; keep a step only if it reduces |p|.
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let pz = horner(&c, *zk);
            let dz = horner(&dc, *zk);
            if dz.is_zero() {
                break;
            }
            let cand = *zk - pz / dz;
            if horner(&c, cand).norm() < pz.norm() {
                *zk = cand;
            } else {
                break;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx_int;

    type P = Polynomial<BigRational>;

    #[test]
    fn z_squared_plus_one() {
        let p = P::new(vec![cx_int(1, 0), cx_int(0, 0), cx_int(1, 0)]);
        let r = roots(&p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - Complex::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1].value - Complex::new(0.0, 1.0)).norm() < 1e-14);
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn triple_root() {
        let p = P::linear(&cx_int(2, 0)).pow(3);
        let r = roots(&p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[0].value - Complex::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn float_input_keeps_exact_multiplicity() {
        let p: Polynomial<f64> = Polynomial::linear(&Complex::new(0.5, -1.0)).pow(2);
        let r = roots(&p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
    }

    #[test]
    fn zero_polynomial_is_domain_error() {
        assert_eq!(roots(&P::zero(), 1e-8), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn yun_factors() {
        // (z-1)^2 (z+i)^3 (z-3)
        let a = P::linear(&cx_int(1, 0)).pow(2);
        let b = P::linear(&cx_int(0, -1)).pow(3);
        let c = P::linear(&cx_int(3, 0));
        let p = &(&a * &b) * &c;
        let sf = square_free_decomposition(&p);
        let degs: Vec<(usize, usize)> = sf.iter().map(|(f, m)| (f.degree(), *m)).collect();
        assert_eq!(degs, vec![(1, 1), (1, 2), (1, 3)]);
    }

    #[test]
    fn non_monic_input() {
        // i z^2 + i
        let p = P::new(vec![cx_int(0, 1), cx_int(0, 0), cx_int(0, 1)]);
        let r = roots(&p, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(r.len(), 2);
        let p = P::linear(&cx_int(1, 1)).pow(2).scale(&cx_int(3, -2));
        assert_eq!(roots(&p, DEFAULT_CLUSTER_TOL).unwrap()[0].multiplicity, 2);
    }
}
