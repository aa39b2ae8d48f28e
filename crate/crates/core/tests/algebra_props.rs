use minsurf4::algebra::roots::{roots, DEFAULT_CLUSTER_TOL};
use minsurf4::gauss_map::{apply_to_set, exceptional_values, same_set};
use minsurf4::metric::{conformal_factor, MetricFactor, MetricSpec};
use minsurf4::scalar::cx_int;
use minsurf4::{
    chordal, to_rp2, ExactComplex, ExactLaurent, ExactMoebius, ExactPoint, ExactPoly, ExactRational, Point64, Poly64,
    PuncturedPlane,
};
use nalgebra::{DMatrix, Schur};
use num_complex::Complex;
use proptest::prelude::*;

fn gi() -> impl Strategy<Value = (i64, i64)> {
    (-5i64..=5, -5i64..=5)
}

fn exact_poly(c: &[(i64, i64)]) -> ExactPoly {
    ExactPoly::new(c.iter().map(|&(a, b)| cx_int(a, b)).collect())
}

fn laurent() -> impl Strategy<Value = ExactLaurent> {
    (-3i64..=1, prop::collection::vec(gi(), 1..5))
        .prop_map(|(lo, c)| ExactLaurent::new(lo, c.iter().map(|&(a, b)| cx_int(a, b)).collect()))
}

// Eigenvalues of the companion matrix of a monic-normalized polynomial.
fn companion_roots(c: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    Schur::new(m).eigenvalues().expect("triangular form").iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_match_companion_eigenvalues(
        c in prop::collection::vec((-9.0f64..9.0, -9.0f64..9.0), 6),
        lead in (1.0f64..4.0, -2.0f64..2.0),
    ) {
        let mut coeffs: Vec<Complex<f64>> = c[..5].iter().map(|&(a, b)| Complex::new(a, b)).collect();
        coeffs.push(Complex::new(lead.0, lead.1));
        let p = Poly64::new(coeffs.clone());
        let found = roots(&p, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert_eq!(found.iter().map(|r| r.multiplicity).sum::<usize>(), 5);
        for e in companion_roots(&coeffs) {
            let best = found.iter().map(|r| (r.value - e).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-9 * e.norm().max(1.0), "eigenvalue {} missed by {}", e, best);
        }
    }

    #[test]
    fn residues_sum_to_zero(
        num in prop::collection::vec(gi(), 1..6),
        poles in prop::collection::btree_set(gi(), 1..4),
        exps in prop::collection::vec(1u32..3, 3),
    ) {
        let poles: Vec<ExactComplex> = poles.iter().map(|&(a, b)| cx_int(a, b)).collect();
        let den = poles
            .iter()
            .zip(&exps)
            .fold(ExactPoly::one(), |acc, (p, &e)| &acc * &ExactPoly::linear(p).pow(e));
        let n = exact_poly(&num);
        prop_assume!(!n.is_zero());
        let r = ExactRational::new(n, den).unwrap();
        let total = poles
            .iter()
            .fold(r.residue_at_infinity(), |acc, p| acc + r.residue_at_finite(p));
        prop_assert_eq!(total, cx_int(0, 0));
    }

    #[test]
    fn laurent_ring_laws(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, ExactLaurent::zero());
    }

    #[test]
    fn reflection_and_power_are_ring_maps(a in laurent(), b in laurent(), k in 1u32..5) {
        prop_assert_eq!((&a * &b).antipodal_reflect(), &a.antipodal_reflect() * &b.antipodal_reflect());
        prop_assert_eq!((&a + &b).antipodal_reflect(), &a.antipodal_reflect() + &b.antipodal_reflect());
        prop_assert_eq!((&a * &b).compose_power(k), &a.compose_power(k) * &b.compose_power(k));
        // The involution commutes with z -> z^k only for odd k.
        let odd = 2 * k - 1;
        prop_assert_eq!(a.compose_power(odd).antipodal_reflect(), a.antipodal_reflect().compose_power(odd));
    }

    #[test]
    fn laurent_rational_round_trip(a in laurent()) {
        prop_assert_eq!(ExactLaurent::from_rational(&a.to_rational()).unwrap(), a);
    }

    #[test]
    fn antipodal_map_is_chordal_isometry(a in (-50.0f64..50.0, -50.0f64..50.0), b in (-50.0f64..50.0, -50.0f64..50.0)) {
        let (p, q) = (Point64::finite(a.0, a.1), Point64::finite(b.0, b.1));
        let d = chordal(&p, &q);
        prop_assert!((chordal(&p.antipodal(), &q.antipodal()) - d).abs() < 1e-12);
        prop_assert!((chordal(&p, &p.antipodal()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rp2_class_is_antipodal_invariant(a in gi(), d in 1i64..7) {
        let p = ExactPoint::Finite(Complex::new(
            num_rational::BigRational::new(a.0.into(), d.into()),
            num_rational::BigRational::new(a.1.into(), d.into()),
        ));
        prop_assert_eq!(to_rp2(&p), to_rp2(&p.antipodal()));
        let pf = p.to_f64();
        let (u, v) = (to_rp2(&pf).as_sphere(), to_rp2(&pf.antipodal()).as_sphere());
        prop_assert!(u.approx_eq(&v));
    }

    #[test]
    fn exceptional_values_are_moebius_equivariant(
        num in prop::collection::vec(gi(), 1..4),
        den in prop::collection::vec(gi(), 1..4),
        punct in prop::collection::btree_set(gi(), 0..4),
        t in (gi(), gi(), gi(), gi()),
    ) {
        let g = match ExactRational::new(exact_poly(&num), exact_poly(&den)) {
            Ok(g) if !g.is_constant() => g,
            _ => return Ok(()),
        };
        let Ok(tm) = ExactMoebius::new(cx_int(t.0.0, t.0.1), cx_int(t.1.0, t.1.1), cx_int(t.2.0, t.2.1), cx_int(t.3.0, t.3.1)) else {
            return Ok(());
        };
        let plane = PuncturedPlane::new(punct.iter().map(|&(a, b)| cx_int(a, b)).collect()).unwrap();
        let omitted = exceptional_values(&g, &plane).unwrap();
        prop_assert!(omitted.len() <= plane.punctures().len() + 1);
        let moved = exceptional_values(&tm.compose(&g), &plane).unwrap();
        prop_assert!(same_set(&moved, &apply_to_set(&tm, &omitted)));
    }

    #[test]
    fn conformal_factor_scales_with_omega(
        g in prop::collection::vec(gi(), 2..4),
        m in 0u32..4,
        c in gi(),
        z in (-3.0f64..3.0, -3.0f64..3.0),
    ) {
        prop_assume!(c != (0, 0));
        let gr = ExactRational::from_poly(exact_poly(&g));
        let spec = MetricSpec::new(vec![MetricFactor { g: gr, m }], ExactRational::one()).unwrap();
        let scaled = spec.scaled(&cx_int(c.0, c.1)).unwrap();
        let z = Complex::new(z.0, z.1);
        let cn = ((c.0 * c.0 + c.1 * c.1) as f64).sqrt();
        let (a, b) = (conformal_factor(&spec, z), conformal_factor(&scaled, z));
        prop_assert!((b - cn * a).abs() <= 1e-12 * b.abs().max(1.0));
    }
}

#[test]
fn companion_oracle_on_repeated_roots() {
    // (z - 1 - i)^2 (z + 2) (z^2 + 1): multiplicity comes from the exact split.
    let p = &(&ExactPoly::linear(&cx_int(1, 1)).pow(2) * &ExactPoly::linear(&cx_int(-2, 0)))
        * &exact_poly(&[(1, 0), (0, 0), (1, 0)]);
    let r = roots(&p, DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(r.len(), 4);
    let double = r.iter().find(|x| x.multiplicity == 2).unwrap();
    assert!((double.value - Complex::new(1.0, 1.0)).norm() < 1e-14);
}
