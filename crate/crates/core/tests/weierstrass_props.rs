use minsurf4::scalar::cx_int;
use minsurf4::weierstrass::{
    check_conformality, data_from_phis, eval_phi, induced_metric_identity, integrate_along, phis_from_data,
    WeierstrassData,
};
use minsurf4::{ExactPoly, ExactRational, ExactScalar};
use num_complex::Complex;
use num_traits::Zero;
use proptest::prelude::*;

fn gi() -> impl Strategy<Value = (i64, i64)> {
    (-4i64..=4, -4i64..=4)
}

fn poly(deg: usize) -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec(gi(), 1..=deg + 1)
        .prop_map(|c| ExactPoly::new(c.iter().map(|&(a, b)| cx_int(a, b)).collect()))
}

/// Rational function of total degree at most 4.
fn rational() -> impl Strategy<Value = ExactRational> {
    (poly(2), poly(2)).prop_filter_map("zero part", |(n, d)| {
        if n.is_zero() {
            return None;
        }
        ExactRational::new(n, d).ok()
    })
}

fn data() -> impl Strategy<Value = WeierstrassData<ExactScalar>> {
    (rational(), rational(), rational()).prop_filter_map("invalid", |(a, b, c)| WeierstrassData::new(a, b, c).ok())
}

fn samples(seed: (i64, i64)) -> Vec<Complex<f64>> {
    (0..100)
        .map(|j| {
            let t = j as f64 * 0.61803 + seed.0 as f64 * 0.1;
            Complex::from_polar(0.3 + 2.5 * ((j * 7 + 3) % 100) as f64 / 100.0, t + seed.1 as f64)
        })
        .collect()
}

fn finite_everywhere(w: &WeierstrassData<ExactScalar>, z: Complex<f64>) -> bool {
    [&w.g1, &w.g2, &w.omega_hat].iter().all(|f| {
        let d = f.to_f64().den().eval_f64(z).norm();
        d > 1e-3
    })
}

// Real rotation with rational entries: (3/5, 4/5) in the (1,2) and (3,4)
// planes followed by a swap of coordinates 1 and 3.
fn rotation() -> [[Complex<ExactScalar>; 4]; 4] {
    let q = |n: i64| Complex::new(ExactScalar::new(n.into(), 5.into()), ExactScalar::zero());
    let z = || Complex::<ExactScalar>::zero();
    [
        [z(), z(), q(3), q(-4)],
        [q(4), q(3), z(), z()],
        [q(3), q(-4), z(), z()],
        [z(), z(), q(4), q(3)],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conformal_and_round_trip_exact(w in data()) {
        let p = phis_from_data(&w);
        prop_assert!(check_conformality(&p).unwrap());
        prop_assert_eq!(data_from_phis(&p).unwrap(), w);
    }

    #[test]
    fn induced_metric_matches(w in data(), seed in gi()) {
        let pts: Vec<Complex<f64>> = samples(seed).into_iter().filter(|&z| finite_everywhere(&w, z)).collect();
        let err = induced_metric_identity(&phis_from_data(&w), &pts).unwrap();
        prop_assert!(err < 1e-12, "relative error {}", err);
    }

    #[test]
    fn rotation_keeps_conformality(w in data()) {
        let p = phis_from_data(&w).transform(&rotation()).unwrap();
        prop_assert!(check_conformality(&p).unwrap());
    }

    #[test]
    fn opposite_gauss_maps_kill_last_form(g in rational(), om in rational()) {
        let w = WeierstrassData::new(g.clone(), -&g, om).unwrap();
        prop_assert!(phis_from_data(&w).phi()[3].is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // Polynomial data, so X = Re int phi is a harmonic polynomial of degree
    // at most 6. Its mean over 8 equally spaced points on a circle equals
    // the center value exactly for degree < 8.
    #[test]
    fn coordinates_are_harmonic(a in poly(2), b in poly(2), c in poly(1), z in (-0.8f64..0.8, -0.8f64..0.8)) {
        prop_assume!(!c.is_zero());
        let w = WeierstrassData::new(
            ExactRational::from_poly(a),
            ExactRational::from_poly(b),
            ExactRational::from_poly(c),
        )
        .unwrap();
        let phi = phis_from_data(&w).to_f64();
        let x = |p: Complex<f64>| integrate_along(phi.phi(), &[Complex::zero(), p], 1e-13).unwrap().map(|v| v.re);
        let z = Complex::new(z.0, z.1);
        let ring: Vec<[f64; 4]> = (0..8).map(|k| x(z + Complex::from_polar(0.1, k as f64 * std::f64::consts::FRAC_PI_4))).collect();
        let mid = x(z);
        let scale = eval_phi(phi.phi(), z).iter().map(|v| v.norm()).fold(1.0, f64::max);
        for j in 0..4 {
            let mean = ring.iter().map(|s| s[j]).sum::<f64>() / 8.0;
            prop_assert!((mean - mid[j]).abs() < 1e-10 * scale, "coordinate {} mean defect {}", j, mean - mid[j]);
        }
    }
}
