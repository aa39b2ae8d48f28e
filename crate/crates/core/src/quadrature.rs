//! Adaptive Gauss–Kronrod (7/15 point) quadrature of complex integrands.

use num_complex::Complex;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

/// One G7/K15 panel: (Kronrod estimate, |K - G|).
fn panel<F: Fn(f64) -> Complex<f64>>(f: &F, a: f64, b: f64) -> (Complex<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// `int_a^b f` to within `abs_tol + rel_tol * |integral|`.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Complex<f64>>
where
    F: Fn(f64) -> Complex<f64>,
{
    if a == b {
        return Ok(Complex::new(0.0, 0.0));
    }
    let (whole, _) = panel(&f, a, b);
    let scale = whole.norm();
    let mut total = Complex::new(0.0, 0.0);
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = panel(&f, lo, hi);
        if !(val.re.is_finite() && val.im.is_finite()) {
            return Err(Error::Quadrature { a: lo, b: hi });
        }
        let width = (hi - lo) / (b - a);
        let budget = (abs_tol + rel_tol * scale) * width.abs();
        if err <= budget || err <= 1e-15 * val.norm() {
            total += val;
        } else if depth >= MAX_DEPTH {
            return Err(Error::Quadrature { a: lo, b: hi });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(|t| Complex::new(f(t), 0.0), a, b, abs_tol, rel_tol).map(|c| c.re)
}
