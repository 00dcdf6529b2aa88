//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not reach tolerance: estimate {estimate}, error bound {error}")]
    Tolerance { estimate: f64, error: f64 },
    #[error("integrand is not finite at t = {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral and error estimate on one panel.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite(c));
    }
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let (t1, t2) = (c - h * x, c + h * x);
        let (f1, f2) = (f(t1), f(t2));
        if !f1.is_finite() {
            return Err(QuadratureError::NonFinite(t1));
        }
        if !f2.is_finite() {
            return Err(QuadratureError::NonFinite(t2));
        }
        rk += wk * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let res = rk * h;
    let err = ((rk - rg) * h).abs();
    Ok((res, err))
}

/// Adaptive integration of `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64), QuadratureError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (r0, e0) = gk15(&mut f, a, b)?;
    let mut panels = vec![(a, b, r0, e0)];
    let mut total = r0;
    let mut err = e0;
    for _ in 0..2000 {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (pa, pb, pr, pe) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            break;
        }
        let (r1, e1) = gk15(&mut f, pa, mid)?;
        let (r2, e2) = gk15(&mut f, mid, pb)?;
        total += r1 + r2 - pr;
        err += e1 + e2 - pe;
        panels.push((pa, mid, r1, e1));
        panels.push((mid, pb, r2, e2));
    }
    // recompute to shed accumulated cancellation
    total = panels.iter().map(|p| p.2).sum();
    err = panels.iter().map(|p| p.3).sum();
    if err <= abs_tol.max(rel_tol * total.abs()) {
        Ok((total, err))
    } else {
        Err(QuadratureError::Tolerance { estimate: total, error: err })
    }
}
