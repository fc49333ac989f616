//! One-dimensional quadrature: adaptive Gauss–Kronrod and composite Simpson.

use crate::error::{Error, Result};

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

fn kronrod<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    Ok((rk * h, ((rk - rg) * h).abs()))
}

/// Adaptive 7/15-point Gauss–Kronrod integral of `f` over `[a, b]`.
///
/// The integrand may fail (for example on a domain violation); the first
/// failure aborts the integration.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, abs_tol, 0usize)];
    let mut total = 0.0;
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (v, err) = kronrod(&mut f, lo, hi)?;
        if err <= tol.max(1e-15 * v.abs()) || depth >= 48 {
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * tol, depth + 1));
            stack.push((lo, mid, 0.5 * tol, depth + 1));
        }
    }
    if !total.is_finite() {
        return Err(Error::Invalid("quadrature produced a non-finite value".into()));
    }
    Ok(total)
}

/// Nodes and weights of composite Simpson on `[a, b]` with `n` (odd) nodes.
pub fn simpson(a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Invalid(format!("Simpson needs an odd node count >= 3, got {n}")));
    }
    let h = (b - a) / (n - 1) as f64;
    let nodes = (0..n).map(|i| a + h * i as f64).collect();
    let weights = (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect();
    Ok((nodes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_smooth_functions() {
        let v = integrate(|x| Ok(x.sinh().powi(2)), 0.0, 3.0, 1e-13).unwrap();
        let exact = (6.0f64).sinh() / 4.0 - 1.5;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let (x, w) = simpson(-1.0, 2.0, 7).unwrap();
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(3)).sum();
        assert!((v - 3.75).abs() < 1e-13);
        assert!(simpson(0.0, 1.0, 4).is_err());
    }
}
