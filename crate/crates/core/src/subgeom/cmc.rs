//! Rotationally symmetric constant mean curvature graphs in `ℍ^m × ℝ`.
//!
//! With `S(ρ) = ∫₀^ρ sinh^{m−1}t dt` and `u(ρ) = c S(ρ) / sinh^{m−1}ρ`, the
//! profile `f_c(ρ) = ∫₀^ρ u / √(1 − u²)` has `ḡ(H, ν) = c/m` for the upward
//! normal, provided `|c| ≤ m − 1` (which keeps `|u| < 1`).

use super::frame::frame_at;
use super::immersion::Immersion;
use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::exprmap::Jet2;
use crate::exterior::MultiVector;
use crate::quad::integrate;
use crate::tolerances;
use serde::Serialize;

fn check_params(m: usize, c: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::Invalid("the constant mean curvature family needs m >= 2".into()));
    }
    if !c.is_finite() || c.abs() > (m - 1) as f64 {
        return Err(Error::Invalid(format!("|c| = {} exceeds m - 1 = {}", c.abs(), m - 1)));
    }
    Ok(())
}

/// Below this radius `u` and `u'` come from their Taylor expansions.
const SERIES_RADIUS: f64 = 1e-3;

/// `u(ρ)` and `u'(ρ)`.
fn inner_ratio(m: usize, c: f64, rho: f64) -> Result<(f64, f64)> {
    let k = (m - 1) as f64;
    let mf = m as f64;
    let (u, du) = if rho < SERIES_RADIUS {
        let r2 = rho * rho;
        (
            c * (rho / mf - k * rho * r2 / (3.0 * mf * (mf + 2.0))),
            c * (1.0 / mf - k * r2 / (mf * (mf + 2.0))),
        )
    } else {
        let s = integrate(|t| Ok(t.sinh().powi(m as i32 - 1)), 0.0, rho, 0.0)?;
        let u = c * s / rho.sinh().powi(m as i32 - 1);
        (u, c - k * u / rho.tanh())
    };
    if u.abs() >= 1.0 {
        return Err(Error::Domain { what: format!("inner ratio {u} at r = {rho}"), offset: 0 });
    }
    Ok((u, du))
}

/// `f_c(r)` by adaptive quadrature.
pub fn cmc_profile(m: usize, c: f64, r: f64, quad_tol: f64) -> Result<f64> {
    check_params(m, c)?;
    if r < 0.0 {
        return Err(Error::Invalid(format!("radius must be nonnegative, got {r}")));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    integrate(
        |t| {
            let (u, _) = inner_ratio(m, c, t)?;
            Ok(u / (1.0 - u * u).sqrt())
        },
        0.0,
        r,
        quad_tol,
    )
}

/// The graph `x ↦ (x, f_c(d(0, x)))` over the Poincaré ball.
#[derive(Debug, Clone)]
pub struct CmcGraph {
    m: usize,
    c: f64,
    ambient: AmbientSpace,
}

impl CmcGraph {
    pub fn new(m: usize, c: f64) -> Result<Self> {
        check_params(m, c)?;
        Ok(Self { m, c, ambient: AmbientSpace::HyperbolicLine(m) })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `√((m − 1 − |c|)/(m − 1))`, the lower bound for the angle.
    pub fn angle_bound(&self) -> f64 {
        let k = (self.m - 1) as f64;
        ((k - self.c.abs()) / k).max(0.0).sqrt()
    }

    /// Value and first two derivatives of `x ↦ f_c(ρ(|x|))` as functions of `s = |x|`,
    /// returning `(ψ, ψ'/s, ψ'')`.
    fn radial(&self, s: f64) -> Result<(f64, f64, f64)> {
        let (m, c) = (self.m, self.c);
        if s >= 1.0 {
            return Err(Error::Chart(format!("|x| = {s} is outside the Poincaré ball")));
        }
        let rho = 2.0 * s.atanh();
        let value = cmc_profile(m, c, rho, tolerances::QUADRATURE_ABS)?;
        let w = 1.0 - s * s;
        let r1 = 2.0 / w;
        let r2 = 4.0 * s / (w * w);
        let (u, du) = inner_ratio(m, c, rho)?;
        let q = 1.0 - u * u;
        let f1 = u / q.sqrt();
        let f2 = du / (q * q.sqrt());
        let d1_over_s = if s > 0.0 { f1 * r1 / s } else { 4.0 * c / m as f64 };
        Ok((value, d1_over_s, f2 * r1 * r1 + f1 * r2))
    }
}

impl Immersion for CmcGraph {
    fn param_dim(&self) -> usize {
        self.m
    }

    fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    fn jet(&self, x: &[f64]) -> Result<Vec<Jet2>> {
        let m = self.m;
        if x.len() != m {
            return Err(Error::Dimension(format!("parameter point has {} entries, expected {m}", x.len())));
        }
        let s2: f64 = x.iter().map(|v| v * v).sum();
        let s = s2.sqrt();
        let (value, d1s, d2) = self.radial(s)?;
        let mut out: Vec<Jet2> = (0..m).map(|i| Jet2::variable(m, i, x[i])).collect();
        let mut last = Jet2::constant(m, value);
        for i in 0..m {
            last.grad[i] = d1s * x[i];
            for j in 0..m {
                let radial = if s2 > 0.0 { x[i] * x[j] / s2 } else { 0.0 };
                let id = if i == j { 1.0 } else { 0.0 };
                last.hess[i * m + j] = d2 * radial + d1s * (id - radial);
            }
        }
        out.push(last);
        Ok(out)
    }

    fn label(&self) -> String {
        format!("cmc-graph(m={}, c={})", self.m, self.c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CmcVerification {
    pub m: usize,
    pub c: f64,
    pub samples: usize,
    /// `max |ḡ(H, ν) − c/m|` over the samples.
    pub max_residual: f64,
    pub min_cos_theta: f64,
    pub angle_bound: f64,
    /// `cosθ > √((m − 1 − |c|)/(m − 1))` at every sample.
    pub bound_ok: bool,
}

/// Evaluates `ḡ(H, ν)` and the angle against the volume form of `ℍ^m` at the
/// given parameter points.
pub fn cmc_verify(m: usize, c: f64, samples: &[Vec<f64>]) -> Result<CmcVerification> {
    let g = CmcGraph::new(m, c)?;
    let form = MultiVector::basis(m + 1, &(0..m).collect::<Vec<_>>())?;
    let mut max_residual: f64 = 0.0;
    let mut min_cos = f64::INFINITY;
    let mut bound_ok = true;
    for x in samples {
        let fp = frame_at(&g, x)?;
        let mut nu = fp.normal.column(0).into_owned();
        if nu[m] < 0.0 {
            nu = -nu;
        }
        max_residual = max_residual.max((fp.h.dot(&nu) - c / m as f64).abs());
        let cos = fp.cos_theta(&form)?;
        min_cos = min_cos.min(cos);
        // At c = 0 the graph is a slice and the bound is attained.
        bound_ok &= if c == 0.0 { cos >= g.angle_bound() } else { cos > g.angle_bound() };
    }
    Ok(CmcVerification {
        m,
        c,
        samples: samples.len(),
        max_residual,
        min_cos_theta: min_cos,
        angle_bound: g.angle_bound(),
        bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{seeded, unit_vector};
    use rand::Rng;

    #[test]
    fn profile_matches_closed_form_for_m2_c1() {
        for r in [0.0, 1e-4, 0.3, 1.0, 2.5, 6.0] {
            let v = cmc_profile(2, 1.0, r, 1e-13).unwrap();
            let exact = 2.0 * ((r / 2.0).cosh() - 1.0);
            assert!((v - exact).abs() < 1e-8 * exact.max(1.0), "r = {r}: {v} vs {exact}");
        }
    }

    #[test]
    fn profile_matches_riemann_sum() {
        // Midpoint sum with 10⁶ nodes and an independent inner integral.
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let s = (t.sinh() * t.cosh() - t) / 2.0;
            let u = s / t.sinh().powi(2);
            total += u / (1.0 - u * u).sqrt();
        }
        let v = cmc_profile(3, 1.0, 1.0, 1e-13).unwrap();
        assert!((v - total * h).abs() < 1e-8, "{v} vs {}", total * h);
    }

    #[test]
    fn parameters_out_of_range_are_rejected() {
        assert!(cmc_profile(2, 1.5, 1.0, 1e-12).is_err());
        assert!(CmcGraph::new(3, -2.1).is_err());
        assert_eq!(cmc_profile(3, 0.0, 2.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn mean_curvature_is_constant() {
        let mut rng = seeded(11);
        for (m, c) in [(2, 0.5), (2, 1.0), (3, 1.5), (2, 0.0)] {
            let pts: Vec<Vec<f64>> = (0..20)
                .map(|_| {
                    let r: f64 = rng.random_range(0.0..0.85);
                    (unit_vector(&mut rng, m) * r).iter().copied().collect()
                })
                .collect();
            let v = cmc_verify(m, c, &pts).unwrap();
            assert!(v.max_residual < 1e-6, "{v:?}");
            assert!(v.bound_ok, "{v:?}");
        }
    }

    #[test]
    fn origin_is_handled() {
        let v = cmc_verify(2, 1.0, &[vec![0.0, 0.0]]).unwrap();
        assert!(v.max_residual < 1e-9);
        assert!((v.min_cos_theta - 1.0).abs() < 1e-12);
    }
}
