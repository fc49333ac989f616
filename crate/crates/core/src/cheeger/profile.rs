//! Isoperimetric ratios of metric balls in the model spaces.

use super::{CheegerEstimate, Method, Witness};
use crate::ambient::{hyperbolic_distance, AmbientSpace};
use crate::error::{Error, Result};
use crate::quad::integrate;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const PROFILE_QUADRATURE: f64 = 1e-12;

/// Spaces whose metric balls are computed in closed form or by radial
/// quadrature. Hyperbolic coordinates use the Poincaré ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "m", rename_all = "kebab-case")]
pub enum ModelSpace {
    Euclidean(usize),
    Hyperbolic(usize),
    /// `ℍ^m × ℝ`.
    HyperbolicLine(usize),
}

impl ModelSpace {
    pub fn from_ambient(space: &AmbientSpace) -> Result<Self> {
        match space {
            AmbientSpace::Euclidean(n) => Ok(ModelSpace::Euclidean(*n)),
            AmbientSpace::HyperbolicLine(m) => Ok(ModelSpace::HyperbolicLine(*m)),
            AmbientSpace::Product(_) => Err(Error::Invalid("metric balls of general products are not tabulated".into())),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            ModelSpace::Euclidean(m) | ModelSpace::Hyperbolic(m) => m,
            ModelSpace::HyperbolicLine(m) => m + 1,
        }
    }

    /// `inf_r A/V`: `0` for Euclidean space, `m − 1` for `ℍ^m`.
    pub fn asymptotic_ratio(&self) -> Option<f64> {
        match *self {
            ModelSpace::Euclidean(_) => Some(0.0),
            ModelSpace::Hyperbolic(m) => Some(m as f64 - 1.0),
            ModelSpace::HyperbolicLine(_) => None,
        }
    }

    fn check_center(&self, center: &[f64]) -> Result<()> {
        if center.len() != self.dim() {
            return Err(Error::Dimension(format!("center has {} coordinates, space has dimension {}", center.len(), self.dim())));
        }
        match *self {
            ModelSpace::Euclidean(_) => {
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Chart("center is not finite".into()));
                }
            }
            ModelSpace::Hyperbolic(m) | ModelSpace::HyperbolicLine(m) => {
                hyperbolic_distance(&center[..m])?;
                if !center[m..].iter().all(|c| c.is_finite()) {
                    return Err(Error::Chart("center is not finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// Area of the unit sphere `S^k`.
pub fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// `V(B_r) / A(∂B_r)` of `ℍ^m`, as `∫_0^r (sinh t / sinh r)^{m−1} dt`.
fn hyperbolic_volume_over_area(m: usize, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let p = m as i32 - 1;
    // sinh t / sinh r = e^{t−r} (1 − e^{−2t}) / (1 − e^{−2r}), stable for large r.
    let denom = -(-2.0 * r).exp_m1();
    integrate(|t| Ok(((t - r).exp() * -(-2.0 * t).exp_m1() / denom).powi(p)), 0.0, r, PROFILE_QUADRATURE * r.max(1.0))
}

/// Volume and boundary area of a metric ball of radius `r`, each divided by
/// `scale` to stay finite for large hyperbolic radii. Returns
/// `(V / scale, A / scale, ln scale)`.
fn scaled_ball(space: ModelSpace, r: f64) -> Result<(f64, f64, f64)> {
    match space {
        ModelSpace::Euclidean(m) => {
            let a = sphere_area(m - 1) * r.powi(m as i32 - 1);
            Ok((a * r / m as f64, a, 0.0))
        }
        ModelSpace::Hyperbolic(m) => {
            let ln_area = sphere_area(m - 1).ln() + (m as f64 - 1.0) * ln_sinh(r);
            Ok((hyperbolic_volume_over_area(m, r)?, 1.0, ln_area))
        }
        ModelSpace::HyperbolicLine(m) => {
            // Balls of ℍ^m × ℝ are unions of ℍ^m balls of radius r cos φ at height r sin φ.
            let p = m as i32 - 1;
            let rel = |rho: f64| -> f64 {
                if rho <= 0.0 {
                    return if p == 0 { 1.0 } else { 0.0 };
                }
                ((rho - r).exp() * -(-2.0 * rho).exp_m1() / -(-2.0 * r).exp_m1()).powi(p)
            };
            let tol = PROFILE_QUADRATURE * r.max(1.0);
            let area = integrate(|phi| Ok(rel(r * phi.cos()) * r), -FRAC_PI_2, FRAC_PI_2, tol)?;
            let volume = integrate(
                |phi| {
                    let rho = r * phi.cos();
                    Ok(rel(rho) * hyperbolic_volume_over_area(m, rho)? * r * phi.cos())
                },
                -FRAC_PI_2,
                FRAC_PI_2,
                tol,
            )?;
            let ln_scale = sphere_area(m - 1).ln() + (m as f64 - 1.0) * ln_sinh(r);
            Ok((volume, area, ln_scale))
        }
    }
}

fn ln_sinh(r: f64) -> f64 {
    r + (-(-2.0 * r).exp_m1()).ln() - 2f64.ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct BallSample {
    pub radius: f64,
    /// `A(∂B_r) / V(B_r)`.
    pub ratio: f64,
    /// Natural logarithm of the volume.
    pub ln_volume: f64,
    pub ln_area: f64,
    /// Minimum ratio over this and all earlier radii.
    pub running_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BallProfile {
    pub space: ModelSpace,
    pub samples: Vec<BallSample>,
    /// `lim A/V` where known.
    pub asymptote: Option<f64>,
    /// Comparison lower bound `(m − 1)√K` for curvature `≤ −K`, reported only.
    pub curvature_lower_bound: Option<f64>,
}

impl BallProfile {
    /// The running minimum as an upper estimate of the Cheeger constant.
    pub fn estimate(&self) -> Option<CheegerEstimate> {
        let best = self.samples.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio))?;
        Some(CheegerEstimate {
            value: best.ratio,
            witness: Witness::Radius(best.radius),
            method: Method::BallProfile,
            convention: super::Convention::Unnormalized,
        })
    }
}

/// `A/V` of metric balls centered at `center` for each radius.
pub fn ball_ratio_profile(space: ModelSpace, center: &[f64], radii: &[f64]) -> Result<BallProfile> {
    if space.dim() == 0 || matches!(space, ModelSpace::Hyperbolic(0) | ModelSpace::HyperbolicLine(0)) {
        return Err(Error::Dimension("model space must have positive dimension".into()));
    }
    space.check_center(center)?;
    let mut samples = Vec::with_capacity(radii.len());
    let mut running = f64::INFINITY;
    for &r in radii {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Invalid(format!("radius {r} is not positive")));
        }
        let (v, a, ln_scale) = scaled_ball(space, r)?;
        let ratio = a / v;
        running = running.min(ratio);
        samples.push(BallSample {
            radius: r,
            ratio,
            ln_volume: v.ln() + ln_scale,
            ln_area: a.ln() + ln_scale,
            running_min: running,
        });
    }
    let curvature_lower_bound = match space {
        ModelSpace::Hyperbolic(m) => Some(m as f64 - 1.0),
        _ => None,
    };
    Ok(BallProfile { space, samples, asymptote: space.asymptotic_ratio(), curvature_lower_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_ratio_is_m_over_r() {
        for m in 1..5 {
            let p = ball_ratio_profile(ModelSpace::Euclidean(m), &vec![0.3; m], &[0.5, 2.0, 10.0]).unwrap();
            for s in &p.samples {
                assert!((s.ratio - m as f64 / s.radius).abs() < 1e-12);
            }
            assert_eq!(p.samples[2].running_min, p.samples[2].ratio);
        }
        let p = ball_ratio_profile(ModelSpace::Euclidean(3), &[0.0; 3], &[2.0]).unwrap();
        assert!((p.samples[0].ln_volume.exp() - 4.0 / 3.0 * PI * 8.0).abs() < 1e-10);
    }

    #[test]
    fn hyperbolic_plane_matches_closed_forms() {
        let p = ball_ratio_profile(ModelSpace::Hyperbolic(2), &[0.2, -0.1], &[0.5, 1.0, 10.0]).unwrap();
        for s in &p.samples {
            let r = s.radius;
            assert!((s.ratio - 1.0 / (r / 2.0).tanh()).abs() < 1e-10);
            assert!((s.ln_area.exp() - 2.0 * PI * r.sinh()).abs() < 1e-8 * r.sinh());
            assert!((s.ln_volume.exp() - 2.0 * PI * (r.cosh() - 1.0)).abs() < 1e-8 * r.cosh());
        }
        assert!((p.samples[2].ratio - 1.0).abs() < 0.05);
    }

    #[test]
    fn hyperbolic_space_tends_to_two() {
        let p = ball_ratio_profile(ModelSpace::Hyperbolic(3), &[0.0; 3], &[1.0, 10.0, 40.0]).unwrap();
        let closed = |r: f64| 4.0 * r.sinh().powi(2) / ((2.0 * r).sinh() - 2.0 * r);
        for s in &p.samples[..2] {
            assert!((s.ratio - closed(s.radius)).abs() < 1e-10 * closed(s.radius));
        }
        assert!((p.samples[1].ratio - 2.0).abs() < 0.05 * 2.0);
        assert!((p.samples[2].ratio - 2.0).abs() < 1e-10);
        assert_eq!(p.asymptote, Some(2.0));
    }

    #[test]
    fn product_with_a_line_reduces_to_the_plane_for_m_one() {
        let p = ball_ratio_profile(ModelSpace::HyperbolicLine(1), &[0.0, 5.0], &[0.7, 3.0]).unwrap();
        for s in &p.samples {
            assert!((s.ratio - 2.0 / s.radius).abs() < 1e-10);
        }
        // Balls in ℍ²×ℝ are fatter than Euclidean ones; ratio decreases toward 1.
        let q = ball_ratio_profile(ModelSpace::HyperbolicLine(2), &[0.0, 0.0, 0.0], &[0.01, 20.0]).unwrap();
        assert!((q.samples[0].ratio - 3.0 / 0.01).abs() < 1e-3 * 300.0);
        assert!(q.samples[1].ratio > 1.0 && q.samples[1].ratio < 1.2);
    }

    #[test]
    fn chart_violations_are_rejected() {
        assert!(matches!(ball_ratio_profile(ModelSpace::Hyperbolic(2), &[1.0, 0.0], &[1.0]), Err(Error::Chart(_))));
        assert!(ball_ratio_profile(ModelSpace::Hyperbolic(2), &[0.0], &[1.0]).is_err());
        assert!(ball_ratio_profile(ModelSpace::Euclidean(2), &[0.0, 0.0], &[-1.0]).is_err());
    }
}
