//! Quadrature on parameter domains and the integral isoperimetric
//! inequalities.

use super::calibrated::CalibratedPoint;
use super::frame::frame_at;
use super::identities::nabla_perp_h;
use super::immersion::Immersion;
use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::quad::simpson;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryNode {
    pub x: Vec<f64>,
    /// Parameter-space length/area weight.
    pub weight: f64,
    /// Outward Euclidean unit normal in parameter space.
    pub normal: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub enum DomainShape {
    Disc { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

/// Interior and boundary quadrature rules for a parameter domain.
#[derive(Debug, Clone, Serialize)]
pub struct MeshDomain {
    pub shape: DomainShape,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub boundary: Vec<BoundaryNode>,
}

fn ring(center: &[f64], radius: f64, nt: usize, outward: f64) -> Vec<BoundaryNode> {
    (0..nt)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / nt as f64;
            let (s, c) = t.sin_cos();
            BoundaryNode {
                x: vec![center[0] + radius * c, center[1] + radius * s],
                weight: radius * 2.0 * PI / nt as f64,
                normal: vec![outward * c, outward * s],
            }
        })
        .collect()
}

/// Tensor product of one-dimensional rules.
fn tensor(rules: &[(Vec<f64>, Vec<f64>)]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut nodes = vec![Vec::new()];
    let mut weights = vec![1.0];
    for (x, w) in rules {
        let mut nn = Vec::with_capacity(nodes.len() * x.len());
        let mut nw = Vec::with_capacity(nodes.len() * x.len());
        for (p, pw) in nodes.iter().zip(&weights) {
            for (xi, wi) in x.iter().zip(w) {
                let mut q = p.clone();
                q.push(*xi);
                nn.push(q);
                nw.push(pw * wi);
            }
        }
        nodes = nn;
        weights = nw;
    }
    (nodes, weights)
}

impl MeshDomain {
    /// Polar grid: Simpson in the radius (`nr` odd) and the trapezoid rule in
    /// the angle (`nt` nodes), exact-order for periodic integrands.
    pub fn disc(center: [f64; 2], radius: f64, nr: usize, nt: usize) -> Result<Self> {
        if radius <= 0.0 || nt < 3 {
            return Err(Error::Invalid("disc needs a positive radius and at least 3 angles".into()));
        }
        Self::polar(DomainShape::Disc { center: center.to_vec(), radius }, center, 0.0, radius, nr, nt)
    }

    pub fn annulus(center: [f64; 2], inner: f64, outer: f64, nr: usize, nt: usize) -> Result<Self> {
        if !(0.0 < inner && inner < outer) || nt < 3 {
            return Err(Error::Invalid("annulus needs 0 < inner < outer and at least 3 angles".into()));
        }
        Self::polar(DomainShape::Annulus { center: center.to_vec(), inner, outer }, center, inner, outer, nr, nt)
    }

    fn polar(shape: DomainShape, center: [f64; 2], r0: f64, r1: f64, nr: usize, nt: usize) -> Result<Self> {
        let (rs, wr) = simpson(r0, r1, nr)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (r, w) in rs.iter().zip(&wr) {
            if *r == 0.0 {
                continue;
            }
            for j in 0..nt {
                let t = 2.0 * PI * j as f64 / nt as f64;
                nodes.push(vec![center[0] + r * t.cos(), center[1] + r * t.sin()]);
                weights.push(w * r * 2.0 * PI / nt as f64);
            }
        }
        let mut boundary = ring(&center, r1, nt, 1.0);
        if r0 > 0.0 {
            boundary.extend(ring(&center, r0, nt, -1.0));
        }
        Ok(Self { shape, nodes, weights, boundary })
    }

    /// Tensor-product Simpson rule on `[lo, hi]` with `n` (odd) nodes per axis.
    pub fn cuboid(lo: &[f64], hi: &[f64], n: usize) -> Result<Self> {
        let m = lo.len();
        if m == 0 || hi.len() != m || lo.iter().zip(hi).any(|(a, b)| a >= b) {
            return Err(Error::Invalid("box needs lo < hi componentwise".into()));
        }
        let rules: Vec<_> = (0..m).map(|a| simpson(lo[a], hi[a], n)).collect::<Result<_>>()?;
        let (nodes, weights) = tensor(&rules);
        let mut boundary = Vec::new();
        for a in 0..m {
            let others: Vec<_> = (0..m).filter(|&b| b != a).map(|b| rules[b].clone()).collect();
            let (fnodes, fweights) = tensor(&others);
            for (side, val) in [(-1.0, lo[a]), (1.0, hi[a])] {
                for (p, w) in fnodes.iter().zip(&fweights) {
                    let mut x = p.clone();
                    x.insert(a, val);
                    let mut normal = vec![0.0; m];
                    normal[a] = side;
                    boundary.push(BoundaryNode { x, weight: *w, normal });
                }
            }
        }
        Ok(Self { shape: DomainShape::Box { lo: lo.to_vec(), hi: hi.to_vec() }, nodes, weights, boundary })
    }

    pub fn dim(&self) -> usize {
        self.nodes.first().map_or(0, |x| x.len())
    }

    /// Parameter-space volume of the domain by quadrature.
    pub fn param_volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn param_boundary(&self) -> f64 {
        self.boundary.iter().map(|b| b.weight).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HeinzCheck {
    /// `m ‖H‖ inf_D cosθ` with `‖H‖` its infimum over the mesh.
    pub lhs: f64,
    /// `sup_{∂D} sinθ · A(∂D) / V(D)`.
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricResult {
    /// `|∫_D (−m cosθ ‖H‖² + ⟨∇^⊥H, Φ⟩) dV|`.
    pub lhs: f64,
    /// `∫_{∂D} sinθ ‖H‖ dA`.
    pub rhs: f64,
    pub slack: f64,
    pub volume: f64,
    pub boundary_area: f64,
    pub inf_cos: f64,
    pub sup_boundary_sin: f64,
    pub inf_mean_curvature: f64,
    pub sup_mean_curvature: f64,
    /// Present when `cosθ > 0` on the mesh.
    pub heinz: Option<HeinzCheck>,
    /// `(r, 1/inf‖H‖)` for discs in a flat ambient.
    pub heinz_radius: Option<(f64, f64)>,
}

struct Interior {
    integrand: f64,
    density: f64,
    cos: f64,
    h_norm: f64,
}

/// Evaluates both sides of the integral Ω-isoperimetric inequality and the
/// ratio bound on a meshed parameter domain.
pub fn integral_isoperimetric(
    imm: &dyn Immersion,
    form: &MultiVector,
    mesh: &MeshDomain,
    step: f64,
) -> Result<IsoperimetricResult> {
    let m = imm.param_dim();
    if mesh.dim() != m {
        return Err(Error::Dimension(format!("mesh is {}-dimensional, immersion has m = {m}", mesh.dim())));
    }
    let interior: Vec<Interior> = mesh
        .nodes
        .par_iter()
        .map(|x| {
            let fp = frame_at(imm, x)?;
            let cp = CalibratedPoint::from_framed(&fp, form)?;
            let (nab, _) = nabla_perp_h(imm, &fp, step)?;
            let h2 = fp.h.norm_squared();
            Ok(Interior {
                integrand: -(m as f64) * cp.cos_theta * h2 + nab.component_mul(&cp.phi).sum(),
                density: fp.sqrt_det_g(),
                cos: cp.cos_theta,
                h_norm: h2.sqrt(),
            })
        })
        .collect::<Result<_>>()?;
    let boundary: Vec<(f64, f64, f64)> = mesh
        .boundary
        .par_iter()
        .map(|b| {
            let fp = frame_at(imm, &b.x)?;
            let cp = CalibratedPoint::from_framed(&fp, form)?;
            let n = DVector::from_column_slice(&b.normal);
            let ginv = fp.metric.clone().try_inverse().ok_or(Error::RankDeficient)?;
            let da = fp.sqrt_det_g() * (n.transpose() * ginv * &n)[0].sqrt() * b.weight;
            Ok((da, cp.sin_theta(), fp.h.norm()))
        })
        .collect::<Result<_>>()?;

    let mut integral = 0.0;
    let mut volume = 0.0;
    let mut inf_cos = f64::INFINITY;
    let mut inf_h = f64::INFINITY;
    let mut sup_h: f64 = 0.0;
    for (p, w) in interior.iter().zip(&mesh.weights) {
        integral += p.integrand * p.density * w;
        volume += p.density * w;
        inf_cos = inf_cos.min(p.cos);
        inf_h = inf_h.min(p.h_norm);
        sup_h = sup_h.max(p.h_norm);
    }
    let mut rhs = 0.0;
    let mut area = 0.0;
    let mut sup_sin: f64 = 0.0;
    for (da, sin, h) in &boundary {
        rhs += sin * h * da;
        area += da;
        sup_sin = sup_sin.max(*sin);
    }
    let lhs = integral.abs();
    let heinz = (inf_cos > 0.0).then(|| HeinzCheck {
        lhs: m as f64 * inf_h * inf_cos,
        rhs: sup_sin * area / volume,
    });
    let heinz_radius = match (&mesh.shape, imm.ambient().is_flat_chart()) {
        (DomainShape::Disc { radius, .. }, true) if inf_h > 0.0 => Some((*radius, 1.0 / inf_h)),
        _ => None,
    };
    Ok(IsoperimetricResult {
        lhs,
        rhs,
        slack: rhs - lhs,
        volume,
        boundary_area: area,
        inf_cos,
        sup_boundary_sin: sup_sin,
        inf_mean_curvature: inf_h,
        sup_mean_curvature: sup_h,
        heinz,
        heinz_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgeom::ImmersionSpec;

    #[test]
    fn quadrature_of_one_is_the_area() {
        let d = MeshDomain::disc([0.1, -0.2], 0.7, 65, 64).unwrap();
        assert!((d.param_volume() - PI * 0.49).abs() < 1e-8);
        assert!((d.param_boundary() - 1.4 * PI).abs() < 1e-12);
        let a = MeshDomain::annulus([0.0, 0.0], 1.2, 2.0, 33, 64).unwrap();
        assert!((a.param_volume() - PI * (4.0 - 1.44)).abs() < 1e-8);
        let b = MeshDomain::cuboid(&[0.0, -1.0, 0.0], &[1.0, 1.0, 0.5], 9).unwrap();
        assert!((b.param_volume() - 1.0).abs() < 1e-12);
        assert!((b.param_boundary() - 2.0 * (2.0 + 0.5 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn spherical_cap_area_matches_closed_form() {
        let radius = 1.0;
        let r = 0.9;
        let imm = ImmersionSpec::SphereGraph { radius }.build().unwrap();
        let form = MultiVector::basis(3, &[0, 1]).unwrap();
        let mesh = MeshDomain::disc([0.0, 0.0], r, 129, 128).unwrap();
        let res = integral_isoperimetric(imm.as_ref(), &form, &mesh, 1e-4).unwrap();
        let height = radius - (radius * radius - r * r).sqrt();
        assert!((res.volume - 2.0 * PI * radius * height).abs() < 1e-5);
        assert!((res.boundary_area - 2.0 * PI * r).abs() < 1e-10);
        // The centered cap is an equality case of the inequality.
        assert!((res.lhs - res.rhs).abs() < 1e-4 * res.rhs, "{res:?}");
    }
}
