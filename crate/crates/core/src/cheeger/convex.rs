//! The strongly convex vector field bound for submanifolds.
//!
//! For `L_X̄ ḡ ≥ 2α ḡ` near an immersion `F`,
//! `(sup ‖X̄_F‖)^{−1} ≤ (1/α)(h/m + sup ‖H‖)`, which follows from integrating
//! `m ḡ(H, X̄) = div(X̄^T) − ½ tr_g L_X̄ ḡ` over a domain.

use crate::error::{Error, Result};
use crate::exprmap::ExprMap;
use crate::linalg::sym_eigenvalues;
use crate::subgeom::{frame_at, FramedPoint, Immersion, MeshDomain};
use crate::tolerances;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

/// Integrated form of `m ḡ(H, X̄) + ½ tr_g L_X̄ ḡ = div(X̄^T)`.
#[derive(Debug, Clone, Serialize)]
pub struct FieldIdentity {
    /// `∫_D (m ḡ(H, X̄) + ½ tr_g L_X̄ ḡ) dV`.
    pub interior: f64,
    /// `∫_{∂D} g(X̄^T, ν) dA`.
    pub flux: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexFieldBound {
    /// `(sup ‖X̄_F‖)^{−1}`.
    pub lhs: f64,
    /// `(1/α)(h/m + sup ‖H‖)`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub alpha: f64,
    /// The Cheeger estimate used for `h`.
    pub h_estimate: f64,
    /// Whether `h_estimate` was supplied or taken as `A(∂D)/V(D)`.
    pub h_supplied: bool,
    pub sup_field: f64,
    pub sup_mean_curvature: f64,
    pub volume: f64,
    pub boundary_area: f64,
    /// Smallest eigenvalue of `L_X̄ ḡ` relative to `2ḡ` over the samples.
    pub convexity: f64,
    pub identity: FieldIdentity,
}

struct FieldSample {
    fp: FramedPoint,
    /// `X̄` in coordinate components.
    x: DVector<f64>,
    /// Ambient metric.
    g: DMatrix<f64>,
    /// `L_X̄ ḡ` in coordinates.
    lie: DMatrix<f64>,
}

impl FieldSample {
    fn at(imm: &dyn Immersion, field: &ExprMap, u: &[f64]) -> Result<Self> {
        let fp = frame_at(imm, u)?;
        let jets = field.eval_jet2(&fp.point)?;
        let n = jets.len();
        let x = DVector::from_iterator(n, jets.iter().map(|j| j.value));
        let dx = DMatrix::from_fn(n, n, |k, i| jets[k].grad[i]);
        let mj = imm.ambient().metric_jet(&fp.point)?;
        let mut lie = mj.g.transpose() * &dx;
        lie = &lie + lie.transpose();
        for (k, dg) in mj.dg.iter().enumerate() {
            lie += dg * x[k];
        }
        // `lie` now holds `g DX + DXᵀ g + X^k ∂_k g` (g symmetric).
        Ok(Self { fp, x, g: mj.g, lie })
    }

    fn norm(&self) -> f64 {
        (self.x.transpose() * &self.g * &self.x)[0].max(0.0).sqrt()
    }

    /// Smallest `λ` with `L ≥ 2λ ḡ`.
    fn convexity(&self) -> Result<f64> {
        let c = self.g.clone().cholesky().ok_or_else(|| Error::Singular("ambient metric".into()))?;
        let li = c.l().try_inverse().ok_or_else(|| Error::Singular("ambient metric".into()))?;
        let rel = &li * &self.lie * li.transpose();
        Ok(0.5 * sym_eigenvalues(&(0.5 * (&rel + rel.transpose())))[0])
    }

    fn half_trace(&self) -> Result<f64> {
        let ginv = self.fp.metric.clone().try_inverse().ok_or(Error::RankDeficient)?;
        Ok(0.5 * (ginv * self.fp.d_f.transpose() * &self.lie * &self.fp.d_f).trace())
    }
}

/// Evaluates the convex field bound on a meshed domain. Without an
/// `h_estimate` the domain's own ratio `A(∂D)/V(D)` is used.
pub fn convex_field_bound(
    imm: &dyn Immersion,
    field: &ExprMap,
    mesh: &MeshDomain,
    alpha: f64,
    h_estimate: Option<f64>,
) -> Result<ConvexFieldBound> {
    let n = imm.ambient().dim();
    let m = imm.param_dim();
    if field.nvars() != n || field.nout() != n {
        return Err(Error::Dimension(format!(
            "ambient field must map {n} coordinates to {n} components, got {} -> {}",
            field.nvars(),
            field.nout()
        )));
    }
    if mesh.dim() != m {
        return Err(Error::Dimension(format!("mesh is {}-dimensional, immersion has m = {m}", mesh.dim())));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Invalid(format!("convexity constant {alpha} must be positive")));
    }
    let interior: Vec<FieldSample> =
        mesh.nodes.par_iter().map(|u| FieldSample::at(imm, field, u)).collect::<Result<_>>()?;
    let boundary: Vec<FieldSample> =
        mesh.boundary.par_iter().map(|b| FieldSample::at(imm, field, &b.x)).collect::<Result<_>>()?;

    let mut convexity = f64::INFINITY;
    for (k, s) in interior.iter().chain(&boundary).enumerate() {
        let c = s.convexity()?;
        if c < alpha - tolerances::INEQUALITY {
            return Err(Error::Invalid(format!(
                "convexity certificate fails at sample {k}: L ≥ {:.6}·2ḡ but α = {alpha}",
                c
            )));
        }
        convexity = convexity.min(c);
    }

    let mut interior_integral = 0.0;
    let mut volume = 0.0;
    for (s, w) in interior.iter().zip(&mesh.weights) {
        let dv = s.fp.sqrt_det_g() * w;
        let h = s.fp.to_coords(&s.fp.h);
        let gh = (h.transpose() * &s.g * &s.x)[0];
        interior_integral += (m as f64 * gh + s.half_trace()?) * dv;
        volume += dv;
    }
    let mut flux = 0.0;
    let mut area = 0.0;
    for (s, b) in boundary.iter().zip(&mesh.boundary) {
        let nrm = DVector::from_column_slice(&b.normal);
        let ginv = s.fp.metric.clone().try_inverse().ok_or(Error::RankDeficient)?;
        let scale = (nrm.transpose() * &ginv * &nrm)[0].sqrt();
        let conormal = &ginv * &nrm / scale;
        let push = &s.fp.d_f * conormal;
        let da = s.fp.sqrt_det_g() * scale * b.weight;
        flux += (s.x.transpose() * &s.g * push)[0] * da;
        area += da;
    }
    let samples = || interior.iter().chain(&boundary);
    let sup_field = samples().map(FieldSample::norm).fold(0.0, f64::max);
    let sup_mean_curvature = samples().map(|s| s.fp.h.norm()).fold(0.0, f64::max);
    let (h, h_supplied) = match h_estimate {
        Some(h) => (h, true),
        None => (area / volume, false),
    };
    let lhs = 1.0 / sup_field;
    let rhs = (h / m as f64 + sup_mean_curvature) / alpha;
    Ok(ConvexFieldBound {
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs + tolerances::INEQUALITY,
        alpha,
        h_estimate: h,
        h_supplied,
        sup_field,
        sup_mean_curvature,
        volume,
        boundary_area: area,
        convexity,
        identity: FieldIdentity {
            interior: interior_integral,
            flux,
            residual: (interior_integral - flux).abs(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgeom::ImmersionSpec;

    fn position() -> ExprMap {
        ExprMap::parse(&["x1", "x2", "x3"], 3).unwrap()
    }

    #[test]
    fn flat_disc_is_an_equality_case() {
        let imm = ImmersionSpec::Plane { slope: 0.0 }.build().unwrap();
        for rho in [0.5, 2.0] {
            let mesh = MeshDomain::disc([0.0, 0.0], rho, 33, 64).unwrap();
            let b = convex_field_bound(imm.as_ref(), &position(), &mesh, 1.0, None).unwrap();
            assert!((b.lhs - 1.0 / rho).abs() < 1e-12);
            assert!((b.rhs - 1.0 / rho).abs() < 1e-10);
            assert!(b.holds);
            assert!((b.convexity - 1.0).abs() < 1e-12);
            assert!(b.identity.residual < 1e-9 * rho * rho);
        }
    }

    #[test]
    fn sphere_is_an_equality_case_with_zero_cheeger_constant() {
        let radius = 1.3;
        let imm = ImmersionSpec::SphereGraph { radius }.build().unwrap();
        let mesh = MeshDomain::disc([0.0, 0.0], 0.9, 65, 64).unwrap();
        let b = convex_field_bound(imm.as_ref(), &position(), &mesh, 1.0, Some(0.0)).unwrap();
        assert!((b.lhs - 1.0 / radius).abs() < 1e-12);
        assert!((b.rhs - 1.0 / radius).abs() < 1e-9);
        assert!(b.slack.abs() < 1e-9);
        assert!(b.identity.residual < 1e-6, "{:?}", b.identity);
    }

    #[test]
    fn minimal_disc_forces_a_large_field() {
        let imm = ImmersionSpec::Enneper.build().unwrap();
        let mesh = MeshDomain::disc([0.0, 0.0], 0.8, 65, 64).unwrap();
        let b = convex_field_bound(imm.as_ref(), &position(), &mesh, 1.0, None).unwrap();
        assert!(b.sup_mean_curvature < 1e-8);
        assert!(b.holds);
        // With H = 0 the bound reads sup ‖X̄_F‖ ≥ α m V/A.
        assert!(b.sup_field >= 2.0 * b.volume / b.boundary_area);
        assert!(b.identity.residual < 1e-6 * b.identity.flux.abs(), "{:?}", b.identity);
        // The interior term is the trace alone: m V for the position field.
        assert!((b.identity.interior - 2.0 * b.volume).abs() < 1e-8);
    }

    #[test]
    fn non_convex_fields_are_rejected() {
        let imm = ImmersionSpec::Plane { slope: 0.0 }.build().unwrap();
        let mesh = MeshDomain::disc([0.0, 0.0], 1.0, 9, 16).unwrap();
        let rotation = ExprMap::parse(&["-x2", "x1", "0"], 3).unwrap();
        assert!(convex_field_bound(imm.as_ref(), &rotation, &mesh, 0.5, None).is_err());
        assert!(convex_field_bound(imm.as_ref(), &position(), &mesh, 2.0, None).is_err());
    }
}
