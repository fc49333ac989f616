//! Numerical verification of the pointwise identities and inequalities
//! satisfied by the Ω-angle of a submanifold.
//!
//! Third-order quantities (`∇^⊥H`, `Δcosθ`, `div Z`, `δΦ`) are obtained by
//! central differences of exact second-order frames.

use super::calibrated::CalibratedPoint;
use super::frame::{frame_at, induced_metric, intrinsic_christoffel, FramedPoint};
use super::immersion::Immersion;
use super::secondform::SecondForm;
use crate::ambient::contract4;
use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;

fn shifted(x: &[f64], d: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

/// Central difference with one Richardson step; returns the estimate and
/// the difference to the plain half-step quotient as an accuracy estimate.
fn richardson<F>(f: F, h: f64) -> Result<(DVector<f64>, f64)>
where
    F: Fn(f64) -> Result<DVector<f64>>,
{
    let d1 = (f(h)? - f(-h)?) / (2.0 * h);
    let d2 = (f(h / 2.0)? - f(-h / 2.0)?) / h;
    let r = (&d2 * 4.0 - &d1) / 3.0;
    let err = (&r - &d2).norm();
    Ok((r, err))
}

/// `∇^⊥_{X_a} H` in the normal frame (`n × m`), with an accuracy estimate.
pub fn nabla_perp_h(imm: &dyn Immersion, fp: &FramedPoint, step: f64) -> Result<(DMatrix<f64>, f64)> {
    let (m, n) = (fp.m(), fp.n());
    let h_coord = fp.to_coords(&fp.h);
    let mut out = DMatrix::zeros(n, m);
    let mut acc: f64 = 0.0;
    for a in 0..m {
        let d: Vec<f64> = fp.param_frame.column(a).iter().copied().collect();
        let (dh, err) = richardson(
            |t| {
                let q = frame_at(imm, &shifted(&fp.x, &d, t))?;
                Ok(q.to_coords(&q.h))
            },
            step,
        )?;
        acc = acc.max(err);
        let xa = &fp.d_f * DVector::from_column_slice(&d);
        let cov = &fp.to_frame * (dh + fp.gamma(&xa, &h_coord));
        out.set_column(a, &(fp.normal.transpose() * cov));
    }
    Ok((out, acc))
}

/// `Σ_{ij} R̄(X_i, X_j, X_i, Φ(X_j))`.
pub fn curvature_contraction(imm: &dyn Immersion, fp: &FramedPoint, cp: &CalibratedPoint) -> Result<f64> {
    let amb = imm.ambient();
    if amb.is_flat_chart() {
        return Ok(0.0);
    }
    let r = amb.curvature_tensor(&fp.point)?;
    let nn = fp.ambient_dim();
    let m = fp.m();
    let xs: Vec<DVector<f64>> = (0..m).map(|i| fp.to_coords(&fp.tangent.column(i).into_owned())).collect();
    let ps: Vec<DVector<f64>> = (0..m).map(|j| fp.to_coords(&cp.phi_vector(j))).collect();
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            s += contract4(&r, nn, xs[i].as_slice(), xs[j].as_slice(), xs[i].as_slice(), ps[j].as_slice());
        }
    }
    Ok(s)
}

/// `Δf` at `x` by the divergence-form stencil
/// `(1/√g) Σ_i ∂_i(√g g^{ij} ∂_j f)` with half-step fluxes.
pub fn fd_laplacian<F>(imm: &dyn Immersion, x: &[f64], h: f64, f: F) -> Result<f64>
where
    F: Fn(&FramedPoint) -> Result<f64>,
{
    let m = x.len();
    let mut memo: HashMap<Vec<i32>, f64> = HashMap::new();
    let at = |off: &[i32]| -> Vec<f64> { x.iter().zip(off).map(|(a, k)| a + 0.5 * h * *k as f64).collect() };
    let mut value = |off: Vec<i32>| -> Result<f64> {
        if let Some(v) = memo.get(&off) {
            return Ok(*v);
        }
        let v = f(&frame_at(imm, &at(&off))?)?;
        memo.insert(off, v);
        Ok(v)
    };
    let g0 = induced_metric(imm, x)?;
    let sqrt0 = g0.determinant().sqrt();
    let mut total = 0.0;
    for i in 0..m {
        let mut flux = [0.0; 2];
        for (side, s) in [1i32, -1].iter().enumerate() {
            let mut yoff = vec![0i32; m];
            yoff[i] = *s;
            let gy = induced_metric(imm, &at(&yoff))?;
            let ginv = gy.clone().try_inverse().ok_or(Error::RankDeficient)?;
            let sq = gy.determinant().sqrt();
            let mut fl = 0.0;
            for j in 0..m {
                let mut p = yoff.clone();
                p[j] += 1;
                let mut q = yoff.clone();
                q[j] -= 1;
                let dj = (value(p)? - value(q)?) / h;
                fl += ginv[(i, j)] * dj;
            }
            flux[side] = sq * fl;
        }
        total += (flux[0] - flux[1]) / h;
    }
    Ok(total / sqrt0)
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplacianCheck {
    pub lhs_fd: f64,
    pub rhs_formula: f64,
    pub residual: f64,
    /// Residual relative to the magnitude of the formula's terms.
    pub relative: f64,
    pub cos_q_tilde: f64,
    pub nabla_h_phi: f64,
    pub curvature: f64,
    /// `max_a |X_a(cosθ) − B_Φ(X_a)|`.
    pub gradient_residual: f64,
    pub nabla_h_accuracy: f64,
}

/// Floor for the scale of relative residuals at totally geodesic points.
pub const RELATIVE_FLOOR: f64 = 1e-6;

/// Compares the finite-difference Laplacian of `cosθ` with
/// `−cosθ Q̃(B) + m⟨∇^⊥H, Φ⟩ − Σ R̄(X_i, X_j, X_i, Φ(X_j))`.
pub fn laplacian_costheta_check(
    imm: &dyn Immersion,
    form: &MultiVector,
    x: &[f64],
    h: f64,
    nabla_step: f64,
) -> Result<LaplacianCheck> {
    let fp = frame_at(imm, x)?;
    let cp = CalibratedPoint::from_framed(&fp, form)?;
    let m = fp.m();
    let lhs = fd_laplacian(imm, x, h, |q| q.cos_theta(form))?;
    let cos_q = cp.cos_q_tilde(&fp.b);
    let (nab, acc) = nabla_perp_h(imm, &fp, nabla_step)?;
    let hphi = nab.component_mul(&cp.phi).sum();
    let curv = curvature_contraction(imm, &fp, &cp)?;
    let rhs = -cos_q + m as f64 * hphi - curv;
    let scale = cos_q.abs() + m as f64 * hphi.abs() + curv.abs();

    let b_phi = cp.b_phi(&fp.b);
    let mut grad_res: f64 = 0.0;
    for a in 0..m {
        let d: Vec<f64> = fp.param_frame.column(a).iter().copied().collect();
        let (g, _) = richardson(
            |t| Ok(DVector::from_element(1, frame_at(imm, &shifted(x, &d, t))?.cos_theta(form)?)),
            nabla_step,
        )?;
        grad_res = grad_res.max((g[0] - b_phi[a]).abs());
    }
    let residual = (lhs - rhs).abs();
    Ok(LaplacianCheck {
        lhs_fd: lhs,
        rhs_formula: rhs,
        residual,
        relative: residual / scale.max(RELATIVE_FLOOR),
        cos_q_tilde: cos_q,
        nabla_h_phi: hphi,
        curvature: curv,
        gradient_residual: grad_res,
        nabla_h_accuracy: acc,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceCheck {
    pub div_z_fd: f64,
    pub div_z_formula: f64,
    pub div_residual: f64,
    /// `‖δΦ − m cosθ H‖`.
    pub delta_phi_residual: f64,
    pub z_norm: f64,
    /// `sinθ ‖H‖`.
    pub z_bound: f64,
}

/// `div Z = −m cosθ ‖H‖² + ⟨∇^⊥H, Φ⟩`, `δΦ = m cosθ H` and `‖Z‖ ≤ sinθ‖H‖`.
pub fn divergence_identity_check(
    imm: &dyn Immersion,
    form: &MultiVector,
    x: &[f64],
    step: f64,
) -> Result<DivergenceCheck> {
    let fp = frame_at(imm, x)?;
    let cp = CalibratedPoint::from_framed(&fp, form)?;
    let m = fp.m();
    let nn = fp.ambient_dim();
    let (nab, _) = nabla_perp_h(imm, &fp, step)?;
    let hphi = nab.component_mul(&cp.phi).sum();
    let formula = -(m as f64) * cp.cos_theta * fp.h.norm_squared() + hphi;

    // div Z = (1/√g) ∂_i(√g Z^i) with Z^i = Σ_a T[i,a] z_a.
    let mut div = 0.0;
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        let (d, _) = richardson(
            |t| {
                let q = frame_at(imm, &shifted(x, &e, t))?;
                let cq = CalibratedPoint::from_framed(&q, form)?;
                let z = cq.z_vector(&q.h);
                let zi = (q.param_frame.row(i) * &z)[0];
                Ok(DVector::from_element(1, q.sqrt_det_g() * zi))
            },
            step,
        )?;
        div += d[0];
    }
    div /= fp.sqrt_det_g();

    // δΦ = −g^{ij}(∇_{∂i}Φ)(∂j), (∇_{∂i}Φ)(∂j) = ∇^⊥_{∂i}(Φ(∂j)) − Φ(∇_{∂i}∂j).
    let ginv = fp.metric.clone().try_inverse().ok_or(Error::RankDeficient)?;
    let gam = intrinsic_christoffel(imm, &fp)?;
    let phi_coord = |q: &FramedPoint, cq: &CalibratedPoint, j: usize| -> Result<DVector<f64>> {
        let tinv = q.param_frame.clone().try_inverse().ok_or(Error::RankDeficient)?;
        Ok(q.to_coords(&cq.phi_of(&tinv.column(j).into_owned())))
    };
    let phi_at_p: Vec<DVector<f64>> = (0..m).map(|j| phi_coord(&fp, &cp, j)).collect::<Result<_>>()?;
    let proj = &fp.normal * fp.normal.transpose();
    let mut delta_phi = DVector::zeros(nn);
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        let fi = fp.d_f.column(i).into_owned();
        for j in 0..m {
            if ginv[(i, j)] == 0.0 {
                continue;
            }
            let (dphi, _) = richardson(
                |t| {
                    let q = frame_at(imm, &shifted(x, &e, t))?;
                    let cq = CalibratedPoint::from_framed(&q, form)?;
                    phi_coord(&q, &cq, j)
                },
                step,
            )?;
            let cov = &proj * (&fp.to_frame * (dphi + fp.gamma(&fi, &phi_at_p[j])));
            let mut corr = DVector::zeros(nn);
            for k in 0..m {
                corr += &fp.to_frame * &phi_at_p[k] * gam[k][i][j];
            }
            delta_phi -= (cov - corr) * ginv[(i, j)];
        }
    }
    let delta_res = (delta_phi - &fp.h * (m as f64 * cp.cos_theta)).norm();
    Ok(DivergenceCheck {
        div_z_fd: div,
        div_z_formula: formula,
        div_residual: (div - formula).abs(),
        delta_phi_residual: delta_res,
        z_norm: cp.z_vector(&fp.h).norm(),
        z_bound: cp.sin_theta() * fp.h.norm(),
    })
}

/// Sectional curvature of a surface from its induced metric alone, by
/// finite differences of the metric (`m = 2`).
pub fn intrinsic_curvature(imm: &dyn Immersion, x: &[f64], step: f64) -> Result<f64> {
    if x.len() != 2 {
        return Err(Error::Dimension("intrinsic curvature is computed for surfaces".into()));
    }
    let christ = |y: &[f64]| -> Result<[[[f64; 2]; 2]; 2]> {
        let g = induced_metric(imm, y)?;
        let ginv = g.clone().try_inverse().ok_or(Error::RankDeficient)?;
        let mut dg = [DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)];
        for (k, slot) in dg.iter_mut().enumerate() {
            let mut e = [0.0; 2];
            e[k] = 1.0;
            let (d, _) = richardson(
                |t| {
                    let gm = induced_metric(imm, &shifted(y, &e, t))?;
                    Ok(DVector::from_column_slice(gm.as_slice()))
                },
                step,
            )?;
            *slot = DMatrix::from_column_slice(2, 2, d.as_slice());
        }
        let mut out = [[[0.0; 2]; 2]; 2];
        for (a, oa) in out.iter_mut().enumerate() {
            for (b, ob) in oa.iter_mut().enumerate() {
                for (c, v) in ob.iter_mut().enumerate() {
                    *v = 0.5
                        * (0..2)
                            .map(|d| ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]))
                            .sum::<f64>();
                }
            }
        }
        Ok(out)
    };
    let g0 = induced_metric(imm, x)?;
    let c0 = christ(x)?;
    let mut dc = [[[[0.0; 2]; 2]; 2]; 2];
    for (e_idx, slot) in dc.iter_mut().enumerate() {
        let mut e = [0.0; 2];
        e[e_idx] = 1.0;
        let (d, _) = richardson(
            |t| {
                let c = christ(&shifted(x, &e, t))?;
                Ok(DVector::from_iterator(8, c.iter().flatten().flatten().copied()))
            },
            step,
        )?;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    slot[a][b][c] = d[a * 4 + b * 2 + c];
                }
            }
        }
    }
    // R^l_{ijk} for (i,j,k) = (0,1,1): ⟨R(∂0,∂1)∂1, ∂0⟩ = g_{0l} R^l_{011}.
    let (i, j, k) = (0, 1, 1);
    let mut r = [0.0; 2];
    for (l, rl) in r.iter_mut().enumerate() {
        let mut s = dc[i][l][j][k] - dc[j][l][i][k];
        for p in 0..2 {
            s += c0[l][i][p] * c0[p][j][k] - c0[l][j][p] * c0[p][i][k];
        }
        *rl = s;
    }
    let num = g0[(0, 0)] * r[0] + g0[(0, 1)] * r[1];
    Ok(num / g0.determinant())
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussCheck {
    pub intrinsic: f64,
    pub extrinsic: f64,
    pub residual: f64,
}

/// `K = R̄(X₁,X₂,X₁,X₂) + ⟨B₁₁,B₂₂⟩ − |B₁₂|²` on a surface.
pub fn gauss_equation_check(imm: &dyn Immersion, x: &[f64], step: f64) -> Result<GaussCheck> {
    let fp = frame_at(imm, x)?;
    let intrinsic = intrinsic_curvature(imm, x, step)?;
    let amb = imm.ambient();
    let x1 = fp.to_coords(&fp.tangent.column(0).into_owned());
    let x2 = fp.to_coords(&fp.tangent.column(1).into_owned());
    let rbar = amb.curvature(&fp.point, x1.as_slice(), x2.as_slice(), x1.as_slice(), x2.as_slice())?;
    let extrinsic = rbar + fp.b.get(0, 0).dot(fp.b.get(1, 1)) - fp.b.get(0, 1).norm_squared();
    Ok(GaussCheck { intrinsic, extrinsic, residual: (intrinsic - extrinsic).abs() })
}

/// Slacks of the pointwise bounds (each must be `≤ 0` up to tolerance).
#[derive(Debug, Clone, Serialize)]
pub struct PointwiseBounds {
    /// `max |ḡ(Φ(X),U)| − sinθ` over sampled unit pairs.
    pub phi_pairing: f64,
    /// Operator norm of `Φ` minus `sinθ`.
    pub phi_operator: f64,
    /// `‖Φ‖² − m sin²θ`.
    pub phi_norm: f64,
    /// `‖∇cosθ‖² − m sin²θ ‖B‖²` with `∇cosθ = B_Φ`.
    pub grad_cos: f64,
    /// `‖Z‖ − sinθ ‖H‖`.
    pub z_norm: f64,
    /// `sin²θ − ‖Φ‖²` (codimension one only).
    pub phi_lower: Option<f64>,
    /// `‖∇ log cosθ‖ − √m tanθ ‖B‖` (for `cosθ > 0`).
    pub log_gradient: Option<f64>,
}

pub fn pointwise_bounds<R: Rng>(cp: &CalibratedPoint, b: &SecondForm, pairs: usize, rng: &mut R) -> PointwiseBounds {
    let (m, n) = (cp.m(), cp.n());
    let sin = cp.sin_theta();
    let mut pair_max: f64 = 0.0;
    for _ in 0..pairs {
        let xv = crate::linalg::unit_vector(rng, m);
        let uv = crate::linalg::unit_vector(rng, n);
        pair_max = pair_max.max((uv.transpose() * &cp.phi * xv)[0].abs());
    }
    let op = if n == 0 { 0.0 } else { cp.phi.clone().svd(false, false).singular_values.max() };
    let b2 = b.norm_sq();
    let mut h = DVector::zeros(cp.tangent.nrows());
    for a in 0..m {
        h += b.get(a, a);
    }
    h /= m as f64;
    let grad = cp.b_phi(b).norm_squared();
    PointwiseBounds {
        phi_pairing: pair_max - sin,
        phi_operator: op - sin,
        phi_norm: cp.phi_norm_sq() - m as f64 * sin * sin,
        grad_cos: grad - m as f64 * sin * sin * b2,
        z_norm: cp.z_vector(&h).norm() - sin * h.norm(),
        phi_lower: (n == 1).then(|| sin * sin - cp.phi_norm_sq()),
        log_gradient: (cp.cos_theta > 0.0)
            .then(|| grad.sqrt() / cp.cos_theta - (m as f64).sqrt() * sin / cp.cos_theta * b2.sqrt()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrations::{make_calibration, CalibrationKind};
    use crate::subgeom::ImmersionSpec;

    fn dxdy() -> MultiVector {
        make_calibration(CalibrationKind::Volume { m: 2, n: 1 }).unwrap().form
    }

    #[test]
    fn laplacian_identity_on_sphere() {
        let imm = ImmersionSpec::SphereGraph { radius: 1.0 }.build().unwrap();
        let c = laplacian_costheta_check(imm.as_ref(), &dxdy(), &[0.3, -0.2], 1e-3, 1e-4).unwrap();
        assert!(c.relative < 5e-3, "{c:?}");
        assert!(c.gradient_residual < 1e-8, "{c:?}");
    }

    #[test]
    fn divergence_identities_on_sphere() {
        let imm = ImmersionSpec::SphereGraph { radius: 1.5 }.build().unwrap();
        let c = divergence_identity_check(imm.as_ref(), &dxdy(), &[0.4, 0.1], 1e-4).unwrap();
        assert!(c.div_residual < 1e-4, "{c:?}");
        assert!(c.delta_phi_residual < 1e-4, "{c:?}");
        assert!(c.z_norm <= c.z_bound + 1e-9);
    }

    #[test]
    fn gauss_equation_on_sphere() {
        let imm = ImmersionSpec::SphereGraph { radius: 2.0 }.build().unwrap();
        let g = gauss_equation_check(imm.as_ref(), &[0.5, 0.7], 1e-3).unwrap();
        assert!((g.intrinsic - 0.25).abs() < 1e-6, "{g:?}");
        assert!(g.residual < 1e-6, "{g:?}");
    }
}
