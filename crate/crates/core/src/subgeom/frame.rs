//! Pointwise extrinsic geometry: orthonormal frames, second fundamental
//! form and mean curvature.
//!
//! Ambient vectors are stored in orthonormal frame components `v̂ = Lᵀv`
//! (with `ḡ = LLᵀ`), so Euclidean dot products of stored vectors are
//! ambient inner products.

use super::immersion::Immersion;
use super::secondform::SecondForm;
use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::linalg::{complete_frame, gram_schmidt, hstack};
use crate::tolerances;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct FramedPoint {
    pub x: Vec<f64>,
    pub point: Vec<f64>,
    /// `N × m`, direct orthonormal tangent frame `X_a` (frame components).
    pub tangent: DMatrix<f64>,
    /// `N × n`, orthonormal normal frame `U_α`; `(X, U)` is direct.
    pub normal: DMatrix<f64>,
    /// `X_a = Σ_i T[i,a] ∂_i`.
    pub param_frame: DMatrix<f64>,
    /// Induced metric `g_ij` in parameter coordinates.
    pub metric: DMatrix<f64>,
    /// Coordinate partials `∂_i F` (`N × m`, coordinate components).
    pub d_f: DMatrix<f64>,
    /// `B(X_a, X_b)` in frame components.
    pub b: SecondForm,
    /// Mean curvature vector `H = (1/m) Σ_a B(X_a, X_a)` (frame components).
    pub h: DVector<f64>,
    /// `Lᵀ`: coordinate to frame components.
    pub to_frame: DMatrix<f64>,
    /// `L^{-T}`: frame to coordinate components.
    pub from_frame: DMatrix<f64>,
    /// Ambient Christoffel symbols `Γ^a_{bc}` at the point.
    pub christoffel: Vec<Vec<Vec<f64>>>,
}

impl FramedPoint {
    pub fn m(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn n(&self) -> usize {
        self.normal.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.tangent.nrows()
    }

    /// Normal components `h^α_{ab}` (one `m × m` matrix per `α`).
    pub fn h_coeffs(&self) -> Vec<DMatrix<f64>> {
        self.b.coeffs(&self.normal)
    }

    /// `H` in the normal frame.
    pub fn h_normal(&self) -> DVector<f64> {
        self.normal.transpose() * &self.h
    }

    pub fn cos_theta(&self, form: &MultiVector) -> Result<f64> {
        form.eval_frame(&self.tangent)
    }

    pub fn sqrt_det_g(&self) -> f64 {
        self.metric.determinant().max(0.0).sqrt()
    }

    /// Coordinate components of a frame-component vector.
    pub fn to_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.from_frame * v
    }

    /// `Γ̄(u, v)` for coordinate vectors `u`, `v` (coordinate components).
    pub fn gamma(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = u.len();
        let mut out = DVector::zeros(n);
        for a in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                if u[b] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    s += self.christoffel[a][b][c] * u[b] * v[c];
                }
            }
            out[a] = s;
        }
        out
    }

    /// The frame with normals appended: an `N × N` orthonormal matrix.
    pub fn full_frame(&self) -> DMatrix<f64> {
        hstack(&self.tangent, &self.normal)
    }
}

/// Induced metric at `x` (cheaper than a full frame).
pub fn induced_metric(imm: &dyn Immersion, x: &[f64]) -> Result<DMatrix<f64>> {
    let jets = imm.jet(x)?;
    let p: Vec<f64> = jets.iter().map(|j| j.value).collect();
    let m = imm.param_dim();
    let d_f = DMatrix::from_fn(jets.len(), m, |a, i| jets[a].grad[i]);
    let lt = imm.ambient().to_frame(&p)?;
    let hat = lt * d_f;
    Ok(hat.transpose() * hat)
}

/// Computes frames, `B` and `H` at the parameter point `x`.
pub fn frame_at(imm: &dyn Immersion, x: &[f64]) -> Result<FramedPoint> {
    let m = imm.param_dim();
    if x.len() != m {
        return Err(Error::Dimension(format!("parameter point has {} entries, expected {m}", x.len())));
    }
    let jets = imm.jet(x)?;
    if jets.iter().any(|j| !j.is_finite()) {
        return Err(Error::Domain {
            what: "immersion is not finite at this point".into(),
            offset: 0,
        });
    }
    let ambient = imm.ambient();
    let nn = jets.len();
    let point: Vec<f64> = jets.iter().map(|j| j.value).collect();
    let christoffel = ambient.christoffel(&point)?;
    let to_frame = ambient.to_frame(&point)?;
    let from_frame = to_frame
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("metric factor is not invertible".into()))?;

    let d_f = DMatrix::from_fn(nn, m, |a, i| jets[a].grad[i]);
    let hat = &to_frame * &d_f;
    let sv = hat.clone().svd(false, false).singular_values;
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 1e-8 {
        return Err(Error::RankDeficient);
    }
    let metric = hat.transpose() * &hat;
    let tangent = gram_schmidt(&hat, tolerances::FRAME_RANK).map_err(|_| Error::RankDeficient)?;
    let r = tangent.transpose() * &hat;
    let param_frame = r.try_inverse().ok_or(Error::RankDeficient)?;
    let mut normal = complete_frame(&tangent);
    if normal.ncols() > 0 && hstack(&tangent, &normal).determinant() < 0.0 {
        let last = normal.ncols() - 1;
        let mut c = normal.column_mut(last);
        c *= -1.0;
    }

    let mut fp = FramedPoint {
        x: x.to_vec(),
        point,
        tangent,
        normal,
        param_frame,
        metric,
        d_f,
        b: SecondForm::zero(m, nn),
        h: DVector::zeros(nn),
        to_frame,
        from_frame,
        christoffel,
    };

    // ∇̄_{∂i} dF(∂j) in frame components, for coordinate pairs.
    let mut coord = vec![DVector::zeros(nn); m * m];
    for i in 0..m {
        for j in i..m {
            let fi = fp.d_f.column(i).into_owned();
            let fj = fp.d_f.column(j).into_owned();
            let dd = DVector::from_fn(nn, |a, _| jets[a].h(i, j));
            let v = &fp.to_frame * (dd + fp.gamma(&fi, &fj));
            coord[i * m + j] = v.clone();
            coord[j * m + i] = v;
        }
    }
    let proj = &fp.normal * fp.normal.transpose();
    let t = &fp.param_frame;
    let mut b = SecondForm::zero(m, nn);
    for a in 0..m {
        for c in a..m {
            let mut v = DVector::zeros(nn);
            for i in 0..m {
                for j in 0..m {
                    let w = t[(i, a)] * t[(j, c)];
                    if w != 0.0 {
                        v += &coord[i * m + j] * w;
                    }
                }
            }
            let v = &proj * v;
            b.set(a, c, v);
        }
    }
    let mut h = DVector::zeros(nn);
    for a in 0..m {
        h += b.get(a, a);
    }
    fp.h = h / m as f64;
    fp.b = b;
    Ok(fp)
}

/// Intrinsic Christoffel symbols `Γ^k_{ij}` of the induced metric, from the
/// jets (`Γ_{ij,k} = ḡ(∇̄_{∂i}∂_jF, ∂_kF)`).
pub fn intrinsic_christoffel(imm: &dyn Immersion, fp: &FramedPoint) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = fp.m();
    let nn = fp.ambient_dim();
    let jets = imm.jet(&fp.x)?;
    let hat = &fp.to_frame * &fp.d_f;
    let ginv = fp.metric.clone().try_inverse().ok_or(Error::RankDeficient)?;
    let mut lower = vec![vec![vec![0.0; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            let fi = fp.d_f.column(i).into_owned();
            let fj = fp.d_f.column(j).into_owned();
            let dd = DVector::from_fn(nn, |a, _| jets[a].h(i, j));
            let v = &fp.to_frame * (dd + fp.gamma(&fi, &fj));
            for k in 0..m {
                lower[i][j][k] = v.dot(&hat.column(k));
            }
        }
    }
    let mut up = vec![vec![vec![0.0; m]; m]; m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                up[k][i][j] = (0..m).map(|l| ginv[(k, l)] * lower[i][j][l]).sum();
            }
        }
    }
    Ok(up)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgeom::ImmersionSpec;

    #[test]
    fn plane_is_totally_geodesic() {
        let imm = ImmersionSpec::Plane { slope: 0.7 }.build().unwrap();
        let fp = frame_at(imm.as_ref(), &[0.3, -0.2]).unwrap();
        assert!(fp.b.norm_sq() < 1e-24);
        assert!(fp.h.norm() < 1e-12);
        let g = fp.full_frame();
        assert!((g.transpose() * &g - DMatrix::identity(3, 3)).abs().max() < 1e-12);
        assert!(g.determinant() > 0.0);
    }

    #[test]
    fn sphere_has_unit_mean_curvature() {
        let imm = ImmersionSpec::SphereGraph { radius: 1.0 }.build().unwrap();
        for x in [[0.0, 0.0], [0.3, 0.4], [-0.5, 0.6]] {
            let fp = frame_at(imm.as_ref(), &x).unwrap();
            assert!((fp.h.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn catenoid_and_enneper_are_minimal() {
        for spec in [ImmersionSpec::Catenoid, ImmersionSpec::Enneper, ImmersionSpec::Helicoid] {
            let imm = spec.build().unwrap();
            let fp = frame_at(imm.as_ref(), &[1.3, 0.4]).unwrap();
            assert!(fp.h.norm() < 1e-8, "{:?}", spec);
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let imm = ImmersionSpec::Expressions { m: 2, components: vec!["x1".into(), "x1".into(), "0".into()] }
            .build()
            .unwrap();
        assert!(matches!(frame_at(imm.as_ref(), &[0.1, 0.2]), Err(Error::RankDeficient)));
    }
}
