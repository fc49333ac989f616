//! Graphs `Γ_f` of maps `f : (M, g₁) → (N, h)` in Riemannian products,
//! analysed in the singular-value frames of `df`.

use super::calibrated::CalibratedPoint;
use super::frame::frame_at;
use super::identities::curvature_contraction;
use super::immersion::{ExprImmersion, Immersion};
use super::secondform::SecondForm;
use crate::ambient::{contract4, AmbientSpace};
use crate::error::{Error, Result};
use crate::exprmap::ExprMap;
use crate::exterior::MultiVector;
use crate::linalg::complete_frame;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Tangent and normal frames of a graph built from the singular data of
/// `df`: `a` (`m × m`) and `a_tilde` (`n × n`) are orthonormal, `lambdas`
/// has length `m` and `df(a_i) = λ_i ã_i`.
///
/// `X_i = (a_i + λ_i ã_i)/√(1+λ_i²)`, `X_{m+α} = (λ_α a_α − ã_α)/√(1+λ_α²)`.
pub fn graph_frames(lambdas: &[f64], a: &DMatrix<f64>, a_tilde: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = a.nrows();
    let n = a_tilde.nrows();
    let mut x = DMatrix::zeros(m + n, m);
    let mut u = DMatrix::zeros(m + n, n);
    for i in 0..m {
        let l = lambdas[i];
        let s = (1.0 + l * l).sqrt();
        x.view_mut((0, i), (m, 1)).copy_from(&(a.column(i) / s));
        if i < n {
            x.view_mut((m, i), (n, 1)).copy_from(&(a_tilde.column(i) * (l / s)));
        }
    }
    for al in 0..n {
        let l = if al < m { lambdas[al] } else { 0.0 };
        let s = (1.0 + l * l).sqrt();
        if al < m {
            u.view_mut((0, al), (m, 1)).copy_from(&(a.column(al) * (l / s)));
        }
        u.view_mut((m, al), (n, 1)).copy_from(&(a_tilde.column(al) * (-1.0 / s)));
    }
    (x, u)
}

/// Frames of the linear graph with `df = diag(λ)` in coordinate bases.
pub fn graph_plane_frames(lambdas: &[f64], n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = lambdas.len();
    graph_frames(lambdas, &DMatrix::identity(m, m), &DMatrix::identity(n, n))
}

/// `‖B‖² + Σ λ_i² (h^{m+i}_{ik})² + 2 Σ_{k,i<j} λ_iλ_j h^{m+i}_{jk} h^{m+j}_{ik}`,
/// with `h` the coefficients of `B` in graph frames.
pub fn q_expansion(lambdas: &[f64], h: &[DMatrix<f64>]) -> f64 {
    let m = lambdas.len();
    let n = h.len();
    let r = m.min(n);
    let b2: f64 = h.iter().map(|x| x.norm_squared()).sum();
    let mut s = b2;
    for i in 0..r {
        for k in 0..m {
            s += lambdas[i].powi(2) * h[i][(i, k)].powi(2);
        }
    }
    for k in 0..m {
        for i in 0..r {
            for j in i + 1..r {
                s += 2.0 * lambdas[i] * lambdas[j] * h[i][(j, k)] * h[j][(i, k)];
            }
        }
    }
    s
}

/// `δ = 1 − max_{i≠j} |λ_iλ_j|` (1 when `m = 1`).
pub fn delta_from_lambdas(lambdas: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            worst = worst.max((lambdas[i] * lambdas[j]).abs());
        }
    }
    1.0 - worst
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphAnalysis {
    pub lambdas: Vec<f64>,
    pub cos_theta: f64,
    /// `Π(1+λ_j²)^{−1/2}`.
    pub cos_theta_closed: f64,
    /// `max |Φ − cosθ diag(λ)|` in graph frames.
    pub phi_diag_residual: f64,
    /// `(cos²θ Σλ², sin²θ, (m−1) cos²θ Σλ²)`.
    pub sin_bounds: (f64, f64, f64),
    pub b_norm_sq: f64,
    pub q: f64,
    pub q_expansion: f64,
    pub delta: f64,
    /// `Q − δ‖B‖²`.
    pub delta_margin: f64,
    /// `Σ R̄(X_i, X_j, X_i, Φ(X_j))` from the ambient tensor.
    pub contraction_direct: f64,
    /// The same through the curvatures of the factors, termwise.
    pub contraction_factors: f64,
    /// The same through `Ricci₁` and sectional curvatures.
    pub contraction_ricci: f64,
}

impl GraphAnalysis {
    pub fn contraction_residual(&self) -> f64 {
        (self.contraction_direct - self.contraction_factors)
            .abs()
            .max((self.contraction_direct - self.contraction_ricci).abs())
    }
}

/// Splits an ambient into `M × N` with `dim M = m`, checking that the
/// product structure respects the split.
fn check_split(ambient: &AmbientSpace, m: usize) -> Result<()> {
    match ambient {
        AmbientSpace::Euclidean(_) => Ok(()),
        AmbientSpace::HyperbolicLine(k) if *k == m => Ok(()),
        AmbientSpace::Product(p) => {
            let mut offs = p.offsets();
            offs.push(ambient.dim());
            if offs.contains(&m) {
                Ok(())
            } else {
                Err(Error::Dimension(format!("no factor boundary at coordinate {m}")))
            }
        }
        _ => Err(Error::Dimension(format!("ambient does not split after {m} coordinates"))),
    }
}

/// Singular-value analysis of the graph of `f` at `x`.
pub fn graph_analysis(f: &ExprMap, ambient: AmbientSpace, x: &[f64]) -> Result<GraphAnalysis> {
    let m = f.nvars();
    let n = f.nout();
    if n == 0 {
        return Err(Error::Dimension("graph needs at least one target coordinate".into()));
    }
    check_split(&ambient, m)?;
    let sources: Vec<String> = f.sources().to_vec();
    let imm = ExprImmersion::graph(&sources, m, ambient, "graph")?;
    let fp = frame_at(&imm, x)?;
    let form = MultiVector::basis(m + n, &(0..m).collect::<Vec<_>>())?;
    let cp = CalibratedPoint::from_framed(&fp, &form)?;

    // A = L₂ᵀ df L₁^{-T}, the differential in orthonormal frames.
    let lt = &fp.to_frame;
    let l1t = lt.view((0, 0), (m, m)).into_owned();
    let l2t = lt.view((m, m), (n, n)).into_owned();
    let df = fp.d_f.view((m, 0), (n, m)).into_owned();
    let l1inv = l1t.try_inverse().ok_or(Error::RankDeficient)?;
    let amat = &l2t * df * l1inv;
    let svd = amat.clone().svd(true, true);
    let r = m.min(n);
    let u_thin = svd.u.ok_or_else(|| Error::Singular("SVD failed".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Singular("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut lambdas = vec![0.0; m];
    let mut a_cols = Vec::new();
    let mut at_cols = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        lambdas[pos] = svd.singular_values[k];
        a_cols.push(v_t.row(k).transpose());
        at_cols.push(u_thin.column(k).into_owned());
    }
    let a_thin = DMatrix::from_columns(&a_cols);
    let at_thin = DMatrix::from_columns(&at_cols);
    let complete = |thin: DMatrix<f64>, dim: usize| -> DMatrix<f64> {
        if thin.ncols() == dim {
            thin
        } else {
            let rest = complete_frame(&thin);
            crate::linalg::hstack(&thin, &rest)
        }
    };
    let mut a = complete(a_thin, m);
    let mut a_tilde = complete(at_thin, n);
    if a.determinant() < 0.0 {
        // Flipping a_1 together with ã_1 keeps df(a_1) = λ_1 ã_1.
        a.column_mut(0).neg_mut();
        a_tilde.column_mut(0).neg_mut();
    }
    let (xg, ug) = graph_frames(&lambdas, &a, &a_tilde);
    let cpg = CalibratedPoint::new(&form, xg.clone(), ug.clone())?;

    let cos_closed = lambdas.iter().map(|l| (1.0 + l * l).powf(-0.5)).product::<f64>();
    let mut phi_dev: f64 = 0.0;
    for al in 0..n {
        for i in 0..m {
            let want = if al == i { cpg.cos_theta * lambdas[i] } else { 0.0 };
            phi_dev = phi_dev.max((cpg.phi[(al, i)] - want).abs());
        }
    }
    let sum_l2: f64 = lambdas.iter().map(|l| l * l).sum();
    let c2 = cos_closed * cos_closed;
    let sin2 = 1.0 - cp.cos_theta * cp.cos_theta;

    let rot = fp.tangent.transpose() * &xg;
    let bg: SecondForm = fp.b.rotate(&rot);
    let h = bg.coeffs(&ug);
    let b2 = bg.norm_sq();
    let q = if cp.cos_theta > 0.0 { cpg.q_forms(&bg)?.q } else { f64::NAN };
    let delta = delta_from_lambdas(&lambdas);

    // Curvature contraction, directly and through the factors.
    let direct = curvature_contraction(&imm, &fp, &cp)?;
    let (factors, ricci) = if imm.ambient().is_flat_chart() {
        (0.0, 0.0)
    } else {
        let tensor = imm.ambient().curvature_tensor(&fp.point)?;
        let nn = m + n;
        let lift = |v: DVector<f64>| (&fp.from_frame * v).as_slice().to_vec();
        let pad_m = |i: usize| {
            let mut v = DVector::zeros(nn);
            v.rows_mut(0, m).copy_from(&a.column(i));
            lift(v)
        };
        let pad_n = |i: usize| {
            let mut v = DVector::zeros(nn);
            v.rows_mut(m, n).copy_from(&a_tilde.column(i));
            lift(v)
        };
        let am: Vec<Vec<f64>> = (0..m).map(pad_m).collect();
        let an: Vec<Vec<f64>> = (0..r).map(pad_n).collect();
        let k1 = |i: usize, j: usize| contract4(&tensor, nn, &am[i], &am[j], &am[i], &am[j]);
        let kn = |i: usize, j: usize| {
            if i < r && j < r {
                contract4(&tensor, nn, &an[i], &an[j], &an[i], &an[j])
            } else {
                0.0
            }
        };
        let w = |i: usize| lambdas[i] * lambdas[i];
        let mut f33 = 0.0;
        let mut f34 = 0.0;
        for j in 0..m {
            let ric: f64 = (0..m).filter(|&i| i != j).map(|i| k1(i, j)).sum();
            f34 += w(j) / (1.0 + w(j)) * ric;
            for i in 0..m {
                if i == j {
                    continue;
                }
                let d = (1.0 + w(i)) * (1.0 + w(j));
                f33 += w(j) / d * (k1(i, j) - w(i) * kn(i, j));
                f34 -= w(i) * w(j) / d * (k1(i, j) + kn(i, j));
            }
        }
        (cos_closed * f33, cos_closed * f34)
    };

    Ok(GraphAnalysis {
        cos_theta: cp.cos_theta,
        cos_theta_closed: cos_closed,
        phi_diag_residual: phi_dev,
        sin_bounds: (c2 * sum_l2, sin2, (m as f64 - 1.0) * c2 * sum_l2),
        b_norm_sq: b2,
        q,
        q_expansion: q_expansion(&lambdas, &h),
        delta,
        delta_margin: q - delta * b2,
        contraction_direct: direct,
        contraction_factors: factors,
        contraction_ricci: ricci,
        lambdas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{MetricFactor, ProductRiemannian};
    use crate::linalg::seeded;

    fn hyperbolic_times_sphere() -> AmbientSpace {
        let h2 = MetricFactor::parse(2, &["4/(1 - x1^2 - x2^2)^2", "0", "4/(1 - x1^2 - x2^2)^2"]).unwrap();
        let s2 = MetricFactor::parse(2, &["4/(1 + x1^2 + x2^2)^2", "0", "4/(1 + x1^2 + x2^2)^2"]).unwrap();
        AmbientSpace::Product(ProductRiemannian::new(vec![h2, s2]).unwrap())
    }

    #[test]
    fn constant_map_is_a_slice() {
        let f = ExprMap::parse(&["0.3", "-1"], 2).unwrap();
        let g = graph_analysis(&f, AmbientSpace::Euclidean(4), &[0.2, 0.1]).unwrap();
        assert!(g.lambdas.iter().all(|l| l.abs() < 1e-14));
        assert!((g.cos_theta - 1.0).abs() < 1e-14);
        assert_eq!(g.contraction_direct, 0.0);
    }

    #[test]
    fn linear_graph_angle() {
        let f = ExprMap::parse(&["x1"], 2).unwrap();
        let g = graph_analysis(&f, AmbientSpace::Euclidean(3), &[0.5, 0.5]).unwrap();
        assert!((g.cos_theta - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((g.lambdas[0] - 1.0).abs() < 1e-12);
        let (lo, s, hi) = g.sin_bounds;
        assert!(lo <= s + 1e-12 && s <= hi + 1e-12);
    }

    #[test]
    fn frames_diagonalize_phi_and_expand_q() {
        let f = ExprMap::parse(&["0.3*x1^2 + x2*x1", "sin(x2) - 0.2*x1*x2", "0.1*x1^3"], 2).unwrap();
        let g = graph_analysis(&f, AmbientSpace::Euclidean(5), &[0.3, -0.4]).unwrap();
        assert!(g.phi_diag_residual < 1e-12, "{g:?}");
        assert!((g.cos_theta - g.cos_theta_closed).abs() < 1e-12);
        assert!((g.q - g.q_expansion).abs() < 1e-10 * g.q.abs().max(1.0), "{g:?}");
    }

    #[test]
    fn contraction_on_product_matches_factor_formulas() {
        let f = ExprMap::parse(&["0.4*x1 + 0.1*x2^2", "0.2*x2 - 0.3*x1*x2"], 2).unwrap();
        let g = graph_analysis(&f, hyperbolic_times_sphere(), &[0.2, -0.1]).unwrap();
        assert!(g.contraction_direct.abs() > 1e-4);
        assert!(g.contraction_residual() < 1e-8, "{g:?}");
    }

    #[test]
    fn random_forms_are_delta_positive() {
        let mut rng = seeded(8);
        let lambdas = [0.9, 0.7, 0.3];
        let (x, u) = graph_plane_frames(&lambdas, 3);
        let form = MultiVector::basis(6, &[0, 1, 2]).unwrap();
        let cp = CalibratedPoint::new(&form, x, u.clone()).unwrap();
        let delta = delta_from_lambdas(&lambdas);
        for _ in 0..100 {
            let b = SecondForm::random(&mut rng, &u, 3);
            let q = cp.q_forms(&b).unwrap();
            assert!(q.q >= delta * q.b_norm_sq - 1e-9);
            assert!((q.q - q_expansion(&lambdas, &b.coeffs(&u))).abs() < 1e-10 * q.q.max(1.0));
        }
    }
}
