//! Kähler angles of a submanifold and the complex/anticomplex splitting of
//! its second fundamental form.

use super::calibrated::CalibratedPoint;
use super::secondform::SecondForm;
use crate::calibrations::kahler_power;
use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Orthogonal polar factor `UVᵀ` of `a`, or `None` when `a` is singular.
fn polar_factor(a: &DMatrix<f64>, tol: f64) -> Option<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    if svd.singular_values.iter().any(|s| *s <= tol) {
        return None;
    }
    Some(svd.u? * svd.v_t?)
}

#[derive(Debug, Clone, Serialize)]
pub struct KahlerSplit {
    pub bc_norm_sq: f64,
    pub ba_norm_sq: f64,
    pub b_norm_sq: f64,
    pub q_tilde: f64,
    /// `Q̃ − ‖B‖² − (‖B^a‖² − ‖B^c‖²)/cosθ`.
    pub rho: f64,
    /// `4 sin²ϑ/cosθ Σ_{a<b,c} ‖B(e_a,e_c)‖ ‖B(e_b,e_c)‖` in a diagonalizing basis.
    pub rho_bound_sum: f64,
    /// `12 sin²ϑ/cosθ ‖B‖²`.
    pub rho_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualAngleCondition {
    pub delta: f64,
    /// `(13 − cosθ(13−δ)) / (−11 + cosθ(13−δ))`.
    pub ratio: f64,
    /// `‖B^a‖² − ratio ‖B^c‖²`; the condition holds when nonnegative.
    pub margin: f64,
    /// `Q̃ − δ‖B‖²`, nonnegative whenever the condition holds.
    pub q_tilde_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct KahlerAngles {
    /// `cosθ_1 ≥ … ≥ cosθ_k ≥ 0`.
    pub cos_angles: Vec<f64>,
    pub angles: Vec<f64>,
    pub epsilon: f64,
    /// `ε Π cosθ_i`, the value of the Kähler calibration.
    pub cos_theta: f64,
    pub equal_angles: bool,
    /// `J_w` undefined (some `cosθ_i = 0`).
    pub degenerate: bool,
    pub split: Option<KahlerSplit>,
    pub equal_angle_condition: Option<EqualAngleCondition>,
}

/// Pfaffian of a skew matrix by recursive expansion along the first row.
fn pfaffian(w: &DMatrix<f64>) -> f64 {
    let n = w.nrows();
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 1..n {
        if w[(0, j)] == 0.0 {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor = DMatrix::from_fn(n - 2, n - 2, |r, c| w[(keep[r], keep[c])]);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * w[(0, j)] * pfaffian(&minor);
    }
    total
}

/// A basis `X_1, Y_1 = J_w X_1, …` of the tangent frame (columns in
/// tangent-frame coordinates) diagonalizing `w`.
fn diagonalizing_basis(wt: &DMatrix<f64>, jw: &DMatrix<f64>) -> DMatrix<f64> {
    let m = wt.nrows();
    let eig = (wt.transpose() * wt).symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for k in order {
        if basis.len() == m {
            break;
        }
        let mut v = eig.eigenvectors.column(k).into_owned();
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() < 0.5 {
            continue;
        }
        let x = v.normalize();
        let mut y = jw * &x;
        for b in &basis {
            y -= b * b.dot(&y);
        }
        basis.push(x);
        basis.push(y.normalize());
    }
    DMatrix::from_columns(&basis)
}

/// Kähler angles of the tangent plane spanned by `tangent` in `ℝ^{2N}` with
/// complex structure `j`, and (with `b`) the splitting of `B`.
pub fn kahler_angles(
    tangent: &DMatrix<f64>,
    normal: &DMatrix<f64>,
    j: &DMatrix<f64>,
    b: Option<&SecondForm>,
    delta: f64,
) -> Result<KahlerAngles> {
    let m = tangent.ncols();
    if m % 2 == 1 || j.nrows() != tangent.nrows() {
        return Err(Error::Dimension("Kähler angles need an even-dimensional plane in the complex space".into()));
    }
    let k = m / 2;
    // W_ab = w(X_a, X_b) = ⟨J X_a, X_b⟩.
    let w = tangent.transpose() * j.transpose() * tangent;
    let wt = w.transpose();
    let ev = sym_eigenvalues(&(w.transpose() * &w));
    let mut cos_angles: Vec<f64> = (0..k)
        .map(|i| (0.5 * (ev[m - 1 - 2 * i] + ev[m - 2 - 2 * i])).max(0.0).sqrt().min(1.0))
        .collect();
    cos_angles.sort_by(|a, b| b.total_cmp(a));
    let pf = pfaffian(&w);
    let prod: f64 = cos_angles.iter().product();
    let epsilon = if pf < 0.0 { -1.0 } else { 1.0 };
    let equal = cos_angles.iter().all(|c| (c - cos_angles[0]).abs() < 1e-9) && epsilon > 0.0;
    let jw = polar_factor(&wt, 1e-12);
    let degenerate = jw.is_none();

    let mut split = None;
    let mut cond = None;
    if let (Some(b), Some(jw)) = (b, jw.as_ref()) {
        let wperp = normal.transpose() * j.transpose() * normal;
        if let Some(jperp) = polar_factor(&wperp.transpose(), 1e-12) {
            let nn = tangent.nrows();
            let jperp_amb = normal * &jperp * normal.transpose();
            // B^c and B^a are not symmetric, so every ordered pair is summed.
            let mut bcn = 0.0;
            let mut ban = 0.0;
            for a in 0..m {
                for c in 0..m {
                    let mut t = DVector::zeros(nn);
                    for e in 0..m {
                        t += b.get(e, c) * jw[(e, a)];
                    }
                    let jt = &jperp_amb * t;
                    bcn += ((b.get(a, c) - &jt) * 0.5).norm_squared();
                    ban += ((b.get(a, c) + &jt) * 0.5).norm_squared();
                }
            }
            let form = kahler_power(k, nn / 2)?;
            let cp = CalibratedPoint::new(&form, tangent.clone(), normal.clone())?;
            if cp.cos_theta > 0.0 {
                let c = cp.cos_theta;
                let b2 = b.norm_sq();
                let qt = cp.q_forms(b)?.q_tilde;
                let sin2 = 1.0 - cos_angles[0] * cos_angles[0];
                let e = diagonalizing_basis(&wt, jw);
                let be = b.rotate(&e);
                let mut sum = 0.0;
                for a in 0..m {
                    for bb in a + 1..m {
                        for cc in 0..m {
                            sum += be.get(a, cc).norm() * be.get(bb, cc).norm();
                        }
                    }
                }
                split = Some(KahlerSplit {
                    bc_norm_sq: bcn,
                    ba_norm_sq: ban,
                    b_norm_sq: b2,
                    q_tilde: qt,
                    rho: qt - b2 - (ban - bcn) / c,
                    rho_bound_sum: 4.0 * sin2 / c * sum,
                    rho_bound: 12.0 * sin2 / c * b2,
                });
                if c > 11.0 / 13.0 && c <= 11.0 / 12.0 {
                    let t = c * (13.0 - delta);
                    let ratio = (13.0 - t) / (t - 11.0);
                    cond = Some(EqualAngleCondition {
                        delta,
                        ratio,
                        margin: ban - ratio * bcn,
                        q_tilde_margin: qt - delta * b2,
                    });
                }
            }
        }
    }
    Ok(KahlerAngles {
        angles: cos_angles.iter().map(|c| c.acos()).collect(),
        cos_theta: epsilon * prod,
        cos_angles,
        epsilon,
        equal_angles: equal,
        degenerate,
        split,
        equal_angle_condition: cond,
    })
}

/// Largest `δ` admissible in the condition for a given `cosθ`:
/// `(13 cosθ − 11)/cosθ`.
pub fn equal_angle_delta_max(cos_theta: f64) -> f64 {
    (13.0 * cos_theta - 11.0) / cos_theta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrations::structures::complex_structure;
    use crate::linalg::{complete_frame, seeded};

    fn frame(cols: &[Vec<f64>]) -> (DMatrix<f64>, DMatrix<f64>) {
        let vs: Vec<DVector<f64>> = cols.iter().map(|c| DVector::from_column_slice(c).normalize()).collect();
        let t = DMatrix::from_columns(&vs);
        let n = complete_frame(&t);
        (t, n)
    }

    /// Tangent plane of the graph of `z ↦ a z̄` in `ℂ^k × ℂ^k`.
    fn conjugate_graph(k: usize, a: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut cols = Vec::new();
        for i in 0..2 * k {
            let mut v = vec![0.0; 4 * k];
            v[i] = 1.0;
            v[2 * k + i] = if i % 2 == 0 { a } else { -a };
            cols.push(v);
        }
        frame(&cols)
    }

    #[test]
    fn complex_plane_has_zero_angles() {
        let (t, n) = frame(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]);
        let ka = kahler_angles(&t, &n, &complex_structure(2), None, 0.0).unwrap();
        assert!((ka.cos_angles[0] - 1.0).abs() < 1e-14);
        assert!((ka.cos_theta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lagrangian_plane_is_degenerate() {
        let (t, n) = frame(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]]);
        let ka = kahler_angles(&t, &n, &complex_structure(2), None, 0.0).unwrap();
        assert!(ka.cos_angles[0].abs() < 1e-14);
        assert!(ka.degenerate);
    }

    #[test]
    fn conjugate_graph_angle_matches_two_by_two_diagonalization() {
        for a in [0.0, 0.3, 0.8, 1.7] {
            let (t, n) = conjugate_graph(1, a);
            let ka = kahler_angles(&t, &n, &complex_structure(2), None, 0.0).unwrap();
            // Brute force: the 2×2 matrix of w on the plane has eigenvalues ±i w₁₂.
            let j = complex_structure(2);
            let w12 = (j.transpose() * &t).column(0).dot(&t.column(1));
            assert!((ka.cos_angles[0] - w12.abs()).abs() < 1e-12);
            let exact = (1.0 - a * a) / (1.0 + a * a);
            assert!((ka.cos_theta - exact).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn complex_second_form_has_vanishing_q_tilde() {
        let (t, n) = frame(&[
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        ]);
        let j = complex_structure(4);
        let mut rng = seeded(4);
        let b = SecondForm::random(&mut rng, &n, 4);
        // Project onto complex bilinear forms: ¼(B − JB(J·,·) − JB(·,J·) − B(J·,J·)).
        let jt = t.transpose() * &j * &t;
        let mut bj1 = SecondForm::zero(4, 8);
        let mut bj2 = SecondForm::zero(4, 8);
        for a in 0..4 {
            for c in a..4 {
                let mut v1 = DVector::zeros(8);
                let mut v2 = DVector::zeros(8);
                for e in 0..4 {
                    v1 += b.get(e, c) * jt[(e, a)];
                    v2 += b.get(a, e) * jt[(e, c)];
                }
                bj1.set(a, c, &j * v1);
                bj2.set(a, c, &j * v2);
            }
        }
        let bjj = b.rotate(&jt);
        let mut bc = SecondForm::zero(4, 8);
        for a in 0..4 {
            for c in a..4 {
                let v = (b.get(a, c) - bj1.get(a, c) - bj2.get(a, c) - bjj.get(a, c)) * 0.25;
                bc.set(a, c, v);
            }
        }
        let ka = kahler_angles(&t, &n, &j, Some(&bc), 0.0).unwrap();
        let s = ka.split.unwrap();
        assert!(s.b_norm_sq > 1e-3);
        assert!(s.q_tilde.abs() < 1e-10, "{s:?}");
        assert!(s.ba_norm_sq < 1e-20);
    }

    #[test]
    fn equal_angle_planes_satisfy_the_rho_bound() {
        let mut rng = seeded(6);
        for a in [0.05, 0.15, 0.3] {
            let (t, n) = conjugate_graph(2, a);
            let ka0 = kahler_angles(&t, &n, &complex_structure(4), None, 0.0).unwrap();
            assert!(ka0.equal_angles);
            let cp = CalibratedPoint::new(&kahler_power(2, 4).unwrap(), t.clone(), n.clone()).unwrap();
            let s2 = 1.0 - ka0.cos_angles[0].powi(2);
            let c2 = ka0.cos_angles[0].powi(2);
            for k in 0..4 {
                let phi = cp.phi.column(k).norm_squared();
                assert!((phi - s2 * c2).abs() < 1e-12);
            }
            for _ in 0..50 {
                let b = SecondForm::random(&mut rng, &n, 4);
                let ka = kahler_angles(&t, &n, &complex_structure(4), Some(&b), 0.0).unwrap();
                let s = ka.split.unwrap();
                assert!(s.rho.abs() <= s.rho_bound_sum + 1e-10, "{s:?}");
                assert!(s.rho_bound_sum <= s.rho_bound + 1e-10);
            }
        }
    }
}
