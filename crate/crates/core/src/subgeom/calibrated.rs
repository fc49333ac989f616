//! A calibration evaluated on a tangent/normal frame pair: the angle, the
//! morphisms `Φ`, `Ψ` and the quadratic forms built from them.

use super::frame::FramedPoint;
use super::secondform::SecondForm;
use crate::error::{Error, Result};
use crate::exterior::{subsets, FormEvaluator, MultiVector};
use crate::linalg::hstack;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub struct CalibratedPoint {
    pub form: MultiVector,
    eval: FormEvaluator,
    /// `N × m` orthonormal tangent frame.
    pub tangent: DMatrix<f64>,
    /// `N × n` orthonormal normal frame.
    pub normal: DMatrix<f64>,
    pub cos_theta: f64,
    /// `Φ[(α, k)] = ḡ(Φ(X_k), U_α) = Ω(X_1, …, U_α, …, X_m)` with `U_α` in slot `k`.
    pub phi: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QForms {
    pub q_tilde: f64,
    pub q: f64,
    pub q_hat: f64,
    pub b_norm_sq: f64,
    pub b_phi_norm_sq: f64,
    /// `⟨Ψ, ∧²B⟩`.
    pub psi_wedge: f64,
    /// `Q / ‖B‖²` when `B ≠ 0`.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MorphismData {
    /// `n × m`.
    pub phi: DMatrix<f64>,
    /// `C(m,2) × C(n,2)`, rows `X_s ∧ X_j` (`s < j`), columns `U_α ∧ U_β`.
    pub psi: DMatrix<f64>,
    pub b_phi: DVector<f64>,
    /// `∇^⊥_{X_a} H` in the normal frame (`n × m`), when requested.
    pub nabla_h: Option<DMatrix<f64>>,
}

impl CalibratedPoint {
    pub fn new(form: &MultiVector, tangent: DMatrix<f64>, normal: DMatrix<f64>) -> Result<Self> {
        let (nn, m) = tangent.shape();
        if form.dim() != nn || form.grade() != m || normal.shape() != (nn, nn - m) {
            return Err(Error::Dimension(format!(
                "{}-form on R^{} with a {m}-frame and {} normals in R^{nn}",
                form.grade(),
                form.dim(),
                normal.ncols()
            )));
        }
        let full = hstack(&tangent, &normal);
        let dev = (full.transpose() * &full - DMatrix::<f64>::identity(nn, nn)).abs().max();
        if dev > 1e-10 {
            return Err(Error::DegenerateFrame(format!("frame deviates from orthonormal by {dev:.2e}")));
        }
        let eval = FormEvaluator::new(form);
        let cos_theta = eval.value(&tangent);
        let mut cp = CalibratedPoint {
            form: form.clone(),
            eval,
            tangent,
            normal,
            cos_theta,
            phi: DMatrix::zeros(nn - m, m),
        };
        for al in 0..nn - m {
            let u = cp.normal.column(al).into_owned();
            for k in 0..m {
                cp.phi[(al, k)] = cp.omega_with(&[(k, &u)]);
            }
        }
        Ok(cp)
    }

    pub fn from_framed(fp: &FramedPoint, form: &MultiVector) -> Result<Self> {
        Self::new(form, fp.tangent.clone(), fp.normal.clone())
    }

    pub fn m(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn n(&self) -> usize {
        self.normal.ncols()
    }

    pub fn sin_theta(&self) -> f64 {
        (1.0 - self.cos_theta * self.cos_theta).max(0.0).sqrt()
    }

    /// `Ω` on the tangent frame with some slots replaced.
    pub fn omega_with(&self, repl: &[(usize, &DVector<f64>)]) -> f64 {
        let mut f = self.tangent.clone();
        for (slot, v) in repl {
            f.set_column(*slot, v);
        }
        self.eval.value(&f)
    }

    /// `Φ(X_k)` as an ambient vector.
    pub fn phi_vector(&self, k: usize) -> DVector<f64> {
        &self.normal * self.phi.column(k)
    }

    /// `Φ(v)` for a tangent vector given in the tangent frame.
    pub fn phi_of(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.normal * (&self.phi * v)
    }

    pub fn phi_norm_sq(&self) -> f64 {
        self.phi.norm_squared()
    }

    pub fn psi_matrix(&self) -> DMatrix<f64> {
        let (m, n) = (self.m(), self.n());
        let tp = subsets(m, 2);
        let np = subsets(n, 2);
        let mut psi = DMatrix::zeros(tp.len(), np.len());
        for (r, t) in tp.iter().enumerate() {
            for (c, u) in np.iter().enumerate() {
                let ua = self.normal.column(u[0]).into_owned();
                let ub = self.normal.column(u[1]).into_owned();
                psi[(r, c)] = self.omega_with(&[(t[0], &ua), (t[1], &ub)]);
            }
        }
        psi
    }

    /// `⟨Ψ, ∧²B⟩ = Σ_k Σ_{s<j} Ω(…, B(X_s,X_k), …, B(X_j,X_k), …)`.
    pub fn psi_wedge(&self, b: &SecondForm) -> f64 {
        let m = self.m();
        let mut total = 0.0;
        for k in 0..m {
            for s in 0..m {
                for j in s + 1..m {
                    total += self.omega_with(&[(s, b.get(s, k)), (j, b.get(j, k))]);
                }
            }
        }
        total
    }

    /// `B_Φ(X_a) = Σ_i ḡ(B(X_i, X_a), Φ(X_i))`.
    pub fn b_phi(&self, b: &SecondForm) -> DVector<f64> {
        let m = self.m();
        let phis: Vec<DVector<f64>> = (0..m).map(|i| self.phi_vector(i)).collect();
        DVector::from_fn(m, |a, _| (0..m).map(|i| b.get(i, a).dot(&phis[i])).sum())
    }

    /// `cosθ Q̃(B) = cosθ‖B‖² − 2⟨Ψ, ∧²B⟩`, meaningful for any sign of `cosθ`.
    pub fn cos_q_tilde(&self, b: &SecondForm) -> f64 {
        self.cos_theta * b.norm_sq() - 2.0 * self.psi_wedge(b)
    }

    pub fn q_forms(&self, b: &SecondForm) -> Result<QForms> {
        let c = self.cos_theta;
        if c <= 0.0 {
            return Err(Error::NonPositiveAngle(c));
        }
        let b2 = b.norm_sq();
        let pw = self.psi_wedge(b);
        let bp2 = self.b_phi(b).norm_squared();
        let q_tilde = b2 - 2.0 / c * pw;
        let q = q_tilde + bp2 / (c * c);
        let q_hat = q + bp2 / (c * c);
        Ok(QForms {
            q_tilde,
            q,
            q_hat,
            b_norm_sq: b2,
            b_phi_norm_sq: bp2,
            psi_wedge: pw,
            margin: (b2 > 0.0).then(|| q / b2),
        })
    }

    /// `Z` with `g(Z, X) = ḡ(Φ(X), H)`, in the tangent frame.
    pub fn z_vector(&self, h: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.m(), |a, _| self.phi_vector(a).dot(h))
    }

    pub fn morphisms(&self, b: &SecondForm) -> MorphismData {
        MorphismData {
            phi: self.phi.clone(),
            psi: self.psi_matrix(),
            b_phi: self.b_phi(b),
            nabla_h: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibrations::{make_calibration, CalibrationKind};
    use crate::linalg::{random_rotation, seeded};

    #[test]
    fn calibrated_plane_has_vanishing_phi() {
        let cal = make_calibration(CalibrationKind::QuaternionicFundamental { n: 2 }).unwrap();
        let id = DMatrix::<f64>::identity(8, 8);
        let cp = CalibratedPoint::new(&cal.form, id.columns(0, 4).into_owned(), id.columns(4, 4).into_owned())
            .unwrap();
        assert!((cp.cos_theta - 1.0).abs() < 1e-14);
        assert!(cp.phi.abs().max() < 1e-14);
    }

    #[test]
    fn codimension_one_has_nonpositive_psi_wedge() {
        let cal = make_calibration(CalibrationKind::Volume { m: 3, n: 1 }).unwrap();
        let mut rng = seeded(3);
        let r = random_rotation(&mut rng, 4);
        let cp = CalibratedPoint::new(&cal.form, r.columns(0, 3).into_owned(), r.columns(3, 1).into_owned())
            .unwrap();
        let b = SecondForm::random(&mut rng, &cp.normal, 3);
        assert!(cp.psi_wedge(&b).abs() < 1e-12);
        if cp.cos_theta > 0.0 {
            let q = cp.q_forms(&b).unwrap();
            assert!(q.q >= q.b_norm_sq - 1e-12);
        }
    }
}
