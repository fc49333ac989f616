//! Linear algebra of the quaternionic fundamental form on `ℝ^{4n}`.
//!
//! `Ω = (1/6) Σ_r w_r ∧ w_r`, where `w_r(X, Y) = ⟨J_r X, Y⟩` are the Kähler
//! forms of the structures `I, J, K` from [`crate::calibrations::structures`].
//! `Ω` has comass one and calibrates the quaternionic lines `H_X`.
//!
//! Oriented 4-planes of `ℝ⁸` are the main objects: their quaternionic angle
//! `cosθ = Ω(X_1, …, X_4)`, the canonical frames of `J_x`-complex planes and
//! the operators built on them (`Φ`, `Ψ`, `Q^±`, `H^±`, `D`, `A`, `E`).

mod canonical;
mod group;
mod spectrum;

pub use canonical::{
    canonical_basis, canonical_plane, dae_quantities, detect_complex_direction, lambda_structures,
    delta_lower_margin, psi_matrix_check, qpm_operators, random_complex_plane, random_normal_tensor, space_form_contraction,
    space_form_curvature, CanonicalBasisData, DaeResult, DeltaLower, PsiCheck, QpmResult,
    SpaceFormContraction,
};
pub use group::{frame_transport, omega_deviation, sample_sp_sp1, sample_symplectic};
pub use spectrum::{
    bivector, displayed_multiplicities, lambda_bivectors, omega_delta_matrix, omega_delta_spectrum,
    theta, EigenvectorCheck, OmegaDeltaSpectrum,
};

use crate::calibrations::quaternionic_form;
use crate::calibrations::structures::{kahler_form, quaternionic_direction, quaternionic_structures};
use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::linalg::{cluster, complete_frame, gram_schmidt, hstack, sym_eigenvalues};
use crate::subgeom::kahler::kahler_angles;
use crate::tolerances;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// `ℝ^{4n}` with the structures `I, J, K` and the form `Ω`.
#[derive(Debug, Clone)]
pub struct HyperHermitianSpace {
    n: usize,
    structures: [DMatrix<f64>; 3],
    omega: MultiVector,
}

impl HyperHermitianSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("quaternionic dimension must be at least 1".into()));
        }
        Ok(Self { n, structures: quaternionic_structures(n), omega: quaternionic_form(n)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn structures(&self) -> &[DMatrix<f64>; 3] {
        &self.structures
    }

    pub fn omega(&self) -> &MultiVector {
        &self.omega
    }

    /// `J_x = x₁I + x₂J + x₃K`.
    pub fn direction(&self, x: &[f64; 3]) -> DMatrix<f64> {
        quaternionic_direction(self.n, x)
    }

    pub fn kahler(&self, r: usize) -> MultiVector {
        kahler_form(&self.structures[r])
    }

    /// Largest entry of `J_r² + 1`, `J_rᵀJ_r − 1`, `IJ − K` and `IJ + JI`.
    pub fn relation_residual(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.dim(), self.dim());
        let [i, j, k] = &self.structures;
        let mut worst: f64 = 0.0;
        for m in [i, j, k] {
            worst = worst.max((m * m + &id).abs().max());
            worst = worst.max((m.transpose() * m - &id).abs().max());
        }
        worst = worst.max((i * j - k).abs().max());
        worst = worst.max((i * j + j * i).abs().max());
        worst = worst.max((j * k + k * j).abs().max());
        worst.max((k * i + i * k).abs().max())
    }

    /// `Ω` on the four columns of `frame`.
    pub fn omega_on(&self, frame: &DMatrix<f64>) -> Result<f64> {
        self.omega.eval_frame(frame)
    }

    /// `Ω(a, b, c, d)`.
    pub fn omega4(&self, a: &DVector<f64>, b: &DVector<f64>, c: &DVector<f64>, d: &DVector<f64>) -> f64 {
        let f = DMatrix::from_columns(&[a.clone(), b.clone(), c.clone(), d.clone()]);
        self.omega.eval_frame(&f).unwrap_or(f64::NAN)
    }

    /// Orthonormal basis `{X, IX, JX, KX}` of the quaternionic line of a unit `X`.
    pub fn quaternionic_line(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let [i, j, k] = &self.structures;
        DMatrix::from_columns(&[x.clone(), i * x, j * x, k * x])
    }
}

/// An oriented 4-plane with a direct orthonormal basis.
#[derive(Debug, Clone, Serialize)]
pub struct FourPlane {
    basis: DMatrix<f64>,
    /// `+1` if the basis has the orientation of the vectors it was built
    /// from, `−1` after [`FourPlane::reversed`].
    pub orientation: f64,
}

impl FourPlane {
    /// Orthonormalizes four vectors (Gram–Schmidt keeps their orientation).
    pub fn new(vectors: &DMatrix<f64>) -> Result<Self> {
        if vectors.ncols() != 4 || !vectors.nrows().is_multiple_of(4) {
            return Err(Error::Dimension(format!(
                "a 4-plane in R^{{4n}} needs a {}x4 matrix, got {}x{}",
                vectors.nrows(),
                vectors.nrows(),
                vectors.ncols()
            )));
        }
        let basis = gram_schmidt(vectors, tolerances::FRAME_RANK)?;
        Ok(Self { basis, orientation: 1.0 })
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Same plane with the opposite orientation.
    pub fn reversed(&self) -> Self {
        let mut basis = self.basis.clone();
        basis.column_mut(0).neg_mut();
        Self { basis, orientation: -self.orientation }
    }

    /// `‖BᵀB − 1‖_max`.
    pub fn gram_residual(&self) -> f64 {
        (self.basis.transpose() * &self.basis - DMatrix::<f64>::identity(4, 4)).abs().max()
    }

    /// Orthonormal basis of the complement, oriented so that `(T, T^⊥)` is direct.
    pub fn perp(&self) -> DMatrix<f64> {
        let mut perp = complete_frame(&self.basis);
        if hstack(&self.basis, &perp).determinant() < 0.0 {
            perp.column_mut(0).neg_mut();
        }
        perp
    }

    /// Distance of `v` from the plane.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - &self.basis * (self.basis.transpose() * v)).norm()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuaternionicAngle {
    pub cos_theta: f64,
    /// Eigenvalues of `Ω^Δ` restricted to `∧²T`, ascending.
    pub restricted_spectrum: Vec<f64>,
    /// Whether the restricted spectrum is `{−cosθ ×3, cosθ ×3}` (only claimed in `ℝ⁸`).
    pub spectrum_ok: Option<bool>,
    pub restricted_residual: f64,
    pub cos_theta_perp: Option<f64>,
    /// `cosθ_1^r cosθ_2^r` (signed) for the Kähler angles of `T` w.r.t. `I, J, K`.
    pub kahler_products: [f64; 3],
    /// `(1/3) Σ_r cosθ_1^r cosθ_2^r`.
    pub kahler_average: f64,
}

/// Quaternionic angle of an oriented 4-plane and the restriction of `Ω^Δ` to `∧²T`.
pub fn quaternionic_angle(space: &HyperHermitianSpace, plane: &FourPlane) -> Result<QuaternionicAngle> {
    if plane.dim() != space.dim() {
        return Err(Error::Dimension(format!("plane in R^{} for a form on R^{}", plane.dim(), space.dim())));
    }
    let t = plane.basis();
    let cos = space.omega_on(t)?;
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
    let mut r = DMatrix::zeros(6, 6);
    let col = |i: usize| t.column(i).into_owned();
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for (q, &(c, d)) in pairs.iter().enumerate() {
            r[(p, q)] = space.omega4(&col(a), &col(b), &col(c), &col(d));
        }
    }
    let spec = sym_eigenvalues(&r);
    let restricted_residual = spec[..3]
        .iter()
        .map(|v| (v + cos.abs()).abs())
        .chain(spec[3..].iter().map(|v| (v - cos.abs()).abs()))
        .fold(0.0, f64::max);
    let (spectrum_ok, cos_theta_perp) = if space.n() == 2 {
        let c = cluster(&spec, tolerances::EIGEN_CLUSTER);
        let ok = if cos.abs() <= tolerances::EIGEN_CLUSTER {
            c.len() == 1 && c[0].1 == 6
        } else {
            c.len() == 2 && c[0].1 == 3 && c[1].1 == 3
        };
        (Some(ok && restricted_residual <= tolerances::LINEAR_ALGEBRA), Some(space.omega_on(&plane.perp())?))
    } else {
        (None, None)
    };
    let normal = plane.perp();
    let mut kahler_products = [0.0; 3];
    for (r, p) in kahler_products.iter_mut().enumerate() {
        *p = kahler_angles(t, &normal, &space.structures()[r], None, 0.0)?.cos_theta;
    }
    Ok(QuaternionicAngle {
        cos_theta: cos,
        restricted_spectrum: spec,
        spectrum_ok,
        restricted_residual,
        cos_theta_perp,
        kahler_products,
        kahler_average: kahler_products.iter().sum::<f64>() / 3.0,
    })
}

/// Residuals of the four evaluation identities for unit `X`, a unit `Y ⊥ H_X`,
/// a unit `Z ⊥ H_X + H_Y` and unit `x, y, z ∈ S²`:
/// `Ω(X, J_xX, J_yX, J_zX) = ⟨x, y × z⟩`, `Ω(X, J_xX, Y, J_yY) = ⟨x, y⟩/3`,
/// `Ω(X, J_xX, J_yX, Y) = 0`, `Ω(X, J_xX, Y, Z) = 0`.
pub fn evaluation_identities(
    space: &HyperHermitianSpace,
    big: [&DVector<f64>; 3],
    dirs: [&[f64; 3]; 3],
) -> [f64; 4] {
    let [x, y, z] = big;
    let [u, v, w] = dirs;
    let (ju, jv, jw) = (space.direction(u), space.direction(v), space.direction(w));
    let cross = [v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]];
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    [
        (space.omega4(x, &(&ju * x), &(&jv * x), &(&jw * x)) - dot(u, &cross)).abs(),
        (space.omega4(x, &(&ju * x), y, &(&jv * y)) - dot(u, v) / 3.0).abs(),
        space.omega4(x, &(&ju * x), &(&jv * x), y).abs(),
        space.omega4(x, &(&ju * x), y, z).abs(),
    ]
}

/// `(2 Σ_{i<j} λ_iλ_j, 3 Σ λ_i²)` for a vector of four singular values.
pub fn newton_bound(lambdas: &[f64]) -> (f64, f64) {
    let mut cross = 0.0;
    for i in 0..lambdas.len() {
        for j in i + 1..lambdas.len() {
            cross += lambdas[i] * lambdas[j];
        }
    }
    (2.0 * cross, 3.0 * lambdas.iter().map(|l| l * l).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_frame, seeded, unit_vector};
    use rand::Rng;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn random_s2<R: Rng>(rng: &mut R) -> [f64; 3] {
        let u = unit_vector(rng, 3);
        [u[0], u[1], u[2]]
    }

    #[test]
    fn structures_satisfy_quaternion_relations() {
        for n in 1..=3 {
            assert!(HyperHermitianSpace::new(n).unwrap().relation_residual() < 1e-15);
        }
        assert!(HyperHermitianSpace::new(0).is_err());
    }

    #[test]
    fn quaternionic_line_has_angle_one() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let mut rng = seeded(1);
        for _ in 0..5 {
            let x = unit_vector(&mut rng, 8);
            let plane = FourPlane::new(&s.quaternionic_line(&x)).unwrap();
            let a = quaternionic_angle(&s, &plane).unwrap();
            assert!((a.cos_theta - 1.0).abs() < 1e-12);
            assert_eq!(a.spectrum_ok, Some(true));
            assert!((a.cos_theta_perp.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn totally_complex_plane_has_angle_one_third() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let [i, _, _] = s.structures();
        let (e0, e4) = (e(8, 0), e(8, 4));
        let t = DMatrix::from_columns(&[e0.clone(), i * &e0, e4.clone(), i * &e4]);
        let a = quaternionic_angle(&s, &FourPlane::new(&t).unwrap()).unwrap();
        assert!((a.cos_theta - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(a.spectrum_ok, Some(true));
    }

    #[test]
    fn random_planes_match_kahler_average_and_complement() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let mut rng = seeded(2);
        for _ in 0..30 {
            let plane = FourPlane::new(&random_frame(&mut rng, 8, 4)).unwrap();
            let a = quaternionic_angle(&s, &plane).unwrap();
            assert!((a.cos_theta - a.kahler_average).abs() < 1e-12, "{a:?}");
            assert!((a.cos_theta - a.cos_theta_perp.unwrap()).abs() < 1e-12);
            assert_eq!(a.spectrum_ok, Some(true), "{a:?}");
            assert!(a.cos_theta.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn reversing_orientation_flips_the_angle() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let mut rng = seeded(3);
        let plane = FourPlane::new(&random_frame(&mut rng, 8, 4)).unwrap();
        let a = quaternionic_angle(&s, &plane).unwrap().cos_theta;
        let b = quaternionic_angle(&s, &plane.reversed()).unwrap().cos_theta;
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let mut m = DMatrix::zeros(8, 4);
        m[(0, 0)] = 1.0;
        m[(0, 1)] = 1.0;
        assert!(FourPlane::new(&m).is_err());
    }

    #[test]
    fn evaluation_identities_hold() {
        let s = HyperHermitianSpace::new(3).unwrap();
        let mut rng = seeded(4);
        for _ in 0..20 {
            // Orthogonal quaternionic lines from a random element of Sp(3).
            let p = sample_symplectic(&mut rng, 3);
            let (x, y, z) = (p.column(0).into_owned(), p.column(4).into_owned(), p.column(8).into_owned());
            let dirs = [random_s2(&mut rng), random_s2(&mut rng), random_s2(&mut rng)];
            let r = evaluation_identities(&s, [&x, &y, &z], [&dirs[0], &dirs[1], &dirs[2]]);
            assert!(r.iter().all(|v| *v < 1e-12), "{r:?}");
        }
    }

    #[test]
    fn newton_bound_holds() {
        let mut rng = seeded(5);
        for _ in 0..1000 {
            let l: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (a, b) = newton_bound(&l);
            assert!(a <= b + 1e-12);
        }
    }
}
