//! The action of `SO(4n)` on `Ω` and samplers for `Sp(n)·Sp(1)`.
//!
//! The structures act by left multiplication on each quaternionic coordinate,
//! so the `Sp(n)` factor acts by right multiplication with a quaternionic
//! unitary matrix `A` (`X ↦ XA`, commuting with `I, J, K`) and the `Sp(1)`
//! factor by left multiplication with a unit quaternion `ζ`, which conjugates
//! the triple `(I, J, K)` by a rotation. In the convention with structures
//! acting on the right this is the action `ξ(X)ζ^{−1}`.

use super::canonical::CanonicalBasisData;
use super::HyperHermitianSpace;
use crate::calibrations::{quat_conj, quat_mul, Quaternion};
use crate::error::{Error, Result};
use crate::linalg::{gaussian_vector, hstack, unit_vector};
use crate::tolerances;
use nalgebra::DMatrix;
use rand::Rng;

/// `‖P·Ω − Ω‖` with `(P·Ω)(X, …) = Ω(P^{−1}X, …)`.
pub fn omega_deviation(space: &HyperHermitianSpace, p: &DMatrix<f64>) -> Result<f64> {
    let n = space.dim();
    if p.shape() != (n, n) {
        return Err(Error::Dimension(format!("expected a {n}x{n} map, got {}x{}", p.nrows(), p.ncols())));
    }
    let dev = (p.transpose() * p - DMatrix::<f64>::identity(n, n)).abs().max();
    if dev > tolerances::LINEAR_ALGEBRA {
        return Err(Error::Invalid(format!("map is not orthogonal (defect {dev:.3e})")));
    }
    let pulled = space.omega().pullback(&p.transpose())?;
    Ok(pulled.sub(space.omega())?.norm())
}

fn qadd(a: &Quaternion, b: &Quaternion, s: f64) -> Quaternion {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

fn qnorm_sq(a: &Quaternion) -> f64 {
    a.iter().map(|v| v * v).sum()
}

/// Orthonormalizes the rows of a quaternionic matrix for `h(u, v) = Σ u_α v̄_α`
/// (left scalar multiples are subtracted), giving `A A^* = 1`.
fn quaternionic_gram_schmidt(rows: &mut [Vec<Quaternion>]) {
    for i in 0..rows.len() {
        for _ in 0..2 {
            for j in 0..i {
                let mut c = [0.0; 4];
                for a in 0..rows[i].len() {
                    c = qadd(&c, &quat_mul(&rows[i][a], &quat_conj(&rows[j][a])), 1.0);
                }
                for a in 0..rows[i].len() {
                    let t = quat_mul(&c, &rows[j][a]);
                    rows[i][a] = qadd(&rows[i][a], &t, -1.0);
                }
            }
        }
        let nrm = rows[i].iter().map(qnorm_sq).sum::<f64>().sqrt();
        for q in rows[i].iter_mut() {
            *q = [q[0] / nrm, q[1] / nrm, q[2] / nrm, q[3] / nrm];
        }
    }
}

fn basis_quaternion(c: usize) -> Quaternion {
    let mut q = [0.0; 4];
    q[c] = 1.0;
    q
}

/// A random element of `Sp(n)` as the real matrix of `X ↦ XA` on `ℝ^{4n}`,
/// with `A` the quaternionic Gram–Schmidt of a Gaussian quaternionic matrix.
pub fn sample_symplectic<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut rows: Vec<Vec<Quaternion>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let g = gaussian_vector(rng, 4);
                    [g[0], g[1], g[2], g[3]]
                })
                .collect()
        })
        .collect();
    quaternionic_gram_schmidt(&mut rows);
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for (alpha, row) in rows.iter().enumerate() {
        for c in 0..4 {
            let e = basis_quaternion(c);
            for (beta, a) in row.iter().enumerate() {
                let img = quat_mul(&e, a);
                for d in 0..4 {
                    m[(4 * beta + d, 4 * alpha + c)] = img[d];
                }
            }
        }
    }
    m
}

/// Left multiplication by a unit quaternion on every coordinate.
fn sp1_matrix(n: usize, zeta: &Quaternion) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for b in 0..n {
        for c in 0..4 {
            let img = quat_mul(zeta, &basis_quaternion(c));
            for d in 0..4 {
                m[(4 * b + d, 4 * b + c)] = img[d];
            }
        }
    }
    m
}

/// A random element of `Sp(n)·Sp(1)`: `ζ` uniform on the unit quaternions
/// composed with a sampled `Sp(n)` element.
pub fn sample_sp_sp1<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let u = unit_vector(rng, 4);
    let zeta = [u[0], u[1], u[2], u[3]];
    sp1_matrix(n, &zeta) * sample_symplectic(rng, n)
}

/// The orthogonal map sending the canonical frames `(B, B^⊥)` of one complex
/// plane to those of another. For planes with equal angle it lies in
/// `Sp(2)·Sp(1)` and maps the first plane onto the second.
pub fn frame_transport(from: &CanonicalBasisData, to: &CanonicalBasisData) -> DMatrix<f64> {
    hstack(&to.tangent, &to.normal) * hstack(&from.tangent, &from.normal).transpose()
}

#[cfg(test)]
mod tests {
    use super::super::{canonical_basis, canonical_plane, quaternionic_angle, random_complex_plane, FourPlane};
    use super::*;
    use crate::linalg::{random_rotation, seeded};
    use nalgebra::DVector;

    #[test]
    fn identity_preserves_omega() {
        let s = HyperHermitianSpace::new(2).unwrap();
        assert_eq!(omega_deviation(&s, &DMatrix::identity(8, 8)).unwrap(), 0.0);
        let mut bad = DMatrix::identity(8, 8);
        bad[(0, 0)] = 2.0;
        assert!(omega_deviation(&s, &bad).is_err());
    }

    #[test]
    fn symplectic_samples_commute_with_the_structures() {
        let s = HyperHermitianSpace::new(3).unwrap();
        let mut rng = seeded(1);
        for _ in 0..10 {
            let p = sample_symplectic(&mut rng, 3);
            assert!((p.transpose() * &p - DMatrix::<f64>::identity(12, 12)).abs().max() < 1e-12);
            for j in s.structures() {
                assert!((&p * j - j * &p).abs().max() < 1e-12);
            }
        }
    }

    #[test]
    fn sp_sp1_preserves_omega_and_rotations_do_not() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let mut rng = seeded(2);
        for _ in 0..20 {
            let p = sample_sp_sp1(&mut rng, 2);
            assert!(omega_deviation(&s, &p).unwrap() < 1e-12);
        }
        let broken = (0..20)
            .filter(|_| omega_deviation(&s, &random_rotation(&mut rng, 8)).unwrap() >= 1e-3)
            .count();
        assert_eq!(broken, 20);
    }

    #[test]
    fn planes_with_equal_angle_are_congruent() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let mut rng = seeded(3);
        for _ in 0..10 {
            let d1 = canonical_basis(&s, &random_complex_plane(&mut rng, &s).unwrap()).unwrap();
            // A second plane with the same s built from random data.
            let p = sample_sp_sp1(&mut rng, 2);
            let x2 = p.column(0).into_owned();
            let y2 = p.column(4).into_owned();
            let u = unit_vector(&mut rng, 3);
            let xa = [u[0], u[1], u[2]];
            let w = unit_vector(&mut rng, 3);
            let d = w.dot(&u);
            let yv: DVector<f64> = &w - &u * d;
            let yv = &yv / yv.norm();
            let ya = [yv[0], yv[1], yv[2]];
            let plane2 = canonical_plane(&s, &x2, &y2, &xa, &ya, d1.s.asin()).unwrap();
            let d2 = canonical_basis(&s, &plane2).unwrap();
            let t = frame_transport(&d1, &d2);
            assert!(omega_deviation(&s, &t).unwrap() < 1e-8);
            let image = FourPlane::new(&(&t * &d1.tangent)).unwrap();
            let a = quaternionic_angle(&s, &image).unwrap().cos_theta;
            assert!((a - d2.cos_theta).abs() < 1e-10);
            for k in 0..4 {
                assert!(plane2.distance(&image.basis().column(k).into_owned()) < 1e-10);
            }
        }
    }
}
