//! Small dense helpers shared by the geometry modules.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Deterministic RNG used everywhere a seed is accepted.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

/// Derives an independent stream from a base seed and an index.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    seeded(seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let nv = v.norm();
        if nv > 1e-8 {
            return v / nv;
        }
    }
}

/// Thin QR orthonormalization with column signs fixed so that the triangular
/// factor has a nonnegative diagonal. Preserves the flag of the columns.
pub fn qr_orthonormalize(a: &DMatrix<f64>) -> DMatrix<f64> {
    let k = a.ncols();
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..k {
        if r[(c, c)] < 0.0 {
            let mut col = q.column_mut(c);
            col *= -1.0;
        }
    }
    q
}

/// Random orthonormal `n × k` frame (Haar on the Stiefel manifold).
pub fn random_frame<R: Rng>(rng: &mut R, n: usize, k: usize) -> DMatrix<f64> {
    qr_orthonormalize(&gaussian_matrix(rng, n, k))
}

/// Haar-random rotation in `SO(n)`.
pub fn random_rotation<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut q = random_frame(rng, n, n);
    if q.determinant() < 0.0 {
        let mut c = q.column_mut(0);
        c *= -1.0;
    }
    q
}

/// Gram–Schmidt of the columns of `a`; fails if a column is (numerically)
/// dependent on the previous ones.
pub fn gram_schmidt(a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let mut q = a.clone();
    for c in 0..a.ncols() {
        let mut v = a.column(c).into_owned();
        for _ in 0..2 {
            for p in 0..c {
                let qp = q.column(p).into_owned();
                let d = qp.dot(&v);
                v -= qp * d;
            }
        }
        let nv = v.norm();
        if nv <= tol * a.column(c).norm().max(1.0) {
            return Err(Error::DegenerateFrame(format!(
                "column {c} is linearly dependent on the previous ones"
            )));
        }
        q.set_column(c, &(v / nv));
    }
    Ok(q)
}

/// Extends an orthonormal `n × k` frame by `n - k` orthonormal vectors chosen
/// greedily from the coordinate basis (largest residual first, ties broken by
/// index).
pub fn complete_frame(tangent: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = tangent.shape();
    let mut basis: Vec<DVector<f64>> = (0..k).map(|c| tangent.column(c).into_owned()).collect();
    let mut out = Vec::with_capacity(n - k);
    let mut used = vec![false; n];
    for _ in k..n {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (a, taken) in used.iter().enumerate() {
            if *taken {
                continue;
            }
            let mut v = DVector::zeros(n);
            v[a] = 1.0;
            for _ in 0..2 {
                for b in &basis {
                    let d = b.dot(&v);
                    v -= b * d;
                }
            }
            let nv = v.norm();
            if best.as_ref().is_none_or(|(_, _, bn)| nv > *bn + 1e-12) {
                best = Some((a, v, nv));
            }
        }
        let (a, v, nv) = best.expect("a residual direction exists");
        used[a] = true;
        let u = v / nv;
        basis.push(u.clone());
        out.push(u);
    }
    DMatrix::from_columns(&out)
}

/// Columns of `a` followed by columns of `b`.
pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = a.column_iter().map(|c| c.into_owned()).collect();
    cols.extend(b.column_iter().map(|c| c.into_owned()));
    DMatrix::from_columns(&cols)
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Groups sorted eigenvalues into `(value, multiplicity)` clusters.
pub fn cluster(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((c, m)) if (v - *c).abs() <= tol => {
                *c = (*c * *m as f64 + v) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_rotation_is_special_orthogonal() {
        let mut rng = seeded(3);
        let q = random_rotation(&mut rng, 6);
        let dev = (q.transpose() * &q - DMatrix::<f64>::identity(6, 6)).abs().max();
        assert!(dev < 1e-12);
        assert!((q.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn completion_spans_the_complement() {
        let mut rng = seeded(5);
        let t = random_frame(&mut rng, 5, 2);
        let full = hstack(&t, &complete_frame(&t));
        let dev = (full.transpose() * &full - DMatrix::<f64>::identity(5, 5)).abs().max();
        assert!(dev < 1e-12);
    }

    #[test]
    fn gram_schmidt_detects_dependence() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(gram_schmidt(&a, 1e-10).is_err());
    }

    #[test]
    fn clusters_count_multiplicities() {
        let c = cluster(&[-1.0, -1.0, 0.5, 0.5 + 1e-12, 2.0], 1e-8);
        assert_eq!(c.len(), 3);
        assert_eq!(c[1].1, 2);
    }
}
