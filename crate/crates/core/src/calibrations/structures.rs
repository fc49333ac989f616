//! Complex and quaternionic structures on `ℝ^{2k}` and `ℝ^{4n}`.
//!
//! The quaternionic structures act on each block `(q0, q1, q2, q3)` by left
//! multiplication with `i`, `j`, `k`:
//! `I q = (−q1, q0, −q3, q2)`, `J q = (−q2, q3, q0, −q1)`,
//! `K q = (−q3, −q2, q1, q0)`. They satisfy `I² = J² = K² = −1` and `IJ = K`.

use crate::exterior::MultiVector;
use nalgebra::DMatrix;

/// Standard complex structure: `J e_{2i} = e_{2i+1}` (zero-based).
pub fn complex_structure(k: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        j[(2 * i + 1, 2 * i)] = 1.0;
        j[(2 * i, 2 * i + 1)] = -1.0;
    }
    j
}

fn block_diag(n: usize, block: [[f64; 4]; 4]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for b in 0..n {
        for r in 0..4 {
            for c in 0..4 {
                m[(4 * b + r, 4 * b + c)] = block[r][c];
            }
        }
    }
    m
}

/// `[I, J, K]` on `ℝ^{4n}`.
pub fn quaternionic_structures(n: usize) -> [DMatrix<f64>; 3] {
    let i = [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    let j = [
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    let k = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ];
    [block_diag(n, i), block_diag(n, j), block_diag(n, k)]
}

/// `J_x = x₁I + x₂J + x₃K`.
pub fn quaternionic_direction(n: usize, x: &[f64; 3]) -> DMatrix<f64> {
    let [i, j, k] = quaternionic_structures(n);
    i * x[0] + j * x[1] + k * x[2]
}

/// The Kähler 2-form `w(X, Y) = ⟨J X, Y⟩` of an orthogonal complex structure.
pub fn kahler_form(j: &DMatrix<f64>) -> MultiVector {
    let n = j.nrows();
    let mut w = MultiVector::zero(n, 2);
    let mut r = 0;
    for a in 0..n {
        for b in a + 1..n {
            w.coeffs_mut()[r] = j[(b, a)];
            r += 1;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_relations() {
        let [i, j, k] = quaternionic_structures(2);
        let id = DMatrix::<f64>::identity(8, 8);
        for m in [&i, &j, &k] {
            assert_eq!(m * m, -&id);
            assert_eq!(m.transpose() * m, id);
        }
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
    }

    #[test]
    fn kahler_form_is_standard() {
        let w = kahler_form(&complex_structure(2));
        assert_eq!(w.coeff(&[0, 1]), 1.0);
        assert_eq!(w.coeff(&[2, 3]), 1.0);
        assert_eq!(w.coeff(&[0, 2]), 0.0);
    }
}
