//! Normal-valued symmetric bilinear forms on a tangent frame.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// `B(X_a, X_b)` stored as ambient vectors for each ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondForm {
    m: usize,
    vecs: Vec<DVector<f64>>,
}

impl SecondForm {
    pub fn zero(m: usize, dim: usize) -> Self {
        Self { m, vecs: vec![DVector::zeros(dim); m * m] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> &DVector<f64> {
        &self.vecs[a * self.m + b]
    }

    /// Sets `B(X_a, X_b) = B(X_b, X_a) = v`.
    pub fn set(&mut self, a: usize, b: usize, v: DVector<f64>) {
        self.vecs[b * self.m + a] = v.clone();
        self.vecs[a * self.m + b] = v;
    }

    pub fn norm_sq(&self) -> f64 {
        self.vecs.iter().map(|v| v.norm_squared()).sum()
    }

    /// `h^α_{ab} = ⟨B(X_a, X_b), U_α⟩`.
    pub fn coeffs(&self, normal: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        (0..normal.ncols())
            .map(|al| {
                let u = normal.column(al);
                DMatrix::from_fn(self.m, self.m, |a, b| self.get(a, b).dot(&u))
            })
            .collect()
    }

    /// Inverse of [`SecondForm::coeffs`]; the `h^α` are symmetrized.
    pub fn from_coeffs(normal: &DMatrix<f64>, h: &[DMatrix<f64>]) -> Self {
        let m = h.first().map_or(0, |x| x.nrows());
        let mut b = Self::zero(m, normal.nrows());
        for a in 0..m {
            for c in a..m {
                let mut v = DVector::zeros(normal.nrows());
                for (al, ha) in h.iter().enumerate() {
                    v += normal.column(al) * (0.5 * (ha[(a, c)] + ha[(c, a)]));
                }
                b.set(a, c, v);
            }
        }
        b
    }

    /// Gaussian random symmetric form with values in the span of `normal`.
    pub fn random<R: Rng>(rng: &mut R, normal: &DMatrix<f64>, m: usize) -> Self {
        let h: Vec<DMatrix<f64>> = (0..normal.ncols())
            .map(|_| DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal)))
            .collect();
        Self::from_coeffs(normal, &h)
    }

    /// The same tensor expressed on the frame `X'_a = Σ_c r[c,a] X_c`.
    pub fn rotate(&self, r: &DMatrix<f64>) -> Self {
        let dim = self.vecs.first().map_or(0, |v| v.len());
        let mut out = Self::zero(self.m, dim);
        for a in 0..self.m {
            for b in a..self.m {
                let mut v = DVector::zeros(dim);
                for c in 0..self.m {
                    for d in 0..self.m {
                        let w = r[(c, a)] * r[(d, b)];
                        if w != 0.0 {
                            v += self.get(c, d) * w;
                        }
                    }
                }
                out.set(a, b, v);
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { m: self.m, vecs: self.vecs.iter().map(|v| v * c).collect() }
    }
}
