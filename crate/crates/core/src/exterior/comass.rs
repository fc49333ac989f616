//! Comass of a constant form: the maximum of `Ω(X_1, …, X_k)` over
//! orthonormal `k`-frames.
//!
//! The objective is multilinear in the frame columns. We run projected
//! gradient ascent on the Stiefel manifold `V_k(ℝ^N)`: the Euclidean gradient
//! `G` is projected to the tangent space by `G − X sym(XᵀG)`, a backtracking
//! step is taken along it and the result is pulled back to the manifold with
//! a sign-fixed thin QR factorization. Independent random restarts run in
//! parallel and the best local maximum wins.

use super::multivector::{small_det, subsets, MultiVector};
use crate::linalg::{qr_orthonormalize, random_frame, substream};
use crate::tolerances;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct ComassOptions {
    pub restarts: usize,
    pub grad_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for ComassOptions {
    fn default() -> Self {
        Self {
            restarts: tolerances::COMASS_RESTARTS,
            grad_tol: tolerances::COMASS_GRAD,
            max_iter: tolerances::COMASS_MAX_ITER,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComassResult {
    pub value: f64,
    #[serde(skip)]
    pub frame: DMatrix<f64>,
    /// False when the best restart hit the iteration cap before the gradient
    /// tolerance was met.
    pub converged: bool,
    pub iterations: usize,
    pub restarts: usize,
}

/// Precomputed nonzero terms of a form for repeated evaluation.
pub struct FormEvaluator {
    dim: usize,
    grade: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl FormEvaluator {
    pub fn new(omega: &MultiVector) -> Self {
        let terms = subsets(omega.dim(), omega.grade())
            .into_iter()
            .zip(omega.coeffs().iter().copied())
            .filter(|(_, c)| *c != 0.0)
            .collect();
        Self {
            dim: omega.dim(),
            grade: omega.grade(),
            terms,
        }
    }

    pub fn value(&self, x: &DMatrix<f64>) -> f64 {
        let k = self.grade;
        let mut buf = vec![0.0; k * k];
        let mut total = 0.0;
        for (idx, c) in &self.terms {
            for (a, &row) in idx.iter().enumerate() {
                for col in 0..k {
                    buf[a * k + col] = x[(row, col)];
                }
            }
            total += c * small_det(&mut buf, k);
        }
        total
    }

    /// Value and Euclidean gradient `∂Ω(X)/∂X` (an `N × k` matrix).
    pub fn value_and_gradient(&self, x: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let k = self.grade;
        let mut grad = DMatrix::zeros(self.dim, k);
        let mut a = vec![0.0; k * k];
        let mut minor = vec![0.0; k.saturating_sub(1).pow(2)];
        let mut total = 0.0;
        for (idx, c) in &self.terms {
            for (r, &row) in idx.iter().enumerate() {
                for col in 0..k {
                    a[r * k + col] = x[(row, col)];
                }
            }
            let mut det = 0.0;
            for r in 0..k {
                for col in 0..k {
                    let cof = if k == 1 {
                        1.0
                    } else {
                        let mut t = 0;
                        for rr in (0..k).filter(|&v| v != r) {
                            for cc in (0..k).filter(|&v| v != col) {
                                minor[t] = a[rr * k + cc];
                                t += 1;
                            }
                        }
                        let s = if (r + col) % 2 == 0 { 1.0 } else { -1.0 };
                        s * small_det(&mut minor, k - 1)
                    };
                    grad[(idx[r], col)] += c * cof;
                    if r == 0 {
                        det += a[col] * cof;
                    }
                }
            }
            total += c * det;
        }
        (total, grad)
    }
}

fn ascend(eval: &FormEvaluator, mut x: DMatrix<f64>, opts: &ComassOptions) -> (f64, DMatrix<f64>, bool, usize) {
    let (mut f, mut g) = eval.value_and_gradient(&x);
    let mut step: f64 = 1.0;
    for it in 0..opts.max_iter {
        let xtg = x.transpose() * &g;
        let sym = (&xtg + xtg.transpose()) * 0.5;
        let rg = &g - &x * sym;
        let gn2 = rg.norm_squared();
        if gn2.sqrt() < opts.grad_tol {
            return (f, x, true, it);
        }
        let mut t = (step * 2.0).min(1e3);
        loop {
            let cand = qr_orthonormalize(&(&x + &rg * t));
            let fc = eval.value(&cand);
            if fc >= f + 1e-4 * t * gn2 || t < 1e-16 {
                if fc < f {
                    return (f, x, false, it);
                }
                x = cand;
                step = t;
                break;
            }
            t *= 0.5;
        }
        let (nf, ng) = eval.value_and_gradient(&x);
        f = nf;
        g = ng;
    }
    (f, x, false, opts.max_iter)
}

/// Maximizes `Ω` over orthonormal frames.
///
/// A form with no nonzero coefficient has comass zero; the returned frame is
/// then the first `k` coordinate vectors.
pub fn comass(omega: &MultiVector, opts: &ComassOptions) -> ComassResult {
    let (n, k) = (omega.dim(), omega.grade());
    if omega.coeffs().iter().all(|c| *c == 0.0) || k == 0 {
        let value = if k == 0 { omega.coeffs()[0].abs() } else { 0.0 };
        return ComassResult {
            value,
            frame: DMatrix::identity(n, k),
            converged: true,
            iterations: 0,
            restarts: 0,
        };
    }
    let eval = FormEvaluator::new(omega);
    let runs: Vec<(f64, DMatrix<f64>, bool, usize)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(opts.seed, r as u64);
            let x0 = random_frame(&mut rng, n, k);
            ascend(&eval, x0, opts)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.0 > runs[best].0 {
            best = i;
        }
    }
    let (value, frame, converged, iterations) = runs[best].clone();
    ComassResult {
        value,
        frame,
        converged,
        iterations,
        restarts: runs.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::seeded;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seeded(11);
        let omega = MultiVector::from_coeffs(5, 3, (0..10).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let eval = FormEvaluator::new(&omega);
        let x = random_frame(&mut rng, 5, 3);
        let (f, g) = eval.value_and_gradient(&x);
        assert!((f - omega.eval_frame(&x).unwrap()).abs() < 1e-13);
        let h = 1e-6;
        for r in 0..5 {
            for c in 0..3 {
                let mut xp = x.clone();
                xp[(r, c)] += h;
                let mut xm = x.clone();
                xm[(r, c)] -= h;
                let fd = (eval.value(&xp) - eval.value(&xm)) / (2.0 * h);
                assert!((fd - g[(r, c)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_form_has_zero_comass() {
        let r = comass(&MultiVector::zero(4, 2), &ComassOptions::default());
        assert_eq!(r.value, 0.0);
        assert_eq!(r.frame.shape(), (4, 2));
    }

    #[test]
    fn simple_form_has_comass_of_its_norm() {
        let e = MultiVector::basis(4, &[0, 2]).unwrap().scale(2.5);
        let r = comass(&e, &ComassOptions { restarts: 8, ..Default::default() });
        assert!((r.value - 2.5).abs() < 1e-9);
        assert!(r.converged);
    }
}
