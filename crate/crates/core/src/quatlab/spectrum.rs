//! The symmetric endomorphism `Ω^Δ` of `∧²ℝ^{4n}`,
//! `⟨Ω^Δ(X ∧ Y), Z ∧ W⟩ = Ω(X, Y, Z, W)`, and its eigenvector families.

use super::HyperHermitianSpace;
use crate::exterior::binomial;
use crate::linalg::cluster;
use crate::tolerances;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Coefficients of `u ∧ v` in the lex-ordered basis `e_i ∧ e_j`, `i < j`.
pub fn bivector(u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = u.len();
    let mut out = DVector::zeros(binomial(n, 2));
    let mut r = 0;
    for i in 0..n {
        for j in i + 1..n {
            out[r] = u[i] * v[j] - u[j] * v[i];
            r += 1;
        }
    }
    out
}

/// `Λ_1^±, Λ_2^±, Λ_3^±` of an oriented orthonormal system given as the four
/// columns of `frame`:
/// `(X₁X₂ ± X₃X₄)/√2`, `(X₁X₃ ∓ X₂X₄)/√2`, `(X₁X₄ ± X₂X₃)/√2`.
pub fn lambda_bivectors(frame: &DMatrix<f64>, sign: f64) -> [DVector<f64>; 3] {
    let c = |i: usize| frame.column(i).into_owned();
    let b = |i: usize, j: usize| bivector(&c(i), &c(j));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        (b(0, 1) + b(2, 3) * sign) * r,
        (b(0, 2) - b(1, 3) * sign) * r,
        (b(0, 3) + b(1, 2) * sign) * r,
    ]
}

/// Sign table `ε_s = (ε_s¹, ε_s², ε_s³)` of `Θ_s`.
const THETA_SIGNS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]];

/// `Θ_s(X, Y) = ½(X∧Y + ε_s¹ IX∧IY + ε_s² JX∧JY + ε_s³ KX∧KY)`.
pub fn theta(space: &HyperHermitianSpace, x: &DVector<f64>, y: &DVector<f64>, s: usize) -> DVector<f64> {
    let mut out = bivector(x, y);
    for (r, j) in space.structures().iter().enumerate() {
        out += bivector(&(j * x), &(j * y)) * THETA_SIGNS[s][r];
    }
    out * 0.5
}

/// Matrix of `Ω^Δ` in the lex-ordered basis of `∧²ℝ^{4n}`.
pub fn omega_delta_matrix(space: &HyperHermitianSpace) -> DMatrix<f64> {
    let n = space.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let omega = space.omega();
    DMatrix::from_fn(pairs.len(), pairs.len(), |p, q| {
        let ((i, j), (k, l)) = (pairs[p], pairs[q]);
        omega.coeff(&[i, j, k, l])
    })
}

/// The eigenvalue list with multiplicities that the eigenvector families
/// below are displayed with: `(2n+1)/3` (3), `1/3` (3(n−1)), `−1` (3n) from
/// the `Λ` families, `1` (2n(n−1)) from `Θ_0` and `−1/3` (6n(n−1)) from
/// `Θ_1, Θ_2, Θ_3`. Merged and sorted ascending.
pub fn displayed_multiplicities(n: usize) -> Vec<(f64, usize)> {
    let nf = n as f64;
    let raw = [
        ((2.0 * nf + 1.0) / 3.0, 3),
        (1.0 / 3.0, 3 * (n - 1)),
        (-1.0, 3 * n),
        (1.0, 2 * n * (n - 1)),
        (-1.0 / 3.0, 6 * n * (n - 1)),
    ];
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (v, m) in raw {
        if m == 0 {
            continue;
        }
        match out.iter_mut().find(|(w, _)| (w - v).abs() < 1e-12) {
            Some(slot) => slot.1 += m,
            None => out.push((v, m)),
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvectorCheck {
    pub family: String,
    /// Eigenvalue the family is displayed with.
    pub claimed: f64,
    /// `⟨Ω^Δ v, v⟩ / ⟨v, v⟩`.
    pub rayleigh: f64,
    /// `‖Ω^Δ v − ρ v‖ / ‖v‖`: zero iff `v` is an eigenvector.
    pub eigen_residual: f64,
}

impl EigenvectorCheck {
    fn new(family: String, m: &DMatrix<f64>, v: &DVector<f64>, claimed: f64) -> Self {
        let mv = m * v;
        let nv = v.norm_squared();
        let rayleigh = mv.dot(v) / nv;
        let eigen_residual = (mv - v * rayleigh).norm() / nv.sqrt();
        Self { family, claimed, rayleigh, eigen_residual }
    }

    pub fn is_eigenvector(&self, tol: f64) -> bool {
        self.eigen_residual <= tol
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.is_eigenvector(tol) && (self.rayleigh - self.claimed).abs() <= tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaDeltaSpectrum {
    pub n: usize,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `(value, multiplicity)` clusters of the computed spectrum.
    pub clusters: Vec<(f64, usize)>,
    pub displayed: Vec<(f64, usize)>,
    /// Same values and multiplicities as [`displayed_multiplicities`], within `1e-10`.
    pub matches_displayed: bool,
    /// `‖Ω^Δ V − V diag(λ)‖_max` of the dense decomposition.
    pub decomposition_residual: f64,
    /// `tr Ω^Δ` and `tr (Ω^Δ)²`.
    pub trace: f64,
    pub trace_sq: f64,
    pub checks: Vec<EigenvectorCheck>,
    /// The `2n(4n−1)` family vectors span `∧²ℝ^{4n}`.
    pub families_span: bool,
}

impl OmegaDeltaSpectrum {
    /// Multiplicity of the computed cluster at `value` (0 if absent).
    pub fn multiplicity(&self, value: f64) -> usize {
        self.clusters.iter().find(|(v, _)| (v - value).abs() < 1e-8).map_or(0, |c| c.1)
    }
}

/// Dense eigendecomposition of `Ω^Δ` and verification of the eigenvector families
/// `Σ_α Λ_r^+(e_α)/√n`, `(Λ_r^+(e_n) − Λ_r^+(e_α))/√2`, `Λ_r^−(e_α)` and
/// `Θ_s(e_α, L e_β)`, `α < β`, `L ∈ {1, I, J, K}`, where `Λ_r^±(X)` is taken on
/// `(X, IX, JX, KX)`.
pub fn omega_delta_spectrum(space: &HyperHermitianSpace) -> OmegaDeltaSpectrum {
    let n = space.n();
    let dim = space.dim();
    let m = omega_delta_matrix(space);
    let eig = m.clone().symmetric_eigen();
    let decomposition_residual =
        (&m * &eig.eigenvectors - &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues)).abs().max();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    let clusters = cluster(&eigenvalues, tolerances::EIGEN_CLUSTER);
    let displayed = displayed_multiplicities(n);
    let matches_displayed = clusters.len() == displayed.len()
        && clusters
            .iter()
            .zip(&displayed)
            .all(|(c, d)| c.1 == d.1 && (c.0 - d.0).abs() <= tolerances::LINEAR_ALGEBRA);

    let e = |a: usize| {
        let mut v = DVector::zeros(dim);
        v[4 * a] = 1.0;
        v
    };
    let lam = |a: usize, sign: f64| lambda_bivectors(&space.quaternionic_line(&e(a)), sign);
    let nf = n as f64;
    let mut checks = Vec::new();
    let mut family = Vec::new();
    for r in 0..3 {
        let sum = (0..n).fold(DVector::zeros(m.nrows()), |acc, a| acc + &lam(a, 1.0)[r]) / nf.sqrt();
        checks.push(EigenvectorCheck::new(format!("sum Lambda+_{}", r + 1), &m, &sum, (2.0 * nf + 1.0) / 3.0));
        family.push(sum);
        for a in 0..n {
            let minus = lam(a, -1.0)[r].clone();
            checks.push(EigenvectorCheck::new(format!("Lambda-_{}(e_{})", r + 1, a + 1), &m, &minus, -1.0));
            family.push(minus);
        }
        for a in 0..n.saturating_sub(1) {
            let d = (&lam(n - 1, 1.0)[r] - &lam(a, 1.0)[r]) * std::f64::consts::FRAC_1_SQRT_2;
            checks.push(EigenvectorCheck::new(format!("Lambda+_{} difference e_{}", r + 1, a + 1), &m, &d, 1.0 / 3.0));
            family.push(d);
        }
    }
    let names = ["1", "I", "J", "K"];
    for a in 0..n {
        for b in a + 1..n {
            for (li, lname) in names.iter().enumerate() {
                let eb = if li == 0 { e(b) } else { &space.structures()[li - 1] * e(b) };
                for s in 0..4 {
                    let v = theta(space, &e(a), &eb, s);
                    let claimed = if s == 0 { 1.0 } else { -1.0 / 3.0 };
                    checks.push(EigenvectorCheck::new(
                        format!("Theta_{s}(e_{}, {lname} e_{})", a + 1, b + 1),
                        &m,
                        &v,
                        claimed,
                    ));
                    family.push(v);
                }
            }
        }
    }
    let families_span = family.len() == binomial(dim, 2)
        && DMatrix::from_columns(&family).singular_values().min() > tolerances::EIGEN_CLUSTER;

    OmegaDeltaSpectrum {
        n,
        trace: m.trace(),
        trace_sq: (&m * &m).trace(),
        eigenvalues,
        clusters,
        displayed,
        matches_displayed,
        decomposition_residual,
        checks,
        families_span,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_is_symmetric_with_zero_trace() {
        for n in 1..=3 {
            let s = HyperHermitianSpace::new(n).unwrap();
            let m = omega_delta_matrix(&s);
            assert_eq!(m.nrows(), 2 * n * (4 * n - 1));
            assert!((&m - m.transpose()).abs().max() == 0.0);
            assert!(m.trace().abs() < 1e-12);
        }
    }

    #[test]
    fn n1_spectrum_matches_the_displayed_list() {
        let s = HyperHermitianSpace::new(1).unwrap();
        let sp = omega_delta_spectrum(&s);
        assert!(sp.matches_displayed, "{:?}", sp.clusters);
        assert!(sp.checks.iter().all(|c| c.holds(1e-12)));
        assert!(sp.families_span);
    }

    #[test]
    fn top_eigenvalue_and_its_eigenvectors() {
        for n in 1..=3 {
            let sp = omega_delta_spectrum(&HyperHermitianSpace::new(n).unwrap());
            let top = (2.0 * n as f64 + 1.0) / 3.0;
            assert_eq!(sp.multiplicity(top), 3);
            assert!((sp.eigenvalues.last().unwrap() - top).abs() < 1e-12);
            for c in sp.checks.iter().filter(|c| c.family.starts_with("sum")) {
                assert!(c.holds(1e-12), "{c:?}");
            }
            assert!(sp.families_span);
        }
    }

    #[test]
    fn n2_spectrum_and_theta_eigenvalues() {
        // The computed spectrum is {5/3:3, 1/3:15, −1:10}; Θ_0 has eigenvalue −1 and
        // Θ_1..Θ_3 have 1/3, so the displayed Θ values 1 and −1/3 do not occur.
        let sp = omega_delta_spectrum(&HyperHermitianSpace::new(2).unwrap());
        assert_eq!(sp.multiplicity(5.0 / 3.0), 3);
        assert_eq!(sp.multiplicity(1.0 / 3.0), 15);
        assert_eq!(sp.multiplicity(-1.0), 10);
        assert!(!sp.matches_displayed);
        assert!(sp.trace.abs() < 1e-12);
        assert!((sp.trace_sq - 20.0).abs() < 1e-12);
        let displayed_sq: f64 = sp.displayed.iter().map(|(v, m)| v * v * *m as f64).sum();
        assert!((displayed_sq - 20.0).abs() < 1e-12);
        for c in &sp.checks {
            assert!(c.is_eigenvector(1e-12), "{c:?}");
            if c.family.starts_with("Theta_0") {
                assert!((c.rayleigh + 1.0).abs() < 1e-12);
            } else if c.family.starts_with("Theta") {
                assert!((c.rayleigh - 1.0 / 3.0).abs() < 1e-12);
            } else {
                assert!(c.holds(1e-12), "{c:?}");
            }
        }
    }

    #[test]
    fn lambda_bivectors_are_orthonormal_and_dual() {
        let s = HyperHermitianSpace::new(2).unwrap();
        let mut e0 = DVector::zeros(8);
        e0[0] = 1.0;
        let f = s.quaternionic_line(&e0);
        let all: Vec<DVector<f64>> = lambda_bivectors(&f, 1.0).into_iter().chain(lambda_bivectors(&f, -1.0)).collect();
        let g = DMatrix::from_fn(6, 6, |i, j| all[i].dot(&all[j]));
        assert!((g - DMatrix::<f64>::identity(6, 6)).abs().max() < 1e-15);
    }
}
