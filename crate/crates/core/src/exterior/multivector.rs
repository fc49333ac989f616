use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// All strictly increasing `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Lexicographic rank of a strictly increasing subset of `0..n`.
pub fn subset_rank(n: usize, subset: &[usize]) -> usize {
    let k = subset.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &c) in subset.iter().enumerate() {
        for j in prev..c {
            rank += binomial(n - 1 - j, k - 1 - i);
        }
        prev = c + 1;
    }
    rank
}

/// Sign of the permutation that sorts `seq` (zero if an entry repeats).
pub fn sort_sign(seq: &[usize]) -> i32 {
    let mut s = 1;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

/// Determinant of a small dense matrix stored row-major, by partial pivoting.
pub fn small_det(a: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..k {
        let mut p = c;
        let mut best = a[c * k + c].abs();
        for r in c + 1..k {
            let v = a[r * k + c].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..k {
                a.swap(c * k + j, p * k + j);
            }
            det = -det;
        }
        let piv = a[c * k + c];
        det *= piv;
        for r in c + 1..k {
            let f = a[r * k + c] / piv;
            if f != 0.0 {
                for j in c..k {
                    a[r * k + j] -= f * a[c * k + j];
                }
            }
        }
    }
    det
}

/// A homogeneous `k`-vector (equivalently a constant `k`-form) on `ℝ^N` with
/// coefficients on the lexicographically ordered basis `e_I`, `|I| = k`.
///
/// Forms and multivectors are identified through the Euclidean inner
/// product, so `Ω(X_1, …, X_k) = ⟨Ω, X_1 ∧ … ∧ X_k⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiVector {
    dim: usize,
    grade: usize,
    coeffs: Vec<f64>,
}

impl MultiVector {
    pub fn zero(dim: usize, grade: usize) -> Self {
        Self {
            dim,
            grade,
            coeffs: vec![0.0; binomial(dim, grade)],
        }
    }

    pub fn from_coeffs(dim: usize, grade: usize, coeffs: Vec<f64>) -> Result<Self> {
        if grade > dim || coeffs.len() != binomial(dim, grade) {
            return Err(Error::Dimension(format!(
                "a {grade}-vector on R^{dim} has {} coefficients, got {}",
                binomial(dim, grade),
                coeffs.len()
            )));
        }
        Ok(Self { dim, grade, coeffs })
    }

    /// The basis element `e_{i_1} ∧ … ∧ e_{i_k}` for an arbitrary index list,
    /// sign-adjusted to the sorted order (zero if an index repeats).
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::Dimension(format!("basis index out of range for R^{dim}")));
        }
        let mut mv = Self::zero(dim, indices.len());
        let s = sort_sign(indices);
        if s != 0 {
            let mut sorted = indices.to_vec();
            sorted.sort_unstable();
            mv.coeffs[subset_rank(dim, &sorted)] = s as f64;
        }
        Ok(mv)
    }

    /// `v_1 ∧ … ∧ v_k` for the columns of `frame` (an `N × k` matrix).
    pub fn from_vectors(frame: &DMatrix<f64>) -> Self {
        let (n, k) = frame.shape();
        let mut mv = Self::zero(n, k);
        let mut buf = vec![0.0; k * k];
        for (r, idx) in subsets(n, k).iter().enumerate() {
            for (a, &row) in idx.iter().enumerate() {
                for c in 0..k {
                    buf[a * k + c] = frame[(row, c)];
                }
            }
            mv.coeffs[r] = small_det(&mut buf, k);
        }
        mv
    }

    /// The 1-vector with the given components.
    pub fn vector(v: &[f64]) -> Self {
        Self {
            dim: v.len(),
            grade: 1,
            coeffs: v.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficient on `e_I` for an arbitrary index list (sign-adjusted).
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        let s = sort_sign(indices);
        if s == 0 || indices.len() != self.grade {
            return 0.0;
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        s as f64 * self.coeffs[subset_rank(self.dim, &sorted)]
    }

    /// Nonzero terms as `(subset, coefficient)`.
    pub fn terms(&self) -> Vec<(Vec<usize>, f64)> {
        subsets(self.dim, self.grade)
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim || self.grade != o.grade {
            return Err(Error::Dimension(format!(
                "{}-vector on R^{} vs {}-vector on R^{}",
                self.grade, self.dim, o.grade, o.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Self {
            dim: self.dim,
            grade: self.grade,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            grade: self.grade,
            coeffs: self.coeffs.iter().map(|a| c * a).collect(),
        }
    }

    /// Euclidean inner product of `k`-vectors (the basis `e_I` is orthonormal).
    pub fn inner(&self, o: &Self) -> Result<f64> {
        self.same_shape(o)?;
        Ok(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::Dimension(format!(
                "wedge of forms on R^{} and R^{}",
                self.dim, o.dim
            )));
        }
        let grade = self.grade + o.grade;
        let mut out = Self::zero(self.dim, grade);
        if grade > self.dim {
            return Ok(out);
        }
        let lhs = self.terms();
        let rhs = o.terms();
        let mut joined = Vec::with_capacity(grade);
        for (i, a) in &lhs {
            for (j, b) in &rhs {
                if i.iter().any(|x| j.contains(x)) {
                    continue;
                }
                joined.clear();
                joined.extend_from_slice(i);
                joined.extend_from_slice(j);
                let s = sort_sign(&joined) as f64;
                joined.sort_unstable();
                out.coeffs[subset_rank(self.dim, &joined)] += s * a * b;
            }
        }
        Ok(out)
    }

    /// Hodge star with respect to the Euclidean metric and the orientation of
    /// `orientation` (an orthonormal `N × N` frame), or the standard
    /// orientation when `None`. Satisfies `α ∧ *β = ⟨α, β⟩ vol`.
    pub fn hodge(&self, orientation: Option<&DMatrix<f64>>) -> Result<Self> {
        let sign = match orientation {
            None => 1.0,
            Some(f) => orientation_sign(f, self.dim)?,
        };
        let n = self.dim;
        let mut out = Self::zero(n, n - self.grade);
        let mut seq = Vec::with_capacity(n);
        for (idx, c) in self.terms() {
            let comp: Vec<usize> = (0..n).filter(|x| !idx.contains(x)).collect();
            seq.clear();
            seq.extend_from_slice(&idx);
            seq.extend_from_slice(&comp);
            let s = sort_sign(&seq) as f64;
            out.coeffs[subset_rank(n, &comp)] += sign * s * c;
        }
        Ok(out)
    }

    /// Evaluates the form on the columns of `frame` (an `N × k` matrix).
    pub fn eval_frame(&self, frame: &DMatrix<f64>) -> Result<f64> {
        let (n, k) = frame.shape();
        if n != self.dim || k != self.grade {
            return Err(Error::Dimension(format!(
                "{}-form on R^{} evaluated on {k} vectors in R^{n}",
                self.grade, self.dim
            )));
        }
        self.inner(&Self::from_vectors(frame))
    }

    /// Evaluates the form on a list of vectors.
    pub fn eval(&self, vectors: &[&[f64]]) -> Result<f64> {
        let k = vectors.len();
        let mut m = DMatrix::zeros(self.dim, k);
        for (c, v) in vectors.iter().enumerate() {
            if v.len() != self.dim {
                return Err(Error::Dimension(format!(
                    "vector of length {} for a form on R^{}",
                    v.len(),
                    self.dim
                )));
            }
            for (r, x) in v.iter().enumerate() {
                m[(r, c)] = *x;
            }
        }
        self.eval_frame(&m)
    }

    /// Pullback along a linear map `a : ℝ^N → ℝ^N`: `(a^*Ω)(X…) = Ω(aX, …)`.
    pub fn pullback(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::Dimension("pullback needs a square map".into()));
        }
        let mut out = Self::zero(self.dim, self.grade);
        let mut frame = DMatrix::zeros(self.dim, self.grade);
        for (r, idx) in subsets(self.dim, self.grade).iter().enumerate() {
            for (c, &i) in idx.iter().enumerate() {
                frame.set_column(c, &a.column(i));
            }
            out.coeffs[r] = self.eval_frame(&frame)?;
        }
        Ok(out)
    }
}

/// `±1` for an orthonormal frame; an error for anything else.
pub fn orientation_sign(f: &DMatrix<f64>, dim: usize) -> Result<f64> {
    if f.shape() != (dim, dim) {
        return Err(Error::DegenerateFrame(format!(
            "orientation frame must be {dim} x {dim}"
        )));
    }
    let gram = f.transpose() * f;
    let dev = (gram - DMatrix::<f64>::identity(dim, dim)).abs().max();
    if dev > 1e-8 {
        return Err(Error::DegenerateFrame(format!(
            "orientation frame is not orthonormal (deviation {dev:.2e})"
        )));
    }
    Ok(if f.determinant() > 0.0 { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_lex_and_ranked() {
        let s = subsets(5, 3);
        assert_eq!(s.len(), 10);
        assert_eq!(s[0], vec![0, 1, 2]);
        assert_eq!(s[9], vec![2, 3, 4]);
        for (r, idx) in s.iter().enumerate() {
            assert_eq!(subset_rank(5, idx), r);
        }
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let e1 = MultiVector::basis(3, &[0]).unwrap();
        let e2 = MultiVector::basis(3, &[1]).unwrap();
        let e12 = e1.wedge(&e2).unwrap();
        assert_eq!(e12.coeff(&[0, 1]), 1.0);
        assert_eq!(e2.wedge(&e1).unwrap().coeff(&[0, 1]), -1.0);
        assert_eq!(e1.wedge(&e1).unwrap().norm(), 0.0);
    }

    #[test]
    fn hodge_of_frame_vectors() {
        // *X_k = (-1)^(k-1) X_1 ∧ … X̂_k … ∧ X_m in R^4
        for k in 0..4 {
            let star = MultiVector::basis(4, &[k]).unwrap().hodge(None).unwrap();
            let rest: Vec<usize> = (0..4).filter(|&i| i != k).collect();
            let expect = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(star.coeff(&rest), expect);
        }
    }

    #[test]
    fn hodge_rejects_degenerate_orientation() {
        let a = MultiVector::basis(3, &[0]).unwrap();
        let f = DMatrix::from_diagonal_element(3, 3, 2.0);
        assert!(matches!(a.hodge(Some(&f)), Err(Error::DegenerateFrame(_))));
        let mut r = DMatrix::identity(3, 3);
        r[(2, 2)] = -1.0;
        assert_eq!(a.hodge(Some(&r)).unwrap(), a.hodge(None).unwrap().scale(-1.0));
    }

    #[test]
    fn determinant_of_permutation() {
        let mut a = vec![0.0, 1.0, 1.0, 0.0];
        assert_eq!(small_det(&mut a, 2), -1.0);
    }
}
