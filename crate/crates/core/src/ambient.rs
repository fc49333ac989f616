//! Ambient Riemannian spaces: metric, Christoffel symbols and curvature.
//!
//! Curvature follows the convention `R̄(X,Y) = −[∇_X, ∇_Y] + ∇_{[X,Y]}` and
//! `R̄(X,Y,Z,W) = ḡ(R̄(X,Y)Z, W)`, so `R̄(X,Y,X,Y)` is the sectional curvature
//! of an orthonormal pair (the Gauss equation then reads
//! `K = R̄(X₁,X₂,X₁,X₂) + ⟨B₁₁,B₂₂⟩ − |B₁₂|²`).
//!
//! Vectors come in two flavours: coordinate components, and "frame"
//! components with respect to the orthonormal frame `E_a = L^{-T} e_a`
//! where `g = L Lᵀ` is the Cholesky factorization of the metric.

use crate::calibrations::structures::{complex_structure, quaternionic_structures};
use crate::error::{Error, Result};
use crate::exprmap::{parse, Expr};
use nalgebra::{DMatrix, DVector};

/// Metric and its first two coordinate derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    /// `dg[k] = ∂_k g`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[k][l] = ∂_k ∂_l g`.
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `Γ^a_{bc}` stored at `[a][b][c]`.
    pub fn christoffel(&self) -> Result<Vec<Vec<Vec<f64>>>> {
        let n = self.dim();
        let ginv = self
            .g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("metric is not invertible".into()))?;
        let mut gam = vec![vec![vec![0.0; n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for d in 0..n {
                        s += ginv[(a, d)]
                            * (self.dg[b][(d, c)] + self.dg[c][(d, b)] - self.dg[d][(b, c)]);
                    }
                    gam[a][b][c] = 0.5 * s;
                }
            }
        }
        Ok(gam)
    }

    /// Fully covariant curvature `R̄_{abcd} = R̄(∂_a, ∂_b, ∂_c, ∂_d)` stored
    /// row-major in a flat vector of length `N⁴`.
    pub fn curvature(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let ginv = self
            .g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("metric is not invertible".into()))?;
        let gam = self.christoffel()?;
        // ∂_e g^{-1} = −g^{-1} (∂_e g) g^{-1}
        let dginv: Vec<DMatrix<f64>> = (0..n).map(|e| -(&ginv * &self.dg[e] * &ginv)).collect();
        // dgam[e][a][b][c] = ∂_e Γ^a_{bc}
        let mut dgam = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for e in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            let first = self.dg[b][(d, c)] + self.dg[c][(d, b)] - self.dg[d][(b, c)];
                            let second = self.ddg[e][b][(d, c)] + self.ddg[e][c][(d, b)]
                                - self.ddg[e][d][(b, c)];
                            s += dginv[e][(a, d)] * first + ginv[(a, d)] * second;
                        }
                        dgam[e][a][b][c] = 0.5 * s;
                    }
                }
            }
        }
        let mut r = vec![0.0; n * n * n * n];
        for e in 0..n {
            for b in 0..n {
                for c in 0..n {
                    // R_std(∂_e, ∂_b) ∂_c = R^a ∂_a
                    let mut ra = vec![0.0; n];
                    for (a, slot) in ra.iter_mut().enumerate() {
                        let mut s = dgam[e][a][b][c] - dgam[b][a][e][c];
                        for d in 0..n {
                            s += gam[a][e][d] * gam[d][b][c] - gam[a][b][d] * gam[d][e][c];
                        }
                        *slot = s;
                    }
                    for w in 0..n {
                        let mut s = 0.0;
                        for (a, v) in ra.iter().enumerate() {
                            s += self.g[(w, a)] * v;
                        }
                        r[((e * n + b) * n + c) * n + w] = -s;
                    }
                }
            }
        }
        Ok(r)
    }
}

/// Metric jet by central differences of a metric function, with step
/// `rel_step · max(1, |p|)`.
pub fn fd_metric_jet<F>(metric: F, p: &[f64], rel_step: f64) -> Result<MetricJet>
where
    F: Fn(&[f64]) -> Result<DMatrix<f64>>,
{
    let n = p.len();
    let scale = p.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let h = rel_step * scale;
    let shifted = |k: usize, s: f64| {
        let mut q = p.to_vec();
        q[k] += s;
        q
    };
    let g = metric(p)?;
    let mut dg = Vec::with_capacity(n);
    for k in 0..n {
        dg.push((metric(&shifted(k, h))? - metric(&shifted(k, -h))?) / (2.0 * h));
    }
    let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
    for k in 0..n {
        for l in 0..n {
            let at = |sk: f64, sl: f64| {
                let mut q = p.to_vec();
                q[k] += sk;
                q[l] += sl;
                metric(&q)
            };
            ddg[k][l] = (at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h);
        }
    }
    Ok(MetricJet { g, dg, ddg })
}

/// One factor of a product metric: a symmetric matrix of expressions in the
/// factor's own coordinates `x1..x_d`.
#[derive(Debug, Clone)]
pub struct MetricFactor {
    dim: usize,
    /// Upper-triangular entries, row-major.
    entries: Vec<Expr>,
}

impl MetricFactor {
    /// `upper` lists the entries `g_ij`, `i <= j`, row by row.
    pub fn parse<S: AsRef<str>>(dim: usize, upper: &[S]) -> Result<Self> {
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(Error::Dimension(format!(
                "a {dim}-dimensional metric has {} upper entries, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        let entries = upper.iter().map(|s| parse(s.as_ref(), dim)).collect::<Result<_>>()?;
        Ok(Self { dim, entries })
    }

    /// Flat factor `δ_ij`.
    pub fn flat(dim: usize) -> Self {
        let mut upper = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                upper.push(if i == j { "1" } else { "0" });
            }
        }
        Self::parse(dim, &upper).expect("constant metric parses")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn entry_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    fn jet(&self, x: &[f64]) -> Result<MetricJet> {
        let d = self.dim;
        let mut g = DMatrix::zeros(d, d);
        let mut dg = vec![DMatrix::zeros(d, d); d];
        let mut ddg = vec![vec![DMatrix::zeros(d, d); d]; d];
        for i in 0..d {
            for j in i..d {
                let jet = self.entries[self.entry_index(i, j)].eval_jet2(x)?;
                for (a, b) in [(i, j), (j, i)] {
                    g[(a, b)] = jet.value;
                    for k in 0..d {
                        dg[k][(a, b)] = jet.grad[k];
                        for l in 0..d {
                            ddg[k][l][(a, b)] = jet.h(k, l);
                        }
                    }
                }
            }
        }
        Ok(MetricJet { g, dg, ddg })
    }
}

/// Riemannian product of expression-defined factors (block-diagonal metric).
#[derive(Debug, Clone)]
pub struct ProductRiemannian {
    factors: Vec<MetricFactor>,
}

impl ProductRiemannian {
    pub fn new(factors: Vec<MetricFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("a product needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[MetricFactor] {
        &self.factors
    }

    /// Start offsets of the factors inside the product coordinates.
    pub fn offsets(&self) -> Vec<usize> {
        let mut o = Vec::with_capacity(self.factors.len());
        let mut acc = 0;
        for f in &self.factors {
            o.push(acc);
            acc += f.dim;
        }
        o
    }
}

#[derive(Debug, Clone)]
pub enum AmbientSpace {
    Euclidean(usize),
    /// `ℍ^m × ℝ`, Poincaré ball in the first `m` coordinates.
    HyperbolicLine(usize),
    Product(ProductRiemannian),
}

/// Hyperbolic distance to the origin in the Poincaré ball.
pub fn hyperbolic_distance(x: &[f64]) -> Result<f64> {
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s >= 1.0 {
        return Err(Error::Chart(format!("|x| = {s} is outside the Poincaré ball")));
    }
    Ok(((1.0 + s) / (1.0 - s)).ln())
}

impl AmbientSpace {
    pub fn dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean(n) => *n,
            AmbientSpace::HyperbolicLine(m) => m + 1,
            AmbientSpace::Product(p) => p.factors.iter().map(|f| f.dim).sum(),
        }
    }

    pub fn is_flat_chart(&self) -> bool {
        matches!(self, AmbientSpace::Euclidean(_))
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, ambient dimension is {}",
                p.len(),
                self.dim()
            )));
        }
        if let AmbientSpace::HyperbolicLine(m) = self {
            let s2: f64 = p[..*m].iter().map(|v| v * v).sum();
            if s2 >= 1.0 {
                return Err(Error::Chart(format!(
                    "|x| = {} is outside the Poincaré ball",
                    s2.sqrt()
                )));
            }
        }
        Ok(())
    }

    pub fn metric_jet(&self, p: &[f64]) -> Result<MetricJet> {
        self.check_point(p)?;
        let n = self.dim();
        match self {
            AmbientSpace::Euclidean(_) => Ok(MetricJet {
                g: DMatrix::identity(n, n),
                dg: vec![DMatrix::zeros(n, n); n],
                ddg: vec![vec![DMatrix::zeros(n, n); n]; n],
            }),
            AmbientSpace::HyperbolicLine(m) => {
                let m = *m;
                let s: f64 = p[..m].iter().map(|v| v * v).sum();
                let w = 1.0 - s;
                let phi = 4.0 / (w * w);
                let mut g = DMatrix::identity(n, n);
                let mut dg = vec![DMatrix::zeros(n, n); n];
                let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
                for i in 0..m {
                    g[(i, i)] = phi;
                }
                for k in 0..m {
                    let d1 = 16.0 * p[k] / w.powi(3);
                    for l in 0..m {
                        let d2 = if k == l { 16.0 / w.powi(3) } else { 0.0 } + 96.0 * p[k] * p[l] / w.powi(4);
                        for i in 0..m {
                            ddg[k][l][(i, i)] = d2;
                        }
                    }
                    for i in 0..m {
                        dg[k][(i, i)] = d1;
                    }
                }
                Ok(MetricJet { g, dg, ddg })
            }
            AmbientSpace::Product(prod) => {
                let mut g = DMatrix::zeros(n, n);
                let mut dg = vec![DMatrix::zeros(n, n); n];
                let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
                for (f, off) in prod.factors.iter().zip(prod.offsets()) {
                    let d = f.dim;
                    let jet = f.jet(&p[off..off + d])?;
                    g.view_mut((off, off), (d, d)).copy_from(&jet.g);
                    for k in 0..d {
                        dg[off + k].view_mut((off, off), (d, d)).copy_from(&jet.dg[k]);
                        for l in 0..d {
                            ddg[off + k][off + l]
                                .view_mut((off, off), (d, d))
                                .copy_from(&jet.ddg[k][l]);
                        }
                    }
                }
                if g.clone().cholesky().is_none() {
                    return Err(Error::Invalid("metric is not positive definite at this point".into()));
                }
                Ok(MetricJet { g, dg, ddg })
            }
        }
    }

    pub fn metric(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.metric_jet(p)?.g)
    }

    pub fn christoffel(&self, p: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        if self.is_flat_chart() {
            self.check_point(p)?;
            let n = self.dim();
            return Ok(vec![vec![vec![0.0; n]; n]; n]);
        }
        self.metric_jet(p)?.christoffel()
    }

    /// `R̄_{abcd}` in coordinates (flat vector, see [`MetricJet::curvature`]).
    pub fn curvature_tensor(&self, p: &[f64]) -> Result<Vec<f64>> {
        if self.is_flat_chart() {
            self.check_point(p)?;
            let n = self.dim();
            return Ok(vec![0.0; n * n * n * n]);
        }
        self.metric_jet(p)?.curvature()
    }

    /// `Lᵀ` with `g = L Lᵀ`: maps coordinate components to frame components.
    pub fn to_frame(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.metric(p)?;
        let l = g
            .cholesky()
            .ok_or_else(|| Error::Invalid("metric is not positive definite".into()))?
            .l();
        Ok(l.transpose())
    }

    /// `R̄(X,Y,Z,W)` for coordinate vectors at `p`.
    pub fn curvature(&self, p: &[f64], x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> Result<f64> {
        let r = self.curvature_tensor(p)?;
        Ok(contract4(&r, self.dim(), x, y, z, w))
    }
}

/// Contracts a flat `N⁴` tensor with four vectors.
pub fn contract4(r: &[f64], n: usize, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for a in 0..n {
        if x[a] == 0.0 {
            continue;
        }
        for b in 0..n {
            if y[b] == 0.0 {
                continue;
            }
            for c in 0..n {
                if z[c] == 0.0 {
                    continue;
                }
                let base = ((a * n + b) * n + c) * n;
                let mut t = 0.0;
                for d in 0..n {
                    t += r[base + d] * w[d];
                }
                s += x[a] * y[b] * z[c] * t;
            }
        }
    }
    s
}

/// Changes a coordinate tensor `R̄_{abcd}` to frame components given
/// `from_frame = L^{-T}` (columns are the orthonormal frame vectors).
pub fn tensor_to_frame(r: &[f64], from_frame: &DMatrix<f64>) -> Vec<f64> {
    let n = from_frame.nrows();
    let mut cur = r.to_vec();
    for slot in 0..4 {
        let mut next = vec![0.0; cur.len()];
        let stride = n.pow(3 - slot as u32);
        for idx in 0..cur.len() {
            let i = (idx / stride) % n;
            let base = idx - i * stride;
            for j in 0..n {
                let f = from_frame[(i, j)];
                if f != 0.0 {
                    next[base + j * stride] += f * cur[idx];
                }
            }
        }
        cur = next;
    }
    cur
}

/// Pointwise algebraic curvature models of Hermitian space forms.
#[derive(Debug, Clone)]
pub enum SpaceFormModel {
    /// Complex space form of holomorphic sectional curvature `nu` on `ℝ^{2k}`.
    Complex { nu: f64, k: usize },
    /// Quaternionic space form of reduced scalar curvature `nu` on `ℝ^{4n}`.
    Quaternionic { nu: f64, n: usize },
}

impl SpaceFormModel {
    pub fn dim(&self) -> usize {
        match self {
            SpaceFormModel::Complex { k, .. } => 2 * k,
            SpaceFormModel::Quaternionic { n, .. } => 4 * n,
        }
    }

    fn structures(&self) -> Vec<DMatrix<f64>> {
        match self {
            SpaceFormModel::Complex { k, .. } => vec![complex_structure(*k)],
            SpaceFormModel::Quaternionic { n, .. } => quaternionic_structures(*n).to_vec(),
        }
    }

    /// `ν/4 (⟨X∧Y, Z∧W⟩ + Σ_r ⟨J_rX∧J_rY, Z∧W⟩ + 2⟨J_rX,Y⟩⟨J_rZ,W⟩)`.
    pub fn curvature(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> Result<f64> {
        let n = self.dim();
        if [x, y, z, w].iter().any(|v| v.len() != n) {
            return Err(Error::Dimension(format!("space form vectors must live in R^{n}")));
        }
        let nu = match self {
            SpaceFormModel::Complex { nu, .. } | SpaceFormModel::Quaternionic { nu, .. } => *nu,
        };
        let dv = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let (xv, yv) = (DVector::from_column_slice(x), DVector::from_column_slice(y));
        let mut t = dv(x, z) * dv(y, w) - dv(x, w) * dv(y, z);
        for j in self.structures() {
            let jx = &j * &xv;
            let jy = &j * &yv;
            let jz = &j * DVector::from_column_slice(z);
            t += dv(jx.as_slice(), z) * dv(jy.as_slice(), w) - dv(jx.as_slice(), w) * dv(jy.as_slice(), z)
                + 2.0 * dv(jx.as_slice(), y) * dv(jz.as_slice(), w);
        }
        Ok(nu / 4.0 * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn hyperbolic_distance_values() {
        assert_eq!(hyperbolic_distance(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((hyperbolic_distance(&[0.5, 0.0]).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((hyperbolic_distance(&[0.0, 0.9]).unwrap() - 19f64.ln()).abs() < 1e-14);
        assert!(matches!(hyperbolic_distance(&[1.0, 0.0]), Err(Error::Chart(_))));
    }

    #[test]
    fn euclidean_curvature_vanishes() {
        let a = AmbientSpace::Euclidean(5);
        let p = [0.1, 0.2, 0.3, 0.4, 0.5];
        let v = [1.0, -2.0, 0.5, 3.0, 0.25];
        assert_eq!(a.curvature(&p, &v, &p, &v, &p).unwrap(), 0.0);
    }

    #[test]
    fn hyperbolic_factor_has_sectional_curvature_minus_one() {
        let a = AmbientSpace::HyperbolicLine(2);
        let p = [0.3, -0.2, 0.7];
        let g = a.metric(&p).unwrap();
        let lam2 = g[(0, 0)];
        let x = [1.0 / lam2.sqrt(), 0.0, 0.0];
        let y = [0.0, 1.0 / lam2.sqrt(), 0.0];
        let t = [0.0, 0.0, 1.0];
        assert!((a.curvature(&p, &x, &y, &x, &y).unwrap() + 1.0).abs() < 1e-10);
        assert!(a.curvature(&p, &x, &t, &x, &t).unwrap().abs() < 1e-12);
        assert!(matches!(a.metric(&[0.8, 0.7, 0.0]), Err(Error::Chart(_))));
    }

    #[test]
    fn space_forms_vanish_at_zero_and_have_holomorphic_curvature_nu() {
        let q = SpaceFormModel::Quaternionic { nu: 0.0, n: 2 };
        let v = e(8, 1);
        assert_eq!(q.curvature(&v, &e(8, 2), &v, &e(8, 2)).unwrap(), 0.0);
        let c = SpaceFormModel::Complex { nu: 2.0, k: 2 };
        let x = e(4, 0);
        let jx = e(4, 1);
        assert!((c.curvature(&x, &jx, &x, &jx).unwrap() - 2.0).abs() < 1e-14);
        assert!((c.curvature(&x, &e(4, 2), &x, &e(4, 2)).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tensor_frame_change_is_multilinear() {
        let a = AmbientSpace::HyperbolicLine(2);
        let p = [0.2, 0.1, 0.0];
        let r = a.curvature_tensor(&p).unwrap();
        let lt = a.to_frame(&p).unwrap();
        let from = lt.clone().try_inverse().unwrap();
        let rf = tensor_to_frame(&r, &from);
        let xs = [0.3, -0.4, 0.2];
        let ys = [0.1, 0.5, -0.7];
        let cx = (&from * DVector::from_column_slice(&xs)).as_slice().to_vec();
        let cy = (&from * DVector::from_column_slice(&ys)).as_slice().to_vec();
        let direct = contract4(&r, 3, &cx, &cy, &cx, &cy);
        let framed = contract4(&rf, 3, &xs, &ys, &xs, &ys);
        assert!((direct - framed).abs() < 1e-12);
    }
}
