//! Canonical frames of `J_x`-complex 4-planes in `ℝ⁸` and the operators
//! built on them.
//!
//! For a plane invariant under `J_x` there are a unit `X ∈ T`, a unit
//! `Y ⊥ H_X`, an orthonormal `(x, y, z = x × y)` and `c² + s² = 1` with
//!
//! ```text
//! B   = {X, J_xX, cJ_yX + sY, cJ_zX + sJ_xY}
//! B^⊥ = {J_yY, J_zY, cY − sJ_yX, cJ_xY − sJ_zX}
//! ```
//!
//! and then `cosθ = 1 − (2/3)s²` and `Φ(B) = −(2/3)sc B^⊥`.

use super::spectrum::lambda_bivectors;
use super::{FourPlane, HyperHermitianSpace};
use crate::error::{Error, Result};
use crate::linalg::{hstack, unit_vector};
use crate::tolerances;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

/// Below this `s` (or `c`) the plane is treated as quaternionic (or totally complex).
const DEGENERATE: f64 = 1e-8;

/// Tolerance for `T` being invariant under the detected `J_x`.
const COMPLEX_TOL: f64 = 1e-8;

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn pfaffian4(w: &DMatrix<f64>) -> f64 {
    w[(0, 1)] * w[(2, 3)] - w[(0, 2)] * w[(1, 3)] + w[(0, 3)] * w[(1, 2)]
}

/// `W_ab = ⟨J X_a, X_b⟩` on the columns of `t`.
fn restricted_form(j: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    (t.transpose() * j * t).transpose()
}

/// The direction `x ∈ S²` maximizing `‖(w_x)|_T‖`, from the `3 × 3` Gram
/// matrix of the restricted Kähler forms, with the sign making the basis of
/// `T` positively oriented for `J_x`. Returns `x` and `4 − ‖(w_x)|_T‖²`, which
/// vanishes iff `J_x T = T`.
pub fn detect_complex_direction(space: &HyperHermitianSpace, plane: &FourPlane) -> ([f64; 3], f64) {
    let t = plane.basis();
    let w: Vec<DMatrix<f64>> = space.structures().iter().map(|j| restricted_form(j, t)).collect();
    let g = DMatrix::from_fn(3, 3, |r, s| w[r].dot(&w[s]));
    let eig = g.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top);
    let mut x = [v[0], v[1], v[2]];
    let wx = &w[0] * x[0] + &w[1] * x[1] + &w[2] * x[2];
    if pfaffian4(&wx) < 0.0 {
        x = [-x[0], -x[1], -x[2]];
    }
    (x, 4.0 - eig.eigenvalues[top])
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalBasisData {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub z: [f64; 3],
    pub s: f64,
    pub c: f64,
    /// `B` as the columns of an `8 × 4` matrix.
    pub tangent: DMatrix<f64>,
    /// `B^⊥ = (U_1, …, U_4)`.
    pub normal: DMatrix<f64>,
    pub cos_theta: f64,
    /// `4 − ‖(w_x)|_T‖²`.
    pub complex_residual: f64,
    /// Largest distance of a vector of `B` from `T`.
    pub span_residual: f64,
    /// `‖(B, B^⊥)ᵀ(B, B^⊥) − 1‖_max`.
    pub frame_residual: f64,
    /// Largest error in `cosθ = 1 − (2/3)s²`, `s² = (3/2)(1 − cosθ)`, `c² = (3/2)(cosθ − 1/3)`.
    pub relation_residual: f64,
    /// `Φ[a][k] = ⟨Φ(X_k), U_a⟩`.
    pub phi: DMatrix<f64>,
    /// `‖Φ + (2/3)sc·1‖_max`.
    pub phi_residual: f64,
    /// `max_k |‖Φ(X_k)‖² − (1 − cosθ)(cosθ − 1/3)|`.
    pub conformality_residual: f64,
}

impl CanonicalBasisData {
    /// `B'^⊥ = (U_3, U_4, U_1, U_2)`.
    pub fn normal_reordered(&self) -> DMatrix<f64> {
        let u = |i: usize| self.normal.column(i).into_owned();
        DMatrix::from_columns(&[u(2), u(3), u(0), u(1)])
    }

    /// `Φ(X_k)` as an ambient vector.
    pub fn phi_vector(&self, k: usize) -> DVector<f64> {
        &self.normal * self.phi.column(k)
    }
}

fn with_slots(frame: &DMatrix<f64>, slots: &[(usize, DVector<f64>)]) -> DMatrix<f64> {
    let mut f = frame.clone();
    for (k, v) in slots {
        f.set_column(*k, v);
    }
    f
}

/// Builds the canonical frames from the data `(X, Y, x, y, c, s)`.
fn frames(
    space: &HyperHermitianSpace,
    big_x: &DVector<f64>,
    big_y: &DVector<f64>,
    x: &[f64; 3],
    y: &[f64; 3],
    c: f64,
    s: f64,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let z = cross(x, y);
    let (jx, jy, jz) = (space.direction(x), space.direction(y), space.direction(&z));
    let tangent = DMatrix::from_columns(&[
        big_x.clone(),
        &jx * big_x,
        &jy * big_x * c + big_y * s,
        &jz * big_x * c + &jx * big_y * s,
    ]);
    let normal = DMatrix::from_columns(&[
        &jy * big_y,
        &jz * big_y,
        big_y * c - &jy * big_x * s,
        &jx * big_y * c - &jz * big_x * s,
    ]);
    (tangent, normal)
}

/// The plane with canonical frame built from a unit `X`, a unit `Y ⊥ H_X`,
/// orthonormal `x, y` and `(c, s) = (cos t, sin t)`.
pub fn canonical_plane(
    space: &HyperHermitianSpace,
    big_x: &DVector<f64>,
    big_y: &DVector<f64>,
    x: &[f64; 3],
    y: &[f64; 3],
    t: f64,
) -> Result<FourPlane> {
    let (tangent, _) = frames(space, big_x, big_y, x, y, t.cos(), t.sin());
    FourPlane::new(&tangent)
}

/// A `J_x`-complex plane `span{v, J_xv, w, J_xw}` for random `x`, `v`, `w`,
/// with its complex orientation.
pub fn random_complex_plane<R: Rng>(rng: &mut R, space: &HyperHermitianSpace) -> Result<FourPlane> {
    let u = unit_vector(rng, 3);
    let jx = space.direction(&[u[0], u[1], u[2]]);
    let v = unit_vector(rng, space.dim());
    let jv = &jx * &v;
    let mut w = unit_vector(rng, space.dim());
    w -= &v * v.dot(&w) + &jv * jv.dot(&w);
    let jw = &jx * &w;
    FourPlane::new(&DMatrix::from_columns(&[v, jv, w, jw]))
}

/// Coordinate unit vector with the largest component outside `span(m)`
/// (ties broken by index), projected off `m` and normalized.
fn coordinate_outside(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let proj = |i: usize| {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        &e - m * (m.transpose() * &e)
    };
    let best = (0..n).fold(0, |b, i| if proj(i).norm() > proj(b).norm() + 1e-12 { i } else { b });
    let p = proj(best);
    &p / p.norm()
}

/// Canonical frames of an oriented `J_x`-complex 4-plane of `ℝ⁸`.
///
/// `X` is the first basis vector of `T`. The unit `v ⊥ X, J_xX` in `T` with
/// the largest component (ties by index) splits as `v = cJ_yX + sY`, which
/// fixes `y` when `c > 0` and `Y` when `s > 0`. In the totally complex case
/// `y` is the unit normal to `x` nearest a coordinate axis; in the
/// quaternionic case `Y` is the coordinate vector farthest from `H_X`.
pub fn canonical_basis(space: &HyperHermitianSpace, plane: &FourPlane) -> Result<CanonicalBasisData> {
    if space.n() != 2 || plane.dim() != 8 {
        return Err(Error::Dimension("canonical frames are defined for 4-planes of R^8".into()));
    }
    let (x, complex_residual) = detect_complex_direction(space, plane);
    if complex_residual > COMPLEX_TOL {
        return Err(Error::Invalid(format!(
            "the plane is not complex for any J_x (defect {complex_residual:.3e})"
        )));
    }
    let t = plane.basis();
    let jx = space.direction(&x);
    let big_x = t.column(0).into_owned();
    let jxx = &jx * &big_x;
    let mut v = DVector::zeros(8);
    for col in 1..4 {
        let c = t.column(col).into_owned();
        let w = &c - &big_x * big_x.dot(&c) - &jxx * jxx.dot(&c);
        if w.norm() > v.norm() + 1e-12 {
            v = w;
        }
    }
    v /= v.norm();
    let hx = space.quaternionic_line(&big_x);
    let ph = &hx * (hx.transpose() * &v);
    let pp = &v - &ph;
    let r = ph.norm().hypot(pp.norm());
    let (c, s) = (ph.norm() / r, pp.norm() / r);

    let y = if c > DEGENERATE {
        let mut y = [0.0; 3];
        for (r, j) in space.structures().iter().enumerate() {
            y[r] = ph.dot(&(j * &big_x));
        }
        let d = y[0] * x[0] + y[1] * x[1] + y[2] * x[2];
        let y = [y[0] - d * x[0], y[1] - d * x[1], y[2] - d * x[2]];
        let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        [y[0] / ny, y[1] / ny, y[2] / ny]
    } else {
        let axis = (0..3).fold(0, |b, i| if x[i].abs() < x[b].abs() - 1e-12 { i } else { b });
        let mut y = [0.0; 3];
        y[axis] = 1.0;
        let y = [y[0] - x[axis] * x[0], y[1] - x[axis] * x[1], y[2] - x[axis] * x[2]];
        let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        [y[0] / ny, y[1] / ny, y[2] / ny]
    };
    let big_y = if s > DEGENERATE { &pp / pp.norm() } else { coordinate_outside(&hx) };
    let z = cross(&x, &y);
    let (tangent, normal) = frames(space, &big_x, &big_y, &x, &y, c, s);

    let cos = space.omega_on(&tangent)?;
    let span_residual = (0..4).map(|k| plane.distance(&tangent.column(k).into_owned())).fold(0.0, f64::max);
    let full = hstack(&tangent, &normal);
    let frame_residual = (full.transpose() * &full - DMatrix::<f64>::identity(8, 8)).abs().max();
    let relation_residual = [
        (cos - (1.0 - 2.0 * s * s / 3.0)).abs(),
        (s * s - 1.5 * (1.0 - cos)).abs(),
        (c * c - 1.5 * (cos - 1.0 / 3.0)).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let mut phi = DMatrix::zeros(4, 4);
    for k in 0..4 {
        for a in 0..4 {
            phi[(a, k)] = space.omega_on(&with_slots(&tangent, &[(k, normal.column(a).into_owned())]))?;
        }
    }
    let phi_residual = (&phi + DMatrix::<f64>::identity(4, 4) * (2.0 * s * c / 3.0)).abs().max();
    let coef = (1.0 - cos) * (cos - 1.0 / 3.0);
    let conformality_residual =
        (0..4).map(|k| (phi.column(k).norm_squared() - coef).abs()).fold(0.0, f64::max);

    Ok(CanonicalBasisData {
        x,
        y,
        z,
        s,
        c,
        tangent,
        normal,
        cos_theta: cos,
        complex_residual,
        span_residual,
        frame_residual,
        relation_residual,
        phi,
        phi_residual,
        conformality_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiCheck {
    /// `Ψ` in the bases `Λ_1^+, Λ_2^+, Λ_3^+, Λ_1^−, Λ_2^−, Λ_3^−` of `∧²T` and
    /// `Ξ'^±` of `∧²N` (rows index `Λ`, columns `Ξ'`).
    pub computed: DMatrix<f64>,
    /// `diag((2/3)(1+s²), (2/3)c², (2/3)c², (2/3)s², (2/3)s², −(2/3)s²)`.
    pub expected: DMatrix<f64>,
    pub max_deviation: f64,
    pub plus_block_deviation: f64,
    pub minus_block_deviation: f64,
    /// Deviation of the `∧²_−` block from the displayed one with its sign reversed.
    pub minus_block_flipped_deviation: f64,
    /// Largest entry of the blocks mapping `∧²_±T` to `∧²_∓N`.
    pub mixing: f64,
    /// `‖Ψ'_+ᵀΨ'_+ − (cosθ − 1/3)²‖_max` with `Ψ'_+ = Ψ_+ − 2(1 − cosθ)Ψ_0`.
    pub plus_conformal_residual: f64,
    /// `‖Ψ_−ᵀΨ_− − (1 − cosθ)²‖_max`.
    pub minus_conformal_residual: f64,
}

/// Assembles `Ψ` from `⟨Ψ(X_i ∧ X_j), U ∧ W⟩ = Ω(X_1, …, U_(i), …, W_(j), …, X_4)`
/// and compares it with the displayed diagonal matrix.
pub fn psi_matrix_check(space: &HyperHermitianSpace, data: &CanonicalBasisData) -> Result<PsiCheck> {
    let b = &data.tangent;
    let up = data.normal_reordered();
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut raw = DMatrix::zeros(6, 6);
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for (q, &(a, c)) in pairs.iter().enumerate() {
            let f = with_slots(b, &[(i, up.column(a).into_owned()), (j, up.column(c).into_owned())]);
            raw[(p, q)] = space.omega_on(&f)?;
        }
    }
    // Rows of `basis` are the Λ vectors in the pair basis of a 4-frame.
    let e4 = DMatrix::<f64>::identity(4, 4);
    let lam: Vec<DVector<f64>> = lambda_bivectors(&e4, 1.0).into_iter().chain(lambda_bivectors(&e4, -1.0)).collect();
    let basis = DMatrix::from_fn(6, 6, |r, c| lam[r][c]);
    let computed = &basis * raw * basis.transpose();

    let (s2, c2) = (data.s * data.s, data.c * data.c);
    let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![
        2.0 / 3.0 * (1.0 + s2),
        2.0 / 3.0 * c2,
        2.0 / 3.0 * c2,
        2.0 / 3.0 * s2,
        2.0 / 3.0 * s2,
        -2.0 / 3.0 * s2,
    ]));
    let diff = &computed - &expected;
    let block = |m: &DMatrix<f64>, r: usize, c: usize| m.view((r, c), (3, 3)).abs().max();
    let minus_flipped = computed.view((3, 3), (3, 3)) + expected.view((3, 3), (3, 3));

    let cos = data.cos_theta;
    let mut plus_prime = computed.view((0, 0), (3, 3)).into_owned();
    plus_prime[(0, 0)] -= 2.0 * (1.0 - cos);
    let minus = computed.view((3, 3), (3, 3)).into_owned();
    let id3 = DMatrix::<f64>::identity(3, 3);
    let third = (cos - 1.0 / 3.0).powi(2);
    Ok(PsiCheck {
        max_deviation: diff.abs().max(),
        plus_block_deviation: block(&diff, 0, 0),
        minus_block_deviation: block(&diff, 3, 3),
        minus_block_flipped_deviation: minus_flipped.abs().max(),
        mixing: block(&computed, 0, 3).max(block(&computed, 3, 0)),
        plus_conformal_residual: (plus_prime.transpose() * &plus_prime - &id3 * third).abs().max(),
        minus_conformal_residual: (minus.transpose() * &minus - &id3 * (1.0 - cos).powi(2)).abs().max(),
        computed,
        expected,
    })
}

/// The complex structures `J_1, J_2, J_3` on `ℝ⁴` dual to `Λ_1^±, Λ_2^±, Λ_3^±`
/// of the standard frame, where `u ∧ v` stands for `u ↦ v`, `v ↦ −u`.
/// The `+` triple satisfies `J_1J_2 = J_3`, the `−` triple `J_1J_2 = −J_3`.
pub fn lambda_structures(sign: f64) -> [DMatrix<f64>; 3] {
    let build = |terms: [((usize, usize), f64); 2]| {
        let mut j = DMatrix::zeros(4, 4);
        for ((a, b), sg) in terms {
            j[(b, a)] += sg;
            j[(a, b)] -= sg;
        }
        j
    };
    [
        build([((0, 1), 1.0), ((2, 3), sign)]),
        build([((0, 2), 1.0), ((1, 3), -sign)]),
        build([((0, 3), 1.0), ((1, 2), sign)]),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct QpmResult {
    /// `Q l = −(1/3) Σ_r J_r l J_r`.
    pub q: DMatrix<f64>,
    /// `H l = (l + 3Q l)/4`.
    pub h: DMatrix<f64>,
    pub q_inner: f64,
    pub norm_sq: f64,
    pub h_norm_sq: f64,
    pub h_inner: f64,
    /// `⟨Q l, l⟩ + ‖l‖²/3 ≥ 0`.
    pub lower_slack: f64,
    /// `‖l‖² − ⟨Q l, l⟩ ≥ 0`.
    pub upper_slack: f64,
    /// `l` commutes with every `J_r`.
    pub hypercomplex: bool,
    /// `l ∈ span{J_1, J_2, J_3}`.
    pub in_span: bool,
}

pub fn qpm_operators(l: &DMatrix<f64>, js: &[DMatrix<f64>; 3]) -> QpmResult {
    let q = js.iter().fold(DMatrix::zeros(l.nrows(), l.ncols()), |acc, j| acc - j * l * j) / 3.0;
    let h = (l + &q * 3.0) / 4.0;
    let norm_sq = l.norm_squared();
    let q_inner = q.dot(l);
    let scale = norm_sq.max(1e-300).sqrt();
    let hypercomplex = js.iter().all(|j| (j * l - l * j).norm() <= tolerances::LINEAR_ALGEBRA * scale);
    let mut span = DMatrix::zeros(l.nrows(), l.ncols());
    for j in js {
        span += j * (j.dot(l) / j.norm_squared());
    }
    QpmResult {
        h_norm_sq: h.norm_squared(),
        h_inner: h.dot(l),
        lower_slack: q_inner + norm_sq / 3.0,
        upper_slack: norm_sq - q_inner,
        in_span: (l - span).norm() <= tolerances::LINEAR_ALGEBRA * scale,
        hypercomplex,
        q,
        h,
        q_inner,
        norm_sq,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DaeResult {
    pub d: f64,
    pub a: f64,
    pub e: f64,
    pub b_norm_sq: f64,
    pub cos_theta: f64,
    pub s: f64,
    /// `cosθ Q̃(B) = cosθ‖B‖² − 2 Σ_k Σ_{s<j} Ω(…, B(X_s, X_k)_(s), …, B(X_j, X_k)_(j), …)`.
    pub cos_q_tilde: f64,
    /// `(D + s²E) − s²(A + (2/3)‖B‖²)`.
    pub displayed_rhs: f64,
    pub displayed_residual: f64,
    /// `D − s²(A + E)`.
    pub derived_rhs: f64,
    pub derived_residual: f64,
    /// `0 ≤ D, A, E ≤ (4/3)‖B‖²` within `1e-10`.
    pub bounds_ok: bool,
    /// `max_k ‖H⁺ l_k‖ / ‖l_k‖`.
    pub epsilon: f64,
    /// `l_k = L ∘ B(X_k, ·)` with `L(U'_a) = X_a`; `l_k[a][j] = h[k][j][a]`.
    pub l: Vec<DMatrix<f64>>,
    pub l_prime: Vec<DMatrix<f64>>,
    pub l_second: Vec<DMatrix<f64>>,
}

/// A random symmetric tensor `h[k][j][a]` (`k, j` tangent, `a` normal), flattened.
pub fn random_normal_tensor<R: Rng>(rng: &mut R) -> Vec<f64> {
    let g = crate::linalg::gaussian_vector(rng, 64);
    let mut h = vec![0.0; 64];
    for k in 0..4 {
        for j in 0..4 {
            for a in 0..4 {
                h[16 * k + 4 * j + a] = (g[16 * k + 4 * j + a] + g[16 * j + 4 * k + a]) / 2.0;
            }
        }
    }
    h
}

/// `D`, `A`, `E` for a second fundamental form with components
/// `h[16k + 4j + a] = ⟨B(X_k, X_j), U'_a⟩` in the canonical frames.
pub fn dae_quantities(space: &HyperHermitianSpace, data: &CanonicalBasisData, h: &[f64]) -> Result<DaeResult> {
    if h.len() != 64 {
        return Err(Error::Dimension(format!("expected 64 components, got {}", h.len())));
    }
    let at = |k: usize, j: usize, a: usize| h[16 * k + 4 * j + a];
    for k in 0..4 {
        for j in 0..4 {
            for a in 0..4 {
                if (at(k, j, a) - at(j, k, a)).abs() > 1e-12 * (1.0 + at(k, j, a).abs()) {
                    return Err(Error::Invalid("second fundamental form must be symmetric".into()));
                }
            }
        }
    }
    let up = data.normal_reordered();
    let bvec = |k: usize, j: usize| (0..4).fold(DVector::zeros(8), |acc, a| acc + up.column(a) * at(k, j, a));
    let b_norm_sq: f64 = h.iter().map(|v| v * v).sum();

    let mut pairing = 0.0;
    for s in 0..4 {
        for j in s + 1..4 {
            for k in 0..4 {
                pairing += space.omega_on(&with_slots(&data.tangent, &[(s, bvec(s, k)), (j, bvec(j, k))]))?;
            }
        }
    }
    let cos = data.cos_theta;
    let cos_q_tilde = cos * b_norm_sq - 2.0 * pairing;

    let jp = lambda_structures(1.0);
    let jm = lambda_structures(-1.0);
    let s_prime = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
    let s_second = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
    let l: Vec<DMatrix<f64>> = (0..4).map(|k| DMatrix::from_fn(4, 4, |a, j| at(k, j, a))).collect();
    let l_prime: Vec<DMatrix<f64>> = l.iter().map(|m| m * &s_prime).collect();
    let l_second: Vec<DMatrix<f64>> = l.iter().map(|m| m * &s_second).collect();
    let (mut d, mut a, mut e, mut epsilon) = (0.0, 0.0, 0.0, 0.0f64);
    for k in 0..4 {
        let plus = qpm_operators(&l[k], &jp);
        d += plus.norm_sq - plus.q_inner;
        if plus.norm_sq > 0.0 {
            epsilon = epsilon.max((plus.h_norm_sq / plus.norm_sq).sqrt());
        }
        a += qpm_operators(&l_prime[k], &jp).q_inner + plus.norm_sq / 3.0;
        e += qpm_operators(&l_second[k], &jm).q_inner + plus.norm_sq / 3.0;
    }
    let s2 = data.s * data.s;
    let displayed_rhs = (d + s2 * e) - s2 * (a + 2.0 / 3.0 * b_norm_sq);
    let derived_rhs = d - s2 * (a + e);
    let tol = tolerances::LINEAR_ALGEBRA * (1.0 + b_norm_sq);
    let upper = 4.0 / 3.0 * b_norm_sq + tol;
    let bounds_ok = [d, a, e].iter().all(|v| *v >= -tol && *v <= upper);
    Ok(DaeResult {
        d,
        a,
        e,
        b_norm_sq,
        cos_theta: cos,
        s: data.s,
        cos_q_tilde,
        displayed_rhs,
        displayed_residual: (cos_q_tilde - displayed_rhs).abs(),
        derived_rhs,
        derived_residual: (cos_q_tilde - derived_rhs).abs(),
        bounds_ok,
        epsilon,
        l,
        l_prime,
        l_second,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaLower {
    /// Smallest admissible `ε`: `max_k ‖H⁺l_k‖/‖l_k‖`.
    pub epsilon: f64,
    /// Smallest admissible `τ`: `1 − cosθ`.
    pub tau: f64,
    /// `τ ≤ 4(1 − ε)/9`.
    pub applicable: bool,
    /// `(4(1 − ε) − 9τ)/3`.
    pub delta_displayed: f64,
    /// `cosθ Q̃ − δ_displayed ‖B‖²`.
    pub margin_displayed: f64,
    /// `(4(1 − ε) − 12τ)/3`, what the bounds on `D, A, E` give with `cosθ Q̃ = D − s²(A + E)`.
    pub delta_derived: f64,
    pub margin_derived: f64,
}

/// Margins of the lower bound `cosθ Q̃ ≥ δ‖B‖²` at the tightest `ε` and `τ`.
pub fn delta_lower_margin(dae: &DaeResult) -> DeltaLower {
    let epsilon = dae.epsilon.min(1.0);
    let tau = 1.0 - dae.cos_theta;
    let delta_displayed = (4.0 * (1.0 - epsilon) - 9.0 * tau) / 3.0;
    let delta_derived = (4.0 * (1.0 - epsilon) - 12.0 * tau) / 3.0;
    DeltaLower {
        epsilon,
        tau,
        applicable: tau <= 4.0 * (1.0 - epsilon) / 9.0,
        delta_displayed,
        margin_displayed: dae.cos_q_tilde - delta_displayed * dae.b_norm_sq,
        delta_derived,
        margin_derived: dae.cos_q_tilde - delta_derived * dae.b_norm_sq,
    }
}

/// Curvature of the quaternionic space form of reduced scalar curvature `ν`:
/// `(ν/4)(⟨X∧Y, Z∧W⟩ + Σ_r ⟨J_rX∧J_rY, Z∧W⟩ + κ⟨J_rX, Y⟩⟨J_rZ, W⟩)`.
/// The space form itself has `κ = 2`.
pub fn space_form_curvature(
    space: &HyperHermitianSpace,
    nu: f64,
    kappa: f64,
    v: [&DVector<f64>; 4],
) -> f64 {
    let [x, y, z, w] = v;
    let wedge = |a: &DVector<f64>, b: &DVector<f64>| a.dot(z) * b.dot(w) - a.dot(w) * b.dot(z);
    let mut t = wedge(x, y);
    for j in space.structures() {
        let (jx, jy, jz) = (j * x, j * y, j * z);
        t += wedge(&jx, &jy) + kappa * jx.dot(y) * jz.dot(w);
    }
    nu / 4.0 * t
}

#[derive(Debug, Clone, Serialize)]
pub struct SpaceFormContraction {
    pub nu: f64,
    /// `Σ_{k,i} R̄(X_i, X_k, X_i, Φ(X_k))` for the space-form tensor.
    pub lhs: f64,
    /// The same contraction with coefficient `1` on the `⟨J_rX, Y⟩⟨J_rZ, W⟩` term.
    pub lhs_unit_coefficient: f64,
    /// `4νs²c²`.
    pub rhs: f64,
    /// `9ν(1 − cosθ)(cosθ − 1/3)`.
    pub rhs_angle: f64,
    pub residual: f64,
}

pub fn space_form_contraction(space: &HyperHermitianSpace, data: &CanonicalBasisData, nu: f64) -> SpaceFormContraction {
    let contract = |kappa: f64| {
        let mut tot = 0.0;
        for k in 0..4 {
            let phi = data.phi_vector(k);
            let xk = data.tangent.column(k).into_owned();
            for i in 0..4 {
                let xi = data.tangent.column(i).into_owned();
                tot += space_form_curvature(space, nu, kappa, [&xi, &xk, &xi, &phi]);
            }
        }
        tot
    };
    let lhs = contract(2.0);
    let rhs = 4.0 * nu * data.s * data.s * data.c * data.c;
    let cos = data.cos_theta;
    SpaceFormContraction {
        nu,
        lhs,
        lhs_unit_coefficient: contract(1.0),
        rhs,
        rhs_angle: 9.0 * nu * (1.0 - cos) * (cos - 1.0 / 3.0),
        residual: (lhs - rhs).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::seeded;

    fn space() -> HyperHermitianSpace {
        HyperHermitianSpace::new(2).unwrap()
    }

    fn e(i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(8);
        v[i] = 1.0;
        v
    }

    fn check_data(d: &CanonicalBasisData) {
        assert!(d.span_residual < 1e-10, "{d:?}");
        assert!(d.frame_residual < 1e-10, "{d:?}");
        assert!(d.relation_residual < 1e-10, "{d:?}");
        assert!(d.phi_residual < 1e-10, "{d:?}");
        assert!(d.conformality_residual < 1e-10, "{d:?}");
    }

    #[test]
    fn quaternionic_plane_has_s_zero() {
        let s = space();
        let plane = FourPlane::new(&s.quaternionic_line(&e(0))).unwrap();
        let d = canonical_basis(&s, &plane).unwrap();
        check_data(&d);
        assert!(d.s < 1e-8 && (d.cos_theta - 1.0).abs() < 1e-12);
        assert!(d.phi.abs().max() < 1e-12);
    }

    #[test]
    fn totally_complex_plane_has_c_zero() {
        let s = space();
        let i = &s.structures()[0];
        let plane = FourPlane::new(&DMatrix::from_columns(&[e(0), i * e(0), e(4), i * e(4)])).unwrap();
        let d = canonical_basis(&s, &plane).unwrap();
        check_data(&d);
        assert!(d.c < 1e-8 && (d.cos_theta - 1.0 / 3.0).abs() < 1e-12);
        assert!(d.phi.abs().max() < 1e-12);
    }

    #[test]
    fn random_complex_planes_have_canonical_frames() {
        let s = space();
        let mut rng = seeded(7);
        for _ in 0..50 {
            let plane = random_complex_plane(&mut rng, &s).unwrap();
            let d = canonical_basis(&s, &plane).unwrap();
            check_data(&d);
            assert!(d.cos_theta >= 1.0 / 3.0 - 1e-12 && d.cos_theta <= 1.0 + 1e-12);
            let direct = s.omega_on(plane.basis()).unwrap();
            assert!((direct - d.cos_theta).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_plane_is_not_complex() {
        let s = space();
        let mut rng = seeded(8);
        let plane = FourPlane::new(&crate::linalg::random_frame(&mut rng, 8, 4)).unwrap();
        assert!(canonical_basis(&s, &plane).is_err());
        assert!(canonical_basis(&HyperHermitianSpace::new(1).unwrap(), &FourPlane::new(&DMatrix::identity(4, 4)).unwrap()).is_err());
    }

    #[test]
    fn psi_blocks_and_conformality() {
        let s = space();
        let plane = canonical_plane(&s, &e(0), &e(4), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.7).unwrap();
        let d = canonical_basis(&s, &plane).unwrap();
        let p = psi_matrix_check(&s, &d).unwrap();
        assert!(p.plus_block_deviation < 1e-12, "{p:?}");
        assert!(p.mixing < 1e-12);
        assert!(p.plus_conformal_residual < 1e-12 && p.minus_conformal_residual < 1e-12);
        // The ∧²_− block comes out as the displayed one with the opposite sign.
        assert!(p.minus_block_flipped_deviation < 1e-12, "{p:?}");
        let s2 = d.s * d.s;
        assert!((p.minus_block_deviation - 4.0 / 3.0 * s2).abs() < 1e-12);
    }

    #[test]
    fn psi_is_diag_two_thirds_for_quaternionic_planes() {
        let s = space();
        let d = canonical_basis(&s, &FourPlane::new(&s.quaternionic_line(&e(0))).unwrap()).unwrap();
        let p = psi_matrix_check(&s, &d).unwrap();
        assert!(p.max_deviation < 1e-12, "{p:?}");
    }

    #[test]
    fn q_plus_bounds_and_equality_cases() {
        let jp = lambda_structures(1.0);
        let jm = lambda_structures(-1.0);
        assert!((&jp[0] * &jp[1] - &jp[2]).abs().max() < 1e-15);
        assert!((&jm[0] * &jm[1] + &jm[2]).abs().max() < 1e-15);
        let r = qpm_operators(&jp[0], &jp);
        assert!((r.q_inner + r.norm_sq / 3.0).abs() < 1e-14 && r.in_span);
        let r = qpm_operators(&DMatrix::identity(4, 4), &jp);
        assert!((r.q_inner - r.norm_sq).abs() < 1e-14 && r.hypercomplex);
        let mut rng = seeded(9);
        for _ in 0..1000 {
            let l = crate::linalg::gaussian_matrix(&mut rng, 4, 4);
            for js in [&jp, &jm] {
                let r = qpm_operators(&l, js);
                assert!(r.lower_slack >= -1e-10 && r.upper_slack >= -1e-10);
                assert!((r.h_norm_sq - r.h_inner).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dae_identity_and_bounds() {
        let s = space();
        let mut rng = seeded(10);
        for _ in 0..100 {
            let plane = random_complex_plane(&mut rng, &s).unwrap();
            let d = canonical_basis(&s, &plane).unwrap();
            let h = random_normal_tensor(&mut rng);
            let r = dae_quantities(&s, &d, &h).unwrap();
            assert!(r.bounds_ok, "{r:?}");
            assert!(r.derived_residual < 1e-10 * (1.0 + r.b_norm_sq), "{r:?}");
            let m = delta_lower_margin(&r);
            if m.applicable {
                assert!(m.margin_derived >= -1e-9 * (1.0 + r.b_norm_sq));
            }
        }
        let d = canonical_basis(&s, &random_complex_plane(&mut rng, &s).unwrap()).unwrap();
        let zero = dae_quantities(&s, &d, &[0.0; 64]).unwrap();
        assert_eq!((zero.d, zero.a, zero.e), (0.0, 0.0, 0.0));
    }

    #[test]
    fn displayed_dae_form_agrees_only_for_quaternionic_planes() {
        let s = space();
        let mut rng = seeded(11);
        let h = random_normal_tensor(&mut rng);
        let q = canonical_basis(&s, &FourPlane::new(&s.quaternionic_line(&e(0))).unwrap()).unwrap();
        let r = dae_quantities(&s, &q, &h).unwrap();
        assert!(r.displayed_residual < 1e-10);
        let plane = canonical_plane(&s, &e(0), &e(4), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.9).unwrap();
        let d = canonical_basis(&s, &plane).unwrap();
        let r = dae_quantities(&s, &d, &h).unwrap();
        assert!(r.derived_residual < 1e-10 && r.displayed_residual > 1e-3, "{r:?}");
    }

    #[test]
    fn asymmetric_tensor_is_rejected() {
        let s = space();
        let d = canonical_basis(&s, &FourPlane::new(&s.quaternionic_line(&e(0))).unwrap()).unwrap();
        let mut h = [0.0; 64];
        h[4] = 1.0;
        assert!(dae_quantities(&s, &d, &h).is_err());
    }

    #[test]
    fn space_form_contraction_matches() {
        let s = space();
        let mut rng = seeded(12);
        for _ in 0..20 {
            let d = canonical_basis(&s, &random_complex_plane(&mut rng, &s).unwrap()).unwrap();
            let r = space_form_contraction(&s, &d, 1.0);
            assert!(r.residual < 1e-10, "{r:?}");
            assert!((r.rhs - r.rhs_angle).abs() < 1e-10);
            assert!(space_form_contraction(&s, &d, 0.0).lhs == 0.0);
        }
    }

    #[test]
    fn space_form_has_constant_holomorphic_curvature() {
        // Sectional curvature of a quaternionic line is ν, of a totally real plane ν/4.
        let s = space();
        let i = &s.structures()[0];
        let x = e(0);
        let ix = i * &x;
        assert!((space_form_curvature(&s, 1.0, 2.0, [&x, &ix, &x, &ix]) - 1.0).abs() < 1e-14);
        let y = e(4);
        assert!((space_form_curvature(&s, 1.0, 2.0, [&x, &y, &x, &y]) - 0.25).abs() < 1e-14);
    }
}
