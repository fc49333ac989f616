//! Level-set upper bounds for the Cheeger constant on meshed domains and
//! the co-area formula.

use crate::error::{Error, Result};
use crate::exprmap::ExprMap;
use crate::quad::simpson;
use crate::subgeom::mesh::DomainShape;
use crate::subgeom::{induced_metric, Immersion, MeshDomain};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative slack that keeps nodes lying on a level inside the closed set.
const LEVEL_ROUNDING: f64 = 1e-12;

/// Which side of the level `|f| = s` is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelSide {
    /// `D⁻(s) = {|f| ≤ s}`.
    Below,
    /// `D⁺(s) = {|f| ≥ s}`.
    Above,
}

fn check_scalar(imm: &dyn Immersion, f: &ExprMap) -> Result<()> {
    if f.nout() != 1 || f.nvars() != imm.param_dim() {
        return Err(Error::Dimension(format!(
            "level function must map {} parameters to one value, got {} -> {}",
            imm.param_dim(),
            f.nvars(),
            f.nout()
        )));
    }
    Ok(())
}

/// `(f, ‖∇f‖_g, √det g)` at a parameter point.
fn sample_point(imm: &dyn Immersion, f: &ExprMap, x: &[f64]) -> Result<(f64, f64, f64)> {
    let g = induced_metric(imm, x)?;
    let jet = f.eval_jet2(x)?.remove(0);
    let df = DVector::from_column_slice(&jet.grad);
    let ginv = g.clone().try_inverse().ok_or(Error::RankDeficient)?;
    let grad = (df.transpose() * ginv * &df)[0].max(0.0).sqrt();
    Ok((jet.value, grad, g.determinant().max(0.0).sqrt()))
}

/// A scalar function sampled on the quadrature nodes of a mesh.
#[derive(Debug, Clone, Serialize)]
pub struct MeshField {
    /// `|f|` at each node.
    pub abs_values: Vec<f64>,
    /// `‖∇f‖` in the induced metric.
    pub gradients: Vec<f64>,
    /// Volume weight `√det g · w` of each node.
    pub volumes: Vec<f64>,
}

/// `⨍‖∇f‖ / (s − ⨍|f|)` on `D⁻(s)` or `⨍‖∇f‖ / (⨍|f| − s)` on `D⁺(s)`.
#[derive(Debug, Clone, Serialize)]
pub struct LevelBound {
    pub side: LevelSide,
    pub level: f64,
    pub volume: f64,
    pub mean_gradient: f64,
    pub mean_abs: f64,
    /// `s − ⨍|f|` below, `⨍|f| − s` above.
    pub denominator: f64,
    /// `volume · denominator`, equal to `∫ V₋(t) dt` over `[0, s]` below and
    /// `∫ V₊(t) dt` over `[s, sup|f|]` above.
    pub integrated: f64,
    /// Present when the denominator is positive.
    pub bound: Option<f64>,
}

impl MeshField {
    pub fn sample(imm: &dyn Immersion, mesh: &MeshDomain, f: &ExprMap) -> Result<Self> {
        check_scalar(imm, f)?;
        let samples: Vec<(f64, f64, f64)> =
            mesh.nodes.par_iter().map(|x| sample_point(imm, f, x)).collect::<Result<_>>()?;
        Ok(Self {
            abs_values: samples.iter().map(|s| s.0.abs()).collect(),
            gradients: samples.iter().map(|s| s.1).collect(),
            volumes: samples.iter().zip(&mesh.weights).map(|(s, w)| s.2 * w).collect(),
        })
    }

    pub fn sup_abs(&self) -> f64 {
        self.abs_values.iter().copied().fold(0.0, f64::max)
    }

    /// `∫ ‖∇f‖ dV` over the whole mesh.
    pub fn gradient_integral(&self) -> f64 {
        self.gradients.iter().zip(&self.volumes).map(|(g, v)| g * v).sum()
    }

    pub fn level_bound(&self, side: LevelSide, level: f64) -> Result<LevelBound> {
        let slack = LEVEL_ROUNDING * level.abs().max(1.0);
        let (mut vol, mut grad, mut abs) = (0.0, 0.0, 0.0);
        for ((a, g), v) in self.abs_values.iter().zip(&self.gradients).zip(&self.volumes) {
            let inside = match side {
                LevelSide::Below => *a <= level + slack,
                LevelSide::Above => *a >= level - slack,
            };
            if inside {
                vol += v;
                grad += g * v;
                abs += a * v;
            }
        }
        if vol <= 0.0 {
            return Err(Error::Invalid(format!("level set at {level} contains no mesh nodes")));
        }
        let (mean_gradient, mean_abs) = (grad / vol, abs / vol);
        let denominator = match side {
            LevelSide::Below => level - mean_abs,
            LevelSide::Above => mean_abs - level,
        };
        Ok(LevelBound {
            side,
            level,
            volume: vol,
            mean_gradient,
            mean_abs,
            denominator,
            integrated: vol * denominator,
            bound: (denominator > 0.0).then(|| mean_gradient / denominator),
        })
    }
}

/// Level bounds at increasing levels, with the monotonicity of the
/// denominators.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSweep {
    pub bounds: Vec<LevelBound>,
    /// `s − ⨍|f|` is nondecreasing along the levels.
    pub denominators_increasing: bool,
    /// `∫ V₋` (below) is nondecreasing, `∫ V₊` (above) nonincreasing.
    pub integrated_monotone: bool,
    /// Smallest bound over the levels.
    pub best: Option<f64>,
}

pub fn level_sweep(field: &MeshField, side: LevelSide, levels: &[f64]) -> Result<LevelSweep> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("levels must be strictly increasing".into()));
    }
    let bounds: Vec<LevelBound> = levels.iter().map(|&s| field.level_bound(side, s)).collect::<Result<_>>()?;
    let pairs = || bounds.windows(2);
    let denominators_increasing = match side {
        LevelSide::Below => pairs().all(|w| w[1].denominator >= w[0].denominator - 1e-12),
        LevelSide::Above => pairs().all(|w| w[1].denominator <= w[0].denominator + 1e-12),
    };
    let integrated_monotone = match side {
        LevelSide::Below => pairs().all(|w| w[1].integrated >= w[0].integrated),
        LevelSide::Above => pairs().all(|w| w[1].integrated <= w[0].integrated),
    };
    let best = bounds.iter().filter_map(|b| b.bound).min_by(f64::total_cmp);
    Ok(LevelSweep { bounds, denominators_increasing, integrated_monotone, best })
}

/// A triangulation of a planar parameter domain.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    /// Polar rings for discs and annuli (`n` rings of `4n` points), a
    /// uniform split grid for boxes.
    pub fn of_shape(shape: &DomainShape, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("triangulation needs at least two subdivisions".into()));
        }
        match shape {
            DomainShape::Disc { center, radius } if center.len() == 2 => Ok(Self::rings(center, 0.0, *radius, n)),
            DomainShape::Annulus { center, inner, outer } if center.len() == 2 => {
                Ok(Self::rings(center, *inner, *outer, n))
            }
            DomainShape::Box { lo, hi } if lo.len() == 2 => Ok(Self::grid(lo, hi, n)),
            _ => Err(Error::Dimension("level sets are traced on two-dimensional domains".into())),
        }
    }

    fn rings(center: &[f64], r0: f64, r1: f64, n: usize) -> Self {
        let nt = 4 * n;
        let mut vertices = Vec::new();
        let first = if r0 == 0.0 {
            vertices.push([center[0], center[1]]);
            1
        } else {
            0
        };
        for k in first..=n {
            let r = r0 + (r1 - r0) * k as f64 / n as f64;
            for j in 0..nt {
                let t = 2.0 * PI * j as f64 / nt as f64;
                vertices.push([center[0] + r * t.cos(), center[1] + r * t.sin()]);
            }
        }
        let ring = |k: usize, j: usize| first + (k - first) * nt + j % nt;
        let mut triangles = Vec::new();
        if first == 1 {
            for j in 0..nt {
                triangles.push([0, ring(1, j), ring(1, j + 1)]);
            }
        }
        for k in first..n {
            for j in 0..nt {
                let (a, b, c, d) = (ring(k, j), ring(k, j + 1), ring(k + 1, j), ring(k + 1, j + 1));
                triangles.push([a, c, d]);
                triangles.push([a, d, b]);
            }
        }
        Self { vertices, triangles }
    }

    fn grid(lo: &[f64], hi: &[f64], n: usize) -> Self {
        let mut vertices = Vec::new();
        for i in 0..=n {
            for j in 0..=n {
                let x = lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64;
                let y = lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64;
                vertices.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| i * (n + 1) + j;
        let mut triangles = Vec::new();
        for i in 0..n {
            for j in 0..n {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self { vertices, triangles }
    }
}

/// Length of `{f = t}` inside a triangle for the linear interpolant of the
/// vertex values, measured in the metric `g`.
fn segment_length(p: &[[f64; 2]; 3], f: &[f64; 3], t: f64, g: &DMatrix<f64>) -> f64 {
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(2);
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        if (f[a] >= t) != (f[b] >= t) {
            let l = (t - f[a]) / (f[b] - f[a]);
            pts.push([p[a][0] + l * (p[b][0] - p[a][0]), p[a][1] + l * (p[b][1] - p[a][1])]);
        }
    }
    if pts.len() != 2 {
        return 0.0;
    }
    let d = [pts[1][0] - pts[0][0], pts[1][1] - pts[0][1]];
    (g[(0, 0)] * d[0] * d[0] + 2.0 * g[(0, 1)] * d[0] * d[1] + g[(1, 1)] * d[1] * d[1]).max(0.0).sqrt()
}

/// Both sides of `∫ ‖∇f‖ dV = ∫ A({f = t}) dt`.
#[derive(Debug, Clone, Serialize)]
pub struct CoareaCheck {
    /// Mesh quadrature of `‖∇f‖`.
    pub gradient_integral: f64,
    /// Simpson rule in `t` of traced level lengths.
    pub level_integral: f64,
    pub relative_residual: f64,
    pub triangles: usize,
}

/// Compares the gradient integral on `mesh` with level lengths traced on a
/// triangulation of the same domain (`n` subdivisions, `levels` odd).
pub fn coarea_check(imm: &dyn Immersion, mesh: &MeshDomain, f: &ExprMap, n: usize, levels: usize) -> Result<CoareaCheck> {
    if imm.param_dim() != 2 {
        return Err(Error::Dimension("co-area tracing needs a surface".into()));
    }
    let field = MeshField::sample(imm, mesh, f)?;
    let tri = Triangulation::of_shape(&mesh.shape, n)?;
    let values: Vec<f64> = tri.vertices.par_iter().map(|v| Ok(f.eval_jet2(v)?[0].value)).collect::<Result<_>>()?;
    let metrics: Vec<DMatrix<f64>> = tri
        .triangles
        .par_iter()
        .map(|t| {
            let c = [0, 1].map(|k| t.iter().map(|&i| tri.vertices[i][k]).sum::<f64>() / 3.0);
            induced_metric(imm, &c)
        })
        .collect::<Result<_>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let level_integral = if hi > lo {
        let (ts, ws) = simpson(lo, hi, levels)?;
        let lengths: Vec<f64> = ts
            .par_iter()
            .map(|&t| {
                tri.triangles
                    .iter()
                    .zip(&metrics)
                    .map(|(tr, g)| {
                        let p = tr.map(|i| tri.vertices[i]);
                        let fv = tr.map(|i| values[i]);
                        segment_length(&p, &fv, t, g)
                    })
                    .sum::<f64>()
            })
            .collect();
        lengths.iter().zip(&ws).map(|(l, w)| l * w).sum()
    } else {
        0.0
    };
    let gradient_integral = field.gradient_integral();
    let relative_residual = (gradient_integral - level_integral).abs() / gradient_integral.abs().max(1e-12);
    Ok(CoareaCheck { gradient_integral, level_integral, relative_residual, triangles: tri.triangles.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgeom::ImmersionSpec;

    fn flat() -> Box<dyn Immersion> {
        ImmersionSpec::Plane { slope: 0.0 }.build().unwrap()
    }

    fn r2() -> ExprMap {
        ExprMap::parse(&["x1^2 + x2^2"], 2).unwrap()
    }

    #[test]
    fn disc_bound_is_eight_thirds_over_s() {
        for s in [0.5, 1.0, 3.0] {
            let mesh = MeshDomain::disc([0.0, 0.0], s, 65, 64).unwrap();
            let field = MeshField::sample(flat().as_ref(), &mesh, &r2()).unwrap();
            let b = field.level_bound(LevelSide::Below, s * s).unwrap();
            assert!((b.mean_gradient - 4.0 * s / 3.0).abs() < 1e-8 * s);
            assert!((b.mean_abs - s * s / 2.0).abs() < 1e-8 * s * s);
            assert!((b.bound.unwrap() - 8.0 / (3.0 * s)).abs() < 1e-8 / s);
        }
    }

    #[test]
    fn denominators_increase_with_the_level() {
        let mesh = MeshDomain::disc([0.0, 0.0], 2.0, 129, 128).unwrap();
        let field = MeshField::sample(flat().as_ref(), &mesh, &r2()).unwrap();
        let levels: Vec<f64> = (1..=8).map(|k| 0.5 * k as f64).collect();
        let below = level_sweep(&field, LevelSide::Below, &levels).unwrap();
        assert!(below.denominators_increasing && below.integrated_monotone);
        // On a disc, r² has s − ⨍r² = s/2 on D⁻(s).
        for b in &below.bounds {
            assert!((b.denominator - b.level / 2.0).abs() < 0.02 * b.level);
        }
        let above = level_sweep(&field, LevelSide::Above, &levels[..6]).unwrap();
        assert!(above.integrated_monotone);
        assert!(level_sweep(&field, LevelSide::Below, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn curved_bound_uses_the_induced_metric() {
        // On a hemisphere graph over the disc of radius a, D⁻ of r² at level
        // a² is the whole cap; the bound is finite and positive.
        let imm = ImmersionSpec::SphereGraph { radius: 1.0 }.build().unwrap();
        let mesh = MeshDomain::disc([0.0, 0.0], 0.8, 129, 128).unwrap();
        let field = MeshField::sample(imm.as_ref(), &mesh, &r2()).unwrap();
        let b = field.level_bound(LevelSide::Below, 0.64).unwrap();
        let height = 1.0 - 0.6;
        assert!((b.volume - 2.0 * PI * height).abs() < 1e-5);
        assert!(b.bound.unwrap() > 0.0);
    }

    #[test]
    fn coarea_formula_on_flat_and_curved_discs() {
        let mesh = MeshDomain::disc([0.0, 0.0], 1.0, 129, 128).unwrap();
        let c = coarea_check(flat().as_ref(), &mesh, &r2(), 96, 401).unwrap();
        assert!((c.gradient_integral - 4.0 * PI / 3.0).abs() < 1e-7);
        assert!(c.relative_residual < 2e-3, "{c:?}");
        let imm = ImmersionSpec::SphereGraph { radius: 1.5 }.build().unwrap();
        let f = ExprMap::parse(&["x1 + 0.5*x2^2"], 2).unwrap();
        let c = coarea_check(imm.as_ref(), &mesh, &f, 48, 201).unwrap();
        assert!(c.relative_residual < 2e-3, "{c:?}");
        let b = MeshDomain::cuboid(&[0.0, 0.0], &[1.0, 2.0], 33).unwrap();
        let c = coarea_check(flat().as_ref(), &b, &f, 60, 201).unwrap();
        assert!(c.relative_residual < 2e-3, "{c:?}");
    }

    #[test]
    fn rejects_vector_valued_functions() {
        let mesh = MeshDomain::disc([0.0, 0.0], 1.0, 9, 8).unwrap();
        let f = ExprMap::parse(&["x1", "x2"], 2).unwrap();
        assert!(MeshField::sample(flat().as_ref(), &mesh, &f).is_err());
    }
}
