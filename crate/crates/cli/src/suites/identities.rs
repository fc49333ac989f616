//! Second-order identities of the Omega-angle on flat and curved patches,
//! and the pointwise bounds on `Φ`, `∇cosθ` and `Z`.

use super::{argmax, Ctx};
use calib_core::ambient::{AmbientSpace, MetricFactor, ProductRiemannian};
use calib_core::calibrations::{make_calibration, Calibration, CalibrationKind};
use calib_core::linalg::{complete_frame, gaussian_matrix, qr_orthonormalize, substream, SeededRng};
use calib_core::subgeom::graph::graph_analysis;
use calib_core::subgeom::identities::{
    divergence_identity_check, gauss_equation_check, laplacian_costheta_check, pointwise_bounds, PointwiseBounds,
};
use calib_core::subgeom::{CalibratedPoint, Immersion, ImmersionSpec, SecondForm};
use calib_core::{tolerances, DMatrix, ExprMap, MultiVector, Result};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Steps of the refinement study, halving each time.
const REFINEMENT_STEPS: [f64; 3] = [0.04, 0.02, 0.01];
const POINTS_PER_PATCH: usize = 20;
const NABLA_STEP: f64 = tolerances::NORMAL_DERIVATIVE_STEP;
const DIVERGENCE_TOL: f64 = 1e-5;
const GAUSS_TOL: f64 = 1e-6;
const GRADIENT_TOL: f64 = 1e-8;

struct Patch {
    name: &'static str,
    spec: ImmersionSpec,
    sample: fn(&mut SeededRng) -> Vec<f64>,
}

fn disc_point(rng: &mut SeededRng, radius: f64) -> Vec<f64> {
    let r = radius * rng.random::<f64>().sqrt();
    let t = 2.0 * PI * rng.random::<f64>();
    vec![r * t.cos(), r * t.sin()]
}

fn flat_patches() -> Vec<Patch> {
    vec![
        Patch {
            name: "sphere",
            spec: ImmersionSpec::SphereGraph { radius: 1.0 },
            sample: |rng| disc_point(rng, 0.7),
        },
        Patch {
            name: "catenoid",
            spec: ImmersionSpec::Catenoid,
            sample: |rng| {
                let r = rng.random_range(1.3..2.0);
                let t = 2.0 * PI * rng.random::<f64>();
                vec![r * t.cos(), r * t.sin()]
            },
        },
        Patch {
            name: "helicoid",
            spec: ImmersionSpec::Helicoid,
            sample: |rng| vec![rng.random_range(0.5..1.5), rng.random_range(-0.5..0.5)],
        },
    ]
}

fn surface_form() -> Result<MultiVector> {
    Ok(make_calibration(CalibrationKind::Volume { m: 2, n: 1 })?.form)
}

fn hypersurface_form(m: usize) -> Result<MultiVector> {
    MultiVector::basis(m + 1, &(0..m).collect::<Vec<_>>())
}

struct PointData {
    relative: f64,
    lhs: f64,
    rhs: f64,
    gradient: f64,
    /// `|Δ_fd cosθ − formula|` at each refinement step.
    refinement: Vec<f64>,
    div: f64,
    delta_phi: f64,
    z_excess: f64,
    gauss: Option<f64>,
}

fn point_data(imm: &dyn Immersion, form: &MultiVector, x: &[f64], h: f64, refine: bool) -> Result<PointData> {
    let lap = laplacian_costheta_check(imm, form, x, h, NABLA_STEP)?;
    let refinement = if refine {
        REFINEMENT_STEPS
            .iter()
            .map(|&s| Ok(laplacian_costheta_check(imm, form, x, s, NABLA_STEP)?.residual))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let div = divergence_identity_check(imm, form, x, NABLA_STEP)?;
    let gauss = if x.len() == 2 { Some(gauss_equation_check(imm, x, 1e-3)?.residual) } else { None };
    Ok(PointData {
        relative: lap.relative,
        lhs: lap.lhs_fd,
        rhs: lap.rhs_formula,
        gradient: lap.gradient_residual,
        refinement,
        div: div.div_residual,
        delta_phi: div.delta_phi_residual,
        z_excess: div.z_norm - div.z_bound,
        gauss,
    })
}

fn record_patch(ctx: &mut Ctx, name: &str, data: &[PointData], refine: bool) {
    let anchor = "Laplacian of the Omega-angle";
    for (i, d) in data.iter().enumerate() {
        ctx.custom(
            &format!("laplacian.{name}.p{i:02}"),
            anchor,
            d.lhs,
            d.rhs,
            d.relative,
            tolerances::LAPLACIAN_RELATIVE,
        );
    }
    let g = data.iter().map(|d| d.gradient).fold(0.0, f64::max);
    ctx.small(&format!("gradient.{name}"), "gradient of the Omega-angle is B_Phi", g, GRADIENT_TOL);
    if refine {
        // Orders from the summed residuals, robust to points where the leading error term is small.
        let sums: Vec<f64> =
            (0..REFINEMENT_STEPS.len()).map(|k| data.iter().map(|d| d.refinement[k]).sum::<f64>()).collect();
        let order = sums.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
        ctx.upper_bound(&format!("refinement.{name}"), "Laplacian of the Omega-angle", tolerances::LAPLACIAN_ORDER, order, 0.0);
    }
    let worst = |f: fn(&PointData) -> f64| data.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    ctx.small(&format!("divergence.{name}"), "divergence of Z", worst(|d| d.div), DIVERGENCE_TOL);
    ctx.small(&format!("codifferential.{name}"), "delta Phi = m cos(theta) H", worst(|d| d.delta_phi), DIVERGENCE_TOL);
    ctx.upper_bound(&format!("z-norm.{name}"), "|Z| <= sin(theta) |H|", worst(|d| d.z_excess), 0.0, tolerances::INEQUALITY);
    if data.iter().all(|d| d.gauss.is_some()) {
        ctx.small(&format!("gauss.{name}"), "Gauss equation", worst(|d| d.gauss.unwrap()), GAUSS_TOL);
    }
}

pub fn flat(ctx: &mut Ctx) -> Result<()> {
    let h = ctx.cfg.step.unwrap_or(tolerances::LAPLACIAN_STEP);
    let form = surface_form()?;
    for (pi, patch) in flat_patches().into_iter().enumerate() {
        let imm = patch.spec.build()?;
        let mut rng = substream(ctx.cfg.seed, pi as u64);
        let points: Vec<Vec<f64>> = (0..POINTS_PER_PATCH).map(|_| (patch.sample)(&mut rng)).collect();
        let data: Vec<PointData> =
            points.par_iter().map(|x| point_data(imm.as_ref(), &form, x, h, true)).collect::<Result<_>>()?;
        record_patch(ctx, patch.name, &data, true);
    }
    pointwise(ctx)
}

/// Orthonormal `m`-frame near the model frame of a calibration.
pub(crate) fn near_frame(rng: &mut SeededRng, cal: &Calibration) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = cal.dim();
    let t: f64 = rng.random_range(0.0..0.6);
    let r = qr_orthonormalize(&(DMatrix::identity(n, n) + gaussian_matrix(rng, n, n) * t));
    let tangent = r * &cal.model_frame;
    let normal = complete_frame(&tangent);
    (tangent, normal)
}

fn pointwise(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples(1000);
    for (ci, kind) in CalibrationKind::catalog().into_iter().enumerate() {
        let cal = make_calibration(kind)?;
        let bounds: Vec<PointwiseBounds> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(ctx.cfg.seed, ((ci as u64 + 1) << 32) + i as u64);
                let (tangent, normal) = near_frame(&mut rng, &cal);
                let cp = CalibratedPoint::new(&cal.form, tangent, normal.clone())?;
                let b = SecondForm::random(&mut rng, &normal, cal.m);
                Ok(pointwise_bounds(&cp, &b, 16, &mut rng))
            })
            .collect::<Result<_>>()?;
        record_pointwise(ctx, &cal.name, &bounds);
    }
    Ok(())
}

/// Check id suffix, anchor and the excess over the bound, when defined.
type PointwiseField = (&'static str, &'static str, fn(&PointwiseBounds) -> Option<f64>);

pub(crate) fn record_pointwise(ctx: &mut Ctx, name: &str, bounds: &[PointwiseBounds]) {
    let fields: [PointwiseField; 7] = [
        ("phi-pairing", "|<Phi(X), U>| <= sin(theta)", |b| Some(b.phi_pairing)),
        ("phi-operator", "operator norm of Phi <= sin(theta)", |b| Some(b.phi_operator)),
        ("phi-norm", "|Phi|^2 <= m sin^2(theta)", |b| Some(b.phi_norm)),
        ("grad-cos", "|grad cos(theta)|^2 <= m sin^2(theta) |B|^2", |b| Some(b.grad_cos)),
        ("z-norm", "|Z| <= sin(theta) |H|", |b| Some(b.z_norm)),
        ("phi-lower", "sin^2(theta) <= |Phi|^2 in codimension one", |b| b.phi_lower),
        ("log-gradient", "|grad log cos(theta)| <= sqrt(m) tan(theta) |B|", |b| b.log_gradient),
    ];
    for (key, anchor, get) in fields {
        let values: Vec<f64> = bounds.iter().filter_map(get).collect();
        if values.is_empty() {
            continue;
        }
        let worst = values[argmax(&values, |v| *v)];
        ctx.upper_bound(&format!("pointwise.{name}.{key}"), anchor, worst, 0.0, tolerances::INEQUALITY);
    }
}

fn hyperbolic_factor() -> Result<MetricFactor> {
    MetricFactor::parse(2, &["4/(1 - x1^2 - x2^2)^2", "0", "4/(1 - x1^2 - x2^2)^2"])
}

fn sphere_factor() -> Result<MetricFactor> {
    MetricFactor::parse(2, &["4/(1 + x1^2 + x2^2)^2", "0", "4/(1 + x1^2 + x2^2)^2"])
}

fn product_ambients() -> Result<Vec<(&'static str, AmbientSpace, usize)>> {
    let prod = |a: MetricFactor, b: MetricFactor| -> Result<AmbientSpace> {
        Ok(AmbientSpace::Product(ProductRiemannian::new(vec![a, b])?))
    };
    Ok(vec![
        ("h2xs2", prod(hyperbolic_factor()?, sphere_factor()?)?, 2),
        ("h2xh2", prod(hyperbolic_factor()?, hyperbolic_factor()?)?, 2),
        ("s2xr2", prod(sphere_factor()?, MetricFactor::flat(2))?, 2),
        ("h2xr", AmbientSpace::HyperbolicLine(2), 1),
    ])
}

fn random_quadratic(rng: &mut SeededRng) -> String {
    let mut c = || rng.random_range(-0.4..0.4);
    format!("{:?}*x1 + {:?}*x2 + {:?}*x1^2 + {:?}*x1*x2 + {:?}*x2^2", c(), c(), c(), c(), c())
}

pub fn curved(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples(20);
    for (ai, (name, ambient, n)) in product_ambients()?.into_iter().enumerate() {
        let results: Vec<_> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(ctx.cfg.seed, ((ai as u64 + 1) << 32) + i as u64);
                let f: Vec<String> = (0..n).map(|_| random_quadratic(&mut rng)).collect();
                let f = ExprMap::parse(&f, 2)?;
                let x = disc_point(&mut rng, 0.4);
                graph_analysis(&f, ambient.clone(), &x)
            })
            .collect::<Result<_>>()?;
        let worst = |g: fn(&calib_core::subgeom::graph::GraphAnalysis) -> f64| {
            results.iter().map(g).fold(f64::NEG_INFINITY, f64::max)
        };
        ctx.small(&format!("contraction.{name}"), "curvature contraction on a product", worst(|g| g.contraction_residual()), tolerances::CONTRACTION);
        ctx.small(&format!("graph-phi.{name}"), "Phi = cos(theta) diag(lambda) in graph frames", worst(|g| g.phi_diag_residual), tolerances::LINEAR_ALGEBRA);
        ctx.small(
            &format!("q-expansion.{name}"),
            "expansion of Q in graph frames",
            worst(|g| (g.q - g.q_expansion).abs() / g.q.abs().max(1.0)),
            tolerances::LINEAR_ALGEBRA,
        );
        ctx.upper_bound(&format!("delta-positivity.{name}"), "Q >= delta |B|^2", worst(|g| -g.delta_margin), 0.0, tolerances::INEQUALITY);
    }

    // The Laplacian identity picks up the curvature term on the CMC graphs of ℍ^m × ℝ.
    let h = ctx.cfg.step.unwrap_or(tolerances::LAPLACIAN_STEP);
    for (ci, (m, c)) in [(2usize, 1.0f64), (3, 1.5)].into_iter().enumerate() {
        let imm = ImmersionSpec::CmcGraph { m, c }.build()?;
        let form = hypersurface_form(m)?;
        let mut rng = substream(ctx.cfg.seed, 100 + ci as u64);
        let points: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let v = calib_core::linalg::unit_vector(&mut rng, m);
                let r = rng.random_range(0.05..0.5);
                v.iter().map(|t| t * r).collect()
            })
            .collect();
        let data: Vec<PointData> =
            points.par_iter().map(|x| point_data(imm.as_ref(), &form, x, h, false)).collect::<Result<_>>()?;
        record_patch(ctx, &format!("cmc-m{m}"), &data, false);
    }
    Ok(())
}
