//! Graphs over the calibrated plane and planes with equal Kähler angles.

use super::Ctx;
use calib_core::ambient::AmbientSpace;
use calib_core::calibrations::kahler_power;
use calib_core::calibrations::structures::complex_structure;
use calib_core::linalg::{complete_frame, random_frame, random_rotation, substream, SeededRng};
use calib_core::subgeom::graph::{delta_from_lambdas, graph_analysis, graph_plane_frames, q_expansion};
use calib_core::subgeom::kahler::{equal_angle_delta_max, kahler_angles};
use calib_core::subgeom::{CalibratedPoint, SecondForm};
use calib_core::{tolerances, DMatrix, DVector, ExprMap, MultiVector, Result};
use rand::Rng;
use rayon::prelude::*;

/// Singular values with `max |λ_iλ_j| < 1`.
fn random_lambdas(rng: &mut SeededRng, m: usize) -> Vec<f64> {
    loop {
        let l: Vec<f64> = (0..m).map(|_| rng.random_range(-1.5..1.5)).collect();
        if delta_from_lambdas(&l) > 0.0 {
            return l;
        }
    }
}

struct DeltaSample {
    q: f64,
    bound: f64,
    expansion_residual: f64,
    sin_lower: f64,
}

pub fn graph(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples(1000);
    let samples: Vec<DeltaSample> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, i as u64);
            let m = rng.random_range(2..=4usize);
            let n = rng.random_range(m..=4usize);
            let lambdas = random_lambdas(&mut rng, m);
            let (x, u) = graph_plane_frames(&lambdas, n);
            let form = MultiVector::basis(m + n, &(0..m).collect::<Vec<_>>())?;
            let cp = CalibratedPoint::new(&form, x, u.clone())?;
            let b = SecondForm::random(&mut rng, &u, m);
            let q = cp.q_forms(&b)?;
            let delta = delta_from_lambdas(&lambdas);
            let cos2 = cp.cos_theta * cp.cos_theta;
            let sum2: f64 = lambdas.iter().map(|l| l * l).sum();
            Ok(DeltaSample {
                q: q.q,
                bound: delta * q.b_norm_sq,
                expansion_residual: (q.q - q_expansion(&lambdas, &b.coeffs(&u))).abs() / q.q.abs().max(1.0),
                sin_lower: cos2 * sum2 - (1.0 - cos2),
            })
        })
        .collect::<Result<_>>()?;
    let worst = samples
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1.bound - a.1.q).total_cmp(&(b.1.bound - b.1.q)).then(b.0.cmp(&a.0)))
        .map(|(_, s)| s)
        .expect("at least one sample");
    ctx.upper_bound("delta-positivity", "Q >= delta |B|^2 when |lambda_i lambda_j| <= 1 - delta", worst.bound, worst.q, tolerances::INEQUALITY);
    let exp = samples.iter().map(|s| s.expansion_residual).fold(0.0, f64::max);
    ctx.small("q-expansion", "expansion of Q in graph frames", exp, tolerances::LINEAR_ALGEBRA);
    let sl = samples.iter().map(|s| s.sin_lower).fold(f64::NEG_INFINITY, f64::max);
    ctx.upper_bound("sin-lower", "cos^2(theta) sum lambda^2 <= sin^2(theta)", sl, 0.0, tolerances::ALGEBRAIC);

    // Graphs of explicit maps at random points.
    let graphs = ctx.samples(1000).min(50);
    let analyses: Vec<_> = (0..graphs)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, (1 << 40) + i as u64);
            let n = rng.random_range(1..=3usize);
            let mut c = || rng.random_range(-0.6..0.6);
            let f: Vec<String> = (0..n)
                .map(|_| format!("{:?}*x1 + {:?}*x2 + {:?}*x1^2 + {:?}*sin(x1*x2) + {:?}*x2^3", c(), c(), c(), c(), c()))
                .collect();
            let x = [c(), c()];
            graph_analysis(&ExprMap::parse(&f, 2)?, AmbientSpace::Euclidean(2 + n), &x)
        })
        .collect::<Result<_>>()?;
    let w = |g: fn(&calib_core::subgeom::graph::GraphAnalysis) -> f64| analyses.iter().map(g).fold(f64::NEG_INFINITY, f64::max);
    ctx.small("graph.cos-closed-form", "cos(theta) = prod (1 + lambda^2)^(-1/2)", w(|g| (g.cos_theta - g.cos_theta_closed).abs()), tolerances::ALGEBRAIC);
    ctx.small("graph.phi-diagonal", "Phi = cos(theta) diag(lambda)", w(|g| g.phi_diag_residual), tolerances::LINEAR_ALGEBRA);
    ctx.small("graph.q-expansion", "expansion of Q in graph frames", w(|g| (g.q - g.q_expansion).abs() / g.q.abs().max(1.0)), tolerances::LINEAR_ALGEBRA);
    ctx.upper_bound("graph.delta-positivity", "Q >= delta |B|^2", w(|g| -g.delta_margin), 0.0, tolerances::INEQUALITY);
    ctx.upper_bound("graph.sin-lower", "cos^2(theta) sum lambda^2 <= sin^2(theta)", w(|g| g.sin_bounds.0 - g.sin_bounds.1), 0.0, tolerances::ALGEBRAIC);
    Ok(())
}

/// Tangent plane of the graph of `z ↦ a z̄` on `ℂ^k × ℂ^k`, moved by a random
/// unitary map: all Kähler angles equal `arccos((1 − a²)/(1 + a²))`.
fn equal_angle_plane(rng: &mut SeededRng, k: usize, a: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = 4 * k;
    let cols: Vec<DVector<f64>> = (0..2 * k)
        .map(|i| {
            let mut v = DVector::zeros(dim);
            v[i] = 1.0;
            v[2 * k + i] = if i % 2 == 0 { a } else { -a };
            v.normalize()
        })
        .collect();
    let u = random_unitary(rng, 2 * k);
    let t = &u * DMatrix::from_columns(&cols);
    let n = complete_frame(&t);
    (t, n)
}

/// A random element of `U(n)` acting on `ℝ^{2n}` with `J` from [`complex_structure`].
fn random_unitary(rng: &mut SeededRng, n: usize) -> DMatrix<f64> {
    let j = complex_structure(n);
    let o = random_rotation(rng, 2 * n);
    // Averaging over the J-conjugation gives a complex-linear map; polar-projecting restores orthogonality.
    let c = (&o - &j * &o * &j) * 0.5;
    let svd = c.svd(true, true);
    svd.u.expect("u") * svd.v_t.expect("v_t")
}

struct KahlerSample {
    cos_mismatch: f64,
    equal: bool,
    rho_excess: f64,
    sum_excess: f64,
    condition_holds: bool,
    condition_violation: f64,
}

pub fn kahler(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples(1000);
    let k = 2;
    let j = complex_structure(4 * k / 2);
    let form = kahler_power(k, 2 * k)?;
    let samples: Vec<KahlerSample> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, i as u64);
            // Half the samples sit in the window 11/13 < cosθ ≤ 11/12 of the B^a/B^c condition.
            let a = if i % 2 == 0 { rng.random_range(0.149..0.203) } else { rng.random_range(0.0..0.45) };
            let (t, n) = equal_angle_plane(&mut rng, k, a);
            let b = SecondForm::random(&mut rng, &n, 2 * k);
            let cp = CalibratedPoint::new(&form, t.clone(), n.clone())?;
            let delta = equal_angle_delta_max(cp.cos_theta).clamp(0.0, 1.0) * rng.random::<f64>();
            let ka = kahler_angles(&t, &n, &j, Some(&b), delta)?;
            let (rho_excess, sum_excess) = match &ka.split {
                Some(s) => (s.rho.abs() - s.rho_bound_sum, s.rho_bound_sum - s.rho_bound),
                None => (f64::NAN, f64::NAN),
            };
            let (condition_holds, condition_violation) = match &ka.equal_angle_condition {
                Some(c) if c.margin >= 0.0 => (true, -c.q_tilde_margin),
                _ => (false, f64::NEG_INFINITY),
            };
            Ok(KahlerSample {
                cos_mismatch: (ka.cos_theta - cp.cos_theta).abs(),
                equal: ka.equal_angles,
                rho_excess,
                sum_excess,
                condition_holds,
                condition_violation,
            })
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&KahlerSample) -> f64| samples.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    ctx.small("kahler.angle-product", "Kahler calibration = product of Kahler-angle cosines", max(|s| s.cos_mismatch), tolerances::LINEAR_ALGEBRA);
    ctx.holds("kahler.equal-angles", "unitary images of the conjugate graph have equal angles", samples.iter().all(|s| s.equal));
    ctx.upper_bound("kahler.rho-sum", "|rho| <= 4 sin^2/cos sum |B(e_a,e_c)||B(e_b,e_c)|", max(|s| s.rho_excess), 0.0, tolerances::LINEAR_ALGEBRA);
    ctx.upper_bound("kahler.rho-bound", "sum bound <= 12 sin^2/cos |B|^2", max(|s| s.sum_excess), 0.0, tolerances::LINEAR_ALGEBRA);
    let covered = samples.iter().filter(|s| s.condition_holds).count();
    ctx.upper_bound("kahler.condition-coverage", "samples satisfying the B^a/B^c condition", 1.0, covered as f64, 0.0);
    let v = samples.iter().filter(|s| s.condition_holds).map(|s| s.condition_violation).fold(f64::NEG_INFINITY, f64::max);
    ctx.upper_bound("kahler.condition-delta", "condition on B^a/B^c gives Q~ >= delta |B|^2", v, 0.0, tolerances::INEQUALITY);

    // Generic planes: the Kähler calibration is the signed product of the cosines.
    let generic: Vec<f64> = (0..count.min(200))
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(ctx.cfg.seed, (1 << 40) + i as u64);
            let t = random_frame(&mut rng, 4 * k, 2 * k);
            let n = complete_frame(&t);
            let ka = kahler_angles(&t, &n, &j, None, 0.0)?;
            let direct = form.eval_frame(&t)?;
            Ok((ka.cos_theta - direct).abs())
        })
        .collect::<Result<_>>()?;
    ctx.small("kahler.generic-product", "Kahler calibration = signed product of cosines", generic.iter().copied().fold(0.0, f64::max), tolerances::LINEAR_ALGEBRA);
    Ok(())
}
