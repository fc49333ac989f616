//! Cheeger constants: exhaustive and sweep estimates on random graphs, the
//! Dirichlet eigenvalue bound, ball profiles of model spaces, level-set
//! bounds and the convex-field bound.

use super::Ctx;
use calib_core::cheeger::{
    ball_ratio_profile, bruteforce_cheeger, coarea_check, convex_field_bound, dirichlet_cheeger, dirichlet_lambda1,
    indicator_profile, random_graph, sweep_cheeger, Convention, LevelSide, MeshField, ModelSpace,
};
use calib_core::linalg::substream;
use calib_core::subgeom::{ImmersionSpec, MeshDomain};
use calib_core::{tolerances, ExprMap, Result};
use rand::Rng;
use rayon::prelude::*;

const GRAPHS: usize = 50;
const MAX_VERTICES: usize = 14;
const LEVEL_QUADRATURE: f64 = 1e-8;
const COAREA: f64 = 2e-3;
const FIELD_IDENTITY: f64 = 1e-6;

struct GraphSample {
    brute: f64,
    sweep: f64,
    reevaluated: f64,
    dirichlet: f64,
    upper: f64,
}

fn graph_sample(seed: u64, i: usize) -> Result<GraphSample> {
    let mut rng = substream(seed, i as u64);
    let n = rng.random_range(3..=MAX_VERTICES);
    let g = random_graph(&mut rng, n, 0.25);
    let h = bruteforce_cheeger(&g, Convention::HalfVolume)?;
    let witness = h.witness.vertices().expect("exhaustive search returns a vertex set");
    let profile = indicator_profile(&g, witness)?;
    let s = sweep_cheeger(&g, &profile, Convention::HalfVolume)?;
    let d = dirichlet_lambda1(&g, witness)?;
    Ok(GraphSample {
        brute: h.value,
        sweep: s.value,
        reevaluated: s.reevaluate(&g)?,
        dirichlet: dirichlet_cheeger(&g, witness)?,
        upper: d.cheeger_upper,
    })
}

pub fn run(ctx: &mut Ctx) -> Result<()> {
    let count = ctx.samples(GRAPHS);
    let seed = ctx.cfg.seed;
    let graphs: Vec<GraphSample> = (0..count).into_par_iter().map(|i| graph_sample(seed, i)).collect::<Result<_>>()?;
    let max = |f: fn(&GraphSample) -> f64| graphs.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    ctx.small("graph.sweep-witness", "brute force = sweep witness re-evaluated", max(|g| (g.brute - g.reevaluated).abs()), tolerances::ALGEBRAIC);
    ctx.small("graph.sweep-value", "brute force = sweep value", max(|g| (g.brute - g.sweep).abs()), tolerances::ALGEBRAIC);
    ctx.small("graph.dirichlet-cheeger", "Dirichlet Cheeger constant of the witness", max(|g| (g.brute - g.dirichlet).abs()), tolerances::ALGEBRAIC);
    ctx.upper_bound("graph.dirichlet-bound", "h <= 2 sqrt(lambda_1)", max(|g| g.brute - g.upper), 0.0, tolerances::INEQUALITY);

    // Ball profiles of hyperbolic space at a large radius.
    for (m, limit) in [(2usize, 1.0), (3, 2.0)] {
        let p = ball_ratio_profile(ModelSpace::Hyperbolic(m), &vec![0.0; m], &[10.0])?;
        let ratio = p.samples[0].ratio;
        ctx.relative(&format!("ball-profile.h{m}"), "A/V of hyperbolic balls tends to m - 1", ratio, limit, 0.0, tolerances::BALL_PROFILE);
    }

    // Level-set bound on flat discs for f = |x|^2 at level s^2.
    let flat = ImmersionSpec::Plane { slope: 0.0 }.build()?;
    let r2 = ExprMap::parse(&["x1^2 + x2^2"], 2)?;
    let (nr, nt) = (ctx.cfg.mesh.nr, ctx.cfg.mesh.nt);
    for s in [0.5, 1.0, 3.0] {
        let mesh = MeshDomain::disc([0.0, 0.0], s, nr, nt)?;
        let field = MeshField::sample(flat.as_ref(), &mesh, &r2)?;
        let b = field.level_bound(LevelSide::Below, s * s)?;
        let bound = b.bound.unwrap_or(f64::NAN);
        ctx.relative(&format!("level-bound.disc-s{s}"), "disc level bound 8/(3s)", bound, 8.0 / (3.0 * s), 0.0, LEVEL_QUADRATURE);
    }
    let disc = MeshDomain::disc([0.0, 0.0], 1.0, 129, 128)?;
    let c = coarea_check(flat.as_ref(), &disc, &r2, 96, 401)?;
    ctx.small("coarea.flat-disc", "co-area formula", c.relative_residual, COAREA);
    let sphere = ImmersionSpec::SphereGraph { radius: 1.5 }.build()?;
    let f = ExprMap::parse(&["x1 + 0.5*x2^2"], 2)?;
    let c = coarea_check(sphere.as_ref(), &disc, &f, 48, 201)?;
    ctx.small("coarea.sphere-cap", "co-area formula", c.relative_residual, COAREA);

    // Convex position field on a flat disc, a sphere cap and the Enneper disc.
    let position = ExprMap::parse(&["x1", "x2", "x3"], 3)?;
    let cases = [
        ("flat-disc", ImmersionSpec::Plane { slope: 0.0 }, 1.0, None),
        ("sphere-cap", ImmersionSpec::SphereGraph { radius: 1.3 }, 0.9, Some(0.0)),
        ("enneper-disc", ImmersionSpec::Enneper, 0.8, None),
    ];
    for (name, spec, radius, h) in cases {
        let imm = spec.build()?;
        let mesh = MeshDomain::disc([0.0, 0.0], radius, nr, nt)?;
        let b = convex_field_bound(imm.as_ref(), &position, &mesh, 1.0, h)?;
        ctx.upper_bound(&format!("convex-field.{name}"), "convex field bound on h", b.lhs, b.rhs, tolerances::INEQUALITY.max(1e-9 * b.rhs.abs()));
        let scale = b.identity.flux.abs().max(1.0);
        ctx.small(&format!("convex-field.identity.{name}"), "divergence theorem for the projected field", b.identity.residual / scale, FIELD_IDENTITY);
    }
    Ok(())
}
