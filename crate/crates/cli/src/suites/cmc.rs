//! Rotationally symmetric graphs of constant mean curvature in `ℍ^m × ℝ`.

use super::Ctx;
use crate::config::CmcCase;
use calib_core::linalg::substream;
use calib_core::subgeom::cmc::{cmc_profile, cmc_verify};
use calib_core::{tolerances, Result};
use rand::Rng;

const SAMPLES: usize = 50;
/// Largest Poincaré radius of the sample points.
const MAX_RADIUS: f64 = 0.85;

fn default_cases() -> Vec<CmcCase> {
    vec![CmcCase { m: 2, c: 0.5 }, CmcCase { m: 2, c: 1.0 }, CmcCase { m: 3, c: 1.5 }]
}

pub fn run(ctx: &mut Ctx) -> Result<()> {
    let cases = ctx.cfg.cmc.clone().unwrap_or_else(default_cases);
    let count = ctx.samples(SAMPLES);
    for (ci, case) in cases.iter().enumerate() {
        let mut rng = substream(ctx.cfg.seed, ci as u64);
        let points: Vec<Vec<f64>> = (0..count)
            .map(|_| {
                let r = rng.random_range(0.0..MAX_RADIUS);
                let mut x: Vec<f64> = (0..case.m).map(|_| rng.random_range(-1.0..1.0)).collect();
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                x.iter_mut().for_each(|v| *v *= r / norm);
                x
            })
            .collect();
        let v = cmc_verify(case.m, case.c, &points)?;
        let tag = format!("m{}-c{}", case.m, case.c);
        ctx.small(&format!("mean-curvature.{tag}"), "g(H, nu) = c/m", v.max_residual, tolerances::CMC_MEAN_CURVATURE);
        ctx.holds(&format!("angle-bound.{tag}"), "cos(theta) > sqrt((m - 1 - |c|)/(m - 1))", v.bound_ok);
    }
    for r in [0.3, 1.0, 2.5, 6.0] {
        let v = cmc_profile(2, 1.0, r, tolerances::QUADRATURE_ABS)?;
        let exact = 2.0 * ((r / 2.0).cosh() - 1.0);
        ctx.relative(&format!("profile.m2-c1.r{r}"), "profile 2(cosh(r/2) - 1)", v, exact, 1.0, tolerances::CMC_PROFILE);
    }
    Ok(())
}
