//! Comass of every calibration in the catalog.

use super::Ctx;
use calib_core::calibrations::{make_calibration, CalibrationKind};
use calib_core::exterior::{comass, ComassOptions};
use calib_core::{tolerances, Result};
use rayon::prelude::*;

pub fn run(ctx: &mut Ctx) -> Result<()> {
    let seed = ctx.cfg.seed;
    let restarts = ctx.samples(tolerances::COMASS_RESTARTS);
    let results: Vec<_> = CalibrationKind::catalog()
        .into_par_iter()
        .enumerate()
        .map(|(i, kind)| {
            let cal = make_calibration(kind)?;
            let opts = ComassOptions {
                restarts,
                grad_tol: tolerances::COMASS_GRAD,
                max_iter: tolerances::COMASS_MAX_ITER,
                seed: seed.wrapping_add(i as u64),
            };
            let r = comass(&cal.form, &opts);
            let model = cal.eval(&cal.model_frame)?;
            Ok((cal.name, r.value, model))
        })
        .collect::<Result<_>>()?;
    for (name, value, model) in results {
        ctx.equality(&format!("comass.{name}"), "comass of a calibration is one", value, 1.0, tolerances::COMASS_CATALOG);
        ctx.upper_bound(&format!("model-frame.{name}"), "model frame is calibrated", 1.0 - tolerances::MODEL_FRAME, model, 0.0);
    }
    Ok(())
}
