//! Submanifold geometry: immersions, frames, the Omega-angle and the
//! identities it satisfies.

mod calibrated;
pub mod cmc;
mod frame;
pub mod graph;
pub mod identities;
mod immersion;
pub mod kahler;
pub mod mesh;
mod secondform;

pub use calibrated::{CalibratedPoint, MorphismData, QForms};
pub use frame::{frame_at, induced_metric, intrinsic_christoffel, FramedPoint};
pub use immersion::{ExprImmersion, Immersion, ImmersionSpec};
pub use mesh::{integral_isoperimetric, MeshDomain};
pub use secondform::SecondForm;

use crate::error::Result;
use crate::exterior::MultiVector;

/// `cosθ = Ω(X_1, …, X_m)` on the direct tangent frame at `x`.
pub fn omega_angle(imm: &dyn Immersion, form: &MultiVector, x: &[f64]) -> Result<f64> {
    frame_at(imm, x)?.cos_theta(form)
}

/// `Φ`, `Ψ`, `B_Φ` and `∇^⊥H` at `x`.
pub fn phi_psi(imm: &dyn Immersion, form: &MultiVector, x: &[f64], step: f64) -> Result<MorphismData> {
    let fp = frame_at(imm, x)?;
    let cp = CalibratedPoint::from_framed(&fp, form)?;
    let mut md = cp.morphisms(&fp.b);
    md.nabla_h = Some(identities::nabla_perp_h(imm, &fp, step)?.0);
    Ok(md)
}

/// `Q̃`, `Q`, `Q̂` of the second fundamental form at `x`.
pub fn q_forms(imm: &dyn Immersion, form: &MultiVector, x: &[f64]) -> Result<QForms> {
    let fp = frame_at(imm, x)?;
    CalibratedPoint::from_framed(&fp, form)?.q_forms(&fp.b)
}
