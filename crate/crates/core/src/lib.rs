//! Numerical toolkit for calibrated geometry.
//!
//! * [`exterior`]: multivectors, wedge, Hodge star, comass.
//! * [`exprmap`]: expression parser with second-order jets.
//! * [`ambient`]: Euclidean, `ℍ^m × ℝ` and product Riemannian ambients.
//! * [`calibrations`]: the standard calibration catalog and octonions.
//! * [`subgeom`]: frames, second fundamental form, Omega-angle identities.
//! * [`quatlab`]: the quaternionic fundamental form on `ℝ^{4n}`.
//! * [`cheeger`]: discrete and continuous isoperimetric estimates.

#![allow(clippy::needless_range_loop)]
pub mod ambient;
pub mod calibrations;
pub mod cheeger;
pub mod error;
pub mod exprmap;
pub mod exterior;
pub mod linalg;
pub mod quad;
pub mod quatlab;
pub mod report;
pub mod subgeom;
pub mod tolerances;

pub use error::{Error, Result};
pub use exprmap::{ExprMap, Jet2};
pub use exterior::MultiVector;
pub use nalgebra::{DMatrix, DVector};
