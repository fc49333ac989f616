//! Fixed inputs shared by the benchmarks.

use calib_core::calibrations::{make_calibration, CalibrationKind};
use calib_core::cheeger::{random_graph, WeightedGraph};
use calib_core::linalg::seeded;
use calib_core::MultiVector;

/// Seed of every benchmark input.
pub const SEED: u64 = 7;

/// A connected random graph with `n` vertices.
pub fn graph(n: usize) -> WeightedGraph {
    random_graph(&mut seeded(SEED), n, 0.3)
}

/// The form of a catalog calibration.
pub fn calibration_form(kind: CalibrationKind) -> MultiVector {
    make_calibration(kind).expect("catalog calibrations build").form
}
