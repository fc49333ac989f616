//! Exterior algebra on `ℝ^N`: multivectors and constant forms, wedge,
//! Hodge star, evaluation on frames and comass maximization.

mod comass;
mod multivector;

pub use comass::{comass, ComassOptions, ComassResult, FormEvaluator};
pub use multivector::{
    binomial, orientation_sign, small_det, sort_sign, subset_rank, subsets, MultiVector,
};
