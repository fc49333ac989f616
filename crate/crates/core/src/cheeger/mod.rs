//! Discrete and continuous estimates of the Cheeger constant
//! `h = inf A(∂D)/V(D)`.
//!
//! * [`graph`]: weighted graphs, exhaustive search, sweeps and the
//!   Dirichlet eigenvalue bound `h ≤ 2√λ₁`.
//! * [`profile`]: metric balls in Euclidean and hyperbolic model spaces.
//! * [`level`]: level-set bounds on meshed submanifolds and the co-area formula.
//! * [`convex`]: the strongly convex vector field bound.

pub mod convex;
pub mod graph;
pub mod level;
pub mod profile;

pub use convex::{convex_field_bound, ConvexFieldBound, FieldIdentity};
pub use graph::{
    bruteforce_cheeger, dirichlet_cheeger, dirichlet_lambda1, dirichlet_operator, indicator_profile, random_graph,
    sweep_cheeger, Convention, DirichletEigen, WeightedGraph, BRUTEFORCE_MAX_VERTICES,
};
pub use level::{coarea_check, level_sweep, CoareaCheck, LevelBound, LevelSide, LevelSweep, MeshField, Triangulation};
pub use profile::{ball_ratio_profile, sphere_area, BallProfile, BallSample, ModelSpace};

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    Sweep,
    BallProfile,
}

/// What realizes an estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    Vertices(Vec<usize>),
    /// A sublevel set `{f ≤ level}` or its complement.
    Level { level: f64, vertices: Vec<usize> },
    Radius(f64),
}

impl Witness {
    pub fn vertices(&self) -> Option<&[usize]> {
        match self {
            Witness::Vertices(v) | Witness::Level { vertices: v, .. } => Some(v),
            Witness::Radius(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerEstimate {
    pub value: f64,
    pub witness: Witness,
    pub method: Method,
    pub convention: Convention,
}

impl CheegerEstimate {
    /// Recomputes `A(∂S)/V(S)` of a vertex witness on `g`.
    pub fn reevaluate(&self, g: &WeightedGraph) -> Result<f64> {
        let set = self
            .witness
            .vertices()
            .ok_or_else(|| Error::Invalid("a radius witness has no vertex set".into()))?;
        g.ratio(set)
    }
}
