//! Immersions of a parameter domain into an ambient space.

use super::cmc::CmcGraph;
use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::exprmap::{ExprMap, Jet2};
use serde::{Deserialize, Serialize};

/// A smooth map from parameters `x ∈ ℝ^m` to ambient coordinates, with
/// exact second-order jets.
pub trait Immersion: Send + Sync {
    fn param_dim(&self) -> usize;
    fn ambient(&self) -> &AmbientSpace;
    /// One jet per ambient coordinate.
    fn jet(&self, x: &[f64]) -> Result<Vec<Jet2>>;
    fn label(&self) -> String;

    fn point(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jet(x)?.iter().map(|j| j.value).collect())
    }
}

/// An immersion given by one expression per ambient coordinate.
#[derive(Debug, Clone)]
pub struct ExprImmersion {
    map: ExprMap,
    ambient: AmbientSpace,
    label: String,
}

impl ExprImmersion {
    pub fn new(map: ExprMap, ambient: AmbientSpace, label: impl Into<String>) -> Result<Self> {
        if map.nout() != ambient.dim() {
            return Err(Error::Dimension(format!(
                "immersion has {} components, ambient dimension is {}",
                map.nout(),
                ambient.dim()
            )));
        }
        if map.nvars() == 0 || map.nvars() > ambient.dim() {
            return Err(Error::Dimension(format!(
                "parameter dimension {} does not fit into ambient dimension {}",
                map.nvars(),
                ambient.dim()
            )));
        }
        Ok(Self { map, ambient, label: label.into() })
    }

    pub fn parse<S: AsRef<str>>(sources: &[S], m: usize, ambient: AmbientSpace, label: &str) -> Result<Self> {
        Self::new(ExprMap::parse(sources, m)?, ambient, label)
    }

    /// The graph `x ↦ (x, f(x))`.
    pub fn graph<S: AsRef<str>>(f: &[S], m: usize, ambient: AmbientSpace, label: &str) -> Result<Self> {
        let mut src: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        src.extend(f.iter().map(|s| s.as_ref().to_string()));
        Self::parse(&src, m, ambient, label)
    }

    pub fn map(&self) -> &ExprMap {
        &self.map
    }
}

impl Immersion for ExprImmersion {
    fn param_dim(&self) -> usize {
        self.map.nvars()
    }

    fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    fn jet(&self, x: &[f64]) -> Result<Vec<Jet2>> {
        self.map.eval_jet2(x)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Named immersions available from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "kebab-case")]
pub enum ImmersionSpec {
    /// The plane `z = slope · x` in `ℝ³`.
    Plane { slope: f64 },
    /// Upper hemisphere of radius `radius` as a graph over the disc.
    SphereGraph { radius: f64 },
    /// Upper half of the catenoid `r = cosh z`, a graph over `r > 1`.
    Catenoid,
    /// The helicoid `z = atan(y / x)` over `x > 0`.
    Helicoid,
    /// Enneper's minimal surface.
    Enneper,
    /// Graph of `f : ℝ^m → ℝ^n` into Euclidean `ℝ^{m+n}`.
    Graph { m: usize, f: Vec<String> },
    /// Arbitrary expressions into Euclidean space.
    Expressions { m: usize, components: Vec<String> },
    /// The constant mean curvature graph `Γ_{f_c}` in `ℍ^m × ℝ`.
    CmcGraph { m: usize, c: f64 },
}

impl ImmersionSpec {
    pub fn build(&self) -> Result<Box<dyn Immersion>> {
        let e3 = AmbientSpace::Euclidean(3);
        let imm: Box<dyn Immersion> = match self {
            ImmersionSpec::Plane { slope } => {
                Box::new(ExprImmersion::graph(&[format!("{slope:?}*x1")], 2, e3, "plane")?)
            }
            ImmersionSpec::SphereGraph { radius } => {
                if *radius <= 0.0 {
                    return Err(Error::Invalid("sphere radius must be positive".into()));
                }
                let r2 = radius * radius;
                Box::new(ExprImmersion::graph(
                    &[format!("sqrt({r2:?} - x1^2 - x2^2)")],
                    2,
                    e3,
                    "sphere-graph",
                )?)
            }
            ImmersionSpec::Catenoid => Box::new(ExprImmersion::graph(
                &["log(sqrt(x1^2 + x2^2) + sqrt(x1^2 + x2^2 - 1))"],
                2,
                e3,
                "catenoid",
            )?),
            ImmersionSpec::Helicoid => {
                Box::new(ExprImmersion::graph(&["atan(x2 / x1)"], 2, e3, "helicoid")?)
            }
            ImmersionSpec::Enneper => Box::new(ExprImmersion::parse(
                &["x1 - x1^3/3 + x1*x2^2", "x2 - x2^3/3 + x1^2*x2", "x1^2 - x2^2"],
                2,
                e3,
                "enneper",
            )?),
            ImmersionSpec::Graph { m, f } => Box::new(ExprImmersion::graph(
                f,
                *m,
                AmbientSpace::Euclidean(m + f.len()),
                "graph",
            )?),
            ImmersionSpec::Expressions { m, components } => Box::new(ExprImmersion::parse(
                components,
                *m,
                AmbientSpace::Euclidean(components.len()),
                "expressions",
            )?),
            ImmersionSpec::CmcGraph { m, c } => Box::new(CmcGraph::new(*m, *c)?),
        };
        Ok(imm)
    }
}
