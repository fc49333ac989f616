//! Numerical tolerances and step sizes used across the crate.
//!
//! Every check that compares two computed quantities uses one of these
//! constants so that thresholds stay in one place.

/// Exact algebraic identities evaluated in floating point (forms on frames).
pub const ALGEBRAIC: f64 = 1e-12;

/// Identities that chain several dense linear-algebra steps.
pub const LINEAR_ALGEBRA: f64 = 1e-10;

/// Pointwise inequality slack for randomized bound checks.
pub const INEQUALITY: f64 = 1e-9;

/// Frame degeneracy: smallest admissible singular value of a frame.
pub const FRAME_RANK: f64 = 1e-10;

/// Comass optimizer: stop once the Riemannian gradient norm falls below this.
pub const COMASS_GRAD: f64 = 1e-9;

/// Comass optimizer: number of random restarts.
pub const COMASS_RESTARTS: usize = 200;

/// Comass optimizer: iteration cap per restart.
pub const COMASS_MAX_ITER: usize = 5000;

/// Relative step for central-difference Christoffel symbols of a metric.
pub const CHRISTOFFEL_STEP: f64 = 1e-5;

/// Base step for Richardson-extrapolated normal derivatives of H.
pub const NORMAL_DERIVATIVE_STEP: f64 = 1e-4;

/// Default grid step of the divergence-form Laplacian.
pub const LAPLACIAN_STEP: f64 = 1e-3;

/// Relative residual allowed for the Laplacian of the Omega-angle.
pub const LAPLACIAN_RELATIVE: f64 = 5e-3;

/// Minimum observed convergence order of the Laplacian under refinement.
pub const LAPLACIAN_ORDER: f64 = 1.8;

/// Mean curvature of the constant-mean-curvature graphs.
pub const CMC_MEAN_CURVATURE: f64 = 1e-6;

/// Closed-form profile comparison of the constant-mean-curvature graphs.
pub const CMC_PROFILE: f64 = 1e-8;

/// Absolute accuracy requested from adaptive quadrature.
pub const QUADRATURE_ABS: f64 = 1e-13;

/// Relative accuracy of mesh quadrature against closed forms.
pub const MESH_QUADRATURE: f64 = 1e-6;

/// Contraction identities on product ambients.
pub const CONTRACTION: f64 = 1e-8;

/// Group-invariance deviation of the quaternionic form.
pub const GROUP_INVARIANCE: f64 = 1e-9;

/// Deviation a generic rotation must exceed to count as breaking invariance.
pub const GROUP_BREAKING: f64 = 1e-3;

/// Comass catalog: allowed distance of the optimized comass from one.
pub const COMASS_CATALOG: f64 = 1e-3;

/// Model frames of the catalog must reach at least `1 - MODEL_FRAME`.
pub const MODEL_FRAME: f64 = 1e-9;

/// Finite-difference gradient check of expression jets (relative).
pub const JET_GRADIENT: f64 = 1e-6;

/// Finite-difference Hessian check of expression jets (relative).
pub const JET_HESSIAN: f64 = 1e-4;

/// Eigenvalue clustering used to count multiplicities.
pub const EIGEN_CLUSTER: f64 = 1e-8;

/// Dirichlet eigenvalue: inverse-iteration convergence.
pub const INVERSE_ITERATION: f64 = 1e-14;

/// Ball isoperimetric profile: relative distance to the asymptotic ratio.
pub const BALL_PROFILE: f64 = 0.05;
