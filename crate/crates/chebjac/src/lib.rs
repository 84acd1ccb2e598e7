//! Scheduled-relaxation solvers for structured-grid elliptic problems.
//!
//! The core idea: a cycle of weighted Jacobi sweeps whose relaxation
//! weights are the reciprocals of Chebyshev roots mapped onto the
//! operator's spectral interval contracts every error mode by a factor
//! that is known in closed form before the first sweep runs. The crate
//! provides the weight schedules and their convergence predictions
//! ([`chebyshev`]), the stencil symbols and spectral bounds that feed them
//! ([`stencil`]), round-off-safe weight orderings ([`ordering`]), the
//! sweep drivers plus classical Jacobi/Gauss-Seidel/SOR baselines
//! ([`solver`]), and a small registry of model problems ([`problems`]).

pub mod chebyshev;
pub mod error;
pub mod grid;
pub mod ordering;
pub mod problems;
pub mod solver;
pub mod stencil;

pub use chebyshev::{
    amplification, amplification_bound, amplification_product, estimate_sor_omega,
    geometric_mean_inverse, harmonic_mean, log_abs_chebyshev, make_weights, min_cycle_size,
    parse_schedule, per_iteration_factor, rescale_kappa, sor_estimate_limit, write_schedule,
    AmplificationProfile, DiagonalSign, OrderingTag, WeightSchedule,
};
pub use error::{Error, Result};
pub use grid::{AxisBc, BoundaryFn, FaceBc, Field, Grid, Layout, Side};
pub use ordering::{
    apply_ordering, default_plan, explicit, interleaved, lebedev_finogenov, natural, parse_plan,
    OrderingPlan,
};
pub use problems::{
    laplace2d_neumann, poisson2d_exp, poisson3d_sphere, poisson3d_sphere_octant,
};
pub use solver::{
    cjm_solve, classic_solve, sor_optimal_omega, weighted_jacobi_sweep, write_residual_csv,
    ClassicMethod, CycleTarget, OrderingChoice, Problem, SolveOptions, SolverReport,
};
pub use stencil::{Family, SpectralBounds, StencilSpec};
