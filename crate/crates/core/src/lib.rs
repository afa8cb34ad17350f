//! Upper bounds on submodular set functions from graphical models, and the
//! convex saddle-point relaxation they induce for submodular maximization.

pub mod baselines;
pub mod error;
pub mod extensions;
pub mod format;
pub mod graph;
pub mod instances;
pub mod polytope;
pub mod props;
pub mod saddle;
pub mod setfn;
pub mod subset;

pub use error::{Error, Result};
pub use extensions::{solve_cardinality, solve_difference, DifferenceInstance};
pub use saddle::{solve, InnerMethod, Solution, SolverConfig, TraceRecord};
pub use setfn::{SetFunction, SetFunctionInstance};
pub use subset::Subset;
