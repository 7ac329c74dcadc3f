//! Solver-agnostic toolkit for robust waste-bin network design.
//!
//! The pipeline: build the bi-objective location/sizing MILP for an
//! instance, optionally rewrite it into its budget-of-uncertainty robust
//! counterpart, trace Pareto frontiers with the augmented epsilon-constraint
//! method over a conservatism/uncertainty scenario grid, and stress-test
//! the resulting designs with Monte Carlo feasibility simulation.

pub mod builder;
pub mod evaluation;
pub mod generator;
pub mod instance;
pub mod model;
pub mod moo;
pub mod mps;
pub mod report;
pub mod robust;
pub mod solver;

pub use builder::{build_deterministic, decode, evaluate, Solution, VariableIndex};
pub use generator::{generate, GenerationProfile};
pub use instance::{Instance, ScenarioConfig};
pub use model::{ModelIR, WarmStart};
pub use moo::{ParetoSet, PayoffTable};
pub use solver::{solve, BackendKind, SolveConfig, SolveResult, SolveStatus};
