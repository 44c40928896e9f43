//! Network design for group-to-group anycast.
//!
//! A solution is a set of broadcast *balls* (one threshold per source) plus
//! point-to-point *funnel trees* that route covered terminals back to their
//! source. The crate provides:
//!
//! * the instance/solution model with cost evaluation and validation ([`model`]),
//! * tree primitives: MST, exact Steiner trees, rooted k-MST ([`mst_steiner`]),
//! * Cover-and-Grow for Euclidean instances ([`cover_grow`]),
//! * the density greedy for singleton destination groups ([`g2s`]),
//! * the reduction to generalized set-connectivity with an exact solver ([`reduction`]),
//! * four baseline heuristics ([`heuristics`]) and a brute-force oracle ([`oracle`]),
//! * instance generators ([`generate`]) and the experiment runner ([`experiment`]).

pub mod cover_grow;
pub mod error;
pub mod experiment;
pub mod g2s;
pub mod generate;
pub mod heuristics;
pub mod model;
pub mod mst_steiner;
pub mod oracle;
pub mod reduction;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    decompose_demands, euclidean_weights, evaluate_cost, merge_solutions, metric_completion, validate_solution,
    CostBreakdown, CostMatrix, EuclideanLayout, FeasibilityReport, Funnel, Instance, InstanceFile, MetricClosure,
    Solution, SubInstance, Violation, ViolationReason, Witness, EPS,
};
pub use mst_steiner::{exact_steiner_tree, k_mst, mst, KMstMode, Tree};
pub use solver::{SolveOutput, SolverKind};

