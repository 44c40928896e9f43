//! Instances, solutions, cost evaluation and feasibility checks.

mod instance;
mod matrix;
mod metric;
mod solution;

pub use instance::{decompose_demands, merge_solutions, Instance, InstanceFile, SubInstance};
pub use matrix::CostMatrix;
pub use metric::{euclidean_weights, metric_completion, EuclideanLayout, MetricClosure};
pub use solution::{
    evaluate_cost, validate_solution, CostBreakdown, FeasibilityReport, Funnel, Solution,
    Violation, ViolationReason, Witness,
};

/// Absolute tolerance for comparing costs.
pub const EPS: f64 = 1e-9;

/// `a <= b` up to [`EPS`].
#[inline]
pub fn le_eps(a: f64, b: f64) -> bool {
    a <= b + EPS
}

/// `|a - b| <= EPS`.
#[inline]
pub fn eq_eps(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}
