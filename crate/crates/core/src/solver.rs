//! Name-based access to every solver. Instances with several source groups
//! are split into star subinstances, solved one by one and merged.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cover_grow::cover_and_grow;
use crate::error::{Error, Result};
use crate::g2s::g2s_greedy_traced;
use crate::heuristics::{smallest_edge, smallest_increment, t_adaptive, t_centric};
use crate::model::{decompose_demands, merge_solutions, Instance, Solution};
use crate::oracle::brute_force_optimal;
use crate::reduction::{build_set_connectivity, lift_solution, solve_set_connectivity_exact};

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub solution: Solution,
    /// Set when g2s_greedy fell back to the heuristic k-MST in some round.
    pub approximate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    CoverAndGrow,
    G2sGreedy,
    SmallestEdge,
    TCentric,
    TAdaptive,
    SmallestIncrement,
    /// Exact set-connectivity on the derived instance, lifted back.
    SetConnectivity,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 8] = [
        SolverKind::CoverAndGrow,
        SolverKind::G2sGreedy,
        SolverKind::SmallestEdge,
        SolverKind::TCentric,
        SolverKind::TAdaptive,
        SolverKind::SmallestIncrement,
        SolverKind::SetConnectivity,
        SolverKind::Oracle,
    ];

    /// The solvers compared in the benchmark protocol.
    pub const BENCH: [SolverKind; 5] = [
        SolverKind::CoverAndGrow,
        SolverKind::SmallestEdge,
        SolverKind::TCentric,
        SolverKind::TAdaptive,
        SolverKind::SmallestIncrement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::CoverAndGrow => "cover_and_grow",
            SolverKind::G2sGreedy => "g2s_greedy",
            SolverKind::SmallestEdge => "smallest_edge",
            SolverKind::TCentric => "t_centric",
            SolverKind::TAdaptive => "t_adaptive",
            SolverKind::SmallestIncrement => "smallest_increment",
            SolverKind::SetConnectivity => "set_connectivity",
            SolverKind::Oracle => "oracle",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|k| k.name()).collect()
    }

    pub fn solve(self, inst: &Instance) -> Result<Solution> {
        Ok(self.solve_detailed(inst)?.solution)
    }

    pub fn solve_detailed(self, inst: &Instance) -> Result<SolveOutput> {
        if self == SolverKind::Oracle {
            return Ok(SolveOutput {
                solution: brute_force_optimal(inst)?.solution,
                approximate: false,
            });
        }
        let mut parts = Vec::new();
        let mut approximate = false;
        for sub in decompose_demands(inst) {
            let sol = if self == SolverKind::G2sGreedy {
                let run = g2s_greedy_traced(&sub.instance)?;
                approximate |= run.approximate();
                run.solution
            } else {
                self.solve_star(&sub.instance)?
            };
            parts.push((sub, sol));
        }
        Ok(SolveOutput {
            solution: merge_solutions(inst, &parts),
            approximate,
        })
    }

    fn solve_star(self, inst: &Instance) -> Result<Solution> {
        match self {
            SolverKind::CoverAndGrow => cover_and_grow(inst),
            SolverKind::G2sGreedy => Ok(g2s_greedy_traced(inst)?.solution),
            SolverKind::SmallestEdge => smallest_edge(inst),
            SolverKind::TCentric => t_centric(inst),
            SolverKind::TAdaptive => t_adaptive(inst),
            SolverKind::SmallestIncrement => smallest_increment(inst),
            SolverKind::SetConnectivity => {
                let sc = build_set_connectivity(inst)?;
                let edges = solve_set_connectivity_exact(&sc)?;
                lift_solution(inst, &sc, &edges.edges)
            }
            SolverKind::Oracle => Ok(brute_force_optimal(inst)?.solution),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown solver {s:?}; registered: {}",
                    Self::names().join(", ")
                ))
            })
    }
}
