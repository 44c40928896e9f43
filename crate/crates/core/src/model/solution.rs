use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{le_eps, Instance};
use crate::error::{Error, Result};

/// A broadcast ball at `source` together with the funnel tree rooted there.
#[derive(Debug, Clone, PartialEq)]
pub struct Funnel {
    pub source: usize,
    /// Broadcast threshold `C_s`; every terminal `t` with `c(s, t) <= C_s`
    /// hears the broadcast.
    pub ball: f64,
    pub edges: Vec<(usize, usize)>,
}

impl Funnel {
    /// Nodes of the tree, always including the source.
    pub fn nodes(&self) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        set.insert(self.source);
        set
    }
}

/// The `(source, terminal)` pair certifying demand `demand`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub demand: usize,
    pub source: usize,
    pub terminal: usize,
}

/// Balls plus funnel trees. A node that sources several groups may appear
/// in more than one funnel; each copy is paid for separately.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SolutionFile", into = "SolutionFile")]
pub struct Solution {
    pub funnels: Vec<Funnel>,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BallEntry {
    source: usize,
    cost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TreeEntry {
    source: usize,
    edges: Vec<(usize, usize)>,
}

/// Wire format: `balls[i]` and `funnel_trees[i]` describe the same funnel.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SolutionFile {
    balls: Vec<BallEntry>,
    funnel_trees: Vec<TreeEntry>,
    #[serde(default)]
    witnesses: Vec<Witness>,
}

impl TryFrom<SolutionFile> for Solution {
    type Error = Error;

    fn try_from(f: SolutionFile) -> Result<Self> {
        if f.balls.len() != f.funnel_trees.len() {
            return Err(Error::InvalidSolution(format!(
                "{} balls but {} funnel trees",
                f.balls.len(),
                f.funnel_trees.len()
            )));
        }
        let funnels = f
            .balls
            .into_iter()
            .zip(f.funnel_trees)
            .map(|(b, t)| {
                if b.source != t.source {
                    return Err(Error::InvalidSolution(format!(
                        "ball at {} paired with tree at {}",
                        b.source, t.source
                    )));
                }
                Ok(Funnel {
                    source: b.source,
                    ball: b.cost,
                    edges: t.edges,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Solution {
            funnels,
            witnesses: f.witnesses,
        })
    }
}

impl From<Solution> for SolutionFile {
    fn from(s: Solution) -> Self {
        SolutionFile {
            balls: s
                .funnels
                .iter()
                .map(|f| BallEntry {
                    source: f.source,
                    cost: f.ball,
                })
                .collect(),
            funnel_trees: s
                .funnels
                .into_iter()
                .map(|f| TreeEntry {
                    source: f.source,
                    edges: f.edges,
                })
                .collect(),
            witnesses: s.witnesses,
        }
    }
}

impl Solution {
    pub fn from_json(text: &str) -> Result<Solution> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub ball_cost: f64,
    pub funnel_cost: f64,
    pub total: f64,
}

/// Ball thresholds plus funnel edge costs, each funnel paying for its own
/// copy of an edge.
pub fn evaluate_cost(instance: &Instance, solution: &Solution) -> Result<CostBreakdown> {
    let n = instance.num_nodes();
    let mut ball_cost = 0.0;
    let mut funnel_cost = 0.0;
    for f in &solution.funnels {
        if f.source >= n {
            return Err(Error::InvalidSolution(format!("unknown source node {}", f.source)));
        }
        if !(f.ball >= 0.0 && f.ball.is_finite()) {
            return Err(Error::InvalidSolution(format!(
                "ball at {} has invalid cost {}",
                f.source, f.ball
            )));
        }
        ball_cost += f.ball;
        for &(u, v) in &f.edges {
            if u >= n || v >= n {
                return Err(Error::InvalidSolution(format!("edge ({u}, {v}) has an unknown node")));
            }
            funnel_cost += instance.d(u, v);
        }
    }
    Ok(CostBreakdown {
        ball_cost,
        funnel_cost,
        total: ball_cost + funnel_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    /// No source of the group reaches any terminal of the destination group.
    NoBallCoverage,
    /// A terminal is inside a ball but not in that source's funnel tree.
    TerminalNotInTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub demand: usize,
    pub source_group: usize,
    pub dest_group: usize,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Structural problems with individual funnels (not a tree, unknown
    /// node, bad ball). Such funnels satisfy no demand.
    pub funnel_errors: Vec<String>,
}

fn check_funnel(n: usize, f: &Funnel) -> std::result::Result<(), String> {
    if f.source >= n {
        return Err(format!("funnel source {} is not a node", f.source));
    }
    if !(f.ball >= 0.0 && f.ball.is_finite()) {
        return Err(format!("funnel at {} has invalid ball {}", f.source, f.ball));
    }
    if let Some(&(u, v)) = f.edges.iter().find(|&&(u, v)| u >= n || v >= n) {
        return Err(format!("funnel at {} has edge ({u}, {v}) with an unknown node", f.source));
    }
    let nodes: Vec<usize> = f.nodes().into_iter().collect();
    if f.edges.len() + 1 != nodes.len() {
        return Err(format!(
            "funnel at {} has {} edges over {} nodes (not a tree)",
            f.source,
            f.edges.len(),
            nodes.len()
        ));
    }
    let mut parent: std::collections::BTreeMap<usize, usize> = nodes.iter().map(|&v| (v, v)).collect();
    fn find(p: &mut std::collections::BTreeMap<usize, usize>, mut x: usize) -> usize {
        while p[&x] != x {
            let up = p[&p[&x]];
            p.insert(x, up);
            x = up;
        }
        x
    }
    for &(u, v) in &f.edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return Err(format!("funnel at {} contains a cycle through ({u}, {v})", f.source));
        }
        parent.insert(a, b);
    }
    Ok(())
}

/// Checks every demand for a source whose ball reaches a destination
/// terminal that also lies in that source's funnel tree.
pub fn validate_solution(instance: &Instance, solution: &Solution) -> FeasibilityReport {
    let n = instance.num_nodes();
    let mut funnel_errors = Vec::new();
    let mut usable = Vec::new();
    for f in &solution.funnels {
        match check_funnel(n, f) {
            Ok(()) => usable.push((f, f.nodes())),
            Err(e) => funnel_errors.push(e),
        }
    }
    let mut violations = Vec::new();
    for (k, &(i, j)) in instance.demands.iter().enumerate() {
        let sources = &instance.source_groups[i];
        let terminals = &instance.dest_groups[j];
        let mut in_ball = false;
        let mut satisfied = false;
        for (f, nodes) in usable.iter().filter(|(f, _)| sources.contains(&f.source)) {
            for &t in terminals {
                if le_eps(instance.c(f.source, t), f.ball) {
                    in_ball = true;
                    if nodes.contains(&t) {
                        satisfied = true;
                    }
                }
            }
        }
        if !satisfied {
            violations.push(Violation {
                demand: k,
                source_group: i,
                dest_group: j,
                reason: if in_ball {
                    ViolationReason::TerminalNotInTree
                } else {
                    ViolationReason::NoBallCoverage
                },
            });
        }
    }
    FeasibilityReport {
        ok: violations.is_empty() && funnel_errors.is_empty(),
        violations,
        funnel_errors,
    }
}
