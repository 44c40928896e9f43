//! Cover-and-Grow: greedy set cover over candidate balls, each selected ball
//! paying for an MST funnel over one terminal per newly covered group.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{le_eps, Funnel, Instance, Solution, EPS};
use crate::mst_steiner::mst;

/// A ball around `source` whose threshold equals the broadcast cost of some
/// demanded terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateBall {
    pub source: usize,
    pub radius_cost: f64,
    /// Destination-group indices (into `Instance::dest_groups`) with a
    /// terminal inside the ball.
    pub covered_groups: Vec<usize>,
}

impl CandidateBall {
    pub fn ratio(&self) -> f64 {
        self.radius_cost / self.covered_groups.len() as f64
    }
}

/// One greedy selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Iteration {
    pub ball: CandidateBall,
    /// Weight of the MST over the source and the representatives chosen in
    /// this iteration, before merging with earlier picks of the same source.
    pub tree_weight: f64,
}

#[derive(Debug, Clone)]
pub struct CoverGrowRun {
    pub solution: Solution,
    pub iterations: Vec<Iteration>,
}

fn sorted_sources(sources: &[usize]) -> Vec<usize> {
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

fn candidates_over(inst: &Instance, sources: &[usize], open: &[usize]) -> Vec<CandidateBall> {
    let mut out = Vec::new();
    for &s in sources {
        // Nearest terminal of each open group.
        let reach: Vec<(usize, f64)> = open
            .iter()
            .map(|&j| {
                let r = inst.dest_groups[j]
                    .iter()
                    .map(|&t| inst.c(s, t))
                    .fold(f64::INFINITY, f64::min);
                (j, r)
            })
            .collect();
        let mut radii: Vec<f64> = open
            .iter()
            .flat_map(|&j| inst.dest_groups[j].iter().map(move |&t| inst.c(s, t)))
            .collect();
        radii.sort_by(f64::total_cmp);
        let mut last = f64::NEG_INFINITY;
        for r in radii {
            if r <= last + EPS {
                continue;
            }
            last = r;
            let covered: Vec<usize> = reach
                .iter()
                .filter(|&&(_, rj)| le_eps(rj, r))
                .map(|&(j, _)| j)
                .collect();
            out.push(CandidateBall {
                source: s,
                radius_cost: r,
                covered_groups: covered,
            });
        }
    }
    out
}

/// Every candidate ball for the demanded groups of a star instance, sorted
/// by `(source, radius_cost)`.
pub fn candidate_balls(inst: &Instance) -> Result<Vec<CandidateBall>> {
    let (sources, groups) = inst.star()?;
    Ok(candidates_over(inst, &sorted_sources(sources), &groups))
}

// Ratio, then smaller radius, then lower source id.
fn better(a: &CandidateBall, b: &CandidateBall) -> bool {
    let (ra, rb) = (a.ratio(), b.ratio());
    if ra < rb - EPS {
        return true;
    }
    if ra > rb + EPS {
        return false;
    }
    if a.radius_cost < b.radius_cost - EPS {
        return true;
    }
    if a.radius_cost > b.radius_cost + EPS {
        return false;
    }
    a.source < b.source
}

struct SourceState {
    ball: f64,
    nodes: BTreeSet<usize>,
}

pub fn cover_and_grow(inst: &Instance) -> Result<Solution> {
    Ok(cover_and_grow_traced(inst)?.solution)
}

/// Runs Cover-and-Grow on a Euclidean star instance and records every
/// iteration.
pub fn cover_and_grow_traced(inst: &Instance) -> Result<CoverGrowRun> {
    if !inst.is_euclidean() {
        return Err(Error::UnsupportedInstance(
            "cover_and_grow needs weights derived from planar coordinates".into(),
        ));
    }
    let (sources, groups) = inst.star()?;
    let sources = sorted_sources(sources);
    let d = inst.funnel_costs();
    let mut open: Vec<usize> = groups;
    let mut states: BTreeMap<usize, SourceState> = BTreeMap::new();
    let mut witness: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut iterations = Vec::new();

    while !open.is_empty() {
        let pick = candidates_over(inst, &sources, &open)
            .into_iter()
            .reduce(|best, c| if better(&c, &best) { c } else { best })
            .ok_or_else(|| Error::InvalidInput("no source can reach the open groups".into()))?;
        let s = pick.source;
        let mut reps = Vec::new();
        for &j in &pick.covered_groups {
            let rep = inst.dest_groups[j]
                .iter()
                .copied()
                .filter(|&t| le_eps(inst.c(s, t), pick.radius_cost))
                .min_by(|&a, &b| inst.d(s, a).total_cmp(&inst.d(s, b)).then(a.cmp(&b)))
                .expect("covered group has an in-ball terminal");
            witness.insert(j, (s, rep));
            reps.push(rep);
        }
        let mut nodes = vec![s];
        nodes.extend(&reps);
        let tree = mst(&nodes, d)?;
        let state = states.entry(s).or_insert_with(|| SourceState {
            ball: 0.0,
            nodes: BTreeSet::from([s]),
        });
        state.ball = state.ball.max(pick.radius_cost);
        state.nodes.extend(reps);
        open.retain(|j| !pick.covered_groups.contains(j));
        iterations.push(Iteration {
            ball: pick,
            tree_weight: tree.weight,
        });
    }

    let mut funnels = Vec::new();
    for (s, st) in states {
        let mut nodes = vec![s];
        nodes.extend(st.nodes.iter().filter(|&&v| v != s));
        let tree = mst(&nodes, d)?;
        funnels.push(Funnel {
            source: s,
            ball: st.ball,
            edges: tree.edges,
        });
    }
    Ok(CoverGrowRun {
        solution: inst.solution_from_group_witnesses(funnels, &witness),
        iterations,
    })
}
