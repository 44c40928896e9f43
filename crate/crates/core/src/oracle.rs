//! Exhaustive optimum for desk-sized instances.
//!
//! For every source `s` and every witness set `W` of demanded terminals the
//! cheapest way to serve `W` from `s` is `max c(s, W)` plus the Steiner tree
//! on `{s} ∪ W` (all nodes usable as relays). One Dreyfus-Wagner table per
//! source yields every such Steiner cost; a subset DP then distributes the
//! destination groups over the sources.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{decompose_demands, evaluate_cost, merge_solutions, Funnel, Instance, Solution};
use crate::mst_steiner::{spanning_tree_of_edges, SteinerDp};

pub const MAX_SOURCES: usize = 3;
pub const MAX_TERMINALS: usize = 8;
pub const MAX_NODES: usize = 12;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub solution: Solution,
    pub cost: f64,
    /// Number of `(source, witness set)` configurations evaluated.
    pub explored: u64,
}

/// Optimal solution of any instance small enough for exhaustive search;
/// multi-group instances are solved per source group.
pub fn brute_force_optimal(inst: &Instance) -> Result<OracleResult> {
    if inst.num_nodes() > MAX_NODES {
        return Err(Error::UnsupportedSize(format!(
            "oracle handles at most {MAX_NODES} nodes, instance has {}",
            inst.num_nodes()
        )));
    }
    let subs = decompose_demands(inst);
    let mut parts = Vec::with_capacity(subs.len());
    let mut explored = 0;
    for sub in subs {
        let (sol, ex) = solve_star(&sub.instance)?;
        explored += ex;
        parts.push((sub, sol));
    }
    let solution = merge_solutions(inst, &parts);
    let cost = evaluate_cost(inst, &solution)?.total;
    Ok(OracleResult {
        solution,
        cost,
        explored,
    })
}

struct Choice {
    cost: f64,
    witness_mask: usize,
}

fn solve_star(inst: &Instance) -> Result<(Solution, u64)> {
    let (sources, groups) = inst.star()?;
    let mut sources = sources.to_vec();
    sources.sort_unstable();
    sources.dedup();
    let terminals = inst.demanded_terminals();
    if sources.len() > MAX_SOURCES {
        return Err(Error::UnsupportedSize(format!(
            "oracle handles at most {MAX_SOURCES} sources, got {}",
            sources.len()
        )));
    }
    if terminals.len() > MAX_TERMINALS {
        return Err(Error::UnsupportedSize(format!(
            "oracle handles at most {MAX_TERMINALS} demanded terminals, got {}",
            terminals.len()
        )));
    }
    let n = inst.num_nodes();
    let d = inst.funnel_costs();
    let all: Vec<usize> = (0..n).collect();
    let term_groups: Vec<Vec<usize>> = terminals.iter().map(|&t| vec![t]).collect();
    let g = groups.len();
    let full_groups = (1usize << g) - 1;
    // Group bitmask covered by each terminal.
    let covers: Vec<usize> = terminals
        .iter()
        .map(|t| {
            groups
                .iter()
                .enumerate()
                .filter(|(_, &j)| inst.dest_groups[j].contains(t))
                .fold(0, |m, (k, _)| m | 1 << k)
        })
        .collect();

    let mut explored = 0u64;
    let mut tables = Vec::with_capacity(sources.len());
    // best[src][group mask]: cheapest witness set covering at least the mask.
    let mut per_source: Vec<Vec<Choice>> = Vec::with_capacity(sources.len());
    for &s in &sources {
        let dp = SteinerDp::new(d, &all, &term_groups);
        let sp = dp.position(s).expect("source is a node");
        let mut exact: Vec<Choice> = (0..=full_groups)
            .map(|_| Choice {
                cost: f64::INFINITY,
                witness_mask: 0,
            })
            .collect();
        for w in 0..(1usize << terminals.len()) {
            explored += 1;
            let mut ball: f64 = 0.0;
            let mut cov = 0;
            for (k, &t) in terminals.iter().enumerate() {
                if w >> k & 1 == 1 {
                    ball = ball.max(inst.c(s, t));
                    cov |= covers[k];
                }
            }
            let cost = if w == 0 { 0.0 } else { ball + dp.cost_at(w, sp) };
            if cost < exact[cov].cost {
                exact[cov] = Choice { cost, witness_mask: w };
            }
        }
        // Superset minimum: serving more groups is allowed.
        for bit in 0..g {
            for m in 0..=full_groups {
                if m >> bit & 1 == 0 {
                    let sup = m | 1 << bit;
                    if exact[sup].cost < exact[m].cost {
                        exact[m] = Choice {
                            cost: exact[sup].cost,
                            witness_mask: exact[sup].witness_mask,
                        };
                    }
                }
            }
        }
        per_source.push(exact);
        tables.push(dp);
    }

    // Distribute groups over sources.
    let k = sources.len();
    let mut best = vec![vec![f64::INFINITY; full_groups + 1]; k + 1];
    let mut took = vec![vec![0usize; full_groups + 1]; k + 1];
    best[0][0] = 0.0;
    for i in 0..k {
        for mask in 0..=full_groups {
            let mut sub = mask;
            loop {
                let c = best[i][mask ^ sub] + per_source[i][sub].cost;
                if c < best[i + 1][mask] {
                    best[i + 1][mask] = c;
                    took[i + 1][mask] = sub;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
    }
    if best[k][full_groups].is_infinite() {
        return Err(Error::InvalidInput("no source can serve every demand".into()));
    }

    let mut funnels = Vec::new();
    let mut witness: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut mask = full_groups;
    for i in (0..k).rev() {
        let sub = took[i + 1][mask];
        mask ^= sub;
        let wmask = per_source[i][sub].witness_mask;
        if wmask == 0 {
            continue;
        }
        let s = sources[i];
        let sp = tables[i].position(s).unwrap();
        let tree = spanning_tree_of_edges(s, &tables[i].edges_at(wmask, sp), d);
        let mut ball: f64 = 0.0;
        for (b, &t) in terminals.iter().enumerate() {
            if wmask >> b & 1 == 1 {
                ball = ball.max(inst.c(s, t));
                for (gk, &j) in groups.iter().enumerate() {
                    if covers[b] >> gk & 1 == 1 {
                        witness.entry(j).or_insert((s, t));
                    }
                }
            }
        }
        funnels.push(Funnel {
            source: s,
            ball,
            edges: tree.edges,
        });
    }
    funnels.sort_by_key(|f| f.source);
    Ok((inst.solution_from_group_witnesses(funnels, &witness), explored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_solution, CostMatrix, EuclideanLayout};

    #[test]
    fn relay_beats_direct_link() {
        let l = EuclideanLayout::new(vec![(0.0, 0.0), (2.0, 0.0), (1.0, 0.0)], 2.0).unwrap();
        let inst = Instance::euclidean(l, vec![vec![0]], vec![vec![1]], vec![(0, 0)]).unwrap();
        let r = brute_force_optimal(&inst).unwrap();
        assert_eq!(r.cost, 6.0);
        assert_eq!(r.solution.funnels[0].ball, 4.0);
        assert_eq!(r.solution.funnels[0].edges.len(), 2);
        assert!(validate_solution(&inst, &r.solution).ok);
    }

    #[test]
    fn colocated_terminal_is_free() {
        let l = EuclideanLayout::new(vec![(0.3, 0.3), (0.3, 0.3)], 2.0).unwrap();
        let inst = Instance::euclidean(l, vec![vec![0]], vec![vec![1]], vec![(0, 0)]).unwrap();
        let r = brute_force_optimal(&inst).unwrap();
        assert_eq!(r.cost, 0.0);
        assert!(validate_solution(&inst, &r.solution).ok);
    }

    #[test]
    fn size_caps() {
        let l = EuclideanLayout::new((0..13).map(|i| (i as f64, 0.0)).collect(), 2.0).unwrap();
        let inst = Instance::euclidean(l, vec![vec![0]], vec![vec![1]], vec![(0, 0)]).unwrap();
        assert!(matches!(brute_force_optimal(&inst), Err(Error::UnsupportedSize(_))));
        let c = CostMatrix::filled(10, 1.0);
        let many = Instance::new(c.clone(), c, vec![vec![0, 1, 2, 3]], vec![vec![9]], vec![(0, 0)]).unwrap();
        assert!(matches!(brute_force_optimal(&many), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn two_sources_split_the_groups() {
        let l = EuclideanLayout::new(vec![(0.0, 0.0), (10.0, 0.0), (0.5, 0.0), (10.5, 0.0)], 2.0).unwrap();
        let inst = Instance::euclidean(l, vec![vec![0, 1]], vec![vec![2], vec![3]], vec![(0, 0), (0, 1)]).unwrap();
        let r = brute_force_optimal(&inst).unwrap();
        assert!((r.cost - 1.0).abs() < 1e-12);
        assert_eq!(r.solution.funnels.len(), 2);
        assert_eq!(r.solution.witnesses.len(), 2);
    }
}
