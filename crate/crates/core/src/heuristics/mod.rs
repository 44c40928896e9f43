//! Baseline heuristics for star instances. Each builds funnel trees first
//! and then sets every ball to the smallest threshold reaching the source's
//! witness terminals.

mod smallest_edge;
mod smallest_increment;
mod t_adaptive;
mod t_centric;

pub use smallest_edge::smallest_edge;
pub use smallest_increment::smallest_increment;
pub use t_adaptive::t_adaptive;
pub use t_centric::t_centric;

use std::collections::BTreeMap;

use crate::model::{Funnel, Instance, Solution};

/// Funnels for every source that witnesses at least one group, in source
/// order, with minimal enclosing balls.
fn finish(
    inst: &Instance,
    mut trees: BTreeMap<usize, Vec<(usize, usize)>>,
    witness: &BTreeMap<usize, (usize, usize)>,
) -> Solution {
    let mut balls: BTreeMap<usize, f64> = BTreeMap::new();
    for &(s, t) in witness.values() {
        let b = balls.entry(s).or_insert(0.0);
        *b = b.max(inst.c(s, t));
    }
    let funnels = balls
        .into_iter()
        .map(|(s, ball)| Funnel {
            source: s,
            ball,
            edges: trees.remove(&s).unwrap_or_default(),
        })
        .collect();
    inst.solution_from_group_witnesses(funnels, witness)
}

fn sorted_sources(sources: &[usize]) -> Vec<usize> {
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Destination groups containing `v`, restricted to `groups`.
fn groups_of(inst: &Instance, groups: &[usize], v: usize) -> Vec<usize> {
    groups.iter().copied().filter(|&j| inst.dest_groups[j].contains(&v)).collect()
}
