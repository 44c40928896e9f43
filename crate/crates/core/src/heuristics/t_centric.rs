use std::collections::BTreeMap;

use super::{finish, sorted_sources};
use crate::error::Result;
use crate::model::{Instance, Solution};
use crate::mst_steiner::mst;

/// Each group goes to its closest `(source, terminal)` pair under `d`; each
/// source then spans its assigned terminals with an MST.
pub fn t_centric(inst: &Instance) -> Result<Solution> {
    let (sources, groups) = inst.star()?;
    let sources = sorted_sources(sources);
    let d = inst.funnel_costs();
    let mut witness = BTreeMap::new();
    let mut assigned: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &j in &groups {
        let mut best: Option<(f64, usize, usize)> = None;
        for &s in &sources {
            for &t in &inst.dest_groups[j] {
                let w = d.get(s, t);
                if best.is_none_or(|(bw, _, _)| w < bw) {
                    best = Some((w, s, t));
                }
            }
        }
        if let Some((_, s, t)) = best {
            witness.insert(j, (s, t));
            assigned.entry(s).or_default().push(t);
        }
    }
    let mut trees = BTreeMap::new();
    for (s, ts) in assigned {
        let mut nodes = vec![s];
        nodes.extend(ts.into_iter().filter(|&t| t != s));
        trees.insert(s, mst(&nodes, d)?.edges);
    }
    Ok(finish(inst, trees, &witness))
}
