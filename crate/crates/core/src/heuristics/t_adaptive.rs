use std::collections::{BTreeMap, BTreeSet};

use super::{finish, groups_of, sorted_sources};
use crate::error::{Error, Result};
use crate::model::{Instance, Solution};

/// Prim-like growth of one cluster per source: the globally closest direct
/// edge from a clustered node to a terminal of an uncovered group is added
/// until every group has a clustered node.
pub fn t_adaptive(inst: &Instance) -> Result<Solution> {
    let (sources, groups) = inst.star()?;
    let sources = sorted_sources(sources);
    let d = inst.funnel_costs();
    // node -> owning source
    let mut owner: BTreeMap<usize, usize> = sources.iter().map(|&s| (s, s)).collect();
    let mut trees: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut witness = BTreeMap::new();
    for &s in &sources {
        for j in groups_of(inst, &groups, s) {
            witness.entry(j).or_insert((s, s));
        }
    }
    let mut open: BTreeSet<usize> = groups.iter().copied().filter(|j| !witness.contains_key(j)).collect();

    while !open.is_empty() {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for &j in &open {
            for &t in &inst.dest_groups[j] {
                for (&r, &s) in &owner {
                    let w = d.get(r, t);
                    let key = (w, s, t, r);
                    if best.is_none_or(|b| {
                        key.0 < b.0 || (key.0 == b.0 && (key.1, key.2, key.3) < (b.1, b.2, b.3))
                    }) {
                        best = Some(key);
                    }
                }
            }
        }
        let (w, s, t, r) = best.ok_or_else(|| Error::InvalidInput("no terminals to attach".into()))?;
        if !w.is_finite() {
            return Err(Error::InvalidInput(format!("terminal {t} cannot be linked to any cluster")));
        }
        owner.insert(t, s);
        trees.entry(s).or_default().push((r, t));
        for j in groups_of(inst, &groups, t) {
            if open.remove(&j) {
                witness.insert(j, (s, t));
            }
        }
    }
    Ok(finish(inst, trees, &witness))
}
