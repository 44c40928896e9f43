use std::collections::BTreeMap;

use super::{finish, sorted_sources};
use crate::error::{Error, Result};
use crate::model::{Instance, Solution};
use crate::mst_steiner::UnionFind;

/// Kruskal-like growth over all node pairs that never closes a cycle or
/// joins two sources, stopped once every group touches a source component.
/// Sourceless components are then dropped and edges are removed from the
/// largest down whenever every group stays connected to a source.
pub fn smallest_edge(inst: &Instance) -> Result<Solution> {
    let (sources, groups) = inst.star()?;
    let sources = sorted_sources(sources);
    let d = inst.funnel_costs();
    let n = inst.num_nodes();
    let mut is_source = vec![false; n];
    for &s in &sources {
        is_source[s] = true;
    }

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            let w = d.get(u, v);
            if w.is_finite() {
                pairs.push((w, u, v));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut uf = UnionFind::new(n);
    let mut sourced = is_source.clone();
    let mut chosen: Vec<(f64, usize, usize)> = Vec::new();
    let covered = |uf: &mut UnionFind, sourced: &[bool]| {
        groups
            .iter()
            .all(|&j| inst.dest_groups[j].iter().any(|&t| sourced[uf.find(t)]))
    };
    if !covered(&mut uf, &sourced) {
        let mut done = false;
        for &(w, u, v) in &pairs {
            let (ru, rv) = (uf.find(u), uf.find(v));
            if ru == rv || (sourced[ru] && sourced[rv]) {
                continue;
            }
            let has = sourced[ru] || sourced[rv];
            uf.union(ru, rv);
            let r = uf.find(u);
            sourced[r] = has;
            chosen.push((w, u, v));
            if has && covered(&mut uf, &sourced) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::InvalidInput("some group cannot be linked to a source".into()));
        }
    }

    let mut kept = drop_sourceless(&chosen, &is_source, n);
    kept.sort_by(|a, b| b.0.total_cmp(&a.0).then((b.1, b.2).cmp(&(a.1, a.2))));
    let mut i = 0;
    while i < kept.len() {
        let trial: Vec<(f64, usize, usize)> = kept.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &e)| e).collect();
        if groups_reach_sources(inst, &groups, &trial, &is_source, n) {
            kept = trial;
        } else {
            i += 1;
        }
    }
    let kept = drop_sourceless(&kept, &is_source, n);

    let mut uf = UnionFind::new(n);
    for &(_, u, v) in &kept {
        uf.union(u, v);
    }
    let root_source: BTreeMap<usize, usize> = sources.iter().map(|&s| (uf.find(s), s)).collect();
    let mut trees: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(_, u, v) in &kept {
        let s = root_source[&uf.find(u)];
        trees.entry(s).or_default().push((u, v));
    }
    let mut witness = BTreeMap::new();
    for &j in &groups {
        let best = inst.dest_groups[j]
            .iter()
            .filter_map(|&t| root_source.get(&uf.find(t)).map(|&s| (inst.c(s, t), s, t)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))))
            .expect("pruning keeps every group connected");
        witness.insert(j, (best.1, best.2));
    }
    Ok(finish(inst, trees, &witness))
}

fn components(edges: &[(f64, usize, usize)], is_source: &[bool], n: usize) -> (UnionFind, Vec<bool>) {
    let mut uf = UnionFind::new(n);
    for &(_, u, v) in edges {
        uf.union(u, v);
    }
    let mut sourced = vec![false; n];
    for (v, &s) in is_source.iter().enumerate() {
        if s {
            let r = uf.find(v);
            sourced[r] = true;
        }
    }
    (uf, sourced)
}

fn drop_sourceless(edges: &[(f64, usize, usize)], is_source: &[bool], n: usize) -> Vec<(f64, usize, usize)> {
    let (mut uf, sourced) = components(edges, is_source, n);
    edges.iter().copied().filter(|&(_, u, _)| sourced[uf.find(u)]).collect()
}

fn groups_reach_sources(
    inst: &Instance,
    groups: &[usize],
    edges: &[(f64, usize, usize)],
    is_source: &[bool],
    n: usize,
) -> bool {
    let (mut uf, sourced) = components(edges, is_source, n);
    groups
        .iter()
        .all(|&j| inst.dest_groups[j].iter().any(|&t| sourced[uf.find(t)]))
}
