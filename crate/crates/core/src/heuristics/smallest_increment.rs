use std::collections::{BTreeMap, BTreeSet};

use super::{finish, sorted_sources};
use crate::error::{Error, Result};
use crate::model::{le_eps, CostMatrix, Instance, Solution};

struct Cluster {
    nodes: BTreeSet<usize>,
    ball: f64,
    dist: Vec<f64>,
    prev: Vec<Option<usize>>,
}

impl Cluster {
    fn refresh(&mut self, d: &CostMatrix) {
        let (dist, prev) = multi_source_dijkstra(d, &self.nodes);
        self.dist = dist;
        self.prev = prev;
    }
}

/// Dense Dijkstra over the raw funnel costs from every node of `start`.
fn multi_source_dijkstra(d: &CostMatrix, start: &BTreeSet<usize>) -> (Vec<f64>, Vec<Option<usize>>) {
    let n = d.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![None; n];
    let mut done = vec![false; n];
    for &v in start {
        dist[v] = 0.0;
    }
    loop {
        let mut u = None;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && u.is_none_or(|x: usize| dist[v] < dist[x]) {
                u = Some(v);
            }
        }
        let Some(u) = u else { break };
        done[u] = true;
        for v in 0..n {
            if done[v] {
                continue;
            }
            let w = dist[u] + d.get(u, v);
            if w < dist[v] {
                dist[v] = w;
                prev[v] = Some(u);
            }
        }
    }
    (dist, prev)
}

/// Grows one cluster per source; each step attaches, along a shortest
/// `d`-path, the terminal of an uncovered group whose attachment raises
/// funnel plus ball cost the least. A group is covered once a node of it
/// sits in some cluster within that cluster's ball.
pub fn smallest_increment(inst: &Instance) -> Result<Solution> {
    let (sources, groups) = inst.star()?;
    let sources = sorted_sources(sources);
    let d = inst.funnel_costs();
    let mut clusters: BTreeMap<usize, Cluster> = sources
        .iter()
        .map(|&s| {
            let mut c = Cluster {
                nodes: BTreeSet::from([s]),
                ball: 0.0,
                dist: Vec::new(),
                prev: Vec::new(),
            };
            c.refresh(d);
            (s, c)
        })
        .collect();
    let mut trees: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut witness = BTreeMap::new();
    let mut open: BTreeSet<usize> = groups.iter().copied().collect();
    mark_covered(inst, &clusters, &mut open, &mut witness);

    while !open.is_empty() {
        let mut best: Option<(f64, usize, usize)> = None;
        for (&s, cl) in &clusters {
            for &j in &open {
                for &t in &inst.dest_groups[j] {
                    let delta = cl.dist[t] + (inst.c(s, t) - cl.ball).max(0.0);
                    if best.is_none_or(|b| delta < b.0 || (delta == b.0 && (s, t) < (b.1, b.2))) {
                        best = Some((delta, s, t));
                    }
                }
            }
        }
        let (delta, s, t) = best.ok_or_else(|| Error::InvalidInput("no terminals to attach".into()))?;
        if !delta.is_finite() {
            return Err(Error::InvalidInput(format!("terminal {t} cannot be linked to any cluster")));
        }
        let cl = clusters.get_mut(&s).expect("cluster exists");
        let mut v = t;
        while let Some(u) = cl.prev[v] {
            trees.entry(s).or_default().push((u, v));
            cl.nodes.insert(v);
            v = u;
        }
        cl.nodes.insert(t);
        cl.ball = cl.ball.max(inst.c(s, t));
        cl.refresh(d);
        for j in open.clone() {
            if inst.dest_groups[j].contains(&t) {
                open.remove(&j);
                witness.insert(j, (s, t));
            }
        }
        mark_covered(inst, &clusters, &mut open, &mut witness);
    }
    Ok(finish(inst, trees, &witness))
}

fn mark_covered(
    inst: &Instance,
    clusters: &BTreeMap<usize, Cluster>,
    open: &mut BTreeSet<usize>,
    witness: &mut BTreeMap<usize, (usize, usize)>,
) {
    open.retain(|&j| {
        for (&s, cl) in clusters {
            let hit = inst.dest_groups[j]
                .iter()
                .copied()
                .filter(|t| cl.nodes.contains(t) && le_eps(inst.c(s, *t), cl.ball))
                .min();
            if let Some(t) = hit {
                witness.insert(j, (s, t));
                return false;
            }
        }
        true
    });
}
