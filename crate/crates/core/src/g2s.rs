//! Greedy for singleton destination groups: repeatedly take the
//! minimum-density assignment of unassigned terminals to one source and merge
//! it into that source's tree.
//!
//! Funnel weights are taken from the shortest-path closure of `d`; output
//! trees are expanded back into raw edges.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Funnel, Instance, MetricClosure, Solution, EPS};
use crate::mst_steiner::{mst, mst_weight, KMstMode, Tree, KMST_EXACT_CAP};

/// A source together with the terminals it takes over in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityAssignment {
    pub source: usize,
    /// Tree over the source and `terminals` (closure weights).
    pub tree: Tree,
    pub terminals: Vec<usize>,
    /// Broadcast threshold needed to reach every assigned terminal.
    pub radius_cost: f64,
    /// `(tree.weight + radius_cost) / terminals.len()`.
    pub density: f64,
    pub mode: KMstMode,
}

#[derive(Debug, Clone)]
pub struct G2sRun {
    pub solution: Solution,
    pub rounds: Vec<DensityAssignment>,
}

impl G2sRun {
    /// True when some round fell back to the heuristic k-MST.
    pub fn approximate(&self) -> bool {
        self.rounds.iter().any(|r| r.mode == KMstMode::Heuristic)
    }
}

struct Candidate {
    density: f64,
    radius: f64,
    k: usize,
    source: usize,
    terminals: Vec<usize>,
    mode: KMstMode,
}

// Lower density, then smaller radius, then more terminals. Sources are
// scanned in increasing id so earlier (lower) ids win remaining ties.
fn improves(c: &Candidate, best: &Option<Candidate>) -> bool {
    let Some(b) = best else { return true };
    if c.density < b.density - EPS {
        return true;
    }
    if c.density > b.density + EPS {
        return false;
    }
    if c.radius < b.radius - EPS {
        return true;
    }
    if c.radius > b.radius + EPS {
        return false;
    }
    c.k > b.k
}

fn best_for_source(metric: &crate::model::CostMatrix, inst: &Instance, s: usize, unassigned: &BTreeSet<usize>) -> Option<Candidate> {
    let free = usize::from(unassigned.contains(&s));
    let mut eligible: Vec<usize> = unassigned.iter().copied().filter(|&t| t != s).collect();
    eligible.sort_by(|&a, &b| inst.c(s, a).total_cmp(&inst.c(s, b)).then(a.cmp(&b)));
    let mut best: Option<Candidate> = None;

    let mut radii: Vec<f64> = unassigned.iter().map(|&t| inst.c(s, t)).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| *a <= *b + EPS);
    let eligible_at = |r: f64| eligible.iter().take_while(|&&t| inst.c(s, t) <= r + EPS).count();

    // Exact part: every subset of the largest eligible prefix that still
    // fits the k-MST cap. A subset's best radius is its own farthest member.
    let exact_len = radii
        .iter()
        .map(|&r| eligible_at(r))
        .filter(|&m| m < KMST_EXACT_CAP)
        .max()
        .unwrap_or(0);
    let pool = &eligible[..exact_len];
    let mut subset = Vec::with_capacity(pool.len());
    for bits in 0u32..(1u32 << pool.len()) {
        let k = bits.count_ones() as usize + free;
        if k == 0 {
            continue;
        }
        subset.clear();
        subset.extend((0..pool.len()).filter(|i| bits >> i & 1 == 1).map(|i| pool[i]));
        let radius = subset
            .iter()
            .map(|&t| inst.c(s, t))
            .fold(if free == 1 { inst.c(s, s) } else { 0.0 }, f64::max);
        let w = mst_weight(s, &subset, metric);
        let cand = Candidate {
            density: (w + radius) / k as f64,
            radius,
            k,
            source: s,
            terminals: subset.clone(),
            mode: KMstMode::Exact,
        };
        if improves(&cand, &best) {
            best = Some(cand);
        }
    }

    // Heuristic part: radii whose eligible graph is over the cap. Prim from
    // the source yields the nearest-attachment k-tree for every k at once.
    for &r in &radii {
        let m = eligible_at(r);
        if m < KMST_EXACT_CAP {
            continue;
        }
        let mut nodes = vec![s];
        nodes.extend(&eligible[..m]);
        let prim = mst(&nodes, metric).expect("nonempty");
        let mut w = 0.0;
        let mut members = Vec::new();
        for &(u, v) in &prim.edges {
            w += metric.get(u, v);
            members.push(v);
            let k = members.len() + free;
            let cand = Candidate {
                density: (w + r) / k as f64,
                radius: members.iter().map(|&t| inst.c(s, t)).fold(0.0, f64::max),
                k,
                source: s,
                terminals: members.clone(),
                mode: KMstMode::Heuristic,
            };
            if improves(&cand, &best) {
                best = Some(cand);
            }
        }
    }
    best
}

fn check_singletons(inst: &Instance) -> Result<(Vec<usize>, Vec<usize>)> {
    let (sources, groups) = inst.star()?;
    for &j in &groups {
        if inst.dest_groups[j].len() != 1 {
            return Err(Error::UnsupportedInstance(format!(
                "destination group {j} has {} nodes; g2s_greedy needs singletons",
                inst.dest_groups[j].len()
            )));
        }
    }
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok((s, groups))
}

fn assignment(metric: &crate::model::CostMatrix, inst: &Instance, sources: &[usize], unassigned: &BTreeSet<usize>) -> Result<DensityAssignment> {
    if unassigned.is_empty() {
        return Err(Error::InvalidInput("no unassigned terminals".into()));
    }
    let mut best: Option<Candidate> = None;
    for &s in sources {
        if let Some(c) = best_for_source(metric, inst, s, unassigned) {
            if improves(&c, &best) {
                best = Some(c);
            }
        }
    }
    let b = best.ok_or_else(|| Error::InvalidInput("no source available".into()))?;
    let mut terminals = b.terminals;
    if unassigned.contains(&b.source) {
        terminals.push(b.source);
    }
    let mut nodes = vec![b.source];
    nodes.extend(terminals.iter().filter(|&&t| t != b.source));
    let tree = mst(&nodes, metric)?;
    let density = (tree.weight + b.radius) / terminals.len() as f64;
    Ok(DensityAssignment {
        source: b.source,
        tree,
        terminals,
        radius_cost: b.radius,
        density,
        mode: b.mode,
    })
}

/// Minimum-density assignment of `unassigned` terminals to a single source.
/// Exact whenever every eligible graph fits the exact k-MST cap.
pub fn min_density_assignment(inst: &Instance, unassigned: &[usize]) -> Result<DensityAssignment> {
    let (sources, _) = check_singletons(inst)?;
    let closure = MetricClosure::new(inst.funnel_costs())?;
    let set: BTreeSet<usize> = unassigned.iter().copied().collect();
    assignment(closure.dist(), inst, &sources, &set)
}

pub fn g2s_greedy(inst: &Instance) -> Result<Solution> {
    Ok(g2s_greedy_traced(inst)?.solution)
}

pub fn g2s_greedy_traced(inst: &Instance) -> Result<G2sRun> {
    let (sources, groups) = check_singletons(inst)?;
    let closure = MetricClosure::new(inst.funnel_costs())?;
    let metric = closure.dist();
    let mut unassigned: BTreeSet<usize> = groups.iter().map(|&j| inst.dest_groups[j][0]).collect();
    let mut trees: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rounds = Vec::new();

    while !unassigned.is_empty() {
        let a = assignment(metric, inst, &sources, &unassigned)?;
        let nodes = trees.entry(a.source).or_insert_with(|| BTreeSet::from([a.source]));
        for &t in &a.terminals {
            nodes.insert(t);
            owner.insert(t, a.source);
            unassigned.remove(&t);
        }
        log::debug!(
            "g2s round {}: source {} takes {} terminals at density {:.6}",
            rounds.len(),
            a.source,
            a.terminals.len(),
            a.density
        );
        rounds.push(a);
    }
    if rounds.iter().any(|r| r.mode == KMstMode::Heuristic) {
        log::warn!("g2s_greedy fell back to the heuristic k-MST; the ratio bound is not claimed");
    }

    let mut funnels = Vec::new();
    for (&s, nodes) in &trees {
        let mut list = vec![s];
        list.extend(nodes.iter().filter(|&&v| v != s));
        let merged = mst(&list, metric)?;
        let tree = closure.expand(inst.funnel_costs(), s, &merged.edges);
        let ball = owner
            .iter()
            .filter(|&(_, &o)| o == s)
            .map(|(&t, _)| inst.c(s, t))
            .fold(0.0, f64::max);
        funnels.push(Funnel {
            source: s,
            ball,
            edges: tree.edges,
        });
    }
    let witness: BTreeMap<usize, (usize, usize)> = groups
        .iter()
        .map(|&j| {
            let t = inst.dest_groups[j][0];
            (j, (owner[&t], t))
        })
        .collect();
    Ok(G2sRun {
        solution: inst.solution_from_group_witnesses(funnels, &witness),
        rounds,
    })
}
