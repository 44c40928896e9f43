//! Reduction from star-shaped g2g-anycast to generalized set-connectivity,
//! an exact solver for the derived instance, and the lift back.
//!
//! For each source `s_i` the demanded terminals are sorted by broadcast cost
//! `c_{i1} <= ... <= c_{ir}`. Copy `G(i, j)` holds `s_i` and the `j` cheapest
//! terminals under the closure of `d`; every copy root hangs off a fresh
//! super-source `s_i(0)` through an edge of weight `c_{ij}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostMatrix, Funnel, Instance, MetricClosure, Solution};
use crate::mst_steiner::{SteinerDp, UnionFind};

/// What a derived node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivedNode {
    /// `s_i(0)`.
    SuperSource { component: usize, node: usize },
    /// `s_i(j)`, `j >= 1`.
    SourceCopy { component: usize, copy: usize, node: usize },
    /// `t^i_a(j)`, the rank-`a` terminal inside copy `j >= a` (1-based).
    TerminalCopy { component: usize, rank: usize, copy: usize, node: usize },
}

impl DerivedNode {
    pub fn original(&self) -> usize {
        match *self {
            DerivedNode::SuperSource { node, .. }
            | DerivedNode::SourceCopy { node, .. }
            | DerivedNode::TerminalCopy { node, .. } => node,
        }
    }

    pub fn component(&self) -> usize {
        match *self {
            DerivedNode::SuperSource { component, .. }
            | DerivedNode::SourceCopy { component, .. }
            | DerivedNode::TerminalCopy { component, .. } => component,
        }
    }
}

/// The gadget `G(i)` built for one source.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Component {
    pub source: usize,
    /// Derived id of `s_i(0)`.
    pub root: usize,
    /// Demanded terminals by increasing broadcast cost from `source`.
    pub order: Vec<usize>,
    /// `c_{ij}` for `j = 1..=r`.
    pub costs: Vec<f64>,
    /// Derived id of `s_i(j)` at index `j - 1`.
    pub copy_roots: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScDemand {
    /// Destination-group index in the originating instance.
    pub dest_group: usize,
    /// `TT_x`: every derived copy of every terminal of the group.
    pub terminals: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetConnectivityInstance {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize, f64)>,
    /// `SS`, one super-source per component.
    pub super_sources: Vec<usize>,
    pub demands: Vec<ScDemand>,
    pub back_map: Vec<DerivedNode>,
    pub components: Vec<Component>,
}

impl SetConnectivityInstance {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn weight_lookup(&self) -> HashMap<(usize, usize), f64> {
        let mut map = HashMap::with_capacity(self.edges.len());
        for &(u, v, w) in &self.edges {
            let key = (u.min(v), u.max(v));
            let e = map.entry(key).or_insert(w);
            if w < *e {
                *e = w;
            }
        }
        map
    }
}

/// An edge subset of a [`SetConnectivityInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScSolution {
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

/// Builds the derived set-connectivity instance of a star instance.
pub fn build_set_connectivity(inst: &Instance) -> Result<SetConnectivityInstance> {
    let (sources, groups) = inst.star()?;
    let mut sources = sources.to_vec();
    sources.dedup();
    let terminals = inst.demanded_terminals();
    let r = terminals.len();
    let closure = MetricClosure::new(inst.funnel_costs())?;
    let dist = closure.dist();

    let mut back_map = Vec::new();
    let mut edges = Vec::new();
    let mut components = Vec::new();
    // (component, original terminal) -> derived copies
    let mut copies_of: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    for (i, &s) in sources.iter().enumerate() {
        let mut order = terminals.clone();
        // Stable: equal costs keep increasing terminal id.
        order.sort_by(|&a, &b| inst.c(s, a).total_cmp(&inst.c(s, b)));
        let costs: Vec<f64> = order.iter().map(|&t| inst.c(s, t)).collect();
        let root = back_map.len();
        back_map.push(DerivedNode::SuperSource { component: i, node: s });
        let mut copy_roots = Vec::with_capacity(r);
        for j in 1..=r {
            let sj = back_map.len();
            back_map.push(DerivedNode::SourceCopy { component: i, copy: j, node: s });
            copy_roots.push(sj);
            edges.push((root, sj, costs[j - 1]));
            let mut members = vec![sj];
            for (a, &t) in order.iter().enumerate().take(j) {
                let id = back_map.len();
                back_map.push(DerivedNode::TerminalCopy {
                    component: i,
                    rank: a + 1,
                    copy: j,
                    node: t,
                });
                copies_of.entry((i, t)).or_default().push(id);
                members.push(id);
            }
            for x in 0..members.len() {
                for y in x + 1..members.len() {
                    let (u, v) = (members[x], members[y]);
                    edges.push((u, v, dist.get(back_map[u].original(), back_map[v].original())));
                }
            }
        }
        components.push(Component {
            source: s,
            root,
            order,
            costs,
            copy_roots,
        });
    }

    let demands = groups
        .iter()
        .map(|&j| {
            let mut tt = Vec::new();
            for i in 0..sources.len() {
                for &t in &inst.dest_groups[j] {
                    if let Some(ids) = copies_of.get(&(i, t)) {
                        tt.extend(ids);
                    }
                }
            }
            tt.sort_unstable();
            ScDemand {
                dest_group: j,
                terminals: tt,
            }
        })
        .collect();

    Ok(SetConnectivityInstance {
        num_nodes: back_map.len(),
        edges,
        super_sources: components.iter().map(|c| c.root).collect(),
        demands,
        back_map,
        components,
    })
}

pub const SC_MAX_DEMANDS: usize = 12;
pub const SC_MAX_COMPONENT_NODES: usize = 400;

/// Exact minimum-weight edge set connecting every demand's terminal set to
/// some super-source.
///
/// Requires each super-source to sit in its own connected component of the
/// derived graph (true for instances from [`build_set_connectivity`]). A
/// feasible subgraph then splits into one tree per used component, which is
/// a group Steiner tree rooted at that component's super-source; the
/// demands are distributed over components by a subset DP.
pub fn solve_set_connectivity_exact(sc: &SetConnectivityInstance) -> Result<ScSolution> {
    let q = sc.demands.len();
    if q > SC_MAX_DEMANDS {
        return Err(Error::UnsupportedSize(format!(
            "exact set-connectivity handles at most {SC_MAX_DEMANDS} demands, got {q}"
        )));
    }
    let mut uf = UnionFind::new(sc.num_nodes);
    for &(u, v, _) in &sc.edges {
        uf.union(u, v);
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..sc.num_nodes {
        members.entry(uf.find(v)).or_default().push(v);
    }
    let mut seen_roots = BTreeSet::new();
    for &ss in &sc.super_sources {
        if !seen_roots.insert(uf.find(ss)) {
            return Err(Error::UnsupportedInstance(
                "two super-sources share a connected component".into(),
            ));
        }
    }
    let weights = sc.weight_lookup();
    let full = (1usize << q) - 1;

    struct Part {
        root: usize,
        nodes: Vec<usize>,
        local: CostMatrix,
        groups: Vec<Vec<usize>>,
        cost: Vec<f64>,
        edges: Vec<Vec<(usize, usize)>>,
    }
    let mut parts = Vec::new();
    for &ss in &sc.super_sources {
        let nodes = members[&uf.find(ss)].clone();
        if nodes.len() > SC_MAX_COMPONENT_NODES {
            return Err(Error::UnsupportedSize(format!(
                "component with {} nodes exceeds {SC_MAX_COMPONENT_NODES}",
                nodes.len()
            )));
        }
        let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut local = CostMatrix::filled(nodes.len(), f64::INFINITY);
        for (&(u, v), &w) in &weights {
            if let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) {
                local.set_sym(a, b, w);
            }
        }
        let groups: Vec<Vec<usize>> = sc
            .demands
            .iter()
            .map(|dm| dm.terminals.iter().filter_map(|t| index.get(t).copied()).collect())
            .collect();
        parts.push(Part {
            root: index[&ss],
            nodes,
            local,
            groups,
            cost: Vec::new(),
            edges: Vec::new(),
        });
    }
    for p in &mut parts {
        let local_ids: Vec<usize> = (0..p.nodes.len()).collect();
        let dp = SteinerDp::new(&p.local, &local_ids, &p.groups);
        p.cost = (0..=full).map(|m| dp.cost_at(m, p.root)).collect();
        p.edges = (0..=full)
            .map(|m| {
                if p.cost[m].is_finite() {
                    dp.edges_at(m, p.root)
                        .into_iter()
                        .map(|(a, b)| (p.nodes[a], p.nodes[b]))
                        .collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
    }

    let k = parts.len();
    let mut best = vec![vec![f64::INFINITY; full + 1]; k + 1];
    let mut took = vec![vec![0usize; full + 1]; k + 1];
    best[0][0] = 0.0;
    for i in 0..k {
        for mask in 0..=full {
            let mut sub = mask;
            loop {
                let own = if sub == 0 { 0.0 } else { parts[i].cost[sub] };
                let c = best[i][mask ^ sub] + own;
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
    if best[k][full].is_infinite() {
        return Err(Error::InvalidInput("set-connectivity instance is infeasible".into()));
    }
    let mut chosen = BTreeSet::new();
    let mut mask = full;
    for i in (0..k).rev() {
        let sub = took[i + 1][mask];
        mask ^= sub;
        if sub != 0 {
            for &(u, v) in &parts[i].edges[sub] {
                chosen.insert((u.min(v), u.max(v)));
            }
        }
    }
    let edges: Vec<(usize, usize)> = chosen.into_iter().collect();
    let weight = edges.iter().map(|e| weights[e]).sum();
    Ok(ScSolution { edges, weight })
}

/// Total weight of an edge subset; errors on edges the instance lacks.
pub fn edge_set_weight(sc: &SetConnectivityInstance, edges: &[(usize, usize)]) -> Result<f64> {
    let weights = sc.weight_lookup();
    let uniq: BTreeSet<(usize, usize)> = edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    uniq.iter()
        .map(|e| {
            weights
                .get(e)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("({}, {}) is not an edge", e.0, e.1)))
        })
        .sum()
}

/// True when every demand has a terminal reachable from a super-source.
pub fn is_feasible(sc: &SetConnectivityInstance, edges: &[(usize, usize)]) -> bool {
    let reach = reachable_from_super_sources(sc, edges);
    sc.demands.iter().all(|dm| dm.terminals.iter().any(|t| reach.contains(t)))
}

fn reachable_from_super_sources(sc: &SetConnectivityInstance, edges: &[(usize, usize)]) -> BTreeSet<usize> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut seen: BTreeSet<usize> = sc.super_sources.iter().copied().collect();
    let mut stack: Vec<usize> = sc.super_sources.clone();
    while let Some(x) = stack.pop() {
        for &y in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Turns a feasible derived edge set into a g2g solution of no greater cost.
///
/// Per component, the ball is the cost of the deepest copy edge used and the
/// funnel is the union of the used copy trees mapped back to original nodes,
/// with closure edges expanded into raw shortest paths.
pub fn lift_solution(inst: &Instance, sc: &SetConnectivityInstance, edges: &[(usize, usize)]) -> Result<Solution> {
    edge_set_weight(sc, edges)?;
    let reach = reachable_from_super_sources(sc, edges);
    let closure = MetricClosure::new(inst.funnel_costs())?;
    let mut funnels = Vec::new();
    let mut comp_used = vec![false; sc.components.len()];
    for (ci, comp) in sc.components.iter().enumerate() {
        let spoke_copies: Vec<usize> = edges
            .iter()
            .filter_map(|&(u, v)| {
                let other = if u == comp.root { v } else if v == comp.root { u } else { return None };
                comp.copy_roots.iter().position(|&x| x == other).map(|j| j + 1)
            })
            .collect();
        let Some(&deepest) = spoke_copies.iter().max() else { continue };
        comp_used[ci] = true;
        let mut mapped = Vec::new();
        for &(u, v) in edges {
            if u == comp.root || v == comp.root || !reach.contains(&u) || !reach.contains(&v) {
                continue;
            }
            if sc.back_map[u].component() != ci {
                continue;
            }
            let (a, b) = (sc.back_map[u].original(), sc.back_map[v].original());
            if a != b {
                mapped.push((a, b));
            }
        }
        let tree = closure.expand(inst.funnel_costs(), comp.source, &mapped);
        funnels.push(Funnel {
            source: comp.source,
            ball: comp.costs[deepest - 1],
            edges: tree.edges,
        });
    }

    let mut witness: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for dm in &sc.demands {
        let hit = dm
            .terminals
            .iter()
            .find(|t| reach.contains(t) && comp_used[sc.back_map[**t].component()])
            .ok_or_else(|| {
                Error::InvalidInput(format!("edge set leaves destination group {} unconnected", dm.dest_group))
            })?;
        let node = sc.back_map[*hit];
        witness.insert(dm.dest_group, (sc.components[node.component()].source, node.original()));
    }
    Ok(inst.solution_from_group_witnesses(funnels, &witness))
}

/// Converts a g2g solution into a derived edge set: each funnel is copied
/// into the copy indexed by its farthest in-ball terminal, as an MST over
/// the funnel's in-copy nodes under the closure weights. The weight equals
/// the g2g cost whenever funnels use no relay outside their copy.
pub fn embed_solution(sc: &SetConnectivityInstance, sol: &Solution) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let weights = sc.weight_lookup();
    for f in &sol.funnels {
        let Some((ci, comp)) = sc.components.iter().enumerate().find(|(_, c)| c.source == f.source) else {
            return Err(Error::InvalidSolution(format!("{} is not a source of this instance", f.source)));
        };
        let nodes = f.nodes();
        let ranks: Vec<usize> = comp
            .order
            .iter()
            .enumerate()
            .filter(|(a, t)| nodes.contains(t) && comp.costs[*a] <= f.ball + crate::model::EPS)
            .map(|(a, _)| a + 1)
            .collect();
        let Some(&p) = ranks.iter().max() else { continue };
        let copy_root = comp.copy_roots[p - 1];
        out.push((comp.root, copy_root));
        let mut local = vec![copy_root];
        for (id, dn) in sc.back_map.iter().enumerate() {
            if let DerivedNode::TerminalCopy { component, rank, copy, .. } = *dn {
                if component == ci && copy == p && ranks.contains(&rank) {
                    local.push(id);
                }
            }
        }
        let m = CostMatrix::from_fn(local.len(), |a, b| {
            weights
                .get(&(local[a].min(local[b]), local[a].max(local[b])))
                .copied()
                .unwrap_or(f64::INFINITY)
        });
        let idx: Vec<usize> = (0..local.len()).collect();
        let tree = crate::mst_steiner::mst(&idx, &m)?;
        out.extend(tree.edges.iter().map(|&(a, b)| (local[a], local[b])));
    }
    Ok(out)
}
