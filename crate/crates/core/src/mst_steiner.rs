//! Tree primitives: minimum spanning trees, exact Steiner trees
//! (Dreyfus-Wagner, generalized to node groups) and rooted k-MST.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::CostMatrix;

/// A tree over node ids, with its weight under the metric it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub root: usize,
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

impl Tree {
    pub fn singleton(root: usize) -> Self {
        Tree {
            root,
            edges: Vec::new(),
            weight: 0.0,
        }
    }

    pub fn nodes(&self) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        s.insert(self.root);
        s
    }

    pub fn recomputed_weight(&self, metric: &CostMatrix) -> f64 {
        self.edges.iter().map(|&(u, v)| metric.get(u, v)).sum()
    }
}

#[inline]
fn edge_key(w: f64, u: usize, v: usize) -> (f64, usize, usize) {
    (w, u.min(v), u.max(v))
}

#[inline]
fn cmp_key(a: (f64, usize, usize), b: (f64, usize, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Minimum spanning tree of `nodes` (rooted at `nodes[0]`). Ties are broken by
/// the lexicographic `(min id, max id)` edge key, which makes the result
/// unique.
pub fn mst(nodes: &[usize], metric: &CostMatrix) -> Result<Tree> {
    let Some(&root) = nodes.first() else {
        return Err(Error::InvalidInput("minimum spanning tree of an empty node set".into()));
    };
    let mut uniq: Vec<usize> = nodes.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    Ok(prim(root, &uniq, metric))
}

fn prim(root: usize, nodes: &[usize], metric: &CostMatrix) -> Tree {
    let m = nodes.len();
    let mut in_tree = vec![false; m];
    let mut best: Vec<Option<(f64, usize, usize, usize)>> = vec![None; m];
    let r = nodes.iter().position(|&v| v == root).expect("root among nodes");
    in_tree[r] = true;
    for (i, &v) in nodes.iter().enumerate() {
        if i != r {
            let (w, a, b) = edge_key(metric.get(root, v), root, v);
            best[i] = Some((w, a, b, root));
        }
    }
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    let mut weight = 0.0;
    for _ in 1..m {
        let mut pick: Option<usize> = None;
        for i in 0..m {
            if in_tree[i] {
                continue;
            }
            let Some(bi) = best[i] else { continue };
            match pick {
                None => pick = Some(i),
                Some(p) => {
                    let bp = best[p].unwrap();
                    if cmp_key((bi.0, bi.1, bi.2), (bp.0, bp.1, bp.2)) == Ordering::Less {
                        pick = Some(i);
                    }
                }
            }
        }
        let Some(p) = pick else { break };
        let (w, _, _, parent) = best[p].unwrap();
        in_tree[p] = true;
        let child = nodes[p];
        edges.push((parent, child));
        weight += w;
        for i in 0..m {
            if in_tree[i] {
                continue;
            }
            let v = nodes[i];
            let cand = edge_key(metric.get(child, v), child, v);
            let better = match best[i] {
                None => true,
                Some(b) => cmp_key(cand, (b.0, b.1, b.2)) == Ordering::Less,
            };
            if better {
                best[i] = Some((cand.0, cand.1, cand.2, child));
            }
        }
    }
    Tree { root, edges, weight }
}

/// MST weight of `{root} ∪ others`, without building the edge list.
pub(crate) fn mst_weight(root: usize, others: &[usize], metric: &CostMatrix) -> f64 {
    let m = others.len();
    let mut key: Vec<f64> = others.iter().map(|&v| metric.get(root, v)).collect();
    let mut done = vec![false; m];
    let mut total = 0.0;
    for _ in 0..m {
        let mut p = usize::MAX;
        for i in 0..m {
            if !done[i] && (p == usize::MAX || key[i] < key[p]) {
                p = i;
            }
        }
        done[p] = true;
        total += key[p];
        let u = others[p];
        for i in 0..m {
            if !done[i] {
                let w = metric.get(u, others[i]);
                if w < key[i] {
                    key[i] = w;
                }
            }
        }
    }
    total
}

/// Kruskal over an explicit edge list, keeping only the tree that contains
/// `root`. Duplicate edges and cycles in the input are dropped.
pub fn spanning_tree_of_edges(root: usize, edges: &[(usize, usize)], metric: &CostMatrix) -> Tree {
    let mut sorted: Vec<(f64, usize, usize)> = edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| edge_key(metric.get(u, v), u, v))
        .collect();
    sorted.sort_by(|a, b| cmp_key(*a, *b));
    sorted.dedup_by(|a, b| a.1 == b.1 && a.2 == b.2);
    let mut uf = UnionFind::new(metric.len());
    let mut kept = Vec::new();
    for (_, u, v) in sorted {
        if uf.union(u, v) {
            kept.push((u, v));
        }
    }
    let mut reach = BTreeSet::from([root]);
    let mut frontier = vec![root];
    while let Some(x) = frontier.pop() {
        for &(u, v) in &kept {
            let other = if u == x { v } else if v == x { u } else { continue };
            if reach.insert(other) {
                frontier.push(other);
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::from([root]);
    let mut frontier = vec![root];
    while let Some(x) = frontier.pop() {
        for &(u, v) in &kept {
            let other = if u == x { v } else if v == x { u } else { continue };
            if seen.insert(other) {
                out.push((x, other));
                frontier.push(other);
            }
        }
    }
    let weight = out.iter().map(|&(u, v)| metric.get(u, v)).sum();
    Tree {
        root,
        edges: out,
        weight,
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Unset,
    Leaf,
    Split(u32),
    Move(u32),
}

/// Dreyfus-Wagner table over groups of nodes.
///
/// `cost(mask, v)` is the minimum weight of a tree containing `v` and at
/// least one member of every group in `mask`. With singleton groups this is
/// the classic Steiner DP. Infinite matrix entries are missing edges.
pub(crate) struct SteinerDp<'a> {
    metric: &'a CostMatrix,
    nodes: Vec<usize>,
    groups: usize,
    dp: Vec<f64>,
    back: Vec<Back>,
}

impl<'a> SteinerDp<'a> {
    /// `candidates` lists the nodes the tree may use; every group member
    /// must be among them.
    pub(crate) fn new(metric: &'a CostMatrix, candidates: &[usize], groups: &[Vec<usize>]) -> Self {
        let nodes = candidates.to_vec();
        let v = nodes.len();
        let g = groups.len();
        let full = 1usize << g;
        let mut dp = vec![f64::INFINITY; full * v];
        let mut back = vec![Back::Unset; full * v];
        let pos: std::collections::HashMap<usize, usize> =
            nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        for i in 0..v {
            dp[i] = 0.0;
            back[i] = Back::Leaf;
        }
        for (gi, members) in groups.iter().enumerate() {
            let mask = 1usize << gi;
            for m in members {
                let p = pos[m];
                dp[mask * v + p] = 0.0;
                back[mask * v + p] = Back::Leaf;
            }
        }
        let mut table = SteinerDp {
            metric,
            nodes,
            groups: g,
            dp,
            back,
        };
        for mask in 1..full {
            if mask.count_ones() > 1 {
                table.split(mask);
            }
            table.relax(mask);
        }
        table
    }

    fn split(&mut self, mask: usize) {
        let v = self.nodes.len();
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            let rest = mask ^ sub;
            if sub < rest {
                for p in 0..v {
                    let c = self.dp[sub * v + p] + self.dp[rest * v + p];
                    if c < self.dp[mask * v + p] {
                        self.dp[mask * v + p] = c;
                        self.back[mask * v + p] = Back::Split(sub as u32);
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
    }

    // Dense Dijkstra seeded with the current row.
    fn relax(&mut self, mask: usize) {
        let v = self.nodes.len();
        let base = mask * v;
        let mut done = vec![false; v];
        for _ in 0..v {
            let mut p = usize::MAX;
            for i in 0..v {
                if !done[i] && self.dp[base + i].is_finite() && (p == usize::MAX || self.dp[base + i] < self.dp[base + p]) {
                    p = i;
                }
            }
            if p == usize::MAX {
                break;
            }
            done[p] = true;
            let dp_p = self.dp[base + p];
            let u = self.nodes[p];
            for i in 0..v {
                if done[i] {
                    continue;
                }
                let w = self.metric.get(u, self.nodes[i]);
                if w.is_infinite() {
                    continue;
                }
                let c = dp_p + w;
                if c < self.dp[base + i] {
                    self.dp[base + i] = c;
                    self.back[base + i] = Back::Move(p as u32);
                }
            }
        }
    }

    pub(crate) fn full_mask(&self) -> usize {
        (1usize << self.groups) - 1
    }

    pub(crate) fn position(&self, node: usize) -> Option<usize> {
        self.nodes.iter().position(|&x| x == node)
    }

    pub(crate) fn cost_at(&self, mask: usize, node_pos: usize) -> f64 {
        self.dp[mask * self.nodes.len() + node_pos]
    }

    /// Edges of the tree realizing `cost_at(mask, node_pos)`; may contain
    /// repeats when the two halves of a split overlap.
    pub(crate) fn edges_at(&self, mask: usize, node_pos: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut stack = vec![(mask, node_pos)];
        let v = self.nodes.len();
        while let Some((m, p)) = stack.pop() {
            match self.back[m * v + p] {
                Back::Unset | Back::Leaf => {}
                Back::Split(sub) => {
                    let sub = sub as usize;
                    stack.push((sub, p));
                    stack.push((m ^ sub, p));
                }
                Back::Move(q) => {
                    let q = q as usize;
                    out.push((self.nodes[q], self.nodes[p]));
                    stack.push((m, q));
                }
            }
        }
        out
    }
}

/// Largest terminal count accepted by [`exact_steiner_tree`].
pub const STEINER_TERMINAL_CAP: usize = 12;

/// Minimum-weight tree inside `candidates` connecting all `terminals`.
/// Rooted at the first terminal.
pub fn exact_steiner_tree(metric: &CostMatrix, terminals: &[usize], candidates: &[usize]) -> Result<Tree> {
    let mut terms: Vec<usize> = terminals.to_vec();
    terms.dedup();
    let Some(&root) = terms.first() else {
        return Err(Error::InvalidInput("Steiner tree needs at least one terminal".into()));
    };
    if terms.len() > STEINER_TERMINAL_CAP {
        return Err(Error::UnsupportedSize(format!(
            "{} terminals exceed the exact Steiner cap of {STEINER_TERMINAL_CAP}",
            terms.len()
        )));
    }
    let mut cands: Vec<usize> = candidates.to_vec();
    cands.extend(&terms);
    cands.sort_unstable();
    cands.dedup();
    if let Some(&v) = cands.iter().find(|&&v| v >= metric.len()) {
        return Err(Error::InvalidInput(format!("node {v} outside the metric")));
    }
    // The root is held by every tree, so only the other terminals form groups.
    let groups: Vec<Vec<usize>> = terms[1..].iter().map(|&t| vec![t]).collect();
    let dp = SteinerDp::new(metric, &cands, &groups);
    let rp = dp.position(root).unwrap();
    let full = dp.full_mask();
    if dp.cost_at(full, rp).is_infinite() {
        return Err(Error::InvalidInput("terminals are not connected".into()));
    }
    Ok(spanning_tree_of_edges(root, &dp.edges_at(full, rp), metric))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KMstMode {
    #[default]
    Exact,
    Heuristic,
}

/// Largest node count for exact k-MST.
pub const KMST_EXACT_CAP: usize = 20;

/// Minimum tree containing `root` and spanning at least `k` of `nodes`
/// (`k` counts the root).
///
/// Exact mode enumerates every `k`-subset containing the root and takes its
/// MST. Heuristic mode grows from the root by nearest attachment and stops
/// at `k` vertices.
pub fn k_mst(root: usize, nodes: &[usize], metric: &CostMatrix, k: usize, mode: KMstMode) -> Result<Tree> {
    let mut uniq: Vec<usize> = nodes.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if !uniq.contains(&root) {
        return Err(Error::InvalidInput(format!("root {root} is not among the nodes")));
    }
    if k == 0 || k > uniq.len() {
        return Err(Error::InvalidInput(format!("k = {k} outside [1, {}]", uniq.len())));
    }
    let others: Vec<usize> = uniq.into_iter().filter(|&v| v != root).collect();
    match mode {
        KMstMode::Heuristic => {
            let mut all = vec![root];
            all.extend(&others);
            let full = prim(root, &all, metric);
            // Prim adds vertices in nearest-attachment order.
            let edges: Vec<(usize, usize)> = full.edges.into_iter().take(k - 1).collect();
            let weight = edges.iter().map(|&(u, v)| metric.get(u, v)).sum();
            Ok(Tree { root, edges, weight })
        }
        KMstMode::Exact => {
            if others.len() + 1 > KMST_EXACT_CAP {
                return Err(Error::UnsupportedSize(format!(
                    "exact k-MST limited to {KMST_EXACT_CAP} nodes, got {}",
                    others.len() + 1
                )));
            }
            let mut best: Option<(f64, Vec<usize>)> = None;
            for_each_combination(others.len(), k - 1, |idx| {
                let subset: Vec<usize> = idx.iter().map(|&i| others[i]).collect();
                let w = mst_weight(root, &subset, metric);
                if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                    best = Some((w, subset));
                }
            });
            let (_, subset) = best.expect("at least one subset");
            let mut all = vec![root];
            all.extend(subset);
            Ok(prim(root, &all, metric))
        }
    }
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
