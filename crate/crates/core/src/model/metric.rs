use serde::{Deserialize, Serialize};

use super::CostMatrix;
use crate::error::{Error, Result};
use crate::mst_steiner::{spanning_tree_of_edges, Tree};

/// Planar node positions plus the path-loss exponent used to derive costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanLayout {
    pub coords: Vec<(f64, f64)>,
    pub kappa: f64,
}

impl EuclideanLayout {
    pub fn new(coords: Vec<(f64, f64)>, kappa: f64) -> Result<Self> {
        let layout = EuclideanLayout { coords, kappa };
        layout.check()?;
        Ok(layout)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.kappa >= 2.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "path-loss exponent must be a finite value >= 2, got {}",
                self.kappa
            )));
        }
        if let Some(i) = self
            .coords
            .iter()
            .position(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::InvalidInput(format!("coordinate of node {i} is not finite")));
        }
        Ok(())
    }

    /// `|u - v|^kappa`. Exact for `kappa == 2` (no square root round trip).
    pub fn energy(&self, u: usize, v: usize) -> f64 {
        let (ax, ay) = self.coords[u];
        let (bx, by) = self.coords[v];
        let sq = (ax - bx) * (ax - bx) + (ay - by) * (ay - by);
        if self.kappa == 2.0 {
            sq
        } else {
            sq.powf(self.kappa / 2.0)
        }
    }
}

/// Broadcast and funnel costs induced by a planar layout: both equal
/// `|u - v|^kappa`.
pub fn euclidean_weights(layout: &EuclideanLayout) -> Result<(CostMatrix, CostMatrix)> {
    layout.check()?;
    let m = CostMatrix::from_fn(layout.coords.len(), |u, v| layout.energy(u, v));
    Ok((m.clone(), m))
}

/// All-pairs shortest-path closure of a symmetric cost table, with next-hop
/// pointers so that closure edges can be expanded back into raw edges.
#[derive(Debug, Clone)]
pub struct MetricClosure {
    dist: CostMatrix,
    next: Vec<usize>,
}

impl MetricClosure {
    /// Floyd-Warshall. Infinite entries are treated as missing edges.
    pub fn new(raw: &CostMatrix) -> Result<Self> {
        raw.check_costs("d", true)?;
        if !raw.is_symmetric() {
            return Err(Error::InvalidInput("funnel costs must be symmetric".into()));
        }
        let n = raw.len();
        let mut dist = raw.clone();
        let mut next: Vec<usize> = (0..n * n).map(|i| i % n.max(1)).collect();
        for k in 0..n {
            for i in 0..n {
                let dik = dist.get(i, k);
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let alt = dik + dist.get(k, j);
                    if alt < dist.get(i, j) {
                        dist.set(i, j, alt);
                        next[i * n + j] = next[i * n + k];
                    }
                }
            }
        }
        Ok(MetricClosure { dist, next })
    }

    pub fn dist(&self) -> &CostMatrix {
        &self.dist
    }

    pub fn into_dist(self) -> CostMatrix {
        self.dist
    }

    /// Node sequence of a shortest path from `u` to `v` (inclusive).
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let n = self.dist.len();
        let mut path = vec![u];
        if u == v || self.dist.get(u, v).is_infinite() {
            return path;
        }
        let mut cur = u;
        while cur != v {
            cur = self.next[cur * n + v];
            path.push(cur);
            if path.len() > n {
                break;
            }
        }
        path
    }

    /// Replaces each closure edge by its shortest raw path and returns a
    /// spanning tree (under `raw`) of the union, restricted to the part
    /// connected to `root`. The weight never exceeds the closure weight of
    /// `edges`.
    pub fn expand(&self, raw: &CostMatrix, root: usize, edges: &[(usize, usize)]) -> Tree {
        let mut raw_edges = Vec::new();
        for &(u, v) in edges {
            let p = self.path(u, v);
            raw_edges.extend(p.windows(2).map(|w| (w[0], w[1])));
        }
        spanning_tree_of_edges(root, &raw_edges, raw)
    }
}

/// Shortest-path closure of a symmetric, nonnegative cost table.
pub fn metric_completion(raw: &CostMatrix) -> Result<CostMatrix> {
    Ok(MetricClosure::new(raw)?.into_dist())
}
