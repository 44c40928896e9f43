use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{euclidean_weights, CostMatrix, EuclideanLayout, Funnel, Solution, Witness};
use crate::error::{Error, Result};

/// A g2g-anycast instance over nodes `0..n`.
///
/// `c(u, v)` is the broadcast threshold `u` needs to reach `v`; `d(u, v)` is
/// the symmetric cost of a funnel-tree link. Demands are `(source group,
/// destination group)` index pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    c: CostMatrix,
    d: CostMatrix,
    pub source_groups: Vec<Vec<usize>>,
    pub dest_groups: Vec<Vec<usize>>,
    pub demands: Vec<(usize, usize)>,
    layout: Option<EuclideanLayout>,
}

impl Instance {
    pub fn new(
        c: CostMatrix,
        d: CostMatrix,
        source_groups: Vec<Vec<usize>>,
        dest_groups: Vec<Vec<usize>>,
        demands: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let inst = Instance {
            c,
            d,
            source_groups,
            dest_groups,
            demands,
            layout: None,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn euclidean(
        layout: EuclideanLayout,
        source_groups: Vec<Vec<usize>>,
        dest_groups: Vec<Vec<usize>>,
        demands: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let (c, d) = euclidean_weights(&layout)?;
        let inst = Instance {
            c,
            d,
            source_groups,
            dest_groups,
            demands,
            layout: Some(layout),
        };
        inst.check()?;
        Ok(inst)
    }

    fn check(&self) -> Result<()> {
        let n = self.c.len();
        if self.d.len() != n {
            return Err(Error::InvalidInput(format!(
                "c is {n}x{n} but d is {m}x{m}",
                m = self.d.len()
            )));
        }
        self.c.check_costs("c", false)?;
        self.d.check_costs("d", false)?;
        if !self.d.is_symmetric() {
            return Err(Error::InvalidInput("d must be symmetric".into()));
        }
        for (kind, groups) in [("source", &self.source_groups), ("destination", &self.dest_groups)] {
            for (i, g) in groups.iter().enumerate() {
                if g.is_empty() {
                    return Err(Error::InvalidInput(format!("{kind} group {i} is empty")));
                }
                if let Some(&v) = g.iter().find(|&&v| v >= n) {
                    return Err(Error::InvalidInput(format!(
                        "{kind} group {i} references unknown node {v}"
                    )));
                }
            }
        }
        for &(i, j) in &self.demands {
            if i >= self.source_groups.len() || j >= self.dest_groups.len() {
                return Err(Error::InvalidInput(format!("demand ({i}, {j}) out of range")));
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.c.len()
    }

    #[inline]
    pub fn c(&self, u: usize, v: usize) -> f64 {
        self.c.get(u, v)
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.d.get(u, v)
    }

    pub fn broadcast_costs(&self) -> &CostMatrix {
        &self.c
    }

    pub fn funnel_costs(&self) -> &CostMatrix {
        &self.d
    }

    pub fn layout(&self) -> Option<&EuclideanLayout> {
        self.layout.as_ref()
    }

    pub fn is_euclidean(&self) -> bool {
        self.layout.is_some()
    }

    /// For a single-source-group instance: the source nodes and the distinct
    /// demanded destination groups, in order of first appearance.
    pub fn star(&self) -> Result<(&[usize], Vec<usize>)> {
        let Some(&(src, _)) = self.demands.first() else {
            let empty: &[usize] = self.source_groups.first().map_or(&[], |g| g.as_slice());
            return Ok((empty, Vec::new()));
        };
        if self.demands.iter().any(|&(i, _)| i != src) {
            return Err(Error::UnsupportedInstance(
                "demands must share one source group (decompose first)".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        let groups = self
            .demands
            .iter()
            .map(|&(_, j)| j)
            .filter(|j| seen.insert(*j))
            .collect();
        Ok((&self.source_groups[src], groups))
    }

    /// Union of the nodes of every demanded destination group, sorted.
    pub fn demanded_terminals(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .demands
            .iter()
            .flat_map(|&(_, j)| self.dest_groups[j].iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// Builds a solution from per-source funnels and one `(source, terminal)`
    /// witness per demanded destination group.
    pub(crate) fn solution_from_group_witnesses(
        &self,
        funnels: Vec<Funnel>,
        group_witness: &std::collections::BTreeMap<usize, (usize, usize)>,
    ) -> Solution {
        let witnesses = self
            .demands
            .iter()
            .enumerate()
            .filter_map(|(k, &(_, j))| {
                group_witness.get(&j).map(|&(source, terminal)| Witness {
                    demand: k,
                    source,
                    terminal,
                })
            })
            .collect();
        Solution { funnels, witnesses }
    }

    /// Same instance with every node relabeled through `perm` (old -> new).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Instance> {
        let n = self.num_nodes();
        if perm.len() != n {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut inv = vec![usize::MAX; n];
        for (old, &new) in perm.iter().enumerate() {
            if new >= n || inv[new] != usize::MAX {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            inv[new] = old;
        }
        let map_groups =
            |gs: &[Vec<usize>]| gs.iter().map(|g| g.iter().map(|&v| perm[v]).collect()).collect();
        let mut inst = Instance {
            c: CostMatrix::from_fn(n, |u, v| self.c.get(inv[u], inv[v])),
            d: CostMatrix::from_fn(n, |u, v| self.d.get(inv[u], inv[v])),
            source_groups: map_groups(&self.source_groups),
            dest_groups: map_groups(&self.dest_groups),
            demands: self.demands.clone(),
            layout: None,
        };
        if let Some(l) = &self.layout {
            inst.layout = Some(EuclideanLayout {
                coords: (0..n).map(|u| l.coords[inv[u]]).collect(),
                kappa: l.kappa,
            });
        }
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Instance> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }
}

/// On-disk instance layout. Costs are derived from `coords` when present,
/// otherwise `c` and `d` must be given as dense row-major matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub nodes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<CostMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<CostMatrix>,
    pub source_groups: Vec<Vec<usize>>,
    pub dest_groups: Vec<Vec<usize>>,
    pub demands: Vec<(usize, usize)>,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Instance> {
        if f.nodes.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(Error::InvalidInput("nodes must be listed as 0..n in order".into()));
        }
        let n = f.nodes.len();
        match (f.coords, f.c, f.d) {
            (Some(coords), None, None) => {
                if coords.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "{} coordinates for {n} nodes",
                        coords.len()
                    )));
                }
                let layout = EuclideanLayout::new(coords, f.kappa.unwrap_or(2.0))?;
                Instance::euclidean(layout, f.source_groups, f.dest_groups, f.demands)
            }
            (Some(_), _, _) => Err(Error::InvalidInput(
                "give either coords or explicit c/d matrices, not both".into(),
            )),
            (None, Some(c), Some(d)) => {
                if c.len() != n {
                    return Err(Error::InvalidInput(format!("c has {} rows for {n} nodes", c.len())));
                }
                Instance::new(c, d, f.source_groups, f.dest_groups, f.demands)
            }
            (None, _, _) => Err(Error::InvalidInput(
                "instance needs coords or both c and d".into(),
            )),
        }
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        let (coords, kappa, c, d) = match &inst.layout {
            Some(l) => (Some(l.coords.clone()), Some(l.kappa), None, None),
            None => (None, None, Some(inst.c.clone()), Some(inst.d.clone())),
        };
        InstanceFile {
            nodes: (0..inst.num_nodes()).collect(),
            coords,
            kappa,
            c,
            d,
            source_groups: inst.source_groups.clone(),
            dest_groups: inst.dest_groups.clone(),
            demands: inst.demands.clone(),
        }
    }
}

/// A single-source-group piece of a larger instance.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub instance: Instance,
    /// Index of the source group in the parent instance.
    pub source_group: usize,
    /// Local destination-group index -> parent destination-group index.
    pub dest_group_ids: Vec<usize>,
}

/// Splits an instance into one star-shaped subinstance per source group that
/// has at least one demand. Node ids and costs are shared with the parent.
pub fn decompose_demands(instance: &Instance) -> Vec<SubInstance> {
    let mut out = Vec::new();
    for (i, group) in instance.source_groups.iter().enumerate() {
        let mut dests: Vec<usize> = instance
            .demands
            .iter()
            .filter(|&&(si, _)| si == i)
            .map(|&(_, j)| j)
            .collect();
        if dests.is_empty() {
            continue;
        }
        dests.sort_unstable();
        dests.dedup();
        let sub = Instance {
            c: instance.c.clone(),
            d: instance.d.clone(),
            source_groups: vec![group.clone()],
            dest_groups: dests.iter().map(|&j| instance.dest_groups[j].clone()).collect(),
            demands: (0..dests.len()).map(|j| (0, j)).collect(),
            layout: instance.layout.clone(),
        };
        out.push(SubInstance {
            instance: sub,
            source_group: i,
            dest_group_ids: dests,
        });
    }
    out
}

/// Unions subinstance solutions into a solution of the parent instance,
/// re-indexing witnesses to the parent's demand list.
pub fn merge_solutions(instance: &Instance, parts: &[(SubInstance, Solution)]) -> Solution {
    let mut funnels = Vec::new();
    let mut witnesses = Vec::new();
    for (sub, sol) in parts {
        funnels.extend(sol.funnels.iter().cloned());
        for w in &sol.witnesses {
            let (_, local_j) = sub.instance.demands[w.demand];
            let parent_j = sub.dest_group_ids[local_j];
            for (k, &(i, j)) in instance.demands.iter().enumerate() {
                if i == sub.source_group && j == parent_j {
                    witnesses.push(Witness {
                        demand: k,
                        source: w.source,
                        terminal: w.terminal,
                    });
                }
            }
        }
    }
    witnesses.sort_by_key(|w| w.demand);
    witnesses.dedup_by_key(|w| w.demand);
    Solution { funnels, witnesses }
}
