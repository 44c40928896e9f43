//! Instance generators: random Euclidean point sets, the two set-cover
//! hardness constructions, and a family that defeats terminal-centric
//! assignment.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{metric_completion, CostMatrix, EuclideanLayout, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Uniform over the unit square.
    Uniform,
    /// Independent standard normal coordinates.
    Gaussian,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Gaussian => "gaussian",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Distribution::Uniform => 1,
            Distribution::Gaussian => 2,
        }
    }

    fn sample(self, rng: &mut impl Rng) -> (f64, f64) {
        match self {
            Distribution::Uniform => (rng.random::<f64>(), rng.random::<f64>()),
            Distribution::Gaussian => (rng.sample(StandardNormal), rng.sample(StandardNormal)),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Distribution::Uniform),
            "gaussian" | "normal" => Ok(Distribution::Gaussian),
            other => Err(Error::InvalidParameter(format!("unknown distribution {other:?}"))),
        }
    }
}

/// Parameters of one random instance family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub distribution: Distribution,
    pub s_size: usize,
    pub q: usize,
    pub group_size: usize,
    pub kappa: f64,
    pub seed: u64,
}

impl RandomSpec {
    pub fn check(&self) -> Result<()> {
        if self.s_size == 0 || self.q == 0 || self.group_size == 0 {
            return Err(Error::InvalidParameter(
                "source count, group count and group size must be at least 1".into(),
            ));
        }
        if !(self.kappa >= 2.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be >= 2, got {}", self.kappa)));
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the substream for one trial.
pub fn trial_seed(spec: &RandomSpec, trial: usize) -> u64 {
    [spec.distribution.tag(), spec.s_size as u64, trial as u64]
        .iter()
        .fold(splitmix64(spec.seed), |h, &x| splitmix64(h ^ x))
}

/// Sources `0..s_size`, then `q` destination groups of `group_size`
/// consecutive terminals. One source group; every destination group is
/// demanded from it.
pub fn gen_random(spec: &RandomSpec, trial: usize) -> Result<Instance> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec, trial));
    let n = spec.s_size + spec.q * spec.group_size;
    let coords = (0..n).map(|_| spec.distribution.sample(&mut rng)).collect();
    let layout = EuclideanLayout::new(coords, spec.kappa)?;
    let sources = (0..spec.s_size).collect();
    let groups = (0..spec.q)
        .map(|j| {
            let start = spec.s_size + j * spec.group_size;
            (start..start + spec.group_size).collect()
        })
        .collect();
    let demands = (0..spec.q).map(|j| (0, j)).collect();
    Instance::euclidean(layout, vec![sources], groups, demands)
}

fn universe(sets: &[Vec<usize>]) -> Result<usize> {
    if sets.is_empty() {
        return Err(Error::InvalidInput("set system has no sets".into()));
    }
    let covered: BTreeSet<usize> = sets.iter().flatten().copied().collect();
    let n = covered.last().map_or(0, |&m| m + 1);
    if n == 0 {
        return Err(Error::InvalidInput("set system has no elements".into()));
    }
    if let Some(e) = (0..n).find(|e| !covered.contains(e)) {
        return Err(Error::InvalidInput(format!("element {e} is in no set")));
    }
    Ok(n)
}

/// Elements are `0..=max`. Node `i < m` is the point of set `i`; each
/// (set, element) membership gets its own terminal at unit distance from
/// the set point, and copies belonging to one set share coordinates.
pub fn gen_setcover_euclidean(sets: &[Vec<usize>]) -> Result<Instance> {
    let n_elem = universe(sets)?;
    let m = sets.len();
    let members: Vec<(usize, usize)> = sets
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().copied().collect::<BTreeSet<_>>().into_iter().map(move |e| (i, e)))
        .collect();
    let total = m + members.len();
    let spacing = 10.0 * total as f64 + 10.0;
    let side = (m as f64).sqrt().ceil() as usize;
    let point = |i: usize| ((i % side) as f64 * spacing, (i / side) as f64 * spacing);
    let mut coords: Vec<(f64, f64)> = (0..m).map(point).collect();
    let mut groups = vec![Vec::new(); n_elem];
    for &(i, e) in &members {
        let (x, y) = point(i);
        groups[e].push(coords.len());
        coords.push((x + 1.0, y));
    }
    let layout = EuclideanLayout::new(coords, 2.0)?;
    let demands = (0..n_elem).map(|e| (0, e)).collect();
    Instance::euclidean(layout, vec![(0..m).collect()], groups, demands)
}

/// Default `(L, M)` for [`gen_setcover_g2s`].
pub fn setcover_g2s_defaults(num_sets: usize, num_elements: usize) -> (f64, f64) {
    let n = num_elements as f64;
    let l = 100.0 * n;
    let m = 100.0 * num_sets as f64 * l * (num_elements.max(2) as f64).ln();
    (l, m)
}

/// Sets are nodes `0..m`, elements `m..m+n`, each element its own
/// destination group.
pub fn gen_setcover_g2s(sets: &[Vec<usize>], l: f64, big_m: f64) -> Result<Instance> {
    let n_elem = universe(sets)?;
    let m = sets.len();
    if !(l > n_elem as f64) {
        return Err(Error::InvalidParameter(format!("L = {l} must exceed the element count {n_elem}")));
    }
    if !(big_m > l) || !big_m.is_finite() {
        return Err(Error::InvalidParameter(format!("M = {big_m} must be finite and exceed L = {l}")));
    }
    let total = m + n_elem;
    let mut raw = CostMatrix::filled(total, f64::INFINITY);
    let mut c = CostMatrix::filled(total, big_m);
    for (i, s) in sets.iter().enumerate() {
        for &e in s {
            raw.set_sym(i, m + e, 1.0);
            c.set(i, m + e, l);
        }
    }
    let completed = metric_completion(&raw)?;
    let d = CostMatrix::from_fn(total, |u, v| {
        let w = completed.get(u, v);
        if w.is_finite() {
            w
        } else {
            big_m
        }
    });
    let groups = (0..n_elem).map(|e| vec![m + e]).collect();
    let demands = (0..n_elem).map(|e| (0, e)).collect();
    Instance::new(c, d, vec![(0..m).collect()], groups, demands)
}

/// Sources `(i/q, 0)` for `i = 1..=q` are nodes `0..q`. Group `i` holds
/// `(i/q, 1)` and its own copy of the corner `(0, 1)`.
pub fn gen_pathological_tcentric(q: usize) -> Result<Instance> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("q must be at least 2, got {q}")));
    }
    let qf = q as f64;
    let mut coords: Vec<(f64, f64)> = (1..=q).map(|i| (i as f64 / qf, 0.0)).collect();
    let mut groups = Vec::with_capacity(q);
    for i in 1..=q {
        let a = coords.len();
        coords.push((i as f64 / qf, 1.0));
        coords.push((0.0, 1.0));
        groups.push(vec![a, a + 1]);
    }
    let layout = EuclideanLayout::new(coords, 2.0)?;
    let demands = (0..q).map(|j| (0, j)).collect();
    Instance::euclidean(layout, vec![(0..q).collect()], groups, demands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_optimal;

    fn spec(distribution: Distribution, s_size: usize) -> RandomSpec {
        RandomSpec {
            distribution,
            s_size,
            q: 10,
            group_size: 10,
            kappa: 2.0,
            seed: 7,
        }
    }

    #[test]
    fn random_shape() {
        let inst = gen_random(&spec(Distribution::Uniform, 4), 0).unwrap();
        assert_eq!(inst.num_nodes(), 104);
        assert_eq!(inst.demands.len(), 10);
        assert_eq!(inst.source_groups, vec![vec![0, 1, 2, 3]]);
        assert!(inst.dest_groups.iter().all(|g| g.len() == 10));
    }

    #[test]
    fn random_is_deterministic() {
        let s = spec(Distribution::Gaussian, 16);
        assert_eq!(gen_random(&s, 3).unwrap(), gen_random(&s, 3).unwrap());
        assert_ne!(gen_random(&s, 3).unwrap(), gen_random(&s, 4).unwrap());
    }

    #[test]
    fn uniform_in_unit_square() {
        let inst = gen_random(&spec(Distribution::Uniform, 64), 1).unwrap();
        let layout = inst.layout().unwrap();
        assert!(layout.coords.iter().all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)));
    }

    #[test]
    fn gaussian_spreads_beyond_unit_square() {
        let inst = gen_random(&spec(Distribution::Gaussian, 64), 1).unwrap();
        let layout = inst.layout().unwrap();
        assert!(layout.coords.iter().any(|&(x, y)| x < 0.0 || y < 0.0 || x > 1.0 || y > 1.0));
    }

    #[test]
    fn substreams_differ_by_size() {
        let a = spec(Distribution::Uniform, 1);
        let b = spec(Distribution::Uniform, 4);
        assert_ne!(trial_seed(&a, 0), trial_seed(&b, 0));
    }

    #[test]
    fn bad_spec_rejected() {
        let mut s = spec(Distribution::Uniform, 0);
        assert!(gen_random(&s, 0).is_err());
        s.s_size = 1;
        s.kappa = 1.5;
        assert!(gen_random(&s, 0).is_err());
    }

    #[test]
    fn setcover_single_set() {
        let inst = gen_setcover_euclidean(&[vec![0]]).unwrap();
        assert_eq!(inst.num_nodes(), 2);
        assert_eq!(brute_force_optimal(&inst).unwrap().cost, 2.0);
    }

    #[test]
    fn setcover_one_set_suffices() {
        let inst = gen_setcover_euclidean(&[vec![0, 1], vec![1]]).unwrap();
        let res = brute_force_optimal(&inst).unwrap();
        assert_eq!(res.cost, 2.0);
        assert!(res.solution.funnels.iter().all(|f| f.ball == 1.0));
    }

    #[test]
    fn setcover_copies_colocated() {
        let inst = gen_setcover_euclidean(&[vec![0, 1, 2], vec![2]]).unwrap();
        let layout = inst.layout().unwrap();
        let copies = [2, 3, 4];
        assert!(copies.iter().all(|&v| layout.coords[v] == layout.coords[2]));
        assert_eq!(layout.coords[2], (1.0, 0.0));
        let far = layout.coords[1].0.hypot(layout.coords[1].1);
        assert!(far > 10.0 * inst.num_nodes() as f64);
    }

    #[test]
    fn setcover_uncovered_element() {
        assert!(matches!(gen_setcover_euclidean(&[vec![0, 2]]), Err(Error::InvalidInput(_))));
        assert!(gen_setcover_euclidean(&[]).is_err());
    }

    #[test]
    fn g2s_construction_weights() {
        let sets = vec![vec![0, 1], vec![1, 2]];
        let (l, m) = setcover_g2s_defaults(2, 3);
        let inst = gen_setcover_g2s(&sets, l, m).unwrap();
        assert_eq!(inst.c(0, 2), l);
        assert_eq!(inst.c(0, 4), m);
        assert_eq!(inst.d(0, 3), 1.0);
        assert_eq!(inst.d(0, 4), 3.0);
        assert_eq!(inst.d(0, 1), 2.0);
    }

    #[test]
    fn g2s_optimum_matches_cover() {
        // Optimum cover has 2 sets; elements 3.
        let sets = vec![vec![0], vec![1, 2], vec![0, 1]];
        let (l, m) = setcover_g2s_defaults(3, 3);
        let inst = gen_setcover_g2s(&sets, l, m).unwrap();
        let opt = brute_force_optimal(&inst).unwrap().cost;
        assert!((opt - (2.0 * l + 3.0)).abs() < 1e-6);
    }

    #[test]
    fn g2s_disjoint_sets() {
        let sets = vec![vec![0], vec![1]];
        let (l, m) = setcover_g2s_defaults(2, 2);
        let inst = gen_setcover_g2s(&sets, l, m).unwrap();
        let res = brute_force_optimal(&inst).unwrap();
        assert!((res.cost - (2.0 * l + 2.0)).abs() < 1e-6);
        assert_eq!(res.solution.funnels.len(), 2);
    }

    #[test]
    fn g2s_bad_parameters() {
        let sets = vec![vec![0, 1]];
        assert!(matches!(gen_setcover_g2s(&sets, 2.0, 100.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(gen_setcover_g2s(&sets, 10.0, 10.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn pathological_shape() {
        let inst = gen_pathological_tcentric(4).unwrap();
        assert_eq!(inst.source_groups[0].len(), 4);
        assert_eq!(inst.dest_groups.len(), 4);
        let layout = inst.layout().unwrap();
        let corners: Vec<usize> = inst.dest_groups.iter().map(|g| g[1]).collect();
        assert!(corners.iter().all(|&v| layout.coords[v] == (0.0, 1.0)));
        assert_eq!(corners.iter().collect::<BTreeSet<_>>().len(), 4);
        assert!(gen_pathological_tcentric(1).is_err());
    }
}
