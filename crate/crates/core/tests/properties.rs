//! Randomized cross-checks between solvers, the oracle and the reduction.

use anycast_core::cover_grow::cover_and_grow;
use anycast_core::g2s::g2s_greedy;
use anycast_core::generate::{gen_random, Distribution, RandomSpec};
use anycast_core::oracle::brute_force_optimal;
use anycast_core::reduction::{
    build_set_connectivity, edge_set_weight, embed_solution, is_feasible, lift_solution,
    solve_set_connectivity_exact,
};
use anycast_core::{
    decompose_demands, evaluate_cost, merge_solutions, validate_solution, EuclideanLayout, Instance, SolverKind,
};
use proptest::prelude::*;

const SHAPES: [(usize, usize, usize); 6] = [(1, 3, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (3, 5, 1), (1, 7, 1)];

fn tiny(seed: u64, shape: usize, gaussian: bool) -> Instance {
    let (s_size, q, group_size) = SHAPES[shape];
    let spec = RandomSpec {
        distribution: if gaussian { Distribution::Gaussian } else { Distribution::Uniform },
        s_size,
        q,
        group_size,
        kappa: 2.0,
        seed,
    };
    gen_random(&spec, 0).unwrap()
}

fn tiny_strategy() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 0..SHAPES.len(), any::<bool>()).prop_map(|(seed, shape, g)| tiny(seed, shape, g))
}

/// Two source groups over shared nodes: groups `{0}` and `{1, 2}`.
fn two_group_strategy() -> impl Strategy<Value = Instance> {
    (prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 8), any::<bool>()).prop_map(|(coords, overlap)| {
        let dests = vec![vec![3, 4], vec![5], vec![6, 7]];
        let mut demands = vec![(0, 0), (0, 1), (1, 2)];
        if overlap {
            demands.push((1, 1));
        }
        Instance::euclidean(EuclideanLayout::new(coords, 2.0).unwrap(), vec![vec![0], vec![1, 2]], dests, demands)
            .unwrap()
    })
}

fn scaled(inst: &Instance, alpha: f64) -> Instance {
    let layout = inst.layout().unwrap();
    let coords = layout.coords.iter().map(|&(x, y)| (alpha * x, alpha * y)).collect();
    Instance::euclidean(
        EuclideanLayout::new(coords, layout.kappa).unwrap(),
        inst.source_groups.clone(),
        inst.dest_groups.clone(),
        inst.demands.clone(),
    )
    .unwrap()
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

const SOLVERS: [SolverKind; 6] = [
    SolverKind::CoverAndGrow,
    SolverKind::SmallestEdge,
    SolverKind::TCentric,
    SolverKind::TAdaptive,
    SolverKind::SmallestIncrement,
    SolverKind::SetConnectivity,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oracle_output_is_feasible(inst in tiny_strategy()) {
        let res = brute_force_optimal(&inst).unwrap();
        prop_assert!(validate_solution(&inst, &res.solution).ok);
        prop_assert!((evaluate_cost(&inst, &res.solution).unwrap().total - res.cost).abs() < 1e-12);
    }

    #[test]
    fn oracle_bounds_every_solver(inst in tiny_strategy()) {
        let opt = brute_force_optimal(&inst).unwrap().cost;
        for k in SOLVERS {
            let sol = k.solve(&inst).unwrap();
            prop_assert!(validate_solution(&inst, &sol).ok, "{}", k);
            let cost = evaluate_cost(&inst, &sol).unwrap().total;
            prop_assert!(cost >= opt - 1e-9, "{} {} < {}", k, cost, opt);
        }
    }

    #[test]
    fn oracle_relabel_invariant(inst in tiny_strategy(), rot in 1usize..8) {
        let n = inst.num_nodes();
        let perm: Vec<usize> = (0..n).map(|v| (v * 5 + rot) % n).collect();
        prop_assume!({
            let mut p = perm.clone();
            p.sort_unstable();
            p == (0..n).collect::<Vec<_>>()
        });
        let a = brute_force_optimal(&inst).unwrap().cost;
        let b = brute_force_optimal(&inst.relabeled(&perm).unwrap()).unwrap().cost;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn cover_and_grow_within_harmonic_bound(inst in tiny_strategy()) {
        let opt = brute_force_optimal(&inst).unwrap().cost;
        let cost = evaluate_cost(&inst, &cover_and_grow(&inst).unwrap()).unwrap().total;
        prop_assert!(cost <= 14.68 * harmonic(inst.demands.len()) * opt + 1e-9);
    }

    #[test]
    fn g2s_within_harmonic_bound(seed in any::<u64>(), s_size in 1usize..=3, q in 2usize..=8) {
        let spec = RandomSpec { distribution: Distribution::Uniform, s_size, q, group_size: 1, kappa: 2.0, seed };
        let inst = gen_random(&spec, 0).unwrap();
        let opt = brute_force_optimal(&inst).unwrap().cost;
        let sol = g2s_greedy(&inst).unwrap();
        prop_assert!(validate_solution(&inst, &sol).ok);
        let cost = evaluate_cost(&inst, &sol).unwrap().total;
        prop_assert!(cost <= 2.0 * harmonic(q) * opt + 1e-9);
    }

    #[test]
    fn lifting_never_increases_cost(inst in tiny_strategy()) {
        let sc = build_set_connectivity(&inst).unwrap();
        let sol = solve_set_connectivity_exact(&sc).unwrap();
        prop_assert!(is_feasible(&sc, &sol.edges));
        let lifted = lift_solution(&inst, &sc, &sol.edges).unwrap();
        prop_assert!(validate_solution(&inst, &lifted).ok);
        prop_assert!(evaluate_cost(&inst, &lifted).unwrap().total <= sol.weight + 1e-9);
    }

    #[test]
    fn oracle_solutions_embed(inst in tiny_strategy()) {
        let res = brute_force_optimal(&inst).unwrap();
        let sc = build_set_connectivity(&inst).unwrap();
        let edges = embed_solution(&sc, &res.solution).unwrap();
        prop_assert!(is_feasible(&sc, &edges));
        let weight = edge_set_weight(&sc, &edges).unwrap();
        prop_assert!(weight >= res.cost - 1e-9);
        // Equal cost whenever every funnel stays on its source and its
        // in-ball demanded terminals.
        let terminals = inst.demanded_terminals();
        let relay_free = res.solution.funnels.iter().all(|f| {
            f.nodes().iter().all(|&v| v == f.source || (terminals.contains(&v) && inst.c(f.source, v) <= f.ball + 1e-9))
        });
        if relay_free {
            prop_assert!((weight - res.cost).abs() <= 1e-6, "{} vs {}", weight, res.cost);
        }
    }

    #[test]
    fn cost_additive_over_decomposition(inst in two_group_strategy()) {
        let subs = decompose_demands(&inst);
        prop_assert_eq!(subs.len(), 2);
        for k in [SolverKind::CoverAndGrow, SolverKind::TCentric, SolverKind::Oracle] {
            let parts: Vec<_> = subs.iter().map(|s| (s.clone(), k.solve(&s.instance).unwrap())).collect();
            let sum: f64 = parts.iter().map(|(s, sol)| evaluate_cost(&s.instance, sol).unwrap().total).sum();
            let merged = merge_solutions(&inst, &parts);
            prop_assert!(validate_solution(&inst, &merged).ok);
            let total = evaluate_cost(&inst, &merged).unwrap().total;
            prop_assert!((total - sum).abs() <= 1e-12 * sum.max(1.0));
        }
    }

    #[test]
    fn costs_scale_quadratically(inst in tiny_strategy(), big in any::<bool>()) {
        let alpha: f64 = if big { 2.0 } else { 0.5 };
        let other = scaled(&inst, alpha);
        for k in [SolverKind::CoverAndGrow, SolverKind::TCentric, SolverKind::TAdaptive, SolverKind::SmallestEdge, SolverKind::SmallestIncrement, SolverKind::Oracle] {
            let a = evaluate_cost(&inst, &k.solve(&inst).unwrap()).unwrap().total;
            let b = evaluate_cost(&other, &k.solve(&other).unwrap()).unwrap().total;
            prop_assert!((b - alpha * alpha * a).abs() <= 1e-9 * b.max(1.0), "{}: {} vs {}", k, b, alpha * alpha * a);
        }
    }
}
