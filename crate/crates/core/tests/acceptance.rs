//! Acceptance suite. Every test prints one `criterion N: PASS|FAIL` line
//! before asserting.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use anycast_core::cover_grow::{cover_and_grow, cover_and_grow_traced};
use anycast_core::experiment::{run_benchmark, write_records_csv, BenchConfig};
use anycast_core::g2s::g2s_greedy_traced;
use anycast_core::generate::{
    gen_pathological_tcentric, gen_random, gen_setcover_euclidean, Distribution, RandomSpec,
};
use anycast_core::heuristics::t_centric;
use anycast_core::oracle::brute_force_optimal;
use anycast_core::reduction::{build_set_connectivity, lift_solution, solve_set_connectivity_exact};
use anycast_core::{evaluate_cost, mst, validate_solution, CostMatrix, SolverKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, ok: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn check(id: u32, ok: bool, elapsed: Duration, budget: Duration, detail: String) {
    let in_time = elapsed < budget;
    report(
        id,
        ok && in_time,
        format!("{detail}; {:.2?} (budget {:.0?})", elapsed, budget),
    );
    assert!(ok, "criterion {id}: {detail}");
    assert!(in_time, "criterion {id}: {elapsed:?} over budget {budget:?}");
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

#[test]
fn criterion_1_mst_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=100);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        let m = CostMatrix::from_fn(n, |u, v| {
            let (dx, dy) = (pts[u].0 - pts[v].0, pts[u].1 - pts[v].1);
            dx * dx + dy * dy
        });
        let nodes: Vec<usize> = (0..n).collect();
        let w = mst(&nodes, &m).unwrap().weight;
        worst = worst.max(w);
        if w > 3.42 {
            violations += 1;
        }
    }
    check(
        1,
        violations == 0,
        start.elapsed(),
        Duration::from_secs(10),
        format!("1000 point sets, max squared-distance MST weight {worst:.4}, {violations} above 3.42"),
    );
}

#[test]
fn criterion_2_per_iteration_funnel_bound() {
    let start = Instant::now();
    let mut worst_ratio: f64 = 0.0;
    let mut violations = 0;
    let mut iterations = 0;
    for k in 0..200 {
        let spec = RandomSpec {
            distribution: Distribution::Uniform,
            s_size: [1, 4, 16, 64][k % 4],
            q: 10,
            group_size: 10,
            kappa: 2.0,
            seed: 2,
        };
        let inst = gen_random(&spec, k).unwrap();
        let run = cover_and_grow_traced(&inst).unwrap();
        for it in &run.iterations {
            iterations += 1;
            if it.tree_weight > 13.68 * it.ball.radius_cost + 1e-9 {
                violations += 1;
            }
            if it.ball.radius_cost > 0.0 {
                worst_ratio = worst_ratio.max(it.tree_weight / it.ball.radius_cost);
            }
        }
    }
    check(
        2,
        violations == 0,
        start.elapsed(),
        Duration::from_secs(30),
        format!("{iterations} iterations on 200 instances, max funnel/ball {worst_ratio:.3}, {violations} above 13.68"),
    );
}

/// Shapes `(sources, groups, group size)` with at most 8 nodes.
const TINY_SHAPES: [(usize, usize, usize); 5] = [(1, 3, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (3, 5, 1)];

#[test]
fn criterion_3_reduction_equivalence() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut mismatches = Vec::new();
    for k in 0..20 {
        let (s_size, q, group_size) = TINY_SHAPES[k % TINY_SHAPES.len()];
        let spec = RandomSpec {
            distribution: if k % 2 == 0 { Distribution::Uniform } else { Distribution::Gaussian },
            s_size,
            q,
            group_size,
            kappa: 2.0,
            seed: 0,
        };
        let inst = gen_random(&spec, k).unwrap();
        assert!(inst.num_nodes() <= 8);
        let sc = build_set_connectivity(&inst).unwrap();
        let edges = solve_set_connectivity_exact(&sc).unwrap();
        let lifted = lift_solution(&inst, &sc, &edges.edges).unwrap();
        assert!(validate_solution(&inst, &lifted).ok);
        let cost = evaluate_cost(&inst, &lifted).unwrap().total;
        let opt = brute_force_optimal(&inst).unwrap().cost;
        let gap = (cost - opt).abs();
        worst = worst.max(gap);
        if gap > 1e-6 {
            mismatches.push(format!("#{k} lifted {cost:.6} vs optimum {opt:.6}"));
        }
    }
    check(
        3,
        mismatches.is_empty(),
        start.elapsed(),
        Duration::from_secs(300),
        format!("20 tiny instances, max |lifted - optimum| {worst:.2e}; mismatches: {mismatches:?}"),
    );
}

fn min_cover(sets: &[Vec<usize>], n: usize) -> usize {
    let m = sets.len();
    (1usize..1 << m)
        .filter(|mask| {
            let mut covered = vec![false; n];
            for (i, s) in sets.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for &e in s {
                        covered[e] = true;
                    }
                }
            }
            covered.iter().all(|&c| c)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

#[test]
fn criterion_4_setcover_calibration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut systems = 0;
    while systems < 10 {
        let m = rng.random_range(2..=3);
        let n = rng.random_range(2..=4);
        let sets: Vec<Vec<usize>> = (0..m)
            .map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect())
            .collect();
        let covered: usize = sets.iter().map(Vec::len).sum();
        if sets.iter().any(Vec::is_empty) || covered > 8 || (0..n).any(|e| !sets.iter().any(|s| s.contains(&e))) {
            continue;
        }
        systems += 1;
        let k_star = min_cover(&sets, n);
        let inst = gen_setcover_euclidean(&sets).unwrap();
        let res = brute_force_optimal(&inst).unwrap();
        let unit_balls = res.solution.funnels.iter().all(|f| f.ball == 1.0);
        if res.cost != 2.0 * k_star as f64 || !unit_balls {
            failures.push(format!("{sets:?}: oracle {} vs 2k* = {}", res.cost, 2 * k_star));
        }
    }
    check(
        4,
        failures.is_empty(),
        start.elapsed(),
        Duration::from_secs(60),
        format!("10 set systems, oracle cost = 2k* with unit balls; failures: {failures:?}"),
    );
}

#[test]
fn criterion_5_g2s_ratio() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 0..20 {
        let spec = RandomSpec {
            distribution: if k % 2 == 0 { Distribution::Uniform } else { Distribution::Gaussian },
            s_size: 1 + k % 3,
            q: 3 + k % 6,
            group_size: 1,
            kappa: 2.0,
            seed: 5,
        };
        let inst = gen_random(&spec, k).unwrap();
        let run = g2s_greedy_traced(&inst).unwrap();
        assert!(!run.approximate());
        let feasible = validate_solution(&inst, &run.solution).ok;
        let cost = evaluate_cost(&inst, &run.solution).unwrap().total;
        let opt = brute_force_optimal(&inst).unwrap().cost;
        let bound = 2.0 * harmonic(spec.q) * opt;
        worst = worst.max(cost / opt);
        if !feasible || cost > bound + 1e-9 {
            failures.push(format!("#{k}: cost {cost:.6}, bound {bound:.6}, feasible {feasible}"));
        }
    }
    check(
        5,
        failures.is_empty(),
        start.elapsed(),
        Duration::from_secs(60),
        format!("20 singleton-group instances, max cost/optimum {worst:.3}; violations: {failures:?}"),
    );
}

#[test]
fn criterion_6_pathological_t_centric() {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for q in [8, 16, 32, 64] {
        let inst = gen_pathological_tcentric(q).unwrap();
        let tc = evaluate_cost(&inst, &t_centric(&inst).unwrap()).unwrap().total;
        let cg = evaluate_cost(&inst, &cover_and_grow(&inst).unwrap()).unwrap().total;
        let ratio = tc / cg;
        ok &= tc == 2.0 * q as f64 && cg <= 3.0;
        if let Some(p) = prev {
            ok &= ratio / p >= 1.9;
        }
        prev = Some(ratio);
        rows.push(format!("q={q}: t_centric {tc}, cover_and_grow {cg:.5}, ratio {ratio:.3}"));
    }
    check(6, ok, start.elapsed(), Duration::from_secs(60), rows.join("; "));
}

struct ProtocolRun {
    ok: bool,
    elapsed: Duration,
    detail: String,
}

fn protocol(trials: usize) -> ProtocolRun {
    let cfg = BenchConfig {
        trials,
        seed: 7,
        ..BenchConfig::default()
    };
    let start = Instant::now();
    let rep = run_benchmark(&cfg, 0).unwrap();
    let elapsed = start.elapsed();
    let feasible = rep.all_feasible();
    let expected_rows = 2 * 4 * trials * 5;
    let mut runtime: BTreeMap<SolverKind, (f64, usize)> = BTreeMap::new();
    for r in &rep.records {
        let e = runtime.entry(r.solver).or_default();
        e.0 += r.runtime_ns as f64;
        e.1 += 1;
    }
    let mean_rt: BTreeMap<SolverKind, f64> = runtime.iter().map(|(k, (s, n))| (*k, s / *n as f64)).collect();
    let fastest = mean_rt
        .iter()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| *k)
        .unwrap();
    let out_of_band: Vec<String> = rep
        .summary
        .iter()
        .filter(|s| !(0.3..=10.0).contains(&s.mean_relative_cost))
        .map(|s| format!("{} {} |S|={}: {:.3}", s.solver, s.distribution, s.s_size, s.mean_relative_cost))
        .collect();
    for s in &rep.summary {
        println!(
            "  [{trials} trials] {:<20} {:<9} |S|={:<3} mean rel {:.4} var {:.2e} runtime {:.3} ms",
            s.solver.name(),
            s.distribution.name(),
            s.s_size,
            s.mean_relative_cost,
            s.var_relative_cost,
            s.mean_runtime_ns * 1e-6
        );
    }
    let ok = feasible && rep.records.len() == expected_rows && out_of_band.is_empty() && fastest == SolverKind::TCentric;
    let rts: Vec<String> = mean_rt.iter().map(|(k, v)| format!("{k} {:.3} ms", v * 1e-6)).collect();
    ProtocolRun {
        ok,
        elapsed,
        detail: format!(
            "{trials} trials: {} records, all feasible {feasible}, out of band {out_of_band:?}, fastest {fastest} ({}), {elapsed:.2?}",
            rep.records.len(),
            rts.join(", ")
        ),
    }
}

#[test]
fn criterion_7_benchmark_protocol() {
    let start = Instant::now();
    let smoke = protocol(10);
    let smoke_in_time = smoke.elapsed < Duration::from_secs(120);
    let full = protocol(100);
    check(
        7,
        smoke.ok && full.ok && smoke_in_time,
        start.elapsed(),
        Duration::from_secs(7200),
        format!("smoke (budget 2m): {}; full: {}", smoke.detail, full.detail),
    );
}

fn cost_columns(cfg: &BenchConfig, jobs: usize) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    let rep = run_benchmark(cfg, jobs).unwrap();
    write_records_csv(&path, &rep.records).unwrap();
    std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            [&f[..6], &f[7..]].concat().join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_8_determinism() {
    let start = Instant::now();
    let cfg = BenchConfig {
        trials: 3,
        seed: 8,
        ..BenchConfig::default()
    };
    let a = cost_columns(&cfg, 1);
    let b = cost_columns(&cfg, 1);
    let c = cost_columns(&cfg, 3);
    let ok = a == b && a == c && a.lines().count() == 1 + 2 * 4 * 3 * 5;
    check(
        8,
        ok,
        start.elapsed(),
        Duration::from_secs(120),
        format!("3 runs (1, 1 and 3 threads), {} rows, cost columns identical {}", a.lines().count(), a == b && a == c),
    );
}
