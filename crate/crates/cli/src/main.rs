//! `anycast`: generate, solve, validate and benchmark g2g-anycast instances.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anycast_core::experiment::{run_benchmark, write_outputs, BenchConfig};
use anycast_core::generate::{
    gen_pathological_tcentric, gen_random, gen_setcover_euclidean, gen_setcover_g2s, setcover_g2s_defaults,
    Distribution, RandomSpec,
};
use anycast_core::oracle::brute_force_optimal;
use anycast_core::reduction::build_set_connectivity;
use anycast_core::{decompose_demands, evaluate_cost, validate_solution, Error, Instance, Solution, SolverKind};
use anyhow::Context;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "anycast", version, about = "Group-to-group anycast network design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance as JSON.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output file; stdout when omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and report its cost.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "cover_and_grow")]
        solver: SolverKind,
        /// Where to write the solution JSON; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the derived set-connectivity instances here.
        #[arg(long)]
        sc_dump: Option<PathBuf>,
    },
    /// Check a solution against an instance.
    Validate { instance: PathBuf, solution: PathBuf },
    /// Exhaustive optimum of a tiny instance.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the derived set-connectivity instance of every source group.
    Reduce {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized comparison and write CSV and SVG results.
    Bench {
        /// JSON config; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "distribution", value_delimiter = ',')]
        distributions: Vec<Distribution>,
        #[arg(long = "sizes", value_delimiter = ',')]
        source_sizes: Vec<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        group_size: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "solver", value_delimiter = ',')]
        solvers: Vec<SolverKind>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Random points; sources first, then the groups.
    Random {
        #[arg(long, default_value = "uniform")]
        distribution: Distribution,
        #[arg(long, default_value_t = 4)]
        sources: usize,
        #[arg(long, default_value_t = 10)]
        q: usize,
        #[arg(long, default_value_t = 10)]
        group_size: usize,
        #[arg(long, default_value_t = 0)]
        trial: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        kappa: f64,
    },
    /// Planar set-cover construction; `--sets '[[0,1],[1,2]]'`.
    SetcoverEuclidean {
        #[arg(long)]
        sets: String,
    },
    /// Singleton-group set-cover construction with thresholds L and M.
    SetcoverG2s {
        #[arg(long)]
        sets: String,
        #[arg(long)]
        l: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
    },
    /// Instance on which t_centric pays about q times the optimum.
    Pathological {
        #[arg(long)]
        q: usize,
    },
}

/// Errors that should exit with status 1 rather than 2.
#[derive(Debug)]
struct Infeasible(String);

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Infeasible {}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_sets(text: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    serde_json::from_str(text).context("--sets must be a JSON list of integer lists")
}

fn print_cost(inst: &Instance, sol: &Solution) -> anyhow::Result<()> {
    let cost = evaluate_cost(inst, sol)?;
    let report = validate_solution(inst, sol);
    if !report.ok {
        return Err(Infeasible(format!("solution is infeasible: {}", serde_json::to_string(&report)?)).into());
    }
    eprintln!("ball_cost {} funnel_cost {}", cost.ball_cost, cost.funnel_cost);
    println!("total {}", cost.total);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen { family, out } => {
            let inst = match family {
                Family::Random {
                    distribution,
                    sources,
                    q,
                    group_size,
                    trial,
                    seed,
                    kappa,
                } => gen_random(
                    &RandomSpec {
                        distribution,
                        s_size: sources,
                        q,
                        group_size,
                        kappa,
                        seed,
                    },
                    trial,
                )?,
                Family::SetcoverEuclidean { sets } => gen_setcover_euclidean(&parse_sets(&sets)?)?,
                Family::SetcoverG2s { sets, l, m } => {
                    let sets = parse_sets(&sets)?;
                    let n = sets.iter().flatten().max().map_or(0, |&e| e + 1);
                    let (dl, dm) = setcover_g2s_defaults(sets.len(), n);
                    gen_setcover_g2s(&sets, l.unwrap_or(dl), m.unwrap_or(dm))?
                }
                Family::Pathological { q } => gen_pathological_tcentric(q)?,
            };
            emit(out.as_deref(), &inst.to_json()?)
        }
        Command::Solve {
            instance,
            solver,
            out,
            sc_dump,
        } => {
            let inst = read_instance(&instance)?;
            if let Some(path) = sc_dump {
                dump_reductions(&inst, &path)?;
            }
            log::info!("solving {} with {solver}", instance.display());
            let output = solver.solve_detailed(&inst)?;
            if output.approximate {
                eprintln!("approximate: true");
            }
            let sol = output.solution;
            match &out {
                Some(p) => fs::write(p, sol.to_json()?).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{}", sol.to_json()?),
            }
            print_cost(&inst, &sol)
        }
        Command::Validate { instance, solution } => {
            let inst = read_instance(&instance)?;
            let text = fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let sol = Solution::from_json(&text)?;
            let report = validate_solution(&inst, &sol);
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.ok {
                return Err(Infeasible(format!("{} violation(s)", report.violations.len() + report.funnel_errors.len())).into());
            }
            let cost = evaluate_cost(&inst, &sol)?;
            println!("total {}", cost.total);
            Ok(())
        }
        Command::Oracle { instance, out } => {
            let inst = read_instance(&instance)?;
            let res = brute_force_optimal(&inst)?;
            log::info!("oracle explored {} configurations", res.explored);
            match &out {
                Some(p) => fs::write(p, res.solution.to_json()?)?,
                None => println!("{}", res.solution.to_json()?),
            }
            println!("total {}", res.cost);
            Ok(())
        }
        Command::Reduce { instance, out } => {
            let inst = read_instance(&instance)?;
            let text = reductions_json(&inst)?;
            emit(out.as_deref(), &text)
        }
        Command::Bench {
            config,
            distributions,
            source_sizes,
            q,
            group_size,
            trials,
            kappa,
            seed,
            solvers,
            jobs,
            out,
        } => {
            let mut cfg = match config {
                Some(p) => {
                    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str(&text).context("parsing bench config")?
                }
                None => BenchConfig::default(),
            };
            if !distributions.is_empty() {
                cfg.distributions = distributions;
            }
            if !source_sizes.is_empty() {
                cfg.source_sizes = source_sizes;
            }
            if !solvers.is_empty() {
                cfg.solvers = solvers;
            }
            cfg.q = q.unwrap_or(cfg.q);
            cfg.group_size = group_size.unwrap_or(cfg.group_size);
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.kappa = kappa.unwrap_or(cfg.kappa);
            cfg.seed = seed.unwrap_or(cfg.seed);
            let report = run_benchmark(&cfg, jobs)?;
            for path in write_outputs(&out, &report)? {
                println!("wrote {}", path.display());
            }
            for row in &report.summary {
                println!(
                    "{:<20} {:<9} |S|={:<3} rel {:.4} (var {:.2e}) runtime {:.3} ms",
                    row.solver.name(),
                    row.distribution.name(),
                    row.s_size,
                    row.mean_relative_cost,
                    row.var_relative_cost,
                    row.mean_runtime_ns * 1e-6
                );
            }
            if !report.all_feasible() {
                let bad = report.records.iter().filter(|r| !r.feasible).count();
                return Err(Infeasible(format!("{bad} run(s) failed or were infeasible")).into());
            }
            Ok(())
        }
    }
}

fn reductions_json(inst: &Instance) -> anyhow::Result<String> {
    let mut parts = Vec::new();
    for sub in decompose_demands(inst) {
        let sc = build_set_connectivity(&sub.instance)?;
        parts.push(serde_json::json!({
            "source_group": sub.source_group,
            "dest_group_ids": sub.dest_group_ids,
            "set_connectivity": sc,
        }));
    }
    Ok(serde_json::to_string_pretty(&parts)?)
}

fn dump_reductions(inst: &Instance, path: &Path) -> anyhow::Result<()> {
    fs::write(path, reductions_json(inst)?).with_context(|| format!("writing {}", path.display()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Infeasible>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidParameter(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ANYCAST_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
