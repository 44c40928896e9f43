//! Benchmark runner: generate random instances, run each solver on the same
//! instance, validate, time, and summarize costs relative to Cover-and-Grow.

mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{gen_random, Distribution, RandomSpec};
use crate::model::{evaluate_cost, validate_solution};
use crate::solver::SolverKind;

pub use svg::{relative_cost_chart, runtime_chart};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub distributions: Vec<Distribution>,
    pub source_sizes: Vec<usize>,
    pub q: usize,
    pub group_size: usize,
    pub trials: usize,
    pub kappa: f64,
    pub seed: u64,
    pub solvers: Vec<SolverKind>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            distributions: vec![Distribution::Uniform, Distribution::Gaussian],
            source_sizes: vec![1, 4, 16, 64],
            q: 10,
            group_size: 10,
            trials: 100,
            kappa: 2.0,
            seed: 0,
            solvers: SolverKind::BENCH.to_vec(),
        }
    }
}

impl BenchConfig {
    pub fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.distributions.is_empty() || self.source_sizes.is_empty() {
            return Err(Error::InvalidParameter("need at least one distribution and one source size".into()));
        }
        if self.source_sizes.contains(&0) || self.q == 0 || self.group_size == 0 {
            return Err(Error::InvalidParameter("all sizes must be at least 1".into()));
        }
        if !self.solvers.contains(&SolverKind::CoverAndGrow) {
            return Err(Error::InvalidParameter(
                "cover_and_grow is the normalization baseline and must be among the solvers".into(),
            ));
        }
        self.spec(self.distributions[0], self.source_sizes[0]).check()
    }

    pub fn spec(&self, distribution: Distribution, s_size: usize) -> RandomSpec {
        RandomSpec {
            distribution,
            s_size,
            q: self.q,
            group_size: self.group_size,
            kappa: self.kappa,
            seed: self.seed,
        }
    }
}

/// One solver run on one generated instance. `cost` and `relative_cost`
/// are NaN when the solver failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub solver: SolverKind,
    pub distribution: Distribution,
    pub s_size: usize,
    pub trial: usize,
    pub cost: f64,
    pub relative_cost: f64,
    pub runtime_ns: u64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub solver: SolverKind,
    pub distribution: Distribution,
    pub s_size: usize,
    pub runs: usize,
    pub failures: usize,
    pub mean_relative_cost: f64,
    pub var_relative_cost: f64,
    pub mean_runtime_ns: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl BenchReport {
    pub fn all_feasible(&self) -> bool {
        self.records.iter().all(|r| r.feasible)
    }
}

fn run_trial(config: &BenchConfig, distribution: Distribution, s_size: usize, trial: usize) -> Vec<TrialRecord> {
    let inst = match gen_random(&config.spec(distribution, s_size), trial) {
        Ok(inst) => inst,
        Err(e) => {
            log::error!("{distribution} |S|={s_size} trial {trial}: generation failed: {e}");
            return config
                .solvers
                .iter()
                .map(|&solver| TrialRecord {
                    solver,
                    distribution,
                    s_size,
                    trial,
                    cost: f64::NAN,
                    relative_cost: f64::NAN,
                    runtime_ns: 0,
                    feasible: false,
                })
                .collect();
        }
    };
    let mut out: Vec<TrialRecord> = config
        .solvers
        .iter()
        .map(|&solver| {
            let start = Instant::now();
            let result = solver.solve(&inst);
            let runtime_ns = start.elapsed().as_nanos() as u64;
            let (cost, feasible) = match result {
                Ok(sol) => {
                    let report = validate_solution(&inst, &sol);
                    if !report.ok {
                        log::error!("{solver} on {distribution} |S|={s_size} trial {trial}: infeasible output {report:?}");
                    }
                    match evaluate_cost(&inst, &sol) {
                        Ok(c) => (c.total, report.ok),
                        Err(e) => {
                            log::error!("{solver} on {distribution} |S|={s_size} trial {trial}: {e}");
                            (f64::NAN, false)
                        }
                    }
                }
                Err(e) => {
                    log::error!("{solver} on {distribution} |S|={s_size} trial {trial}: {e}");
                    (f64::NAN, false)
                }
            };
            TrialRecord {
                solver,
                distribution,
                s_size,
                trial,
                cost,
                relative_cost: f64::NAN,
                runtime_ns,
                feasible,
            }
        })
        .collect();
    let base = out
        .iter()
        .find(|r| r.solver == SolverKind::CoverAndGrow)
        .map_or(f64::NAN, |r| r.cost);
    for r in &mut out {
        r.relative_cost = if r.solver == SolverKind::CoverAndGrow && r.cost.is_finite() {
            1.0
        } else {
            r.cost / base
        };
    }
    log::debug!("{distribution} |S|={s_size} trial {trial} done");
    out
}

/// Runs the whole protocol on `jobs` worker threads (0 = rayon default).
/// Records come back ordered by distribution, source size, trial and
/// solver as listed in the config, whatever the thread count.
pub fn run_benchmark(config: &BenchConfig, jobs: usize) -> Result<BenchReport> {
    config.check()?;
    let cells: Vec<(Distribution, usize, usize)> = config
        .distributions
        .iter()
        .flat_map(|&d| {
            config
                .source_sizes
                .iter()
                .flat_map(move |&s| (0..config.trials).map(move |t| (d, s, t)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let per_cell: Vec<Vec<TrialRecord>> =
        pool.install(|| cells.par_iter().map(|&(d, s, t)| run_trial(config, d, s, t)).collect());
    let records: Vec<TrialRecord> = per_cell.into_iter().flatten().collect();
    let summary = summarize(config, &records);
    Ok(BenchReport { records, summary })
}

/// Mean and sample variance of relative cost plus mean runtime per
/// `(solver, distribution, s_size)`, over successful runs.
pub fn summarize(config: &BenchConfig, records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(Distribution, usize, SolverKind), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.distribution, r.s_size, r.solver)).or_default().push(r);
    }
    let mut out = Vec::new();
    for &dist in &config.distributions {
        for &s in &config.source_sizes {
            for &solver in &config.solvers {
                let Some(rs) = cells.get(&(dist, s, solver)) else { continue };
                let ok: Vec<&&TrialRecord> = rs.iter().filter(|r| r.feasible && r.relative_cost.is_finite()).collect();
                let n = ok.len() as f64;
                let mean = ok.iter().map(|r| r.relative_cost).sum::<f64>() / n;
                let var = if ok.len() > 1 {
                    ok.iter().map(|r| (r.relative_cost - mean).powi(2)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                let mean_rt = rs.iter().map(|r| r.runtime_ns as f64).sum::<f64>() / rs.len() as f64;
                out.push(SummaryRow {
                    solver,
                    distribution: dist,
                    s_size: s,
                    runs: rs.len(),
                    failures: rs.len() - ok.len(),
                    mean_relative_cost: mean,
                    var_relative_cost: var,
                    mean_runtime_ns: mean_rt,
                });
            }
        }
    }
    out
}

#[derive(Serialize)]
struct CsvRow {
    solver: &'static str,
    distribution: &'static str,
    s_size: usize,
    trial: usize,
    cost: f64,
    relative_cost: f64,
    runtime_ns: u64,
    feasible: bool,
}

pub fn write_records_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in records {
        w.serialize(CsvRow {
            solver: r.solver.name(),
            distribution: r.distribution.name(),
            s_size: r.s_size,
            trial: r.trial,
            cost: r.cost,
            relative_cost: r.relative_cost,
            runtime_ns: r.runtime_ns,
            feasible: r.feasible,
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, summary: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for s in summary {
        w.serialize(s).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes `results.csv`, `summary.csv`, `relative_costs.svg` and
/// `runtimes.svg` into `dir` and returns their paths.
pub fn write_outputs(dir: &Path, report: &BenchReport) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let paths: Vec<PathBuf> = ["results.csv", "summary.csv", "relative_costs.svg", "runtimes.svg"]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    write_records_csv(&paths[0], &report.records)?;
    write_summary_csv(&paths[1], &report.summary)?;
    fs::write(&paths[2], relative_cost_chart(&report.summary))?;
    fs::write(&paths[3], runtime_chart(&report.summary))?;
    Ok(paths)
}
