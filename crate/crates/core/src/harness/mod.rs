//! Repeated-run experiments.
//!
//! An [`ExperimentPlan`] is a list of cells, each one benchmark, dimension and
//! variant repeated `n_runs` times. Run `k` of a cell uses the seed
//! `base_seed + k`, so any single run can be reproduced in isolation and runs
//! may execute in any order or concurrently.

mod potential;
mod presets;
mod report;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, Classification};
use crate::benchmarks::{Benchmark, FunctionId, Interval};
use crate::error::{Error, Result};
use crate::swarm::{self, RunRecord, SwarmConfig, Variant, DEFAULT_ATTRACTION, DEFAULT_INERTIA};

pub use potential::{potential_experiment, trace_file_name, write_traces};
pub use presets::{
    griewank_sweep, griewank_sweep_plan, table1_plan, table2_plan, table34_plan, Preset,
    DEFAULT_BASE_SEED, DEFAULT_GRIEWANK_MUS,
};
pub use report::{
    read_report_json, write_report, ExperimentReport, FailureRecord, Metadata, PrecisionSummary,
    ReportFormat, CSV_HEADER,
};

pub const DEFAULT_RUNS: usize = 50;

/// One table cell: a benchmark, dimension and variant repeated `n_runs` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CellSpec", into = "CellSpec")]
pub struct Cell {
    benchmark: Benchmark,
    dimension: usize,
    variant: Variant,
    n_runs: usize,
    base_seed: u64,
}

impl Cell {
    pub fn new(
        benchmark: Benchmark,
        dimension: usize,
        variant: Variant,
        n_runs: usize,
        base_seed: u64,
    ) -> Result<Self> {
        if n_runs == 0 {
            return Err(Error::config("a cell needs at least one run"));
        }
        if dimension == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        benchmark.check_dimension(dimension)?;
        Ok(Cell {
            benchmark,
            dimension,
            variant,
            n_runs,
            base_seed,
        })
    }

    pub fn benchmark(&self) -> &Benchmark {
        &self.benchmark
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n_runs(&self) -> usize {
        self.n_runs
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn seed(&self, run_index: usize) -> u64 {
        self.base_seed.wrapping_add(run_index as u64)
    }
}

/// On-disk form of a [`Cell`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellSpec {
    function: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    dimension: usize,
    variant: Variant,
    #[serde(default = "default_runs")]
    n_runs: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bounds: Option<Interval>,
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

impl TryFrom<CellSpec> for Cell {
    type Error = Error;

    fn try_from(spec: CellSpec) -> Result<Self> {
        let id = FunctionId::from_parts(&spec.function, spec.mu)?;
        let benchmark = match spec.bounds {
            Some(bounds) => Benchmark::with_bounds(id, bounds)?,
            None => Benchmark::new(id),
        };
        Cell::new(
            benchmark,
            spec.dimension,
            spec.variant,
            spec.n_runs,
            spec.base_seed,
        )
    }
}

impl From<Cell> for CellSpec {
    fn from(cell: Cell) -> Self {
        let id = cell.benchmark.id();
        let bounds = cell.benchmark.bounds();
        CellSpec {
            function: id.name().to_owned(),
            mu: id.mu(),
            dimension: cell.dimension,
            variant: cell.variant,
            n_runs: cell.n_runs,
            base_seed: cell.base_seed,
            bounds: (bounds != id.default_bounds()).then_some(bounds),
        }
    }
}

/// A set of cells sharing swarm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub cells: Vec<Cell>,
    #[serde(default = "default_particles")]
    pub n_particles: usize,
    #[serde(default = "default_maxiter")]
    pub maxiter: usize,
    #[serde(default = "default_inertia")]
    pub a: f64,
    #[serde(default = "default_attraction")]
    pub b_glob: f64,
    #[serde(default = "default_attraction")]
    pub b_loc: f64,
    /// Record the swarm potential of every run.
    #[serde(default)]
    pub trace_potential: bool,
}

fn default_particles() -> usize {
    swarm::DEFAULT_PARTICLES
}

fn default_maxiter() -> usize {
    swarm::DEFAULT_MAXITER
}

fn default_inertia() -> f64 {
    DEFAULT_INERTIA
}

fn default_attraction() -> f64 {
    DEFAULT_ATTRACTION
}

impl ExperimentPlan {
    pub fn new(cells: Vec<Cell>) -> Self {
        ExperimentPlan {
            cells,
            n_particles: swarm::DEFAULT_PARTICLES,
            maxiter: swarm::DEFAULT_MAXITER,
            a: DEFAULT_INERTIA,
            b_glob: DEFAULT_ATTRACTION,
            b_loc: DEFAULT_ATTRACTION,
            trace_potential: false,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let plan: ExperimentPlan = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        self.config(Variant::Classical, 0).validate()
    }

    pub fn total_runs(&self) -> usize {
        self.cells.iter().map(|c| c.n_runs).sum()
    }

    /// Swarm configuration for one run of this plan.
    pub fn config(&self, variant: Variant, seed: u64) -> SwarmConfig {
        SwarmConfig {
            a: self.a,
            b_glob: self.b_glob,
            b_loc: self.b_loc,
            variant,
            n_particles: self.n_particles,
            maxiter: self.maxiter,
            seed,
        }
    }

    /// Runs one repetition of one cell.
    pub fn run_single(&self, cell: &Cell, run_index: usize) -> Result<RunRecord> {
        let config = self.config(cell.variant, cell.seed(run_index));
        swarm::run(
            &config,
            &cell.benchmark,
            cell.dimension,
            self.trace_potential,
        )
    }
}

/// A run that aborted with an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub seed: u64,
    pub message: String,
}

pub type RunOutcome = std::result::Result<RunRecord, RunFailure>;

/// Every run of a plan together with the aggregated report.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub report: ExperimentReport,
    /// Outcomes per cell, in plan order, each in run-index order.
    pub runs: Vec<Vec<RunOutcome>>,
}

/// Runs every cell of `plan` on up to `jobs` threads (all cores when `None`).
pub fn run_plan(plan: &ExperimentPlan, jobs: Option<usize>) -> Result<ExperimentReport> {
    execute_plan(plan, jobs).map(|o| o.report)
}

pub fn execute_plan(plan: &ExperimentPlan, jobs: Option<usize>) -> Result<PlanOutcome> {
    plan.validate()?;
    let tasks: Vec<(usize, usize)> = plan
        .cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| (0..cell.n_runs).map(move |r| (c, r)))
        .collect();
    let work = || -> Vec<RunOutcome> {
        tasks
            .par_iter()
            .map(|&(c, r)| {
                let cell = &plan.cells[c];
                plan.run_single(cell, r).map_err(|e| RunFailure {
                    seed: cell.seed(r),
                    message: e.to_string(),
                })
            })
            .collect()
    };
    let outcomes = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    };

    let mut outcomes = outcomes.into_iter();
    let runs: Vec<Vec<RunOutcome>> = plan
        .cells
        .iter()
        .map(|cell| outcomes.by_ref().take(cell.n_runs).collect())
        .collect();
    let report = build_report(plan, &runs);
    Ok(PlanOutcome { report, runs })
}

/// Aggregates completed runs; `runs[c]` holds the outcomes of `plan.cells[c]`
/// in any order.
pub fn build_report(plan: &ExperimentPlan, runs: &[Vec<RunOutcome>]) -> ExperimentReport {
    let mut summaries = Vec::with_capacity(plan.cells.len());
    let mut failures = Vec::new();
    for (cell, outcomes) in plan.cells.iter().zip(runs) {
        summaries.push(summarize(cell, outcomes));
        for f in outcomes.iter().filter_map(|o| o.as_ref().err()) {
            log::warn!(
                "run failed: {} D={} {} seed {}: {}",
                cell.benchmark.id(),
                cell.dimension,
                cell.variant,
                f.seed,
                f.message
            );
            failures.push(FailureRecord {
                function: cell.benchmark.id().name().to_owned(),
                mu: cell.benchmark.id().mu(),
                dimension: cell.dimension,
                variant: cell.variant,
                seed: f.seed,
                message: f.message.clone(),
            });
        }
    }
    failures.sort_by(|a, b| {
        (&a.function, a.dimension, a.variant, a.seed).cmp(&(
            &b.function,
            b.dimension,
            b.variant,
            b.seed,
        ))
    });
    ExperimentReport {
        metadata: Metadata::for_plan(plan),
        summaries,
        failures,
    }
}

/// Counts and precision of one cell. Failed runs are counted separately and
/// excluded from everything else.
pub fn summarize(cell: &Cell, outcomes: &[RunOutcome]) -> PrecisionSummary {
    let mut records: Vec<RunRecord> = outcomes
        .iter()
        .filter_map(|o| o.as_ref().ok().cloned())
        .collect();
    // order-insensitive mean
    records.sort_by_key(|r| r.seed);
    let count = |c: Classification| records.iter().filter(|r| r.classification == c).count();
    PrecisionSummary {
        function: cell.benchmark.id().name().to_owned(),
        mu: cell.benchmark.id().mu(),
        dimension: cell.dimension,
        variant: cell.variant,
        runs: outcomes.len(),
        g: count(Classification::G),
        l: count(Classification::L),
        o: count(Classification::O),
        failed: outcomes.len() - records.len(),
        precision: analysis::precision(&records, &cell.benchmark, cell.dimension),
    }
}
