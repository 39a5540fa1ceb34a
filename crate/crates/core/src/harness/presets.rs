//! Plans mirroring the published comparison tables.

use std::fmt;
use std::str::FromStr;

use super::{run_plan, Cell, ExperimentPlan, ExperimentReport, DEFAULT_RUNS};
use crate::benchmarks::FunctionId;
use crate::error::{Error, Result};
use crate::swarm::Variant;

pub const DEFAULT_BASE_SEED: u64 = 0;

/// Sphere weights of the Griewank sweep.
pub const DEFAULT_GRIEWANK_MUS: [f64; 6] = [
    1.0 / 4000.0,
    1.0 / 2000.0,
    1.0 / 1000.0,
    1.0 / 500.0,
    1.0 / 100.0,
    1.0 / 10.0,
];

/// Rows of the exploration and precision tables: every function at D = 3,
/// plus Rastrigin at D = 4.
fn table_rows() -> Vec<(FunctionId, usize)> {
    let mut rows: Vec<(FunctionId, usize)> = FunctionId::ALL.iter().map(|&id| (id, 3)).collect();
    rows.push((FunctionId::Rastrigin, 4));
    rows
}

fn plan_for(
    rows: &[(FunctionId, usize)],
    variants: &[Variant],
    n_runs: usize,
    base_seed: u64,
) -> Result<ExperimentPlan> {
    let mut cells = Vec::with_capacity(rows.len() * variants.len());
    for &(id, dim) in rows {
        for &variant in variants {
            cells.push(Cell::new(id.into(), dim, variant, n_runs, base_seed)?);
        }
    }
    Ok(ExperimentPlan::new(cells))
}

/// Classical vs social-only exploration comparison: 16 cells.
pub fn table1_plan(base_seed: u64) -> ExperimentPlan {
    plan_for(
        &table_rows(),
        &[Variant::Classical, Variant::SocialOnly],
        DEFAULT_RUNS,
        base_seed,
    )
    .expect("preset cells are valid")
}

/// Griewank weight sweep at D = 5: 12 cells.
pub fn table2_plan(base_seed: u64) -> ExperimentPlan {
    griewank_sweep_plan(
        &DEFAULT_GRIEWANK_MUS,
        5,
        &[Variant::Classical, Variant::SocialOnly],
        DEFAULT_RUNS,
        base_seed,
    )
    .expect("preset cells are valid")
}

/// Classical, hybrid and social-only counts and precision: 24 cells. With the
/// same base seed, its classical and social-only cells reproduce the runs of
/// [`table1_plan`].
pub fn table34_plan(base_seed: u64) -> ExperimentPlan {
    plan_for(
        &table_rows(),
        &[Variant::Classical, Variant::Hybrid, Variant::SocialOnly],
        DEFAULT_RUNS,
        base_seed,
    )
    .expect("preset cells are valid")
}

/// One cell per (weight, variant), in that nesting order.
pub fn griewank_sweep_plan(
    mu_values: &[f64],
    dimension: usize,
    variants: &[Variant],
    n_runs: usize,
    base_seed: u64,
) -> Result<ExperimentPlan> {
    let rows = mu_values
        .iter()
        .map(|&mu| FunctionId::from_parts("griewank", Some(mu)).map(|id| (id, dimension)))
        .collect::<Result<Vec<_>>>()?;
    plan_for(&rows, variants, n_runs, base_seed)
}

pub fn griewank_sweep(
    mu_values: &[f64],
    dimension: usize,
    variants: &[Variant],
    n_runs: usize,
    base_seed: u64,
    jobs: Option<usize>,
) -> Result<ExperimentReport> {
    run_plan(
        &griewank_sweep_plan(mu_values, dimension, variants, n_runs, base_seed)?,
        jobs,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Table1,
    Table2,
    Table34,
}

impl Preset {
    pub fn plan(&self, base_seed: u64) -> ExperimentPlan {
        match self {
            Preset::Table1 => table1_plan(base_seed),
            Preset::Table2 => table2_plan(base_seed),
            Preset::Table34 => table34_plan(base_seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Table34 => "table34",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            "table34" => Ok(Preset::Table34),
            _ => Err(Error::config(format!(
                "unknown preset `{s}` (expected table1, table2 or table34)"
            ))),
        }
    }
}
