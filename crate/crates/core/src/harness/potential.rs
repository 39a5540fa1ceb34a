use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::PotentialTrace;
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::swarm::{self, SwarmConfig, Variant};

/// Runs every variant once with the same seed and returns its potential
/// trace. Duplicate variants are rejected.
pub fn potential_experiment(
    benchmark: &Benchmark,
    dimension: usize,
    variants: &[Variant],
    seed: u64,
    maxiter: usize,
    n_particles: usize,
) -> Result<Vec<(Variant, PotentialTrace)>> {
    if variants.is_empty() {
        return Err(Error::config("no variants requested"));
    }
    for (i, v) in variants.iter().enumerate() {
        if variants[..i].contains(v) {
            return Err(Error::config(format!("variant {v} requested twice")));
        }
    }
    variants
        .iter()
        .map(|&variant| {
            let config = SwarmConfig {
                variant,
                seed,
                maxiter,
                n_particles,
                ..Default::default()
            };
            let record = swarm::run(&config, benchmark, dimension, true)?;
            Ok((variant, record.potential.unwrap_or_default()))
        })
        .collect()
}

pub fn trace_file_name(benchmark: &Benchmark, dimension: usize, variant: Variant) -> String {
    format!(
        "potential_{}_d{dimension}_{variant}.csv",
        benchmark.id().name()
    )
}

/// Writes one CSV per trace into `dir`, creating it if needed.
pub fn write_traces(
    dir: &Path,
    benchmark: &Benchmark,
    dimension: usize,
    traces: &[(Variant, PotentialTrace)],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    traces
        .iter()
        .map(|(variant, trace)| {
            let path = dir.join(trace_file_name(benchmark, dimension, *variant));
            trace.save(&path)?;
            Ok(path)
        })
        .collect()
}
