//! Result classification, precision and swarm potential.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{Benchmark, FunctionId};
use crate::error::{Error, Result};
use crate::swarm::{RunRecord, SwarmConfig, SwarmState};

/// Largest absolute partial derivative at which a non-global point still
/// counts as a local optimum.
pub const LOCAL_GRADIENT_THRESHOLD: f64 = 0.1;

/// Weight of the velocity term in the swarm potential.
const VELOCITY_WEIGHT: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// Within the per-dimension threshold of the global optimum.
    G,
    /// Not global, but every partial derivative is small.
    L,
    /// Anything else.
    O,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Classification::G => "G",
            Classification::L => "L",
            Classification::O => "O",
        };
        f.write_str(c)
    }
}

/// Labels a final position. Rosenbrock in three or fewer dimensions has a
/// single local optimum, so flat non-global points there are never `L`.
pub fn classify(result: &[f64], benchmark: &Benchmark) -> Classification {
    classify_with_factor(result, benchmark, benchmark.g_threshold_factor())
}

/// [`classify`] with an explicit G-distance factor (a fraction of the box
/// width).
pub fn classify_with_factor(result: &[f64], benchmark: &Benchmark, factor: f64) -> Classification {
    let threshold = factor * benchmark.bounds().width();
    let optimum = benchmark.optimum_position(result.len());
    let global = result
        .iter()
        .zip(&optimum)
        .all(|(x, o)| (x - o).abs() <= threshold);
    if global {
        return Classification::G;
    }
    if benchmark.id() == FunctionId::Rosenbrock && result.len() <= 3 {
        return Classification::O;
    }
    let flat = benchmark
        .gradient_unchecked(result)
        .iter()
        .all(|g| g.abs() <= LOCAL_GRADIENT_THRESHOLD);
    if flat {
        Classification::L
    } else {
        Classification::O
    }
}

/// Mean distance of the G-classified final values from the optimum value;
/// `None` when no run is G.
pub fn precision(records: &[RunRecord], benchmark: &Benchmark, dimension: usize) -> Option<f64> {
    let optimum = benchmark.optimum_value(dimension);
    mean(
        records
            .iter()
            .filter(|r| r.classification == Classification::G)
            .map(|r| r.value - optimum),
    )
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-dimension swarm potential:
/// `sqrt(sum_i 2.5 |v_i| + |p_glob - x_i|)`, the root taken over the whole sum.
pub fn swarm_potential(state: &SwarmState) -> Vec<f64> {
    let mut sums = vec![0.0; state.dimension()];
    for p in &state.particles {
        for (d, sum) in sums.iter_mut().enumerate() {
            *sum += VELOCITY_WEIGHT * p.velocity[d].abs()
                + (state.global_attractor[d] - p.position[d]).abs();
        }
    }
    sums.into_iter().map(f64::sqrt).collect()
}

/// Per-dimension potential of particle `index` (0-based) under the configured
/// weights.
pub fn particle_potential(
    state: &SwarmState,
    index: usize,
    config: &SwarmConfig,
) -> Result<Vec<f64>> {
    particle_potential_with(state, index, config.a, config.b_glob, config.b_loc)
}

/// Like [`particle_potential`], but with the local weight the variant schedule
/// applies to the next iteration, i.e. the dynamics this state is subject to.
pub fn particle_potential_scheduled(
    state: &SwarmState,
    index: usize,
    config: &SwarmConfig,
) -> Result<Vec<f64>> {
    let b_loc = config.effective_b_loc(state.iteration + 1);
    particle_potential_with(state, index, config.a, config.b_glob, b_loc)
}

fn particle_potential_with(
    state: &SwarmState,
    index: usize,
    a: f64,
    b_glob: f64,
    b_loc: f64,
) -> Result<Vec<f64>> {
    let p = state.particles.get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: state.particles.len(),
    })?;
    Ok((0..state.dimension())
        .map(|d| {
            let x = p.position[d];
            a * p.velocity[d].abs()
                + b_glob * (state.global_attractor[d] - x).abs()
                + b_loc * (p.local_attractor[d] - x).abs()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    /// Completed iterations when the sample was taken.
    pub iteration: usize,
    pub phi: Vec<f64>,
}

impl PotentialSample {
    /// Sum of the potential over all dimensions.
    pub fn total(&self) -> f64 {
        self.phi.iter().sum()
    }
}

/// Swarm potential sampled once per iteration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PotentialTrace {
    pub samples: Vec<PotentialSample>,
}

#[derive(Serialize, Deserialize)]
struct TraceRow {
    iteration: usize,
    dim: usize,
    phi: f64,
}

impl PotentialTrace {
    pub fn with_capacity(n: usize) -> Self {
        PotentialTrace {
            samples: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, sample: PotentialSample) {
        self.samples.push(sample);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn at_iteration(&self, iteration: usize) -> Option<&PotentialSample> {
        self.samples.iter().find(|s| s.iteration == iteration)
    }

    /// CSV with header `iteration,dim,phi`, one row per iteration and
    /// dimension; dimensions are numbered from 1.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        // an empty trace still gets its header
        w.write_record(["iteration", "dim", "phi"])?;
        for s in &self.samples {
            for (d, phi) in s.phi.iter().enumerate() {
                w.write_record([
                    s.iteration.to_string(),
                    (d + 1).to_string(),
                    crate::format_float(*phi),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> csv::Result<Self> {
        let mut trace = PotentialTrace::default();
        for row in csv::Reader::from_reader(reader).deserialize::<TraceRow>() {
            let row = row?;
            match trace.samples.last_mut() {
                Some(last) if last.iteration == row.iteration => last.phi.push(row.phi),
                _ => trace.push(PotentialSample {
                    iteration: row.iteration,
                    phi: vec![row.phi],
                }),
            }
        }
        Ok(trace)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }
}
