//! Particle swarm optimization laboratory.
//!
//! Three PSO variants share one engine ([`swarm`]): classical PSO with local
//! and global attractors, the social-only model that ignores local attractors,
//! and a hybrid that runs classically for the first half of its iteration
//! budget before switching its local attractors off. Around the engine sit
//! the benchmark functions ([`benchmarks`]), result classification, precision
//! and swarm-potential measurements ([`analysis`]), and a repetition harness
//! that aggregates runs into table-shaped reports ([`harness`]).

pub mod analysis;
pub mod benchmarks;
mod error;
pub mod harness;
pub mod swarm;

pub use analysis::{Classification, PotentialTrace};
pub use benchmarks::{Benchmark, FunctionId, Interval};
pub use error::{Error, Result};
pub use swarm::{RunRecord, Swarm, SwarmConfig, SwarmState, Variant, VariantSchedule};

/// Shortest round-trip decimal form of `v`, switching to exponent notation
/// for very small or very large magnitudes.
pub fn format_float(v: f64) -> String {
    let m = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&m) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}
