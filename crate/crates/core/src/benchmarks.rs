//! Benchmark fitness functions with analytic gradients.
//!
//! All functions are the plain (non-shifted, non-rotated) forms with their
//! global minimum value at 0. Each [`Benchmark`] couples a function with the
//! box it is searched over; the box is identical in every dimension.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sphere weight of the original Griewank formulation.
pub const GRIEWANK_DEFAULT_MU: f64 = 1.0 / 4000.0;

const SCHWEFEL_OFFSET: f64 = 418.9829;

/// Identifies one benchmark function. Griewank carries the weight of its
/// sphere term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionId {
    Ackley,
    Griewank { mu: f64 },
    HighConditionedElliptic,
    Rastrigin,
    Rosenbrock,
    Schwefel,
    Sphere,
}

impl FunctionId {
    /// Every function, Griewank with its default weight.
    pub const ALL: [FunctionId; 7] = [
        FunctionId::Ackley,
        FunctionId::Griewank {
            mu: GRIEWANK_DEFAULT_MU,
        },
        FunctionId::HighConditionedElliptic,
        FunctionId::Rastrigin,
        FunctionId::Rosenbrock,
        FunctionId::Schwefel,
        FunctionId::Sphere,
    ];

    /// Canonical lowercase name, without the Griewank weight.
    pub fn name(&self) -> &'static str {
        match self {
            FunctionId::Ackley => "ackley",
            FunctionId::Griewank { .. } => "griewank",
            FunctionId::HighConditionedElliptic => "elliptic",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Schwefel => "schwefel",
            FunctionId::Sphere => "sphere",
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match self {
            FunctionId::Griewank { mu } => Some(*mu),
            _ => None,
        }
    }

    /// Builds an id from a bare function name and an optional Griewank weight.
    /// A weight given for any other function is rejected.
    pub fn from_parts(name: &str, mu: Option<f64>) -> Result<Self> {
        let id = match name.trim().to_ascii_lowercase().as_str() {
            "ackley" => FunctionId::Ackley,
            "griewank" => FunctionId::Griewank {
                mu: GRIEWANK_DEFAULT_MU,
            },
            "elliptic" | "high-conditioned-elliptic" | "highconditionedelliptic" => {
                FunctionId::HighConditionedElliptic
            }
            "rastrigin" => FunctionId::Rastrigin,
            "rosenbrock" => FunctionId::Rosenbrock,
            "schwefel" => FunctionId::Schwefel,
            "sphere" => FunctionId::Sphere,
            other => {
                return Err(Error::config(format!(
                    "unknown function `{other}` (expected one of: {})",
                    FunctionId::ALL.map(|f| f.name()).join(", ")
                )))
            }
        };
        match (id, mu) {
            (FunctionId::Griewank { .. }, Some(mu)) => {
                if !(mu.is_finite() && mu > 0.0) {
                    return Err(Error::config(format!(
                        "griewank mu must be a positive finite number, got {mu}"
                    )));
                }
                Ok(FunctionId::Griewank { mu })
            }
            (id, Some(_)) => Err(Error::config(format!(
                "mu is only meaningful for griewank, not {}",
                id.name()
            ))),
            (id, None) => Ok(id),
        }
    }

    /// Default search box for this function.
    pub fn default_bounds(&self) -> Interval {
        let (lo, hi) = match self {
            FunctionId::Sphere | FunctionId::HighConditionedElliptic => (-100.0, 100.0),
            FunctionId::Ackley => (-32.0, 32.0),
            FunctionId::Griewank { .. } => (-600.0, 600.0),
            FunctionId::Rastrigin => (-5.12, 5.12),
            FunctionId::Rosenbrock => (-30.0, 30.0),
            FunctionId::Schwefel => (-500.0, 500.0),
        };
        Interval { lo, hi }
    }

    /// Smallest supported dimension.
    pub fn min_dimension(&self) -> usize {
        match self {
            FunctionId::Rosenbrock => 2,
            _ => 1,
        }
    }

    /// Per-dimension G-classification distance as a fraction of the box width.
    pub fn g_threshold_factor(&self) -> f64 {
        match self {
            FunctionId::Schwefel | FunctionId::Rosenbrock => 0.005,
            _ => 0.0015,
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Griewank { mu } => write!(f, "griewank:mu={mu}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Accepts `name` or `griewank:mu=<value>`.
impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None => FunctionId::from_parts(s, None),
            Some((name, param)) => {
                let value = param.trim().strip_prefix("mu=").ok_or_else(|| {
                    Error::config(format!("malformed function parameter `{param}`"))
                })?;
                let mu = value
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("malformed mu `{value}`")))?;
                FunctionId::from_parts(name, Some(mu))
            }
        }
    }
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::config(format!(
                "bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(Error::config(format!("empty bounds [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// False for NaN.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Maps `u` from `[0, 1)` onto the interval.
    pub fn lerp(&self, u: f64) -> f64 {
        self.lo + self.width() * u
    }
}

/// A fitness function together with its search box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benchmark {
    id: FunctionId,
    bounds: Interval,
}

impl Benchmark {
    /// The function over its default box.
    pub fn new(id: FunctionId) -> Self {
        Benchmark {
            id,
            bounds: id.default_bounds(),
        }
    }

    /// The function over a custom box, which must contain the optimum.
    pub fn with_bounds(id: FunctionId, bounds: Interval) -> Result<Self> {
        let bounds = Interval::new(bounds.lo, bounds.hi)?;
        let bench = Benchmark { id, bounds };
        let opt = bench.optimum_coordinate();
        if !bounds.contains(opt) {
            return Err(Error::config(format!(
                "bounds [{}, {}] exclude the optimum coordinate {opt} of {}",
                bounds.lo, bounds.hi, id
            )));
        }
        Ok(bench)
    }

    pub fn id(&self) -> FunctionId {
        self.id
    }

    pub fn bounds(&self) -> Interval {
        self.bounds
    }

    pub fn g_threshold_factor(&self) -> f64 {
        self.id.g_threshold_factor()
    }

    /// Maximum per-dimension distance to the optimum for a G classification.
    pub fn g_threshold(&self) -> f64 {
        self.g_threshold_factor() * self.bounds.width()
    }

    pub fn check_dimension(&self, dimension: usize) -> Result<()> {
        let min = self.id.min_dimension();
        if dimension < min {
            return Err(Error::config(format!(
                "{} requires dimension >= {min}, got {dimension}",
                self.id.name()
            )));
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        self.check_dimension(x.len())?;
        match x.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFiniteInput {
                index,
                value: x[index],
            }),
            None => Ok(()),
        }
    }

    /// Function value at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.value(x))
    }

    /// Analytic gradient at `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.gradient_unchecked(x))
    }

    /// Position and value of the global minimum in `dimension` dimensions.
    pub fn optimum(&self, dimension: usize) -> (Vec<f64>, f64) {
        let position = self.optimum_position(dimension);
        let value = self.optimum_value(dimension);
        (position, value)
    }

    pub fn optimum_position(&self, dimension: usize) -> Vec<f64> {
        vec![self.optimum_coordinate(); dimension]
    }

    /// The known minimum value. Zero for every function except Schwefel,
    /// whose rounded offset constant leaves a residual of about 1.3e-5 per
    /// dimension at the true minimizer.
    pub fn optimum_value(&self, dimension: usize) -> f64 {
        match self.id {
            FunctionId::Schwefel => self.value(&self.optimum_position(dimension)),
            _ => 0.0,
        }
    }

    fn optimum_coordinate(&self) -> f64 {
        match self.id {
            FunctionId::Rosenbrock => 1.0,
            FunctionId::Schwefel => schwefel_minimizer(),
            _ => 0.0,
        }
    }

    /// Value without dimension or finiteness checks; the engine validates
    /// dimension once and guarantees in-bounds positions.
    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        match self.id {
            FunctionId::Sphere => x.iter().map(|v| v * v).sum(),
            FunctionId::Rastrigin => {
                10.0 * x.len() as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
            FunctionId::Ackley => {
                let n = x.len() as f64;
                let sum_sq: f64 = x.iter().map(|v| v * v).sum();
                let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
                -20.0 * (-0.2 * (sum_sq / n).sqrt()).exp() - (sum_cos / n).exp() + 20.0 + E
            }
            FunctionId::Griewank { mu } => {
                let sum_sq: f64 = x.iter().map(|v| v * v).sum();
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(d, v)| (v / ((d + 1) as f64).sqrt()).cos())
                    .product();
                mu * sum_sq - prod + 1.0
            }
            FunctionId::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            FunctionId::Schwefel => {
                SCHWEFEL_OFFSET * x.len() as f64
                    - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
            }
            FunctionId::HighConditionedElliptic => {
                let dim = x.len();
                x.iter()
                    .enumerate()
                    .map(|(d, v)| elliptic_weight(d, dim) * v * v)
                    .sum()
            }
        }
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let dim = x.len();
        match self.id {
            FunctionId::Sphere => x.iter().map(|v| 2.0 * v).collect(),
            FunctionId::Rastrigin => x
                .iter()
                .map(|v| 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin())
                .collect(),
            FunctionId::Ackley => {
                let n = dim as f64;
                let sum_sq: f64 = x.iter().map(|v| v * v).sum();
                let sum_cos: f64 = x.iter().map(|v| (2.0 * PI * v).cos()).sum();
                let radius = (sum_sq / n).sqrt();
                let radial = if radius > 0.0 {
                    4.0 * (-0.2 * radius).exp() / (n * radius)
                } else {
                    0.0
                };
                let oscillation = (sum_cos / n).exp() * 2.0 * PI / n;
                x.iter()
                    .map(|v| radial * v + oscillation * (2.0 * PI * v).sin())
                    .collect()
            }
            FunctionId::Griewank { mu } => {
                let scaled: Vec<(f64, f64)> = x
                    .iter()
                    .enumerate()
                    .map(|(d, v)| {
                        let s = ((d + 1) as f64).sqrt();
                        (v / s, s)
                    })
                    .collect();
                (0..dim)
                    .map(|d| {
                        let others: f64 = scaled
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != d)
                            .map(|(_, (arg, _))| arg.cos())
                            .product();
                        let (arg, s) = scaled[d];
                        2.0 * mu * x[d] + others * arg.sin() / s
                    })
                    .collect()
            }
            FunctionId::Rosenbrock => (0..dim)
                .map(|d| {
                    let mut g = 0.0;
                    if d + 1 < dim {
                        g += -400.0 * x[d] * (x[d + 1] - x[d] * x[d]) - 2.0 * (1.0 - x[d]);
                    }
                    if d > 0 {
                        g += 200.0 * (x[d] - x[d - 1] * x[d - 1]);
                    }
                    g
                })
                .collect(),
            FunctionId::Schwefel => x.iter().map(|&v| -schwefel_term_derivative(v)).collect(),
            FunctionId::HighConditionedElliptic => x
                .iter()
                .enumerate()
                .map(|(d, v)| 2.0 * elliptic_weight(d, dim) * v)
                .collect(),
        }
    }
}

impl From<FunctionId> for Benchmark {
    fn from(id: FunctionId) -> Self {
        Benchmark::new(id)
    }
}

/// `(10^6)^(d / (D - 1))` for the 0-based dimension `d`; 1 when `D = 1`.
fn elliptic_weight(d: usize, dim: usize) -> f64 {
    if dim <= 1 {
        1.0
    } else {
        1e6_f64.powf(d as f64 / (dim - 1) as f64)
    }
}

/// d/dx [x sin(sqrt|x|)] = sin(s) + s cos(s) / 2 with s = sqrt|x|; continuous
/// and equal to 0 at the origin.
fn schwefel_term_derivative(x: f64) -> f64 {
    let s = x.abs().sqrt();
    s.sin() + 0.5 * s * s.cos()
}

/// The per-coordinate Schwefel minimizer, found by bisection on the term
/// derivative inside [420, 422].
pub fn schwefel_minimizer() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| bisect(schwefel_term_derivative, 420.0, 422.0, 1e-9))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    debug_assert!(f_lo * f(hi) <= 0.0, "root not bracketed");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench(id: FunctionId) -> Benchmark {
        Benchmark::new(id)
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bench(FunctionId::Sphere).evaluate(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(
            bench(FunctionId::Rastrigin).evaluate(&[0.0; 2]).unwrap(),
            0.0
        );
        for mu in [1.0 / 4000.0, 0.01, 0.1, 3.0] {
            let g = bench(FunctionId::Griewank { mu });
            assert_eq!(g.evaluate(&[0.0; 4]).unwrap(), 0.0);
        }
        let ackley = bench(FunctionId::Ackley).evaluate(&[0.0; 3]).unwrap();
        assert!(ackley.abs() < 1e-15, "{ackley}");
        assert_eq!(
            bench(FunctionId::Rosenbrock).evaluate(&[1.0; 3]).unwrap(),
            0.0
        );
    }

    #[test]
    fn rastrigin_half() {
        // 0.25 - 10 cos(pi) + 10
        let v = bench(FunctionId::Rastrigin).evaluate(&[0.5]).unwrap();
        assert!((v - 20.25).abs() < 1e-12, "{v}");
    }

    #[test]
    fn simple_gradients() {
        let g = bench(FunctionId::Sphere)
            .gradient(&[1.0, 2.0, 3.0])
            .unwrap();
        assert_eq!(g, vec![2.0, 4.0, 6.0]);
        let g = bench(FunctionId::Rastrigin).gradient(&[2.0]).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-12, "{g:?}");
    }

    #[test]
    fn elliptic_reduces_to_sphere_in_one_dimension() {
        let e = bench(FunctionId::HighConditionedElliptic);
        assert_eq!(e.evaluate(&[3.0]).unwrap(), 9.0);
        assert_eq!(e.gradient(&[3.0]).unwrap(), vec![6.0]);
        // weights 1, 1e3, 1e6 in three dimensions
        let v = e.evaluate(&[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 1_001_001.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn dimension_errors() {
        let r = bench(FunctionId::Rosenbrock);
        assert!(matches!(r.evaluate(&[1.0]), Err(Error::Config(_))));
        assert!(matches!(r.gradient(&[1.0]), Err(Error::Config(_))));
        assert!(matches!(
            bench(FunctionId::Sphere).evaluate(&[]),
            Err(Error::Config(_))
        ));
        assert!(r.check_dimension(2).is_ok());
    }

    #[test]
    fn non_finite_input() {
        let err = bench(FunctionId::Sphere)
            .evaluate(&[0.0, f64::NAN])
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteInput { index: 1, .. }));
        assert!(bench(FunctionId::Ackley)
            .gradient(&[f64::INFINITY])
            .is_err());
    }

    #[test]
    fn default_bounds() {
        assert_eq!(
            FunctionId::Rastrigin.default_bounds(),
            Interval {
                lo: -5.12,
                hi: 5.12
            }
        );
        assert_eq!(
            FunctionId::Griewank { mu: 0.1 }.default_bounds(),
            Interval {
                lo: -600.0,
                hi: 600.0
            }
        );
        assert_eq!(
            FunctionId::Schwefel.default_bounds(),
            Interval {
                lo: -500.0,
                hi: 500.0
            }
        );
    }

    #[test]
    fn threshold_factors() {
        for id in FunctionId::ALL {
            let expected = match id {
                FunctionId::Schwefel | FunctionId::Rosenbrock => 0.005,
                _ => 0.0015,
            };
            assert_eq!(id.g_threshold_factor(), expected, "{id}");
        }
        assert!((bench(FunctionId::Rastrigin).g_threshold() - 0.01536).abs() < 1e-15);
    }

    #[test]
    fn optimum_positions() {
        let (pos, val) = bench(FunctionId::Sphere).optimum(10);
        assert_eq!(pos, vec![0.0; 10]);
        assert_eq!(val, 0.0);
        let (pos, val) = bench(FunctionId::Rosenbrock).optimum(3);
        assert_eq!(pos, vec![1.0; 3]);
        assert_eq!(val, 0.0);
    }

    #[test]
    fn schwefel_minimizer_is_gradient_root() {
        let s = schwefel_minimizer();
        assert!((s - 420.968746).abs() < 1e-5, "{s}");
        let b = bench(FunctionId::Schwefel);
        let (pos, val) = b.optimum(1);
        assert!(val.abs() <= 1e-3, "{val}");
        assert!(b.gradient(&pos).unwrap()[0].abs() <= 1e-6);
        // reported optimum value is the evaluation at the minimizer
        assert_eq!(b.evaluate(&pos).unwrap(), val);
    }

    #[test]
    fn schwefel_gradient_at_origin_is_zero() {
        let g = bench(FunctionId::Schwefel).gradient(&[0.0, 0.0]).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn griewank_increases_with_mu() {
        let x = [3.0, -7.0, 1.5];
        let lo = bench(FunctionId::Griewank { mu: 0.001 })
            .evaluate(&x)
            .unwrap();
        let hi = bench(FunctionId::Griewank { mu: 0.01 })
            .evaluate(&x)
            .unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn parse_ids() {
        assert_eq!("sphere".parse::<FunctionId>().unwrap(), FunctionId::Sphere);
        assert_eq!(
            "griewank:mu=0.00025".parse::<FunctionId>().unwrap(),
            FunctionId::Griewank { mu: 0.00025 }
        );
        assert_eq!(
            "griewank".parse::<FunctionId>().unwrap(),
            FunctionId::Griewank {
                mu: GRIEWANK_DEFAULT_MU
            }
        );
        assert!("bogus".parse::<FunctionId>().is_err());
        assert!("griewank:mu=abc".parse::<FunctionId>().is_err());
        assert!("griewank:mu=-1".parse::<FunctionId>().is_err());
        assert!("sphere:mu=0.1".parse::<FunctionId>().is_err());
        let id = FunctionId::Griewank { mu: 0.1 };
        assert_eq!(id.to_string().parse::<FunctionId>().unwrap(), id);
    }

    #[test]
    fn custom_bounds_must_hold_optimum() {
        assert!(
            Benchmark::with_bounds(FunctionId::Rosenbrock, Interval { lo: -5.0, hi: 0.5 }).is_err()
        );
        assert!(
            Benchmark::with_bounds(FunctionId::Sphere, Interval { lo: 1.0, hi: -1.0 }).is_err()
        );
        assert!(Benchmark::with_bounds(
            FunctionId::Sphere,
            Interval {
                lo: f64::NEG_INFINITY,
                hi: 1.0
            }
        )
        .is_err());
        let b = Benchmark::with_bounds(FunctionId::Sphere, Interval { lo: -1.0, hi: 2.0 }).unwrap();
        assert_eq!(b.bounds().width(), 3.0);
    }

    #[test]
    fn interval_rejects_nan() {
        let i = Interval { lo: -1.0, hi: 1.0 };
        assert!(!i.contains(f64::NAN));
        assert!(i.contains(1.0) && i.contains(-1.0));
    }
}
