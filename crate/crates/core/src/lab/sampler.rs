use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Vector};
use crate::measure::{quotient_class, quotient_dist, rho, IntervalSet, QuotientClass};
use crate::par::Execution;

/// Sampling parameters shared by all estimators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Number of random configurations to evaluate.
    pub count: usize,
    pub dim: usize,
    /// Vector samples are uniform in `[-box_radius, box_radius]^dim`.
    pub box_radius: f64,
    /// Configurations whose denominator is below this are redrawn.
    pub min_separation: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl SamplerConfig {
    pub fn new(seed: u64, count: usize, dim: usize) -> Self {
        Self {
            seed,
            count,
            dim,
            box_radius: 1.0,
            min_separation: 1e-6,
            execution: Execution::Auto,
        }
    }

    /// Sets the box radius and rescales `min_separation` to `1e-6 * radius`.
    pub fn with_box_radius(mut self, radius: f64) -> Self {
        self.box_radius = radius;
        self.min_separation = 1e-6 * radius;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config("sample count must be positive".into()));
        }
        if self.dim == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if !(self.box_radius.is_finite() && self.box_radius > 0.0) {
            return Err(Error::OutOfRange { name: "box_radius", value: self.box_radius });
        }
        if self.min_separation.is_nan() || self.min_separation < 0.0 {
            return Err(Error::OutOfRange { name: "min_separation", value: self.min_separation });
        }
        let diameter = 2.0 * self.box_radius;
        if self.min_separation >= diameter {
            return Err(Error::DegenerateSampler { min_separation: self.min_separation, diameter });
        }
        Ok(())
    }
}

/// Generator for chunk `chunk` of a sampling run: the seed selects the key,
/// the chunk index selects an independent ChaCha stream.
pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// A metric space the estimators can draw from and search in.
pub trait SampleSpace: Sync {
    type Point: Clone + Send + Sync + Display;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;
    /// Points obtained by moving one coordinate of `x` by `step` either way.
    fn neighbors(&self, x: &Self::Point, step: f64) -> Vec<Self::Point>;
    /// First step size for hill climbing.
    fn initial_step(&self) -> f64;
    fn norm_label(&self) -> Option<String> {
        None
    }
    fn dim(&self) -> Option<usize> {
        None
    }
}

/// Uniform samples in a centered cube of `R^dim` measured with `spec`.
#[derive(Debug, Clone)]
pub struct VectorBox {
    dim: usize,
    radius: f64,
    spec: NormSpec,
}

impl VectorBox {
    pub fn new(dim: usize, radius: f64, spec: NormSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        if let Some(w) = spec.weights() {
            if w.len() != dim {
                return Err(Error::DimensionMismatch { expected: w.len(), found: dim });
            }
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::OutOfRange { name: "box_radius", value: radius });
        }
        Ok(Self { dim, radius, spec })
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }
}

impl SampleSpace for VectorBox {
    type Point = Vector;

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_raw((0..self.dim).map(|_| rng.gen_range(-self.radius..=self.radius)).collect())
    }

    fn distance(&self, x: &Vector, y: &Vector) -> f64 {
        self.spec.dist(x, y).expect("sampled vectors share the box dimension")
    }

    fn neighbors(&self, x: &Vector, step: f64) -> Vec<Vector> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut c = x.coords().to_vec();
                c[i] += sign * step;
                out.push(Vector::from_raw(c));
            }
        }
        out
    }

    fn initial_step(&self) -> f64 {
        0.1 * self.radius
    }

    fn norm_label(&self) -> Option<String> {
        Some(self.spec.to_string())
    }

    fn dim(&self) -> Option<usize> {
        Some(self.dim)
    }
}

/// Resolution of sampled interval endpoints. Endpoints are multiples of
/// `1 / INTERVAL_GRID`, which keeps every measure computation exact.
pub const INTERVAL_GRID: u32 = 1 << 20;

fn snap(x: f64) -> f64 {
    let g = INTERVAL_GRID as f64;
    ((x * g).round() / g).clamp(0.0, 1.0)
}

/// Random finite unions of at most `max_intervals` intervals.
#[derive(Debug, Clone)]
pub struct IntervalSpace {
    pub max_intervals: usize,
}

impl Default for IntervalSpace {
    fn default() -> Self {
        Self { max_intervals: 6 }
    }
}

impl IntervalSpace {
    fn perturb(&self, x: &IntervalSet, step: f64) -> Vec<IntervalSet> {
        let step = snap(step).max(1.0 / INTERVAL_GRID as f64);
        let base = x.intervals();
        let mut out = Vec::with_capacity(4 * base.len() + 1);
        for k in 0..base.len() {
            for end in 0..2 {
                for sign in [1.0, -1.0] {
                    let mut raw = base.to_vec();
                    let (lo, hi) = raw[k];
                    raw[k] = if end == 0 {
                        (snap(lo + sign * step).min(hi), hi)
                    } else {
                        (lo, snap(hi + sign * step).max(lo))
                    };
                    out.push(IntervalSet::canonicalize(raw).expect("snapped endpoints stay in [0, 1]"));
                }
            }
        }
        // the empty set has no endpoints to move
        if base.is_empty() && self.max_intervals > 0 {
            out.push(IntervalSet::canonicalize([(0.0, step)]).expect("step lies in [0, 1]"));
        }
        out
    }
}

impl SampleSpace for IntervalSpace {
    type Point = IntervalSet;

    fn sample(&self, rng: &mut ChaCha8Rng) -> IntervalSet {
        let k = rng.gen_range(0..=self.max_intervals);
        let mut ends: Vec<u32> = (0..2 * k).map(|_| rng.gen_range(0..=INTERVAL_GRID)).collect();
        ends.sort_unstable();
        let g = INTERVAL_GRID as f64;
        IntervalSet::canonicalize(ends.chunks(2).map(|p| (p[0] as f64 / g, p[1] as f64 / g)))
            .expect("grid endpoints lie in [0, 1]")
    }

    fn distance(&self, x: &IntervalSet, y: &IntervalSet) -> f64 {
        rho(x, y)
    }

    fn neighbors(&self, x: &IntervalSet, step: f64) -> Vec<IntervalSet> {
        self.perturb(x, step)
    }

    fn initial_step(&self) -> f64 {
        0.05
    }
}

/// Classes of random interval sets modulo complementation.
#[derive(Debug, Clone, Default)]
pub struct QuotientSpace {
    pub inner: IntervalSpace,
}

impl SampleSpace for QuotientSpace {
    type Point = QuotientClass;

    fn sample(&self, rng: &mut ChaCha8Rng) -> QuotientClass {
        quotient_class(&self.inner.sample(rng))
    }

    fn distance(&self, x: &QuotientClass, y: &QuotientClass) -> f64 {
        quotient_dist(x, y)
    }

    fn neighbors(&self, x: &QuotientClass, step: f64) -> Vec<QuotientClass> {
        self.inner.perturb(x.rep(), step).iter().map(quotient_class).collect()
    }

    fn initial_step(&self) -> f64 {
        self.inner.initial_step()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| chunk_rng(7, 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| chunk_rng(7, 3).gen()).collect();
        assert_eq!(a, b);
        let mut r1 = chunk_rng(7, 3);
        let mut r2 = chunk_rng(7, 4);
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::new(1, 10, 2).validate().is_ok());
        assert!(SamplerConfig::new(1, 0, 2).validate().is_err());
        let mut cfg = SamplerConfig::new(1, 10, 2);
        cfg.min_separation = 2.0;
        assert!(matches!(cfg.validate(), Err(Error::DegenerateSampler { .. })));
        let cfg = SamplerConfig::new(1, 10, 2).with_box_radius(5.0);
        assert_eq!(cfg.min_separation, 1e-6 * 5.0);
    }

    #[test]
    fn vector_samples_stay_in_box() {
        let space = VectorBox::new(3, 2.0, NormSpec::sup()).unwrap();
        let mut rng = chunk_rng(1, 0);
        for _ in 0..1000 {
            let p = space.sample(&mut rng);
            assert!(p.coords().iter().all(|c| c.abs() <= 2.0));
        }
        assert_eq!(space.neighbors(&Vector::zeros(3), 0.5).len(), 6);
        assert!(VectorBox::new(3, 1.0, NormSpec::l1().with_weights(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn interval_samples_are_canonical_grid_sets() {
        let space = IntervalSpace::default();
        let mut rng = chunk_rng(2, 0);
        for _ in 0..500 {
            let s = space.sample(&mut rng);
            assert!(s.intervals().len() <= 6);
            for &(lo, hi) in s.intervals() {
                assert_eq!(lo, snap(lo));
                assert_eq!(hi, snap(hi));
            }
            for n in space.neighbors(&s, 0.01) {
                for &(lo, hi) in n.intervals() {
                    assert_eq!(lo, snap(lo));
                    assert_eq!(hi, snap(hi));
                }
            }
        }
    }
}
