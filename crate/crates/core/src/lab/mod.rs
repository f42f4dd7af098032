//! Empirical Lipschitz estimation for the ternary operations, the
//! measure-algebra operators and the finite-subset retraction, plus the
//! displacement probe on the line with a gap.
//!
//! Sampling can only exhibit violations. A passing report means no ratio
//! above `claimed_bound + tolerance` was found among the sampled and refined
//! configurations.

mod estimate;
mod gap;
mod sampler;

pub use estimate::{
    audit_retraction, estimate_joint_lipschitz, estimate_per_arg, estimate_per_arg_lipschitz,
    estimate_retraction_lipschitz, joint_ratio, per_arg_ratio, retraction_ratio, LipschitzReport,
    Probe, RetractionAudit, CHUNK_SIZE, REFINE_STEPS, STEP_DECAY, TOP_WITNESSES,
};
pub use gap::{gap_probe, GapProbe, GapRow};
pub use sampler::{
    chunk_rng, IntervalSpace, QuotientSpace, SampleSpace, SamplerConfig, VectorBox, INTERVAL_GRID,
};

/// Default absolute slack on ratio comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Slack for the joint bound of the coordinate-wise median in the sup norm.
pub const MEDIAN_JOINT_TOLERANCE: f64 = 1e-9;
/// Per-argument bound for every mixer and co-mixer implemented here.
pub const PER_ARG_BOUND: f64 = 1.0;
/// Joint bound obtained by chaining three per-argument steps.
pub const CHAINED_JOINT_BOUND: f64 = 3.0;
/// Lipschitz bound for the retraction `X(3) -> X(2)`.
pub const RETRACTION_BOUND: f64 = 9.0;
