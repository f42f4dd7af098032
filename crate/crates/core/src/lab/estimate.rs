use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sampler::{chunk_rng, SampleSpace, SamplerConfig, VectorBox};
use super::{CHAINED_JOINT_BOUND, DEFAULT_TOLERANCE, MEDIAN_JOINT_TOLERANCE, PER_ARG_BOUND, RETRACTION_BOUND};
use crate::error::{Error, Result};
use crate::geometry::{in_triple_hull, NormSpec, Vector};
use crate::par;
use crate::subset::{hausdorff_dist, proof_chain, retraction_3_to_2, FiniteSubset};
use crate::ternary::{OpKind, TernaryOp};

/// Samples per independently seeded chunk. Fixed, so the sample stream does
/// not depend on the number of worker threads.
pub const CHUNK_SIZE: usize = 1024;
/// Number of best random configurations handed to hill climbing.
pub const TOP_WITNESSES: usize = 10;
pub const REFINE_STEPS: usize = 100;
pub const STEP_DECAY: f64 = 0.7;
const MAX_ATTEMPTS: usize = 64;

/// A pair of argument triples. For per-argument estimates `moved` differs
/// from `base` in one position only; for the retraction the triples list
/// the two finite sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe<P> {
    pub base: [P; 3],
    pub moved: [P; 3],
}

impl<P> Probe<P> {
    pub fn map<Q>(&self, f: impl Fn(&P) -> Q) -> Probe<Q> {
        Probe {
            base: [f(&self.base[0]), f(&self.base[1]), f(&self.base[2])],
            moved: [f(&self.moved[0]), f(&self.moved[1]), f(&self.moved[2])],
        }
    }
}

/// Result of an empirical Lipschitz estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport<P> {
    /// `per_arg`, `joint` or `retraction`.
    pub mode: String,
    pub op: String,
    pub arg_index: Option<usize>,
    pub norm: Option<String>,
    pub dim: Option<usize>,
    pub seed: u64,
    /// Accepted random configurations.
    pub samples: usize,
    /// Largest ratio observed, after refinement.
    pub estimate: f64,
    pub claimed_bound: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub witness: Option<Probe<P>>,
}

impl<P> LipschitzReport<P> {
    pub fn map_witness<Q>(self, f: impl Fn(&P) -> Q) -> LipschitzReport<Q> {
        LipschitzReport {
            mode: self.mode,
            op: self.op,
            arg_index: self.arg_index,
            norm: self.norm,
            dim: self.dim,
            seed: self.seed,
            samples: self.samples,
            estimate: self.estimate,
            claimed_bound: self.claimed_bound,
            tolerance: self.tolerance,
            pass: self.pass,
            witness: self.witness.as_ref().map(|w| w.map(f)),
        }
    }

    /// Replaces the claimed bound and recomputes `pass`.
    pub fn with_claimed_bound(mut self, bound: f64) -> Self {
        self.claimed_bound = bound;
        self.pass = self.estimate <= bound + self.tolerance;
        self
    }
}

struct Scored<P> {
    ratio: f64,
    index: usize,
    probe: Probe<P>,
}

/// Larger ratio first, then earlier sample.
fn rank<P>(x: &Scored<P>, y: &Scored<P>) -> Ordering {
    y.ratio.total_cmp(&x.ratio).then(x.index.cmp(&y.index))
}

fn keep_top<P>(top: &mut Vec<Scored<P>>, item: Scored<P>) {
    if top.len() == TOP_WITNESSES && rank(&item, &top[TOP_WITNESSES - 1]).is_ge() {
        return;
    }
    let at = top.partition_point(|t| rank(t, &item).is_lt());
    top.insert(at, item);
    top.truncate(TOP_WITNESSES);
}

struct Search<P> {
    samples: usize,
    best: Option<(f64, Probe<P>)>,
}

/// Random search followed by hill climbing from the best configurations.
///
/// Every chunk of [`CHUNK_SIZE`] samples has its own generator and the merge
/// orders candidates by `(ratio, sample index)`, so the outcome is the same
/// for any execution mode.
fn search<P, D, R, N>(cfg: &SamplerConfig, draw: D, ratio: R, neighbors: N, initial_step: f64) -> Search<P>
where
    P: Clone + Send + Sync,
    D: Fn(&mut ChaCha8Rng) -> Probe<P> + Sync + Send,
    R: Fn(&Probe<P>) -> Option<f64> + Sync + Send,
    N: Fn(&Probe<P>, f64) -> Vec<Probe<P>> + Sync + Send,
{
    let chunks = cfg.count.div_ceil(CHUNK_SIZE);
    let per_chunk = par::map_indexed(chunks, cfg.execution, |k| {
        let mut rng = chunk_rng(cfg.seed, k);
        let mut top = Vec::with_capacity(TOP_WITNESSES + 1);
        let mut used = 0;
        for index in k * CHUNK_SIZE..cfg.count.min((k + 1) * CHUNK_SIZE) {
            for _ in 0..MAX_ATTEMPTS {
                let probe = draw(&mut rng);
                if let Some(r) = ratio(&probe) {
                    used += 1;
                    keep_top(&mut top, Scored { ratio: r, index, probe });
                    break;
                }
            }
        }
        (used, top)
    });

    let mut samples = 0;
    let mut top = Vec::with_capacity(TOP_WITNESSES + 1);
    for (used, chunk_top) in per_chunk {
        samples += used;
        for item in chunk_top {
            keep_top(&mut top, item);
        }
    }

    let refined = par::map_indexed(top.len(), cfg.execution, |j| {
        let start = &top[j];
        let mut current = start.probe.clone();
        let mut value = start.ratio;
        let mut step = initial_step;
        for _ in 0..REFINE_STEPS {
            let mut best: Option<(f64, Probe<P>)> = None;
            for candidate in neighbors(&current, step) {
                if let Some(r) = ratio(&candidate) {
                    if best.as_ref().is_none_or(|(b, _)| r > *b) {
                        best = Some((r, candidate));
                    }
                }
            }
            match best {
                Some((r, p)) if r > value => {
                    value = r;
                    current = p;
                }
                _ => step *= STEP_DECAY,
            }
        }
        (value, current)
    });

    let best = refined
        .into_iter()
        .fold(None, |acc: Option<(f64, Probe<P>)>, (r, p)| match acc {
            Some((b, _)) if b >= r => acc,
            _ => Some((r, p)),
        });
    Search { samples, best }
}

fn finite(num: f64, den: f64, min_separation: f64) -> Option<f64> {
    if den < min_separation || den == 0.0 {
        return None;
    }
    let r = num / den;
    r.is_finite().then_some(r)
}

/// Neighbors of a probe obtained by moving one free point; points that are
/// shared between `base` and `moved` move together.
fn probe_neighbors<S: SampleSpace>(
    space: &S,
    probe: &Probe<S::Point>,
    step: f64,
    shared: [bool; 3],
) -> Vec<Probe<S::Point>> {
    let mut out = Vec::new();
    for (i, &shared) in shared.iter().enumerate() {
        for p in space.neighbors(&probe.base[i], step) {
            let mut next = probe.clone();
            if shared {
                next.moved[i] = p.clone();
            }
            next.base[i] = p;
            out.push(next);
        }
        if !shared {
            for p in space.neighbors(&probe.moved[i], step) {
                let mut next = probe.clone();
                next.moved[i] = p;
                out.push(next);
            }
        }
    }
    out
}

fn arg_position(arg_index: usize) -> Result<usize> {
    match arg_index {
        1..=3 => Ok(arg_index - 1),
        _ => Err(Error::OutOfRange { name: "arg_index", value: arg_index as f64 }),
    }
}

/// Per-argument Lipschitz estimate of an arbitrary ternary operation on a
/// sample space. `arg_index` is 1-based.
#[allow(clippy::too_many_arguments)]
pub fn estimate_per_arg<S, F>(
    space: &S,
    op_name: &str,
    op: F,
    arg_index: usize,
    cfg: &SamplerConfig,
    claimed_bound: f64,
    tolerance: f64,
) -> Result<LipschitzReport<S::Point>>
where
    S: SampleSpace,
    F: Fn(&S::Point, &S::Point, &S::Point) -> S::Point + Sync + Send,
{
    cfg.validate()?;
    let pos = arg_position(arg_index)?;
    let ratio = |p: &Probe<S::Point>| {
        let (num, den) = per_arg_parts(space, &op, pos, p);
        finite(num, den, cfg.min_separation)
    };
    let draw = |rng: &mut ChaCha8Rng| {
        let base = [space.sample(rng), space.sample(rng), space.sample(rng)];
        let mut moved = base.clone();
        moved[pos] = space.sample(rng);
        Probe { base, moved }
    };
    let mut shared = [true; 3];
    shared[pos] = false;
    let neighbors = |p: &Probe<S::Point>, step: f64| probe_neighbors(space, p, step, shared);
    let outcome = search(cfg, draw, ratio, neighbors, space.initial_step());
    Ok(report("per_arg", op_name, Some(arg_index), space, cfg, outcome, claimed_bound, tolerance))
}

fn per_arg_parts<S, F>(space: &S, op: &F, pos: usize, p: &Probe<S::Point>) -> (f64, f64)
where
    S: SampleSpace,
    F: Fn(&S::Point, &S::Point, &S::Point) -> S::Point,
{
    let before = op(&p.base[0], &p.base[1], &p.base[2]);
    let after = op(&p.moved[0], &p.moved[1], &p.moved[2]);
    (space.distance(&before, &after), space.distance(&p.base[pos], &p.moved[pos]))
}

#[allow(clippy::too_many_arguments)]
fn report<S: SampleSpace>(
    mode: &str,
    op: &str,
    arg_index: Option<usize>,
    space: &S,
    cfg: &SamplerConfig,
    outcome: Search<S::Point>,
    claimed_bound: f64,
    tolerance: f64,
) -> LipschitzReport<S::Point> {
    let (estimate, witness) = match outcome.best {
        Some((r, p)) => (r, Some(p)),
        None => (0.0, None),
    };
    LipschitzReport {
        mode: mode.into(),
        op: op.into(),
        arg_index,
        norm: space.norm_label(),
        dim: space.dim(),
        seed: cfg.seed,
        samples: outcome.samples,
        estimate,
        claimed_bound,
        tolerance,
        pass: estimate <= claimed_bound + tolerance,
        witness,
    }
}

fn checked_op(op: &TernaryOp, dim: usize) -> Result<()> {
    let z = Vector::zeros(dim);
    op.apply(&z, &z, &z).map(|_| ())
}

/// Per-argument estimate for a vector operation, measured with `spec`.
pub fn estimate_per_arg_lipschitz(
    op: &TernaryOp,
    arg_index: usize,
    cfg: &SamplerConfig,
    spec: &NormSpec,
) -> Result<LipschitzReport<Vector>> {
    checked_op(op, cfg.dim)?;
    let space = VectorBox::new(cfg.dim, cfg.box_radius, spec.clone())?;
    let apply = |a: &Vector, b: &Vector, c: &Vector| op.apply(a, b, c).expect("operation validated for this dimension");
    estimate_per_arg(&space, op.kind.name(), apply, arg_index, cfg, PER_ARG_BOUND, DEFAULT_TOLERANCE)
}

/// Recomputes the ratio of a per-argument witness.
pub fn per_arg_ratio(op: &TernaryOp, arg_index: usize, witness: &Probe<Vector>, spec: &NormSpec) -> Result<f64> {
    let pos = arg_position(arg_index)?;
    let dim = witness.base[0].dim();
    let space = VectorBox::new(dim, 1.0, spec.clone())?;
    checked_op(op, dim)?;
    let apply = |a: &Vector, b: &Vector, c: &Vector| op.apply(a, b, c).expect("operation validated for this dimension");
    let (num, den) = per_arg_parts(&space, &apply, pos, witness);
    Ok(num / den)
}

fn joint_parts(op: &TernaryOp, p: &Probe<Vector>, spec: &NormSpec) -> Result<(f64, f64)> {
    let before = op.apply(&p.base[0], &p.base[1], &p.base[2])?;
    let after = op.apply(&p.moved[0], &p.moved[1], &p.moved[2])?;
    let mut den: f64 = 0.0;
    for i in 0..3 {
        den = den.max(spec.dist(&p.base[i], &p.moved[i])?);
    }
    Ok((spec.dist(&before, &after)?, den))
}

/// Ratio of output distance to the largest argument displacement.
pub fn joint_ratio(op: &TernaryOp, witness: &Probe<Vector>, spec: &NormSpec) -> Result<f64> {
    let (num, den) = joint_parts(op, witness, spec)?;
    Ok(num / den)
}

/// Joint estimate: all three arguments move, the denominator is the largest
/// of the three displacements. The coordinate-wise median in the sup norm is
/// held to bound 1; other operations to the chained bound 3.
pub fn estimate_joint_lipschitz(op: &TernaryOp, cfg: &SamplerConfig, spec: &NormSpec) -> Result<LipschitzReport<Vector>> {
    cfg.validate()?;
    checked_op(op, cfg.dim)?;
    let space = VectorBox::new(cfg.dim, cfg.box_radius, spec.clone())?;
    let ratio = |p: &Probe<Vector>| {
        let (num, den) = joint_parts(op, p, spec).ok()?;
        finite(num, den, cfg.min_separation)
    };
    let draw = |rng: &mut ChaCha8Rng| Probe {
        base: [space.sample(rng), space.sample(rng), space.sample(rng)],
        moved: [space.sample(rng), space.sample(rng), space.sample(rng)],
    };
    let neighbors = |p: &Probe<Vector>, step: f64| probe_neighbors(&space, p, step, [false; 3]);
    let outcome = search(cfg, draw, ratio, neighbors, space.initial_step());
    let (bound, tol) = if op.kind == OpKind::MedianMixer && spec.is_sup() {
        (PER_ARG_BOUND, MEDIAN_JOINT_TOLERANCE)
    } else {
        (CHAINED_JOINT_BOUND, DEFAULT_TOLERANCE)
    };
    Ok(report("joint", op.kind.name(), None, &space, cfg, outcome, bound, tol))
}

/// Draws a triple that lists a set of three, two (probability 0.15) or one
/// (probability 0.05) points.
fn draw_listing(space: &VectorBox, rng: &mut ChaCha8Rng) -> [Vector; 3] {
    let a = space.sample(rng);
    let b = space.sample(rng);
    let c = space.sample(rng);
    let u: f64 = rng.gen();
    if u < 0.05 {
        [a.clone(), a.clone(), a]
    } else if u < 0.2 {
        [a.clone(), b, a]
    } else {
        [a, b, c]
    }
}

fn listing_set(t: &[Vector; 3]) -> FiniteSubset {
    FiniteSubset::new(t.to_vec(), 3).expect("listing of at most three points of one dimension")
}

fn retraction_parts(p: &Probe<Vector>, spec: &NormSpec) -> Result<(f64, f64)> {
    let e = listing_set(&p.base);
    let f = listing_set(&p.moved);
    let num = hausdorff_dist(&retraction_3_to_2(&e, spec)?, &retraction_3_to_2(&f, spec)?, spec)?;
    Ok((num, hausdorff_dist(&e, &f, spec)?))
}

/// `d_H(rho(E), rho(E')) / d_H(E, E')` for the sets listed by the witness.
pub fn retraction_ratio(witness: &Probe<Vector>, spec: &NormSpec) -> Result<f64> {
    let (num, den) = retraction_parts(witness, spec)?;
    Ok(num / den)
}

/// Lipschitz estimate for the retraction `X(3) -> X(2)` against bound 9.
pub fn estimate_retraction_lipschitz(cfg: &SamplerConfig, spec: &NormSpec) -> Result<LipschitzReport<Vector>> {
    cfg.validate()?;
    let space = VectorBox::new(cfg.dim, cfg.box_radius, spec.clone())?;
    let ratio = |p: &Probe<Vector>| {
        let (num, den) = retraction_parts(p, spec).ok()?;
        finite(num, den, cfg.min_separation)
    };
    let draw = |rng: &mut ChaCha8Rng| Probe { base: draw_listing(&space, rng), moved: draw_listing(&space, rng) };
    let neighbors = |p: &Probe<Vector>, step: f64| probe_neighbors(&space, p, step, [false; 3]);
    let outcome = search(cfg, draw, ratio, neighbors, space.initial_step());
    Ok(report("retraction", "retraction", None, &space, cfg, outcome, RETRACTION_BOUND, DEFAULT_TOLERANCE))
}

/// Worst-case quantities of the retraction argument over a sample of pairs
/// of finite sets, drawn exactly as in [`estimate_retraction_lipschitz`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetractionAudit {
    pub pairs: usize,
    /// Largest `d_H(rho(E), rho(E')) / d_H(E, E')`.
    pub max_ratio: f64,
    /// Largest `d_H(rho(A), rho(f(A))) / delta`; bounded by 3.
    pub max_f_leg_ratio: f64,
    /// Largest `d_H(rho(B), rho(h(B))) / delta`; bounded by 6.
    pub max_h_leg_ratio: f64,
    /// Largest `disp(h) / delta`; bounded by 2.
    pub max_h_displacement_ratio: f64,
    /// Largest single-argument excess of output movement over input movement.
    pub max_step_excess: f64,
    /// Pairs where `rho(f(A)) != rho(h(B))`.
    pub legs_disagree: usize,
    /// Output points outside the convex hull of their set at the given tolerance.
    pub hull_failures: usize,
    pub hull_tol: f64,
}

struct AuditChunk {
    pairs: usize,
    max_ratio: f64,
    f_leg: f64,
    h_leg: f64,
    h_disp: f64,
    excess: f64,
    disagree: usize,
    hull_failures: usize,
}

pub fn audit_retraction(cfg: &SamplerConfig, spec: &NormSpec, hull_tol: f64) -> Result<RetractionAudit> {
    cfg.validate()?;
    let space = VectorBox::new(cfg.dim, cfg.box_radius, spec.clone())?;
    let chunks = cfg.count.div_ceil(CHUNK_SIZE);
    let per_chunk = par::map_indexed(chunks, cfg.execution, |k| -> Result<AuditChunk> {
        let mut rng = chunk_rng(cfg.seed, k);
        let mut acc = AuditChunk {
            pairs: 0,
            max_ratio: 0.0,
            f_leg: 0.0,
            h_leg: 0.0,
            h_disp: 0.0,
            excess: f64::NEG_INFINITY,
            disagree: 0,
            hull_failures: 0,
        };
        for _ in k * CHUNK_SIZE..cfg.count.min((k + 1) * CHUNK_SIZE) {
            for _ in 0..MAX_ATTEMPTS {
                let probe = Probe { base: draw_listing(&space, &mut rng), moved: draw_listing(&space, &mut rng) };
                let Some(ratio) = ({
                    let (num, den) = retraction_parts(&probe, spec)?;
                    finite(num, den, cfg.min_separation)
                }) else {
                    continue;
                };
                let (e, f) = (listing_set(&probe.base), listing_set(&probe.moved));
                let chain = proof_chain(&e, &f, spec)?;
                acc.pairs += 1;
                acc.max_ratio = acc.max_ratio.max(ratio);
                acc.f_leg = acc.f_leg.max(chain.f_leg / chain.delta);
                acc.h_leg = acc.h_leg.max(chain.h_leg / chain.delta);
                acc.h_disp = acc.h_disp.max(chain.disp_h / chain.delta);
                acc.excess = acc.excess.max(chain.worst_step_excess);
                acc.disagree += usize::from(!chain.legs_meet);
                for set in [&e, &f] {
                    let [a, b, c] = set.listing()?;
                    for q in retraction_3_to_2(set, spec)?.points() {
                        if !in_triple_hull(q, &a, &b, &c, hull_tol)? {
                            acc.hull_failures += 1;
                        }
                    }
                }
                break;
            }
        }
        Ok(acc)
    });
    let mut audit = RetractionAudit {
        pairs: 0,
        max_ratio: 0.0,
        max_f_leg_ratio: 0.0,
        max_h_leg_ratio: 0.0,
        max_h_displacement_ratio: 0.0,
        max_step_excess: f64::NEG_INFINITY,
        legs_disagree: 0,
        hull_failures: 0,
        hull_tol,
    };
    for chunk in per_chunk {
        let c = chunk?;
        audit.pairs += c.pairs;
        audit.max_ratio = audit.max_ratio.max(c.max_ratio);
        audit.max_f_leg_ratio = audit.max_f_leg_ratio.max(c.f_leg);
        audit.max_h_leg_ratio = audit.max_h_leg_ratio.max(c.h_leg);
        audit.max_h_displacement_ratio = audit.max_h_displacement_ratio.max(c.h_disp);
        audit.max_step_excess = audit.max_step_excess.max(c.excess);
        audit.legs_disagree += c.disagree;
        audit.hull_failures += c.hull_failures;
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{IntervalSpace, QuotientSpace};
    use crate::measure::{quotient_comixer, set_comixer, set_mixer};
    use crate::par::Execution;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn keep_top_orders_by_ratio_then_index() {
        let mut top = Vec::new();
        for (i, r) in [0.5, 0.9, 0.9, 0.1, 0.7].into_iter().enumerate() {
            keep_top(&mut top, Scored { ratio: r, index: i, probe: Probe { base: [0; 3], moved: [0; 3] } });
        }
        let order: Vec<usize> = top.iter().map(|s| s.index).collect();
        assert_eq!(order, vec![1, 2, 4, 0, 3]);
        for i in 5..30 {
            keep_top(&mut top, Scored { ratio: 0.8, index: i, probe: Probe { base: [0; 3], moved: [0; 3] } });
        }
        assert_eq!(top.len(), TOP_WITNESSES);
        assert_eq!(top[0].index, 1);
        assert_eq!(top[2].index, 5);
    }

    #[test]
    fn median_ratio_on_the_line() {
        // med(0,0,1) = 0 and med(eps,0,1) = eps
        let op = TernaryOp::new(OpKind::MedianMixer, NormSpec::euclidean());
        let eps = 1e-3;
        let w = Probe { base: [v(&[0.0]), v(&[0.0]), v(&[1.0])], moved: [v(&[eps]), v(&[0.0]), v(&[1.0])] };
        assert_eq!(per_arg_ratio(&op, 1, &w, &NormSpec::euclidean()).unwrap(), 1.0);
    }

    #[test]
    fn per_arg_estimates_stay_below_one() {
        let cfg = SamplerConfig::new(42, 4000, 2);
        for (kind, spec) in [(OpKind::IncenterMixer, NormSpec::euclidean()), (OpKind::NagelComixer, NormSpec::l1())] {
            let op = TernaryOp::new(kind, spec.clone());
            for arg in 1..=3 {
                let r = estimate_per_arg_lipschitz(&op, arg, &cfg, &spec).unwrap();
                assert!(r.pass, "{r:?}");
                assert_eq!(r.samples, 4000);
                let w = r.witness.as_ref().unwrap();
                assert_eq!(per_arg_ratio(&op, arg, w, &spec).unwrap(), r.estimate);
            }
        }
    }

    #[test]
    fn execution_mode_does_not_change_reports() {
        let op = TernaryOp::new(OpKind::NagelComixer, NormSpec::p(1.5).unwrap());
        let spec = op.spec.clone();
        let seq = SamplerConfig::new(9, 5000, 3).with_execution(Execution::Sequential);
        let par = seq.clone().with_execution(Execution::Parallel);
        assert_eq!(
            estimate_per_arg_lipschitz(&op, 2, &seq, &spec).unwrap(),
            estimate_per_arg_lipschitz(&op, 2, &par, &spec).unwrap()
        );
        assert_eq!(
            estimate_retraction_lipschitz(&seq, &spec).unwrap(),
            estimate_retraction_lipschitz(&par, &spec).unwrap()
        );
    }

    #[test]
    fn joint_estimates() {
        let cfg = SamplerConfig::new(3, 3000, 3);
        let median = TernaryOp::new(OpKind::MedianMixer, NormSpec::sup());
        let r = estimate_joint_lipschitz(&median, &cfg, &NormSpec::sup()).unwrap();
        assert!(r.pass && r.claimed_bound == 1.0 && r.tolerance == MEDIAN_JOINT_TOLERANCE);
        assert_eq!(joint_ratio(&median, r.witness.as_ref().unwrap(), &NormSpec::sup()).unwrap(), r.estimate);

        let incenter = TernaryOp::new(OpKind::IncenterMixer, NormSpec::euclidean());
        let r = estimate_joint_lipschitz(&incenter, &cfg, &NormSpec::euclidean()).unwrap();
        assert_eq!(r.claimed_bound, 3.0);
        assert!(r.pass);
    }

    #[test]
    fn retraction_estimate_and_audit() {
        let cfg = SamplerConfig::new(5, 3000, 2);
        let spec = NormSpec::euclidean();
        let r = estimate_retraction_lipschitz(&cfg, &spec).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(retraction_ratio(r.witness.as_ref().unwrap(), &spec).unwrap(), r.estimate);
        let audit = audit_retraction(&cfg, &spec, 1e-8).unwrap();
        assert_eq!(audit.pairs, r.samples);
        assert!(audit.max_ratio <= r.estimate);
        assert!(audit.max_f_leg_ratio <= 3.0 + 1e-9);
        assert!(audit.max_h_leg_ratio <= 6.0 + 1e-9);
        assert!(audit.max_h_displacement_ratio <= 2.0 + 1e-12);
        assert_eq!(audit.legs_disagree, 0);
        assert_eq!(audit.hull_failures, 0);
    }

    #[test]
    fn two_point_sets_give_ratio_one() {
        let spec = NormSpec::euclidean();
        let w = Probe {
            base: [v(&[0.0, 0.0]), v(&[0.0, 0.0]), v(&[1.0, 0.0])],
            moved: [v(&[0.0, 0.5]), v(&[0.0, 0.5]), v(&[1.0, 0.25])],
        };
        assert_eq!(retraction_ratio(&w, &spec).unwrap(), 1.0);
    }

    #[test]
    fn set_operators_are_one_lipschitz() {
        let cfg = SamplerConfig::new(11, 2000, 1);
        for arg in 1..=3 {
            let r = estimate_per_arg(&IntervalSpace::default(), "setmix", set_mixer, arg, &cfg, 1.0, 0.0).unwrap();
            assert!(r.pass && r.estimate <= 1.0, "{r:?}");
            let r = estimate_per_arg(&IntervalSpace::default(), "setcomix", set_comixer, arg, &cfg, 1.0, 0.0).unwrap();
            // the parity set moves exactly as much as the argument
            assert_eq!(r.estimate, 1.0);
            let r = estimate_per_arg(&QuotientSpace::default(), "quotcomix", quotient_comixer, arg, &cfg, 1.0, 0.0)
                .unwrap();
            assert!(r.pass && r.estimate <= 1.0, "{r:?}");
        }
    }

    #[test]
    fn invalid_requests() {
        let op = TernaryOp::new(OpKind::GroupComixer1d, NormSpec::euclidean());
        let cfg = SamplerConfig::new(1, 10, 2);
        assert!(matches!(
            estimate_per_arg_lipschitz(&op, 1, &cfg, &NormSpec::euclidean()),
            Err(Error::NotOneDimensional(_))
        ));
        let op = TernaryOp::new(OpKind::IncenterMixer, NormSpec::euclidean());
        assert!(estimate_per_arg_lipschitz(&op, 4, &cfg, &NormSpec::euclidean()).is_err());
        let mut bad = cfg.clone();
        bad.min_separation = 10.0;
        assert!(matches!(
            estimate_joint_lipschitz(&op, &bad, &NormSpec::euclidean()),
            Err(Error::DegenerateSampler { .. })
        ));
    }
}
