//! Certification sweeps: every Lipschitz estimate and identity check over a
//! grid of dimensions and norms, collected into one report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_triple_hull, NormSpec, Vector};
use crate::lab::{
    audit_retraction, chunk_rng, estimate_joint_lipschitz, estimate_per_arg, estimate_per_arg_lipschitz,
    estimate_retraction_lipschitz, gap_probe, IntervalSpace, LipschitzReport, QuotientSpace, SampleSpace,
    SamplerConfig, PER_ARG_BOUND,
};
use crate::measure::{
    geodesic_point, intertwine_check, quotient_class, quotient_comixer, quotient_dist, rho, set_comixer, set_mixer,
    IntervalSet,
};
use crate::ternary::{check_absorption, check_anti_absorption, OpKind, TernaryOp, ABSORPTION_TOL};

/// Hull slack used by the certification checks.
pub const HULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOp {
    Incenter,
    Nagel,
    Median,
    Group1d,
    Retraction,
    Setmix,
    Setcomix,
    Quotcomix,
}

impl SweepOp {
    pub const ALL: [SweepOp; 8] = [
        SweepOp::Incenter,
        SweepOp::Nagel,
        SweepOp::Median,
        SweepOp::Group1d,
        SweepOp::Retraction,
        SweepOp::Setmix,
        SweepOp::Setcomix,
        SweepOp::Quotcomix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepOp::Incenter => "incenter",
            SweepOp::Nagel => "nagel",
            SweepOp::Median => "median",
            SweepOp::Group1d => "group1d",
            SweepOp::Retraction => "retraction",
            SweepOp::Setmix => "setmix",
            SweepOp::Setcomix => "setcomix",
            SweepOp::Quotcomix => "quotcomix",
        }
    }

    fn vector_kind(self) -> Option<OpKind> {
        match self {
            SweepOp::Incenter => Some(OpKind::IncenterMixer),
            SweepOp::Nagel => Some(OpKind::NagelComixer),
            SweepOp::Median => Some(OpKind::MedianMixer),
            _ => None,
        }
    }
}

impl fmt::Display for SweepOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepOp::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown operation {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

fn default_dims() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_norms() -> Vec<NormSpec> {
    vec![NormSpec::l1(), NormSpec::euclidean(), NormSpec::sup()]
}

fn default_ops() -> Vec<SweepOp> {
    SweepOp::ALL.to_vec()
}

fn default_samples() -> usize {
    10_000
}

fn default_seed() -> u64 {
    42
}

/// Sweep grid and output settings. Mirrors the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormSpec>,
    #[serde(default = "default_ops")]
    pub ops: Vec<SweepOp>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: ReportFormat,
    /// Replaces the claimed bound of the named operation's per-argument (or
    /// retraction) estimates.
    #[serde(default)]
    pub bound_overrides: BTreeMap<String, f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dims: default_dims(),
            norms: default_norms(),
            ops: default_ops(),
            samples: default_samples(),
            seed: default_seed(),
            output_path: None,
            format: ReportFormat::Json,
            bound_overrides: BTreeMap::new(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.norms.is_empty() || self.ops.is_empty() {
            return Err(Error::Config("dims, norms and ops must be nonempty".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.dims.contains(&0) {
            return Err(Error::Config("dimensions must be positive".into()));
        }
        for n in &self.norms {
            if let Some(w) = n.weights() {
                if let Some(d) = self.dims.iter().find(|&&d| d != w.len()) {
                    return Err(Error::Config(format!("norm {n} has {} weights but dimension {d} is swept", w.len())));
                }
            }
        }
        for key in self.bound_overrides.keys() {
            key.parse::<SweepOp>()?;
        }
        Ok(())
    }
}

/// An identity or inequality verified on samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub op: String,
    pub norm: Option<String>,
    pub dim: Option<usize>,
    pub cases: usize,
    /// Largest observed violation (or the statistic named by `name`).
    pub worst: f64,
    /// Maximum accepted value of `worst`.
    pub threshold: f64,
    pub pass: bool,
}

impl CheckEntry {
    fn new(name: &str, op: &str, norm: Option<&NormSpec>, dim: Option<usize>, cases: usize, worst: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            op: op.into(),
            norm: norm.map(ToString::to_string),
            dim,
            cases,
            worst,
            threshold,
            pass: worst <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub seed: u64,
    pub samples: usize,
    pub lipschitz: Vec<LipschitzReport<String>>,
    pub checks: Vec<CheckEntry>,
    pub all_pass: bool,
}

impl CertifyReport {
    pub fn failures(&self) -> usize {
        self.lipschitz.iter().filter(|r| !r.pass).count() + self.checks.iter().filter(|c| !c.pass).count()
    }
}

// Identity checks draw from streams far away from the estimator chunks.
const CHECK_STREAM: usize = 1 << 40;

fn vector_pairs(seed: u64, stream: usize, n: usize, dim: usize) -> Vec<(Vector, Vector)> {
    let mut rng = chunk_rng(seed, CHECK_STREAM + stream);
    let mut draw = || Vector::new((0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()).expect("finite");
    (0..n).map(|_| (draw(), draw())).collect()
}

fn set_triples(seed: u64, stream: usize, n: usize) -> Vec<[IntervalSet; 3]> {
    let space = IntervalSpace::default();
    let mut rng = chunk_rng(seed, CHECK_STREAM + stream);
    (0..n).map(|_| [space.sample(&mut rng), space.sample(&mut rng), space.sample(&mut rng)]).collect()
}

fn overridden<P>(cfg: &SweepConfig, key: &str, report: LipschitzReport<P>) -> LipschitzReport<P> {
    match cfg.bound_overrides.get(key) {
        Some(&b) => report.with_claimed_bound(b),
        None => report,
    }
}

fn vector_cell(cfg: &SweepConfig, op: SweepOp, kind: OpKind, dim: usize, spec: &NormSpec, out: &mut CertifyReport) -> Result<()> {
    let sampler = SamplerConfig::new(cfg.seed, cfg.samples, dim);
    let top = TernaryOp::new(kind, spec.clone());
    for arg in 1..=3 {
        let r = estimate_per_arg_lipschitz(&top, arg, &sampler, spec)?;
        out.lipschitz.push(overridden(cfg, op.name(), r).map_witness(ToString::to_string));
    }
    if kind == OpKind::MedianMixer && spec.is_sup() {
        let r = estimate_joint_lipschitz(&top, &sampler, spec)?;
        out.lipschitz.push(r.map_witness(ToString::to_string));
    }
    let pairs = vector_pairs(cfg.seed, dim, cfg.samples, dim);
    let check = if kind.is_mixer() { check_absorption(&top, &pairs)? } else { check_anti_absorption(&top, &pairs)? };
    let name = if kind.is_mixer() { "absorption" } else { "anti_absorption" };
    out.checks.push(CheckEntry::new(name, op.name(), Some(spec), Some(dim), pairs.len(), check.worst_violation, ABSORPTION_TOL));

    if kind != OpKind::MedianMixer {
        let mut rng = chunk_rng(cfg.seed, CHECK_STREAM + 100 + dim);
        let mut outside = 0;
        for _ in 0..cfg.samples {
            let t: Vec<Vector> = (0..3)
                .map(|_| Vector::new((0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()).expect("finite"))
                .collect();
            let q = top.apply(&t[0], &t[1], &t[2])?;
            if !in_triple_hull(&q, &t[0], &t[1], &t[2], HULL_TOL)? {
                outside += 1;
            }
        }
        out.checks.push(CheckEntry::new("hull_failures", op.name(), Some(spec), Some(dim), cfg.samples, outside as f64, 0.0));
    }
    Ok(())
}

fn retraction_cell(cfg: &SweepConfig, dim: usize, spec: &NormSpec, out: &mut CertifyReport) -> Result<()> {
    let sampler = SamplerConfig::new(cfg.seed, cfg.samples, dim);
    let r = estimate_retraction_lipschitz(&sampler, spec)?;
    out.lipschitz.push(overridden(cfg, "retraction", r).map_witness(ToString::to_string));
    let audit = audit_retraction(&sampler, spec, HULL_TOL)?;
    let n = audit.pairs;
    let op = "retraction";
    out.checks.push(CheckEntry::new("f_leg_over_delta", op, Some(spec), Some(dim), n, audit.max_f_leg_ratio, 3.0 + 1e-9));
    out.checks.push(CheckEntry::new("h_leg_over_delta", op, Some(spec), Some(dim), n, audit.max_h_leg_ratio, 6.0 + 1e-9));
    out.checks.push(CheckEntry::new("single_step_excess", op, Some(spec), Some(dim), n, audit.max_step_excess, 1e-9));
    out.checks.push(CheckEntry::new("legs_disagree", op, Some(spec), Some(dim), n, audit.legs_disagree as f64, 0.0));
    out.checks.push(CheckEntry::new("hull_failures", op, Some(spec), Some(dim), n, audit.hull_failures as f64, 0.0));
    Ok(())
}

fn group_cell(cfg: &SweepConfig, out: &mut CertifyReport) -> Result<()> {
    let spec = NormSpec::euclidean();
    let sampler = SamplerConfig::new(cfg.seed, cfg.samples, 1);
    let top = TernaryOp::new(OpKind::GroupComixer1d, spec.clone());
    for arg in 1..=3 {
        let r = estimate_per_arg_lipschitz(&top, arg, &sampler, &spec)?;
        out.lipschitz.push(overridden(cfg, "group1d", r).map_witness(ToString::to_string));
    }
    let pairs = vector_pairs(cfg.seed, 0, cfg.samples, 1);
    let check = check_anti_absorption(&top, &pairs)?;
    out.checks.push(CheckEntry::new("anti_absorption", "group1d", None, Some(1), pairs.len(), check.worst_violation, 0.0));

    let probe = gap_probe(100.0, 0.5)?;
    let below = probe.rows.iter().filter(|r| r.image > -1.0).count();
    let short = probe.rows.iter().filter(|r| r.displacement < r.x + 1.0).count();
    out.checks.push(CheckEntry::new("gap_image_above_minus_one", "group1d", None, Some(1), probe.rows.len(), below as f64, 0.0));
    out.checks.push(CheckEntry::new("gap_displacement_below_x_plus_1", "group1d", None, Some(1), probe.rows.len(), short as f64, 0.0));
    Ok(())
}

fn set_cell(cfg: &SweepConfig, op: SweepOp, out: &mut CertifyReport) -> Result<()> {
    let sampler = SamplerConfig::new(cfg.seed, cfg.samples, 1);
    let triples = set_triples(cfg.seed, 1000 + op as usize, cfg.samples);
    match op {
        SweepOp::Setmix | SweepOp::Setcomix => {
            let f = if op == SweepOp::Setmix { set_mixer } else { set_comixer };
            for arg in 1..=3 {
                let r = estimate_per_arg(&IntervalSpace::default(), op.name(), f, arg, &sampler, PER_ARG_BOUND, 0.0)?;
                out.lipschitz.push(overridden(cfg, op.name(), r).map_witness(ToString::to_string));
            }
            let mut worst: f64 = 0.0;
            for [a, b, _] in &triples {
                let target = if op == SweepOp::Setmix { a } else { b };
                for v in [f(a, a, b), f(a, b, a), f(b, a, a)] {
                    worst = worst.max(rho(&v, target));
                }
            }
            let name = if op == SweepOp::Setmix { "absorption" } else { "anti_absorption" };
            out.checks.push(CheckEntry::new(name, op.name(), None, None, triples.len(), worst, 0.0));
            if op == SweepOp::Setcomix {
                let mut rng = chunk_rng(cfg.seed, CHECK_STREAM + 2000);
                let mut gap: f64 = 0.0;
                let mut geo: f64 = 0.0;
                for _ in 0..cfg.samples {
                    let (a, b, c): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
                    let (lhs, rhs) = intertwine_check(a, b, c)?;
                    gap = gap.max((lhs - rhs).abs());
                    geo = geo.max((rho(&geodesic_point(a)?, &geodesic_point(b)?) - (a - b).abs()).abs());
                }
                out.checks.push(CheckEntry::new("intertwining_gap", op.name(), None, None, cfg.samples, gap, 1e-12));
                out.checks.push(CheckEntry::new("geodesic_defect", op.name(), None, None, cfg.samples, geo, 1e-15));
            }
        }
        SweepOp::Quotcomix => {
            for arg in 1..=3 {
                let r = estimate_per_arg(&QuotientSpace::default(), op.name(), quotient_comixer, arg, &sampler, PER_ARG_BOUND, 0.0)?;
                out.lipschitz.push(overridden(cfg, op.name(), r).map_witness(ToString::to_string));
            }
            let mut mismatches = 0usize;
            let mut worst: f64 = 0.0;
            for [a, b, c] in &triples {
                let reference = quotient_class(&set_comixer(a, b, c));
                let flips = [a.complement(), b.complement(), c.complement()];
                for mask in 0..8u8 {
                    let pick = |i: usize, s: &IntervalSet| if mask & (1 << i) != 0 { flips[i].clone() } else { s.clone() };
                    let out_class = quotient_class(&set_comixer(&pick(0, a), &pick(1, b), &pick(2, c)));
                    mismatches += usize::from(out_class != reference);
                }
                let (qa, qb) = (quotient_class(a), quotient_class(b));
                for v in [quotient_comixer(&qa, &qa, &qb), quotient_comixer(&qa, &qb, &qa), quotient_comixer(&qb, &qa, &qa)] {
                    worst = worst.max(quotient_dist(&v, &qb));
                }
            }
            out.checks.push(CheckEntry::new("well_defined_mismatches", op.name(), None, None, 8 * triples.len(), mismatches as f64, 0.0));
            out.checks.push(CheckEntry::new("anti_absorption", op.name(), None, None, triples.len(), worst, 0.0));
            let loop_gap = quotient_dist(&quotient_class(&geodesic_point(0.0)?), &quotient_class(&geodesic_point(1.0)?));
            out.checks.push(CheckEntry::new("geodesic_loop_gap", op.name(), None, None, 1, loop_gap, 0.0));
        }
        _ => unreachable!("not a measure-algebra operation"),
    }
    Ok(())
}

/// Runs every estimate and check selected by `cfg`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<CertifyReport> {
    cfg.validate()?;
    let mut out = CertifyReport { seed: cfg.seed, samples: cfg.samples, lipschitz: Vec::new(), checks: Vec::new(), all_pass: false };
    for &op in &cfg.ops {
        match op {
            SweepOp::Incenter | SweepOp::Nagel | SweepOp::Median => {
                let kind = op.vector_kind().expect("vector operation");
                for &dim in &cfg.dims {
                    for spec in &cfg.norms {
                        vector_cell(cfg, op, kind, dim, spec, &mut out)?;
                    }
                }
            }
            SweepOp::Retraction => {
                for &dim in &cfg.dims {
                    for spec in &cfg.norms {
                        retraction_cell(cfg, dim, spec, &mut out)?;
                    }
                }
            }
            SweepOp::Group1d => group_cell(cfg, &mut out)?,
            SweepOp::Setmix | SweepOp::Setcomix | SweepOp::Quotcomix => set_cell(cfg, op, &mut out)?,
        }
    }
    out.all_pass = out.failures() == 0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_validation() {
        let cfg: SweepConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, SweepConfig::default());
        assert_eq!(cfg.norms.iter().map(ToString::to_string).collect::<Vec<_>>(), ["p1", "p2", "pinf"]);
        let cfg: SweepConfig = serde_json::from_str(r#"{"ops": [], "samples": 5}"#).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg: SweepConfig = serde_json::from_str(r#"{"bound_overrides": {"bogus": 1.0}}"#).unwrap();
        assert!(cfg.validate().is_err());
        let cfg: SweepConfig = serde_json::from_str(r#"{"dims": [2, 3], "norms": ["p2;weights=1,2"]}"#).unwrap();
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<SweepConfig>(r#"{"norms": ["p0.5"]}"#).is_err());
        assert!(serde_json::from_str::<SweepConfig>(r#"{"unknown": 1}"#).is_err());
    }

    #[test]
    fn small_sweep_passes() {
        let cfg = SweepConfig { dims: vec![2], samples: 500, ..SweepConfig::default() };
        let report = run_sweep(&cfg).unwrap();
        assert!(report.all_pass, "{:#?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert!(report.lipschitz.iter().any(|r| r.mode == "joint"));
    }

    #[test]
    fn wrong_bound_is_flagged_with_witness() {
        let cfg = SweepConfig {
            dims: vec![2],
            norms: vec![NormSpec::euclidean()],
            ops: vec![SweepOp::Nagel],
            samples: 500,
            bound_overrides: [("nagel".to_string(), 0.5)].into_iter().collect(),
            ..SweepConfig::default()
        };
        let report = run_sweep(&cfg).unwrap();
        assert!(!report.all_pass);
        let failing: Vec<_> = report.lipschitz.iter().filter(|r| !r.pass).collect();
        assert_eq!(failing.len(), 3);
        assert!(failing.iter().all(|r| r.witness.is_some() && r.claimed_bound == 0.5));
    }
}
