//! Ternary operations on normed spaces: the incenter mixer, the Nagel
//! co-mixer, the coordinate-wise median, and the co-mixer
//! `a + b + c - 2 med(a, b, c)` on additive subgroups of the line.
//!
//! A *mixer* returns the repeated argument whenever two arguments coincide;
//! a *co-mixer* returns the remaining one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Vector};

/// Maximum violation accepted by [`check_absorption`] and [`check_anti_absorption`].
pub const ABSORPTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    #[serde(rename = "incenter")]
    IncenterMixer,
    #[serde(rename = "nagel")]
    NagelComixer,
    #[serde(rename = "median")]
    MedianMixer,
    #[serde(rename = "group1d")]
    GroupComixer1d,
}

impl OpKind {
    pub const ALL: [OpKind; 4] = [
        OpKind::IncenterMixer,
        OpKind::NagelComixer,
        OpKind::MedianMixer,
        OpKind::GroupComixer1d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::IncenterMixer => "incenter",
            OpKind::NagelComixer => "nagel",
            OpKind::MedianMixer => "median",
            OpKind::GroupComixer1d => "group1d",
        }
    }

    pub fn is_mixer(self) -> bool {
        matches!(self, OpKind::IncenterMixer | OpKind::MedianMixer)
    }

    pub fn is_comixer(self) -> bool {
        !self.is_mixer()
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown operation {s:?}")))
    }
}

/// A ternary operation on vectors together with the norm it is built from.
/// The norm is ignored by the median and the one-dimensional group co-mixer.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryOp {
    pub kind: OpKind,
    pub spec: NormSpec,
}

impl TernaryOp {
    pub fn new(kind: OpKind, spec: NormSpec) -> Self {
        Self { kind, spec }
    }

    pub fn apply(&self, a: &Vector, b: &Vector, c: &Vector) -> Result<Vector> {
        match self.kind {
            OpKind::IncenterMixer => incenter_mixer(a, b, c, &self.spec),
            OpKind::NagelComixer => nagel_comixer(a, b, c, &self.spec),
            OpKind::MedianMixer => median_mixer(a, b, c),
            OpKind::GroupComixer1d => {
                check_dims(a, b, c)?;
                if a.dim() != 1 {
                    return Err(Error::NotOneDimensional("group1d"));
                }
                let t = group_comixer_1d(a.coords()[0], b.coords()[0], c.coords()[0]);
                Ok(Vector::from_raw(vec![t]))
            }
        }
    }
}

impl fmt::Display for TernaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            OpKind::IncenterMixer | OpKind::NagelComixer => write!(f, "{}[{}]", self.kind, self.spec),
            _ => write!(f, "{}", self.kind),
        }
    }
}

fn check_dims(a: &Vector, b: &Vector, c: &Vector) -> Result<()> {
    a.check_dim(b)?;
    a.check_dim(c)
}

fn check_norm(spec: &NormSpec, dim: usize) -> Result<()> {
    match spec.weights() {
        Some(w) if w.len() != dim => Err(Error::DimensionMismatch { expected: w.len(), found: dim }),
        _ => Ok(()),
    }
}

/// Sorts the arguments lexicographically so that every permutation of the
/// same triple runs the identical floating-point computation.
fn sorted<'a>(a: &'a Vector, b: &'a Vector, c: &'a Vector) -> [&'a Vector; 3] {
    let mut t = [a, b, c];
    t.sort_by(|x, y| x.lex_cmp(y));
    t
}

/// The weighted average with weights equal to the opposite side lengths,
/// evaluated without the coincidence shortcut.
pub(crate) fn incenter_formula(a: &Vector, b: &Vector, c: &Vector, spec: &NormSpec) -> Vector {
    let diff = |x: &Vector, y: &Vector| -> f64 {
        let d: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(p, q)| p - q).collect();
        spec.norm_of(&d)
    };
    let wa = diff(b, c);
    let wb = diff(a, c);
    let wc = diff(a, b);
    let total = wa + wb + wc;
    if total == 0.0 {
        return a.clone();
    }
    let coords = (0..a.dim())
        .map(|i| (wa * a.coords()[i] + wb * b.coords()[i] + wc * c.coords()[i]) / total)
        .collect();
    Vector::from_raw(coords)
}

/// Incenter mixer
/// `(|b-c| a + |a-c| b + |a-b| c) / (|b-c| + |a-c| + |a-b|)`, extended by
/// `sigma(a, a, a) = a`.
///
/// When two arguments coincide exactly the repeated point is returned
/// directly; this is what the formula evaluates to in exact arithmetic.
pub fn incenter_mixer(a: &Vector, b: &Vector, c: &Vector, spec: &NormSpec) -> Result<Vector> {
    check_dims(a, b, c)?;
    check_norm(spec, a.dim())?;
    if a == b || a == c {
        return Ok(a.clone());
    }
    if b == c {
        return Ok(b.clone());
    }
    let [x, y, z] = sorted(a, b, c);
    Ok(incenter_formula(x, y, z, spec))
}

/// Nagel co-mixer `a + b + c - 2 sigma(a, b, c)`.
pub fn nagel_comixer(a: &Vector, b: &Vector, c: &Vector, spec: &NormSpec) -> Result<Vector> {
    check_dims(a, b, c)?;
    check_norm(spec, a.dim())?;
    if a == b {
        return Ok(c.clone());
    }
    if a == c {
        return Ok(b.clone());
    }
    if b == c {
        return Ok(a.clone());
    }
    let [x, y, z] = sorted(a, b, c);
    let sigma = incenter_formula(x, y, z, spec);
    let coords = (0..a.dim())
        .map(|i| (x.coords()[i] + y.coords()[i] + z.coords()[i]) - 2.0 * sigma.coords()[i])
        .collect();
    Ok(Vector::from_raw(coords))
}

/// Median of three reals.
pub fn median3(a: f64, b: f64, c: f64) -> f64 {
    a.min(b).max(a.max(b).min(c))
}

/// Coordinate-wise median of three vectors.
pub fn median_mixer(a: &Vector, b: &Vector, c: &Vector) -> Result<Vector> {
    check_dims(a, b, c)?;
    let coords = (0..a.dim())
        .map(|i| median3(a.coords()[i], b.coords()[i], c.coords()[i]))
        .collect();
    Ok(Vector::from_raw(coords))
}

/// `a + b + c - 2 med(a, b, c)`: the sum of the two extreme values minus the
/// median. Maps any additive subgroup of the reals into itself.
pub fn group_comixer_1d(a: f64, b: f64, c: f64) -> f64 {
    if a == b {
        return c;
    }
    if a == c {
        return b;
    }
    if b == c {
        return a;
    }
    let lo = a.min(b).min(c);
    let hi = a.max(b).max(c);
    let mid = median3(a, b, c);
    (lo + hi) - mid
}

/// Outcome of an absorption or anti-absorption check over a set of pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionCheck {
    pub pass: bool,
    pub worst_violation: f64,
    /// Index of the sample pair attaining the worst violation.
    pub worst_pair: Option<usize>,
    pub pairs_checked: usize,
}

fn permutation_check(
    op: &TernaryOp,
    samples: &[(Vector, Vector)],
    expected: impl Fn(&Vector, &Vector) -> Vector,
) -> Result<AbsorptionCheck> {
    let mut worst = 0.0;
    let mut worst_pair = None;
    for (i, (a, b)) in samples.iter().enumerate() {
        let target = expected(a, b);
        for out in [op.apply(a, a, b)?, op.apply(a, b, a)?, op.apply(b, a, a)?] {
            let v = op.spec.dist(&out, &target)?;
            if v > worst || worst_pair.is_none() && v == worst {
                worst = v;
                worst_pair = Some(i);
            }
        }
    }
    Ok(AbsorptionCheck {
        pass: worst <= ABSORPTION_TOL,
        worst_violation: worst,
        worst_pair,
        pairs_checked: samples.len(),
    })
}

/// Checks `op(a,a,b) = op(a,b,a) = op(b,a,a) = a` on every sample pair.
pub fn check_absorption(op: &TernaryOp, samples: &[(Vector, Vector)]) -> Result<AbsorptionCheck> {
    permutation_check(op, samples, |a, _| a.clone())
}

/// Checks `op(a,a,b) = op(a,b,a) = op(b,a,a) = b` on every sample pair.
pub fn check_anti_absorption(op: &TernaryOp, samples: &[(Vector, Vector)]) -> Result<AbsorptionCheck> {
    permutation_check(op, samples, |_, b| b.clone())
}

/// The map `x -> op(x, a, b)` exchanging `a` and `b`.
pub fn interchange_map<'a>(
    op: &'a TernaryOp,
    a: &'a Vector,
    b: &'a Vector,
) -> Result<impl Fn(&Vector) -> Result<Vector> + 'a> {
    if !op.kind.is_comixer() {
        return Err(Error::NotComixer(op.kind.name()));
    }
    a.check_dim(b)?;
    Ok(move |x: &Vector| op.apply(x, a, b))
}

/// Which restricted map a derivative check is taken of: `x -> sigma(0, a, x)`
/// or `x -> tau(0, a, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeTarget {
    Incenter,
    Nagel,
}

/// Norm of the central difference quotient `(phi(x+hu) - phi(x-hu)) / 2h`
/// where `phi(x)` is `sigma(0, a, x)` or `tau(0, a, x)`.
///
/// Requires `|a| = 1` and `|u| = 1` (to 1e-9) and that neither `x - hu` nor
/// `x + hu` comes within `h` of the singular points `0` and `a`.
pub fn derivative_bound_check(
    target: DerivativeTarget,
    a: &Vector,
    x: &Vector,
    u: &Vector,
    spec: &NormSpec,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::OutOfRange { name: "h", value: h });
    }
    a.check_dim(x)?;
    a.check_dim(u)?;
    for (name, v) in [("a", a), ("u", u)] {
        let n = spec.norm(v)?;
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!("|{name}| = {n}, expected 1")));
        }
    }
    let zero = Vector::zeros(a.dim());
    for singular in [&zero, a] {
        if spec.dist(x, singular)? <= 2.0 * h {
            return Err(Error::NearSingularPoint(x.to_string()));
        }
    }
    let phi = |p: &Vector| match target {
        DerivativeTarget::Incenter => incenter_mixer(&zero, a, p, spec),
        DerivativeTarget::Nagel => nagel_comixer(&zero, a, p, spec),
    };
    let step = u.scale(h);
    let forward = phi(&x.add(&step)?)?;
    let backward = phi(&x.sub(&step)?)?;
    Ok(spec.norm(&forward.sub(&backward)?)? / (2.0 * h))
}
