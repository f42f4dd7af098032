//! Finite subset spaces `X(n)` under the Hausdorff metric and the retraction
//! `X(3) -> X(2)` given by `{a, b, c} -> {sigma(a,b,c), tau(a,b,c)}` with the
//! incenter mixer and Nagel co-mixer.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Vector};
use crate::ternary::{incenter_mixer, nagel_comixer};

/// A nonempty set of at most `capacity` distinct points of one dimension.
/// Points are kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteSubset {
    points: Vec<Vector>,
    capacity: usize,
}

impl FiniteSubset {
    /// Builds the set of distinct points among `points`.
    pub fn new(points: Vec<Vector>, capacity: usize) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySubset)?;
        for p in &points {
            first.check_dim(p)?;
        }
        let mut points = points;
        points.sort_by(|x, y| x.lex_cmp(y));
        points.dedup();
        if points.len() > capacity {
            return Err(Error::TooManyPoints { len: points.len(), capacity });
        }
        Ok(Self { points, capacity })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn contains(&self, p: &Vector) -> bool {
        self.points.iter().any(|q| q == p)
    }

    /// The set as an ordered triple, repeating the first point when there are
    /// fewer than three.
    pub fn listing(&self) -> Result<[Vector; 3]> {
        let p = &self.points;
        match p.len() {
            1 => Ok([p[0].clone(), p[0].clone(), p[0].clone()]),
            2 => Ok([p[0].clone(), p[0].clone(), p[1].clone()]),
            3 => Ok([p[0].clone(), p[1].clone(), p[2].clone()]),
            len => Err(Error::TooManyPoints { len, capacity: 3 }),
        }
    }
}

impl fmt::Display for FiniteSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Parses `"x1,...,xd | y1,...,yd | ..."`; the capacity is the number of
/// points listed.
impl FromStr for FiniteSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let points = s.split('|').map(str::parse).collect::<Result<Vec<Vector>>>()?;
        let n = points.len();
        FiniteSubset::new(points, n)
    }
}

/// Directed Hausdorff distance `max_{a in A} min_{b in B} d(a, b)`.
pub fn directed_hausdorff(a: &FiniteSubset, b: &FiniteSubset, spec: &NormSpec) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in a.points() {
        let mut nearest = f64::INFINITY;
        for q in b.points() {
            nearest = nearest.min(spec.dist(p, q)?);
        }
        worst = worst.max(nearest);
    }
    Ok(worst)
}

pub fn hausdorff_dist(a: &FiniteSubset, b: &FiniteSubset, spec: &NormSpec) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(directed_hausdorff(a, b, spec)?.max(directed_hausdorff(b, a, spec)?))
}

/// A map defined on the points of a finite subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMap {
    pairs: Vec<(Vector, Vector)>,
}

impl PointMap {
    pub fn new(pairs: Vec<(Vector, Vector)>) -> Self {
        Self { pairs }
    }

    pub fn identity(domain: &FiniteSubset) -> Self {
        Self::new(domain.points().iter().map(|p| (p.clone(), p.clone())).collect())
    }

    pub fn pairs(&self) -> &[(Vector, Vector)] {
        &self.pairs
    }

    pub fn apply(&self, x: &Vector) -> Result<&Vector> {
        self.pairs
            .iter()
            .find(|(p, _)| p == x)
            .map(|(_, y)| y)
            .ok_or_else(|| Error::NotInDomain(x.to_string()))
    }

    /// Distinct image points in lexicographic order.
    pub fn image(&self) -> Vec<Vector> {
        let mut img: Vec<Vector> = self.pairs.iter().map(|(_, y)| y.clone()).collect();
        img.sort_by(|x, y| x.lex_cmp(y));
        img.dedup();
        img
    }
}

/// `max_x d(f(x), x)`.
pub fn displacement(f: &PointMap, spec: &NormSpec) -> Result<f64> {
    f.pairs
        .iter()
        .try_fold(0.0f64, |acc, (x, y)| Ok(acc.max(spec.dist(x, y)?)))
}

/// Sends each point of `a` to a nearest point of `b`, preferring the
/// lexicographically smallest among equally near points.
pub fn nearest_map(a: &FiniteSubset, b: &FiniteSubset, spec: &NormSpec) -> Result<PointMap> {
    let mut pairs = Vec::with_capacity(a.len());
    for p in a.points() {
        let mut best: Option<(f64, &Vector)> = None;
        for q in b.points() {
            let d = spec.dist(p, q)?;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, q));
            }
        }
        let (_, q) = best.ok_or(Error::EmptySubset)?;
        pairs.push((p.clone(), q.clone()));
    }
    Ok(PointMap::new(pairs))
}

/// Given `f: A -> B` and `g: B -> A`, the map `h: B -> B` fixing `f(A)` and
/// sending every other `b` to `f(g(b))`. Its image is exactly `f(A)`.
pub fn h_map(f: &PointMap, g: &PointMap) -> Result<PointMap> {
    let image = f.image();
    let mut pairs = Vec::with_capacity(g.pairs.len());
    for (b, gb) in &g.pairs {
        let hb = if image.contains(b) { b.clone() } else { f.apply(gb)?.clone() };
        pairs.push((b.clone(), hb));
    }
    Ok(PointMap::new(pairs))
}

/// `{sigma(a,b,c), tau(a,b,c)}` with exact duplicates collapsed.
pub fn retract_listing(a: &Vector, b: &Vector, c: &Vector, spec: &NormSpec) -> Result<FiniteSubset> {
    let sigma = incenter_mixer(a, b, c, spec)?;
    let tau = nagel_comixer(a, b, c, spec)?;
    FiniteSubset::new(vec![sigma, tau], 2)
}

/// Retraction of `X(3)` onto `X(2)`; the identity on sets of at most two points.
pub fn retraction_3_to_2(e: &FiniteSubset, spec: &NormSpec) -> Result<FiniteSubset> {
    let [a, b, c] = e.listing()?;
    retract_listing(&a, &b, &c, spec)
}

/// Intermediate quantities of the three-plus-six step comparison between
/// `rho(A)` and `rho(B)`, replayed one argument at a time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofChain {
    /// `d_H(A, B)`.
    pub delta: f64,
    pub disp_f: f64,
    pub disp_h: f64,
    /// `d_H(rho(A), rho(f(A)))`, at most `3 delta`.
    pub f_leg: f64,
    /// `d_H(rho(B), rho(h(B)))`, at most `6 delta`.
    pub h_leg: f64,
    /// `d_H(rho(A), rho(B))`.
    pub total: f64,
    /// Largest amount by which a single-argument step moved sigma or tau
    /// further than the argument itself moved.
    pub worst_step_excess: f64,
    /// Whether `rho(f(A))` and `rho(h(B))` coincide, as the argument requires.
    pub legs_meet: bool,
}

/// Moves the listing `from` to `to` one argument at a time and returns the
/// worst per-step excess of the movement of sigma or tau over the movement
/// of the argument.
fn replay_steps(from: &[Vector; 3], to: &[Vector; 3], spec: &NormSpec) -> Result<f64> {
    let mut current = from.clone();
    let mut excess = f64::NEG_INFINITY;
    for i in 0..3 {
        let mut next = current.clone();
        next[i] = to[i].clone();
        let step = spec.dist(&current[i], &next[i])?;
        let ds = spec.dist(
            &incenter_mixer(&current[0], &current[1], &current[2], spec)?,
            &incenter_mixer(&next[0], &next[1], &next[2], spec)?,
        )?;
        let dt = spec.dist(
            &nagel_comixer(&current[0], &current[1], &current[2], spec)?,
            &nagel_comixer(&next[0], &next[1], &next[2], spec)?,
        )?;
        excess = excess.max(ds - step).max(dt - step);
        current = next;
    }
    Ok(excess)
}

pub fn proof_chain(a: &FiniteSubset, b: &FiniteSubset, spec: &NormSpec) -> Result<ProofChain> {
    let delta = hausdorff_dist(a, b, spec)?;
    let f = nearest_map(a, b, spec)?;
    let g = nearest_map(b, a, spec)?;
    let h = h_map(&f, &g)?;

    let la = a.listing()?;
    let lb = b.listing()?;
    let fa = [f.apply(&la[0])?.clone(), f.apply(&la[1])?.clone(), f.apply(&la[2])?.clone()];
    let hb = [h.apply(&lb[0])?.clone(), h.apply(&lb[1])?.clone(), h.apply(&lb[2])?.clone()];

    let rho_a = retract_listing(&la[0], &la[1], &la[2], spec)?;
    let rho_b = retract_listing(&lb[0], &lb[1], &lb[2], spec)?;
    let rho_fa = retract_listing(&fa[0], &fa[1], &fa[2], spec)?;
    let rho_hb = retract_listing(&hb[0], &hb[1], &hb[2], spec)?;

    let excess_f = replay_steps(&la, &fa, spec)?;
    let excess_h = replay_steps(&lb, &hb, spec)?;

    Ok(ProofChain {
        delta,
        disp_f: displacement(&f, spec)?,
        disp_h: displacement(&h, spec)?,
        f_leg: hausdorff_dist(&rho_a, &rho_fa, spec)?,
        h_leg: hausdorff_dist(&rho_b, &rho_hb, spec)?,
        total: hausdorff_dist(&rho_a, &rho_b, spec)?,
        worst_step_excess: excess_f.max(excess_h),
        legs_meet: rho_fa == rho_hb,
    })
}
