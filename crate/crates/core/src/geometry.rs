//! Finite-dimensional vectors, weighted p-norms and convex hull tests.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default slack for [`in_triple_hull`].
pub const DEFAULT_HULL_TOL: f64 = 1e-9;

/// A point of a finite-dimensional real vector space with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self(vec![0.0; dim])
    }

    /// Builds a vector from coordinates that are already known to be finite.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |x, y| x + y))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |x, y| x - y))
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(dot(&self.0, &other.0))
    }

    /// Lexicographic order on coordinates, used wherever a deterministic
    /// ordering of points is required.
    pub fn lex_cmp(&self, other: &Vector) -> Ordering {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.dim().cmp(&other.dim()))
    }

    pub(crate) fn zip_with(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(&x, &y)| f(x, y)).collect())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses `"x1,x2,...,xd"`.
impl FromStr for Vector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("invalid coordinate {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Vector::new(coords)
    }
}

/// Exponent of a p-norm; the sup norm is its own case rather than a large `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

/// A (possibly weighted) p-norm on `R^d`.
///
/// For finite `p` the norm is `(sum w_i |v_i|^p)^(1/p)`, for `p = inf` it is
/// `max w_i |v_i|`. Without weights every `w_i` is 1 and the norm is defined
/// in every dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NormSpec {
    exponent: Exponent,
    weights: Option<Vec<f64>>,
}

impl NormSpec {
    pub fn new(exponent: Exponent, weights: Option<Vec<f64>>) -> Result<Self> {
        if let Exponent::Finite(p) = exponent {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::InvalidNorm(format!("exponent must lie in [1, inf], got {p}")));
            }
        }
        if let Some(w) = &weights {
            if w.is_empty() {
                return Err(Error::InvalidNorm("empty weight list".into()));
            }
            if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::InvalidNorm(format!("weights must be positive, got {bad}")));
            }
        }
        Ok(Self { exponent, weights })
    }

    pub fn p(p: f64) -> Result<Self> {
        Self::new(Exponent::Finite(p), None)
    }

    pub fn l1() -> Self {
        Self { exponent: Exponent::Finite(1.0), weights: None }
    }

    pub fn euclidean() -> Self {
        Self { exponent: Exponent::Finite(2.0), weights: None }
    }

    pub fn sup() -> Self {
        Self { exponent: Exponent::Infinity, weights: None }
    }

    pub fn with_weights(self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.exponent, Some(weights))
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn is_sup(&self) -> bool {
        self.exponent == Exponent::Infinity
    }

    /// Norm of `v`. Fails if the weight vector has a different length.
    pub fn norm(&self, v: &Vector) -> Result<f64> {
        if let Some(w) = &self.weights {
            if w.len() != v.dim() {
                return Err(Error::DimensionMismatch { expected: w.len(), found: v.dim() });
            }
        }
        Ok(self.norm_of(v.coords()))
    }

    /// Distance `||a - b||`.
    pub fn dist(&self, a: &Vector, b: &Vector) -> Result<f64> {
        a.check_dim(b)?;
        if let Some(w) = &self.weights {
            if w.len() != a.dim() {
                return Err(Error::DimensionMismatch { expected: w.len(), found: a.dim() });
            }
        }
        let diff: Vec<f64> = a.coords().iter().zip(b.coords()).map(|(x, y)| x - y).collect();
        Ok(self.norm_of(&diff))
    }

    /// Norm of a raw coordinate slice. The caller guarantees the weight length.
    pub(crate) fn norm_of(&self, v: &[f64]) -> f64 {
        let weight = |i: usize| self.weights.as_ref().map_or(1.0, |w| w[i]);
        match self.exponent {
            Exponent::Infinity => v
                .iter()
                .enumerate()
                .map(|(i, x)| weight(i) * x.abs())
                .fold(0.0, f64::max),
            Exponent::Finite(1.0) => {
                v.iter().enumerate().map(|(i, x)| weight(i) * x.abs()).sum()
            }
            Exponent::Finite(p) => {
                // (sum w|v|^p)^(1/p) = ||u||_p with u_i = w_i^(1/p) |v_i|;
                // scaling by max u_i keeps the powers in range.
                let scaled: Vec<f64> = match &self.weights {
                    None => v.iter().map(|x| x.abs()).collect(),
                    Some(w) => v.iter().zip(w).map(|(x, wi)| wi.powf(1.0 / p) * x.abs()).collect(),
                };
                let m = scaled.iter().copied().fold(0.0, f64::max);
                if m == 0.0 {
                    return 0.0;
                }
                if p == 2.0 {
                    let s: f64 = scaled.iter().map(|u| (u / m) * (u / m)).sum();
                    m * s.sqrt()
                } else {
                    let s: f64 = scaled.iter().map(|u| (u / m).powf(p)).sum();
                    m * s.powf(1.0 / p)
                }
            }
        }
    }
}

impl Default for NormSpec {
    fn default() -> Self {
        Self::euclidean()
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            Exponent::Infinity => f.write_str("pinf")?,
            Exponent::Finite(p) => write!(f, "p{p}")?,
        }
        if let Some(w) = &self.weights {
            f.write_str(";weights=")?;
            for (i, x) in w.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

/// Parses `"p1"`, `"p2"`, `"p1.5"`, `"pinf"`, optionally followed by
/// `";weights=w1,w2,..."`. A bare exponent (`"2"`, `"inf"`) is also accepted.
impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, weights) = match s.split_once(';') {
            Some((head, tail)) => {
                let list = tail
                    .trim()
                    .strip_prefix("weights=")
                    .ok_or_else(|| Error::Parse(format!("expected weights=... in {s:?}")))?;
                let w = list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("invalid weight {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (head.trim(), Some(w))
            }
            None => (s.trim(), None),
        };
        let body = head.strip_prefix('p').unwrap_or(head);
        let exponent = match body {
            "inf" | "infinity" => Exponent::Infinity,
            other => Exponent::Finite(
                other
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("invalid norm {s:?}")))?,
            ),
        };
        NormSpec::new(exponent, weights)
    }
}

impl TryFrom<String> for NormSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormSpec> for String {
    fn from(n: NormSpec) -> Self {
        n.to_string()
    }
}

pub fn norm(v: &Vector, spec: &NormSpec) -> Result<f64> {
    spec.norm(v)
}

pub fn dist(a: &Vector, b: &Vector, spec: &NormSpec) -> Result<f64> {
    spec.dist(a, b)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn euclid_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Closest point of the triangle `conv{a, b, c}` to a query point, in the
/// Euclidean metric, with its barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HullProjection {
    pub weights: [f64; 3],
    pub distance: f64,
}

/// Projects `q` onto the convex hull of `{a, b, c}`.
///
/// Candidates are the interior solution (when the triangle is non-degenerate
/// and the solution is feasible) and the nearest
/// point on each of the three edges; the closest candidate wins. Edges with
/// zero length are handled, so collinear and coincident vertices work.
pub fn project_to_triple_hull(q: &Vector, a: &Vector, b: &Vector, c: &Vector) -> Result<HullProjection> {
    q.check_dim(a)?;
    q.check_dim(b)?;
    q.check_dim(c)?;
    let (q, a, b, c) = (q.coords(), a.coords(), b.coords(), c.coords());

    let mut best = HullProjection { weights: [1.0, 0.0, 0.0], distance: f64::INFINITY };
    let mut consider = |weights: [f64; 3]| {
        let point: Vec<f64> = (0..q.len())
            .map(|i| weights[0] * a[i] + weights[1] * b[i] + weights[2] * c[i])
            .collect();
        let d = euclid_dist(&point, q);
        if d < best.distance {
            best = HullProjection { weights, distance: d };
        }
    };

    let segment = |p0: &[f64], p1: &[f64]| -> f64 {
        let d: Vec<f64> = p1.iter().zip(p0).map(|(x, y)| x - y).collect();
        let dd = dot(&d, &d);
        if dd == 0.0 {
            return 0.0;
        }
        let r: Vec<f64> = q.iter().zip(p0).map(|(x, y)| x - y).collect();
        (dot(&r, &d) / dd).clamp(0.0, 1.0)
    };
    let t = segment(a, b);
    consider([1.0 - t, t, 0.0]);
    let t = segment(a, c);
    consider([1.0 - t, 0.0, t]);
    let t = segment(b, c);
    consider([0.0, 1.0 - t, t]);

    // Interior candidate in an orthonormal frame built on the longest edge,
    // which stays accurate for thin triangles. Slightly infeasible weights
    // are clamped onto the simplex; the result is still a hull point.
    let verts = [a, b, c];
    let len2 = |i: usize, j: usize| -> f64 { verts[i].iter().zip(verts[j]).map(|(x, y)| (x - y) * (x - y)).sum() };
    let (i, j, k) = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
        .into_iter()
        .max_by(|x, y| len2(x.0, x.1).total_cmp(&len2(y.0, y.1)))
        .expect("three edges");
    let base = verts[i];
    let sub = |p: &[f64]| -> Vec<f64> { p.iter().zip(base).map(|(x, y)| x - y).collect() };
    let (e1, e2, r) = (sub(verts[j]), sub(verts[k]), sub(q));
    let l1 = dot(&e1, &e1).sqrt();
    if l1 > 0.0 {
        let u1: Vec<f64> = e1.iter().map(|x| x / l1).collect();
        let along = dot(&e2, &u1);
        let mut perp: Vec<f64> = e2.iter().zip(&u1).map(|(x, u)| x - along * u).collect();
        let k2 = dot(&perp, &u1);
        perp.iter_mut().zip(&u1).for_each(|(x, u)| *x -= k2 * u);
        let l2 = dot(&perp, &perp).sqrt();
        if l2 > 1e-12 * l1 {
            let t = dot(&r, &perp) / (l2 * l2);
            let s = (dot(&r, &u1) - t * along) / l1;
            let mut w = [0.0; 3];
            w[i] = 1.0 - s - t;
            w[j] = s;
            w[k] = t;
            if w.iter().all(|&x| x >= -1e-6) {
                w.iter_mut().for_each(|x| *x = x.max(0.0));
                let total: f64 = w.iter().sum();
                consider(w.map(|x| x / total));
            }
        }
    }
    Ok(best)
}

/// Whether `q` lies in the convex hull of `{a, b, c}` up to `tol`.
///
/// The barycentric weights returned by the projection are nonnegative and sum
/// to one, so membership reduces to the Euclidean residual being at most `tol`.
pub fn in_triple_hull(q: &Vector, a: &Vector, b: &Vector, c: &Vector, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::OutOfRange { name: "tol", value: tol });
    }
    Ok(project_to_triple_hull(q, a, b, c)?.distance <= tol)
}

/// Euclidean distance from `q` to the affine span of `{a, b, c}`.
pub fn affine_span_distance(q: &Vector, a: &Vector, b: &Vector, c: &Vector) -> Result<f64> {
    q.check_dim(a)?;
    q.check_dim(b)?;
    q.check_dim(c)?;
    let a = a.coords();
    let mut residual: Vec<f64> = q.coords().iter().zip(a).map(|(x, y)| x - y).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(2);
    for p in [b.coords(), c.coords()] {
        let mut e: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
        let scale = dot(&e, &e).sqrt();
        for u in &basis {
            let k = dot(&e, u);
            e.iter_mut().zip(u).for_each(|(x, y)| *x -= k * y);
        }
        let len = dot(&e, &e).sqrt();
        if len > 1e-12 * scale.max(1.0) {
            basis.push(e.into_iter().map(|x| x / len).collect());
        }
    }
    for u in &basis {
        let k = dot(&residual, u);
        residual.iter_mut().zip(u).for_each(|(x, y)| *x -= k * y);
    }
    Ok(dot(&residual, &residual).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&v(&[3.0, 4.0]), &NormSpec::euclidean()).unwrap(), 5.0);
        assert_eq!(norm(&v(&[3.0, -4.0]), &NormSpec::l1()).unwrap(), 7.0);
        assert_eq!(norm(&v(&[3.0, -4.0]), &NormSpec::sup()).unwrap(), 4.0);
        assert_eq!(norm(&Vector::zeros(3), &NormSpec::p(1.5).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn weighted_norms() {
        let w = NormSpec::euclidean().with_weights(vec![4.0, 1.0]).unwrap();
        // sqrt(4*1 + 1*0) = 2
        assert_eq!(w.norm(&v(&[1.0, 0.0])).unwrap(), 2.0);
        let w = NormSpec::sup().with_weights(vec![2.0, 0.5]).unwrap();
        assert_eq!(w.norm(&v(&[1.0, 3.0])).unwrap(), 2.0);
        assert!(matches!(
            w.norm(&v(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn dist_examples() {
        let e = NormSpec::euclidean();
        assert_eq!(dist(&v(&[0.0, 0.0]), &v(&[3.0, 4.0]), &e).unwrap(), 5.0);
        assert_eq!(dist(&v(&[1.5, -2.0]), &v(&[1.5, -2.0]), &e).unwrap(), 0.0);
        assert_eq!(dist(&v(&[1.0]), &v(&[-1.0]), &NormSpec::l1()).unwrap(), 2.0);
        assert!(dist(&v(&[1.0]), &v(&[1.0, 2.0]), &e).is_err());
    }

    #[test]
    fn invalid_vectors_and_norms() {
        assert_eq!(Vector::new(vec![]), Err(Error::EmptyVector));
        assert!(matches!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(NormSpec::p(0.5).is_err());
        assert!(NormSpec::l1().with_weights(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn norm_spec_text_format() {
        for s in ["p1", "p2", "pinf", "p1.5", "p2;weights=1,2.5"] {
            let n: NormSpec = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        assert_eq!("inf".parse::<NormSpec>().unwrap(), NormSpec::sup());
        assert_eq!("2".parse::<NormSpec>().unwrap(), NormSpec::euclidean());
        assert!("p0.3".parse::<NormSpec>().is_err());
        assert!("px".parse::<NormSpec>().is_err());
        assert!("p2;w=1".parse::<NormSpec>().is_err());
    }

    #[test]
    fn vector_text_format() {
        let x: Vector = "1, -2.5,3e-3".parse().unwrap();
        assert_eq!(x.coords(), &[1.0, -2.5, 3e-3]);
        assert_eq!(v(&[1.0, 1.0]).to_string(), "1,1");
        assert!("1,,2".parse::<Vector>().is_err());
    }

    #[test]
    fn hull_examples() {
        let (a, b, c) = (v(&[0.0, 0.0]), v(&[3.0, 0.0]), v(&[0.0, 4.0]));
        // incenter of the 3-4-5 triangle: weights (5, 4, 3) / 12
        assert!(in_triple_hull(&v(&[1.0, 1.0]), &a, &b, &c, DEFAULT_HULL_TOL).unwrap());
        let proj = project_to_triple_hull(&v(&[1.0, 1.0]), &a, &b, &c).unwrap();
        assert_relative_eq!(proj.weights[0], 5.0 / 12.0, epsilon = 1e-12);
        assert_relative_eq!(proj.weights[1], 4.0 / 12.0, epsilon = 1e-12);
        assert_relative_eq!(proj.weights[2], 3.0 / 12.0, epsilon = 1e-12);

        assert!(in_triple_hull(&a, &a, &b, &c, DEFAULT_HULL_TOL).unwrap());
        let (a, b, c) = (v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]));
        assert!(!in_triple_hull(&v(&[10.0, 10.0]), &a, &b, &c, DEFAULT_HULL_TOL).unwrap());
    }

    #[test]
    fn hull_of_degenerate_triples() {
        let p = v(&[1.0, 2.0, 3.0]);
        assert!(in_triple_hull(&p, &p, &p, &p, 0.0).unwrap());
        let q = v(&[1.0, 2.0, 3.5]);
        assert!(!in_triple_hull(&q, &p, &p, &p, 0.1).unwrap());
        // collinear
        let (a, b, c) = (v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0]));
        assert!(in_triple_hull(&v(&[1.5, 1.5]), &a, &b, &c, 1e-12).unwrap());
        assert!(!in_triple_hull(&v(&[1.5, 1.0]), &a, &b, &c, 1e-3).unwrap());
    }

    #[test]
    fn hull_of_thin_triangle() {
        // nearly collinear; q = 0.21 a + 0.5 b + 0.29 c up to rounding
        let a = v(&[0.04595830213128127, 0.5236799173171778]);
        let b = v(&[-0.25448766965326086, 0.19589047452227581]);
        let c = v(&[-0.4731733343845822, -0.04264507626553926]);
        let q = v(&[-0.25450162526892817, 0.19589047452227581]);
        let proj = project_to_triple_hull(&q, &a, &b, &c).unwrap();
        assert!(proj.distance < 1e-12, "{}", proj.distance);
        assert!(proj.weights.iter().all(|&w| w >= 0.0));
        assert_relative_eq!(proj.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn median_example_leaves_affine_span() {
        let (a, b, c) = (v(&[0.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0]), v(&[0.0, 1.0, 1.0]));
        let d = affine_span_distance(&v(&[0.0, 1.0, 0.0]), &a, &b, &c).unwrap();
        // residual of (0,1,0) against span{(1,1,0),(0,1,1)}: normal (1,-1,1)/sqrt3
        assert_relative_eq!(d, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert!(affine_span_distance(&v(&[0.5, 1.0, 0.5]), &a, &b, &c).unwrap() < 1e-12);
    }

    fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0f64, dim)
    }

    fn norms() -> impl Strategy<Value = NormSpec> {
        prop_oneof![
            Just(NormSpec::l1()),
            Just(NormSpec::p(1.5).unwrap()),
            Just(NormSpec::euclidean()),
            Just(NormSpec::p(3.0).unwrap()),
            Just(NormSpec::sup()),
        ]
    }

    proptest! {
        #[test]
        fn norm_axioms(x in coords(4), y in coords(4), alpha in -5.0..5.0f64, n in norms(),
                       w in prop::collection::vec(0.1..3.0f64, 4), weighted in any::<bool>()) {
            let n = if weighted { n.with_weights(w).unwrap() } else { n };
            let (x, y) = (v(&x), v(&y));
            let nx = n.norm(&x).unwrap();
            prop_assert!(nx >= 0.0);
            let scaled = n.norm(&x.scale(alpha)).unwrap();
            prop_assert!((scaled - alpha.abs() * nx).abs() <= 1e-12 * (1.0 + alpha.abs() * nx));
            let sum = n.norm(&x.add(&y).unwrap()).unwrap();
            prop_assert!(sum <= nx + n.norm(&y).unwrap() + 1e-12 * (1.0 + sum));
        }

        #[test]
        fn dist_is_a_metric(x in coords(3), y in coords(3), z in coords(3), n in norms()) {
            let (x, y, z) = (v(&x), v(&y), v(&z));
            let dxy = n.dist(&x, &y).unwrap();
            prop_assert_eq!(dxy, n.dist(&y, &x).unwrap());
            prop_assert_eq!(n.dist(&x, &x).unwrap(), 0.0);
            prop_assert!(x == y || dxy > 0.0);
            let dxz = n.dist(&x, &z).unwrap();
            let dzy = n.dist(&z, &y).unwrap();
            prop_assert!(dxy <= dxz + dzy + 1e-12 * (1.0 + dxy));
        }

        #[test]
        fn convex_combinations_are_in_hull(a in coords(3), b in coords(3), c in coords(3),
                                           l in prop::array::uniform3(0.0..1.0f64)) {
            let total = l[0] + l[1] + l[2];
            prop_assume!(total > 1e-3);
            let l = [l[0] / total, l[1] / total, l[2] / total];
            let (a, b, c) = (v(&a), v(&b), v(&c));
            let q: Vec<f64> = (0..3).map(|i| l[0] * a.coords()[i] + l[1] * b.coords()[i] + l[2] * c.coords()[i]).collect();
            prop_assert!(in_triple_hull(&v(&q), &a, &b, &c, DEFAULT_HULL_TOL).unwrap());
        }
    }
}
