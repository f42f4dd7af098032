//! Mixers and co-mixers: ternary operations that return the repeated
//! argument (mixers) or the remaining argument (co-mixers) whenever two
//! arguments coincide.
//!
//! The crate provides
//!
//! * weighted p-norms and convex hull tests ([`geometry`]),
//! * the incenter mixer, the Nagel co-mixer, the coordinate-wise median and
//!   the co-mixer of additive subgroups of the line ([`ternary`]),
//! * finite interval unions as a model of the measure algebra of `[0, 1]`
//!   and its quotient by complementation ([`measure`]),
//! * finite subset spaces with the Hausdorff metric and the retraction
//!   `X(3) -> X(2)` ([`subset`]),
//! * seeded, parallel empirical Lipschitz estimators ([`lab`]) and sweeps
//!   over them ([`certify`]).
//!
//! Batch evaluation uses rayon when the default `parallel` feature is on;
//! results do not depend on it.

pub mod certify;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod measure;
pub mod par;
pub mod subset;
pub mod ternary;

pub use error::{Error, Result};
pub use geometry::{dist, in_triple_hull, norm, Exponent, NormSpec, Vector};
pub use measure::{IntervalSet, QuotientClass};
pub use subset::{FiniteSubset, PointMap};
pub use ternary::{OpKind, TernaryOp};
