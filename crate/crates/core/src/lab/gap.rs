use serde::Serialize;

use crate::error::{Error, Result};
use crate::ternary::group_comixer_1d;

/// One grid point of [`gap_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub x: f64,
    /// `tau(x, 1, -1)` for the co-mixer of the additive group of the line.
    pub comixer_value: f64,
    /// The candidate map's value `f(x)`.
    pub image: f64,
    /// `|f(x) - x|`.
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapProbe {
    pub rows: Vec<GapRow>,
    /// `f(x) <= -1` at every grid point.
    pub stays_in_left_component: bool,
    /// `displacement >= x + 1` at every grid point.
    pub displacement_lower_bound_holds: bool,
    pub displacement_monotone: bool,
}

/// Interchange candidate on `X = R \ (-1, 1)` exchanging `1` and `-1`.
///
/// The line's co-mixer gives `x -> tau(x, 1, -1)`, which leaves `X`. The
/// candidate projects that value onto the component of `X` that a continuous
/// map sending `1` to `-1` must use on `[1, inf)`, namely `(-inf, -1]`, and
/// symmetrically onto `[1, inf)` for `x <= -1`.
fn interchange_candidate(x: f64) -> (f64, f64) {
    let t = group_comixer_1d(x, 1.0, -1.0);
    let image = if x >= 1.0 { t.min(-1.0) } else { t.max(1.0) };
    (t, image)
}

/// Tabulates the candidate on the grid `1, 1 + step, ...` up to `x_max`.
pub fn gap_probe(x_max: f64, step: f64) -> Result<GapProbe> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::OutOfRange { name: "step", value: step });
    }
    if !(x_max >= 1.0 && x_max.is_finite()) {
        return Err(Error::OutOfRange { name: "x_max", value: x_max });
    }
    let n = ((x_max - 1.0) / step).floor() as usize;
    let rows: Vec<GapRow> = (0..=n)
        .map(|k| {
            let x = 1.0 + k as f64 * step;
            let (comixer_value, image) = interchange_candidate(x);
            GapRow { x, comixer_value, image, displacement: (image - x).abs() }
        })
        .collect();
    Ok(GapProbe {
        stays_in_left_component: rows.iter().all(|r| r.image <= -1.0),
        displacement_lower_bound_holds: rows.iter().all(|r| r.displacement >= r.x + 1.0),
        displacement_monotone: rows.windows(2).all(|w| w[1].displacement >= w[0].displacement),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exchanged() {
        assert_eq!(interchange_candidate(1.0).1, -1.0);
        assert_eq!(interchange_candidate(-1.0).1, 1.0);
        // tau(1, 1, -1) = -1 already lies in X
        assert_eq!(interchange_candidate(1.0).0, -1.0);
    }

    #[test]
    fn probe_rows() {
        let p = gap_probe(5.0, 0.5).unwrap();
        assert_eq!(p.rows.len(), 9);
        assert_eq!(p.rows[0], GapRow { x: 1.0, comixer_value: -1.0, image: -1.0, displacement: 2.0 });
        let at5 = p.rows.last().unwrap();
        assert_eq!(at5.x, 5.0);
        assert!(at5.image <= -1.0 && at5.displacement >= 6.0);
        // the raw co-mixer value escapes to the right component
        assert_eq!(at5.comixer_value, 3.0);
        assert!(p.stays_in_left_component && p.displacement_lower_bound_holds && p.displacement_monotone);
    }

    #[test]
    fn invalid_arguments() {
        assert!(gap_probe(5.0, 0.0).is_err());
        assert!(gap_probe(5.0, -1.0).is_err());
        assert!(gap_probe(0.5, 0.1).is_err());
        assert_eq!(gap_probe(1.0, 10.0).unwrap().rows.len(), 1);
    }
}
