//! Piecewise linear memory-load curves.
//!
//! A [`TradeoffCurve`] is a list of `(memory, load)` corner points with
//! strictly increasing memory, nonincreasing load, and nondecreasing slopes
//! (convexity). Evaluation interpolates linearly between corners, which is
//! exact time-sharing.

use crate::converse;
use crate::schemes::man_corner_points;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffCurve<S> {
    points: Vec<(S, S)>,
}

impl<S: Scalar> TradeoffCurve<S> {
    /// Validates corner points: memories strictly increasing, loads
    /// nonincreasing, slopes nondecreasing.
    pub fn from_points(points: Vec<(S, S)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve("no corner points".into()));
        }
        let mut prev_slope: Option<S> = None;
        for w in points.windows(2) {
            let (m0, l0) = &w[0];
            let (m1, l1) = &w[1];
            if m1 <= m0 {
                return Err(Error::InvalidCurve(format!(
                    "memories not strictly increasing: {m0} then {m1}"
                )));
            }
            if l1 > l0 {
                return Err(Error::InvalidCurve(format!(
                    "load increases from {l0} to {l1}"
                )));
            }
            let slope = (l1.clone() - l0.clone()) / (m1.clone() - m0.clone());
            if let Some(ps) = prev_slope {
                if slope < ps {
                    return Err(Error::InvalidCurve(format!(
                        "not convex: slope drops from {ps} to {slope}"
                    )));
                }
            }
            prev_slope = Some(slope);
        }
        Ok(TradeoffCurve { points })
    }

    /// Achievable curve of the uncoded-placement scheme: lower convex hull
    /// of the corner points. For `N < K` several capped corners can be
    /// collinear; the hull collapses them.
    pub fn man(n_files: usize, k_users: usize) -> Self {
        let hull = lower_hull(man_corner_points(n_files, k_users));
        TradeoffCurve::from_points(hull).expect("hull output is always a valid curve")
    }

    /// Converse curve sampled at the corner memories `tN/K`. The underlying
    /// bound is a maximum of affine functions whose envelope has vertices
    /// only at those memories, so corner samples determine it. Requires
    /// `N >= K`.
    pub fn converse(n_files: usize, k_users: usize) -> Result<Self> {
        let (n, k) = (n_files as i64, k_users as i64);
        let mut points = Vec::with_capacity(k_users + 1);
        for t in 0..=k {
            let m = S::from_ratio(t * n, k);
            let l = converse::lower_bound(n_files, k_users, &m)?;
            points.push((m, l));
        }
        TradeoffCurve::from_points(points)
    }

    pub fn points(&self) -> &[(S, S)] {
        &self.points
    }

    /// Linear interpolation at `m`, which must lie within the corner range.
    pub fn value_at(&self, m: &S) -> S {
        let first = &self.points[0];
        let last = self.points.last().unwrap();
        assert!(
            *m >= first.0 && *m <= last.0,
            "memory {m} outside curve range [{}, {}]",
            first.0,
            last.0
        );
        for w in self.points.windows(2) {
            let (m0, l0) = &w[0];
            let (m1, l1) = &w[1];
            if m <= m1 {
                let slope = (l1.clone() - l0.clone()) / (m1.clone() - m0.clone());
                return l0.clone() + slope * (m.clone() - m0.clone());
            }
        }
        last.1.clone()
    }
}

/// Lower convex hull of points already sorted by strictly increasing x.
/// Collinear middle points are dropped.
pub fn lower_hull<S: Scalar>(points: Vec<(S, S)>) -> Vec<(S, S)> {
    let mut hull: Vec<(S, S)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // keep b only if strictly below the chord a-p
            let cross = (b.0.clone() - a.0.clone()) * (p.1.clone() - a.1.clone())
                - (b.1.clone() - a.1.clone()) * (p.0.clone() - a.0.clone());
            if cross <= S::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{exact, Exact};

    #[test]
    fn man_curve_corners_for_square_case() {
        let curve = TradeoffCurve::<Exact>::man(3, 3);
        assert_eq!(
            curve.points(),
            &[
                (exact(0, 1), exact(3, 1)),
                (exact(1, 1), exact(1, 1)),
                (exact(2, 1), exact(1, 3)),
                (exact(3, 1), exact(0, 1)),
            ]
        );
    }

    #[test]
    fn capped_corners_collapse_to_flooding_line() {
        // N=1, K=3: every capped corner sits on load = 1 - M.
        let curve = TradeoffCurve::<Exact>::man(1, 3);
        assert_eq!(
            curve.points(),
            &[(exact(0, 1), exact(1, 1)), (exact(1, 1), exact(0, 1))]
        );
    }

    #[test]
    fn hull_drops_points_above_chords() {
        let pts = vec![
            (exact(0, 1), exact(2, 1)),
            (exact(1, 1), exact(2, 1)), // flat, above chord to the end
            (exact(2, 1), exact(0, 1)),
        ];
        let hull = lower_hull(pts);
        assert_eq!(hull, vec![(exact(0, 1), exact(2, 1)), (exact(2, 1), exact(0, 1))]);
    }

    #[test]
    fn from_points_rejects_bad_curves() {
        let increasing_load = vec![(exact(0, 1), exact(1, 1)), (exact(1, 1), exact(2, 1))];
        assert!(TradeoffCurve::from_points(increasing_load).is_err());
        let unsorted = vec![(exact(1, 1), exact(1, 1)), (exact(0, 1), exact(2, 1))];
        assert!(TradeoffCurve::from_points(unsorted).is_err());
        let concave = vec![
            (exact(0, 1), exact(4, 1)),
            (exact(1, 1), exact(3, 1)),
            (exact(2, 1), exact(0, 1)),
        ];
        assert!(TradeoffCurve::from_points(concave).is_err());
    }

    #[test]
    fn value_at_endpoints_and_interior() {
        let curve = TradeoffCurve::<Exact>::man(3, 3);
        assert_eq!(curve.value_at(&exact(0, 1)), exact(3, 1));
        assert_eq!(curve.value_at(&exact(3, 1)), exact(0, 1));
        assert_eq!(curve.value_at(&exact(5, 2)), exact(1, 6));
    }

    #[test]
    #[should_panic(expected = "outside curve range")]
    fn value_at_rejects_out_of_range() {
        TradeoffCurve::<Exact>::man(2, 2).value_at(&exact(5, 2));
    }
}
