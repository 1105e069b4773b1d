use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use super::{ord_int, Valuation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub slope: Valuation,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, Valuation)>,
    pub segments: Vec<Segment>,
}

type Pt = (i64, Ratio<i64>);

/// Cross product sign of (b - a) x (c - a); positive means a left turn.
fn cross(a: Pt, b: Pt, c: Pt) -> Ratio<i64> {
    let (bx, by) = (Ratio::from_integer(b.0 - a.0), b.1 - a.1);
    let (cx, cy) = (Ratio::from_integer(c.0 - a.0), c.1 - a.1);
    bx * cy - by * cx
}

/// Lower convex hull of the finite points; collinear interior points dropped.
pub fn lower_hull(points: &[(usize, Valuation)]) -> NewtonPolygon {
    let mut pts: Vec<Pt> = points
        .iter()
        .filter_map(|&(i, v)| v.finite().map(|v| (i as i64, v)))
        .collect();
    pts.sort();
    pts.dedup_by(|b, a| a.0 == b.0);
    let mut hull: Vec<Pt> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= Ratio::from_integer(0)
        {
            hull.pop();
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            Segment {
                slope: Valuation::Finite((w[1].1 - w[0].1) / Ratio::from_integer(len)),
                length: len as usize,
            }
        })
        .collect();
    NewtonPolygon {
        vertices: hull
            .into_iter()
            .map(|(i, v)| (i as usize, Valuation::Finite(v)))
            .collect(),
        segments,
    }
}

/// Newton polygon from `(index, ord a_index)` pairs; indices missing from the
/// input count as zero coefficients.
pub fn newton_polygon(points: &[(usize, Valuation)]) -> Result<NewtonPolygon> {
    let d = points
        .iter()
        .map(|&(i, _)| i)
        .max()
        .ok_or(Error::DegeneratePolygon)?;
    let finite_at = |k: usize| points.iter().any(|&(i, v)| i == k && !v.is_infinite());
    if !finite_at(0) || !finite_at(d) {
        return Err(Error::DegeneratePolygon);
    }
    Ok(lower_hull(points))
}

pub fn newton_polygon_of(coeffs: &[BigRational], p: u64) -> Result<NewtonPolygon> {
    let pts: Vec<(usize, Valuation)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (i, ord_int(c, p).map_or(Valuation::Infinite, Valuation::int)))
        .collect();
    newton_polygon(&pts)
}

/// Each segment of slope `s` and length `l` contributes `l` roots of order `-s`.
pub fn root_orders(poly: &NewtonPolygon) -> Vec<(Ratio<i64>, usize)> {
    poly.segments
        .iter()
        .filter_map(|s| s.slope.finite().map(|v| (-v, s.length)))
        .collect()
}
