//! Unbounded-cell membership in a line arrangement, decided by covering
//! the circle of directions with open hitting arcs, and incremental region
//! counting.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{ccw_sweep, diameter, Angle, Line, Point2, Sign, EPS};

/// Open arc of directions swept counterclockwise from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionArc {
    pub start: Angle,
    pub end: Angle,
    pub length: f64,
}

impl DirectionArc {
    pub fn new(start: Angle, length: f64) -> Self {
        debug_assert!(length > 0.0 && length < TAU, "arc length {length}");
        DirectionArc {
            start,
            end: start + length,
            length,
        }
    }

    /// Open membership: the two endpoints are excluded.
    pub fn contains(&self, dir: Angle) -> bool {
        let off = self.start.sweep_to(dir);
        off > 0.0 && off < self.length
    }

    pub fn midpoint(&self) -> Angle {
        self.start + self.length / 2.0
    }
}

/// Proof that a point does or does not lie in an unbounded cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UnboundednessCertificate {
    pub unbounded: bool,
    /// Direction whose ray from the point misses every line.
    pub witness_direction: Option<Angle>,
    /// Hitting arcs that jointly cover every direction.
    pub covering: Option<Vec<DirectionArc>>,
}

/// Directions `u` for which the ray from `f` along `u` meets `l`.
pub fn hitting_arc(f: Point2, l: &Line) -> Result<DirectionArc> {
    if l.side(f) == Sign::Zero {
        return Err(Error::TargetOnLine);
    }
    let normal = (l.foot(f) - f).angle();
    Ok(DirectionArc::new(normal + (-FRAC_PI_2), PI))
}

/// Closed gaps `(start, length)` left uncovered by a family of open arcs.
/// Gap starts are absolute radians and may exceed `2pi`.
pub(crate) fn uncovered_gaps(arcs: &[DirectionArc]) -> Vec<(f64, f64)> {
    if arcs.is_empty() {
        return vec![(0.0, TAU)];
    }
    let mut spans: Vec<(f64, f64)> = arcs
        .iter()
        .map(|a| (ccw_sweep(0.0, a.start.radians()), a.length))
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));

    let base = spans[0].0;
    let mut reach = base + spans[0].1;
    let mut gaps = Vec::new();
    for &(s, len) in &spans[1..] {
        if s >= reach {
            gaps.push((reach, s - reach));
        }
        reach = reach.max(s + len);
    }
    let full = base + TAU;
    if reach <= full {
        gaps.push((reach, full - reach));
    } else {
        // Coverage spilling past a full turn reaches back over [base, wrap).
        let wrap = reach - TAU;
        gaps.retain_mut(|g| {
            let end = g.0 + g.1;
            if wrap > end {
                return false;
            }
            if wrap > g.0 {
                *g = (wrap, end - wrap);
            }
            true
        });
    }
    gaps
}

/// Whether `f` lies in an unbounded cell of the arrangement of `lines`.
pub fn in_unbounded_component(f: Point2, lines: &[Line]) -> Result<UnboundednessCertificate> {
    let arcs = lines
        .iter()
        .map(|l| hitting_arc(f, l))
        .collect::<Result<Vec<_>>>()?;
    let gaps = uncovered_gaps(&arcs);
    let widest = gaps.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1));
    Ok(match widest {
        Some((start, len)) => UnboundednessCertificate {
            unbounded: true,
            witness_direction: Some(Angle::new(start + len / 2.0)),
            covering: None,
        },
        None => UnboundednessCertificate {
            unbounded: false,
            witness_direction: None,
            covering: Some(arcs),
        },
    })
}

/// Independent check of one direction: walk far out from `f` and test
/// whether any line separates the endpoint from `f`.
pub fn far_point_oracle(f: Point2, lines: &[Line], dir: Angle) -> bool {
    let mut features: Vec<Point2> = vec![f];
    features.extend(lines.iter().map(|l| l.foot(f)));
    let diam = diameter(&features);
    let mut reach: f64 = 0.0;
    for (k, a) in lines.iter().enumerate() {
        for b in &lines[k + 1..] {
            if let Some(x) = a.intersect(b) {
                reach = reach.max(x.dist(f));
            }
        }
    }
    let far = 1e6 * (diam + reach).max(1.0);
    let q = f + dir.unit().scale(far);
    lines.iter().all(|l| {
        let sf = l.signed_distance(f);
        let sq = l.signed_distance(q);
        sf * sq > 0.0
    })
}

/// Number of connected regions of the plane minus the lines.
pub fn count_regions(lines: &[Line]) -> Result<usize> {
    for (j, b) in lines.iter().enumerate() {
        if lines[..j].iter().any(|a| a.coincides(b)) {
            return Err(Error::DuplicateLine(j));
        }
    }
    let mut regions = 1usize;
    for (i, line) in lines.iter().enumerate() {
        let u = line.direction.unit();
        let mut params: Vec<f64> = lines[..i]
            .iter()
            .filter_map(|other| line.intersect(other))
            .map(|x| u.dot(x - line.anchor))
            .collect();
        params.sort_by(f64::total_cmp);
        let scale = params
            .iter()
            .fold(0.0_f64, |m, t| m.max(t.abs()))
            .max(f64::MIN_POSITIVE);
        let distinct = params
            .windows(2)
            .filter(|w| w[1] - w[0] > EPS * scale)
            .count()
            + usize::from(!params.is_empty());
        regions += distinct + 1;
    }
    Ok(regions)
}
