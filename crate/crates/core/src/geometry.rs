//! Planar primitives: points, angles, rays with excluded origins, lines,
//! cones and triangles, plus the orientation predicates built on them.
//!
//! All sign predicates classify values within a relative tolerance of
//! [`EPS`] as zero. The scale used is the squared diameter of the points
//! involved, so predicates are invariant under uniform scaling.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scenarios::Scenario;

/// Relative tolerance of every sign predicate.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, other: Point2) -> f64 {
        (other - self).norm()
    }

    pub fn dist2(self, other: Point2) -> f64 {
        (other - self).norm2()
    }

    /// Rotation about the origin.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn offset(self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.x, self.y + v.y)
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        self.offset(rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Displacement vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn angle(self) -> Angle {
        Angle::new(self.y.atan2(self.x))
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// An angle in radians, kept normalized to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

/// Reduce an angle to `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = (theta + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        PI
    } else {
        r
    }
}

/// Counterclockwise sweep from `from` to `to`, in `[0, 2pi)`.
pub fn ccw_sweep(from: f64, to: f64) -> f64 {
    let s = (to - from).rem_euclid(TAU);
    if s >= TAU {
        0.0
    } else {
        s
    }
}

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(theta: f64) -> Self {
        Angle(normalize_angle(theta))
    }

    pub fn from_degrees(deg: f64) -> Self {
        Angle::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn unit(self) -> Vec2 {
        let (s, c) = self.0.sin_cos();
        Vec2::new(c, s)
    }

    /// Counterclockwise sweep from `self` to `other`, in `[0, 2pi)`.
    pub fn sweep_to(self, other: Angle) -> f64 {
        ccw_sweep(self.0, other.0)
    }

    pub fn opposite(self) -> Angle {
        Angle::new(self.0 + PI)
    }
}

impl Add<f64> for Angle {
    type Output = Angle;
    fn add(self, rhs: f64) -> Angle {
        Angle::new(self.0 + rhs)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::new(self.0 + rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::new(self.0 - rhs.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Three-way sign with a zero band for degenerate inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }

    fn of(value: f64, tol: f64) -> Sign {
        if value > tol {
            Sign::Plus
        } else if value < -tol {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }
}

/// Twice the signed area of `abc`; positive when counterclockwise.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Orientation of `abc`, with zero band scaled by the squared diameter of the triple.
pub fn orientation(a: Point2, b: Point2, c: Point2) -> Sign {
    let scale = a.dist2(b).max(a.dist2(c)).max(b.dist2(c));
    Sign::of(orient2d(a, b, c), EPS * scale)
}

/// Orientation of `abc` against an externally supplied squared length scale.
pub fn orientation_scaled(a: Point2, b: Point2, c: Point2, scale2: f64) -> Sign {
    Sign::of(orient2d(a, b, c), EPS * scale2)
}

/// Largest pairwise distance in a point set.
pub fn diameter(points: &[Point2]) -> f64 {
    let mut d2: f64 = 0.0;
    for (k, a) in points.iter().enumerate() {
        for b in &points[k + 1..] {
            d2 = d2.max(a.dist2(*b));
        }
    }
    d2.sqrt()
}

/// Half-line from `origin`; the origin itself is not a member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point2,
    pub direction: Angle,
}

impl Ray {
    pub fn new(origin: Point2, direction: Angle) -> Self {
        Self { origin, direction }
    }

    pub fn line(&self) -> Line {
        Line::new(self.origin, self.direction)
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.origin + self.direction.unit().scale(t)
    }

    /// Membership test; always false at the origin.
    pub fn contains(&self, p: Point2) -> bool {
        let v = p - self.origin;
        let len = v.norm();
        if len <= EPS * self.origin.x.abs().max(self.origin.y.abs()).max(1.0) {
            return false;
        }
        let u = self.direction.unit();
        u.cross(v).abs() <= EPS * len && u.dot(v) > 0.0
    }

    pub fn rotated_about_origin(&self, angle: f64) -> Ray {
        Ray::new(self.origin.rotated(angle), self.direction + angle)
    }
}

/// Undirected line: `direction` and `direction + pi` describe the same line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub anchor: Point2,
    pub direction: Angle,
}

impl Line {
    pub fn new(anchor: Point2, direction: Angle) -> Self {
        Self { anchor, direction }
    }

    pub fn through(a: Point2, b: Point2) -> Result<Line> {
        if a == b {
            return Err(Error::DegenerateRay);
        }
        Ok(Line::new(a, (b - a).angle()))
    }

    /// Signed distance of `p`; positive on the counterclockwise side of `direction`.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.direction.unit().cross(p - self.anchor)
    }

    pub fn side(&self, p: Point2) -> Sign {
        let scale = (p - self.anchor).norm().max(f64::MIN_POSITIVE);
        Sign::of(self.signed_distance(p), EPS * scale)
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn foot(&self, p: Point2) -> Point2 {
        let u = self.direction.unit();
        self.anchor + u.scale(u.dot(p - self.anchor))
    }

    pub fn is_parallel(&self, other: &Line) -> bool {
        self.direction.unit().cross(other.direction.unit()).abs() <= EPS
    }

    /// Same undirected line, within tolerance.
    pub fn coincides(&self, other: &Line) -> bool {
        if !self.is_parallel(other) {
            return false;
        }
        let gap = self.signed_distance(other.anchor).abs();
        let scale = self
            .anchor
            .dist(other.anchor)
            .max(self.anchor.x.abs().max(self.anchor.y.abs()))
            .max(1.0);
        gap <= EPS * scale
    }

    /// Intersection point of two non-parallel lines.
    pub fn intersect(&self, other: &Line) -> Option<Point2> {
        let d1 = self.direction.unit();
        let d2 = other.direction.unit();
        let denom = d1.cross(d2);
        if denom.abs() <= EPS {
            return None;
        }
        let t = (other.anchor - self.anchor).cross(d2) / denom;
        Some(self.anchor + d1.scale(t))
    }
}

/// Angular sector with apex, swept counterclockwise from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub apex: Point2,
    pub start: Angle,
    pub end: Angle,
}

impl Cone {
    pub fn width(&self) -> f64 {
        self.start.sweep_to(self.end)
    }

    /// Closed angular membership of a direction.
    pub fn contains_direction(&self, dir: Angle) -> bool {
        let off = self.start.sweep_to(dir);
        let w = self.width();
        off <= w + EPS || off >= TAU - EPS
    }

    /// Strict angular membership, away from both bounding rays.
    pub fn contains_direction_strictly(&self, dir: Angle) -> bool {
        let off = self.start.sweep_to(dir);
        off > EPS && off < self.width() - EPS
    }

    /// Whether the point lies in the closed sector (apex included).
    pub fn contains_point(&self, p: Point2) -> bool {
        if p == self.apex {
            return true;
        }
        self.contains_direction((p - self.apex).angle())
    }

    pub fn contains_point_strictly(&self, p: Point2) -> bool {
        p != self.apex && self.contains_direction_strictly((p - self.apex).angle())
    }

    /// Inclusion of two cones sharing an apex: both bounding directions of
    /// `inner` lie in `self`. Exact because every cone is convex.
    pub fn contains_cone(&self, inner: &Cone) -> bool {
        self.contains_direction(inner.start)
            && self.contains_direction(inner.end)
            && inner.width() <= self.width() + EPS
    }

    /// Angular intersection of two cones with the same apex, when it is a cone.
    pub fn intersect(&self, other: &Cone) -> Option<Cone> {
        let start = if self.contains_direction(other.start) {
            other.start
        } else if other.contains_direction(self.start) {
            self.start
        } else {
            return None;
        };
        let end = if self.contains_direction(other.end) {
            other.end
        } else if other.contains_direction(self.end) {
            self.end
        } else {
            return None;
        };
        Some(Cone {
            apex: self.apex,
            start,
            end,
        })
    }

    pub fn same_as(&self, other: &Cone, tol: f64) -> bool {
        self.apex.dist(other.apex) <= tol
            && (self.start - other.start).radians().abs() <= tol
            && (self.end - other.end).radians().abs() <= tol
    }

    pub fn start_ray(&self) -> Ray {
        Ray::new(self.apex, self.start)
    }

    pub fn end_ray(&self) -> Ray {
        Ray::new(self.apex, self.end)
    }
}

/// The cone `C_ij` with its two halves split along the true ray of site `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeCij {
    pub whole: Cone,
    pub minus_part: Cone,
    pub plus_part: Cone,
}

/// Non-degenerate triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: Point2,
    pub b: Point2,
    pub c: Point2,
}

impl Triangle {
    pub fn new(a: Point2, b: Point2, c: Point2) -> Result<Triangle> {
        if orientation(a, b, c) == Sign::Zero {
            return Err(Error::DegenerateTriangle);
        }
        Ok(Triangle { a, b, c })
    }

    pub fn area(&self) -> f64 {
        orient2d(self.a, self.b, self.c).abs() / 2.0
    }
}

/// Ray from `p` through `f`.
pub fn true_ray(p: Point2, f: Point2) -> Result<Ray> {
    if p == f {
        return Err(Error::DegenerateRay);
    }
    Ok(Ray::new(p, (f - p).angle()))
}

/// Rotate a ray about its origin by `eps`; positive is counterclockwise.
pub fn apply_error(r: Ray, eps: Angle) -> Result<Ray> {
    let e = eps.radians();
    if e.abs() >= PI {
        return Err(Error::ErrorAngleOutOfRange(e));
    }
    Ok(Ray::new(r.origin, r.direction + e))
}

/// Side of `x` relative to the directed line `p -> f`: `Plus` is counterclockwise.
pub fn halfplane_side(p: Point2, f: Point2, x: Point2) -> Sign {
    orientation(p, f, x)
}

/// Common point of two rays, strictly past both origins.
pub fn intersect_rays(r1: &Ray, r2: &Ray) -> Result<Option<Point2>> {
    let d1 = r1.direction.unit();
    let d2 = r2.direction.unit();
    let w = r2.origin - r1.origin;
    let gap = w.norm();
    let denom = d1.cross(d2);
    if denom.abs() <= EPS {
        if d1.cross(w).abs() <= EPS * gap {
            return Err(Error::DegenerateOverlap);
        }
        return Ok(None);
    }
    let t = w.cross(d2) / denom;
    let s = w.cross(d1) / denom;
    let tol = EPS * gap;
    if t > tol && s > tol {
        Ok(Some(r1.origin + d1.scale(t)))
    } else {
        Ok(None)
    }
}

/// Cone of width below pi at `apex` spanned by two directions.
pub fn cone_between(apex: Point2, d1: Angle, d2: Angle) -> Result<Cone> {
    let sweep = d1.sweep_to(d2);
    if sweep <= EPS || sweep >= TAU - EPS || (sweep - PI).abs() <= EPS {
        return Err(Error::ImproperCone);
    }
    Ok(if sweep < PI {
        Cone {
            apex,
            start: d1,
            end: d2,
        }
    } else {
        Cone {
            apex,
            start: d2,
            end: d1,
        }
    })
}

/// Closed containment of a ray emanating from the cone's apex.
pub fn cone_contains_ray(c: &Cone, r: &Ray) -> Result<bool> {
    let scale = c.apex.x.abs().max(c.apex.y.abs()).max(1.0);
    if c.apex.dist(r.origin) > EPS * scale {
        return Err(Error::ApexMismatch);
    }
    Ok(c.contains_direction(r.direction))
}

/// The cone `C_ij = cone(P_i, r_j, P_i -> P_j)` and its halves along `r_i`.
pub fn cone_c_ij(scenario: &Scenario, i: usize, j: usize) -> Result<ConeCij> {
    let n = scenario.n();
    for index in [i, j] {
        if index >= n {
            return Err(Error::SiteIndex { index, n });
        }
    }
    if i == j {
        return Err(Error::GeneralPosition(format!(
            "cone C_ij needs i != j, got {i}"
        )));
    }
    let report = scenario.general_position();
    if !report.valid() {
        return Err(Error::GeneralPosition(report.to_string()));
    }
    let pi = scenario.points[i];
    let f = scenario.target;
    let ri = (f - pi).angle();
    let rj = (f - scenario.points[j]).angle();
    let to_pj = (scenario.points[j] - pi).angle();
    Ok(ConeCij {
        whole: cone_between(pi, rj, to_pj)?,
        minus_part: cone_between(pi, ri, to_pj)?,
        plus_part: cone_between(pi, ri, rj)?,
    })
}

/// Triangle of the three pairwise ray intersections, if they all exist and differ.
pub fn cocked_hat(r1: &Ray, r2: &Ray, r3: &Ray) -> Option<Triangle> {
    let meet = |a: &Ray, b: &Ray| intersect_rays(a, b).ok().flatten();
    let x12 = meet(r1, r2)?;
    let x23 = meet(r2, r3)?;
    let x13 = meet(r1, r3)?;
    Triangle::new(x12, x23, x13).ok()
}

/// Triangle cut out by three lines, if they pairwise meet at distinct points.
pub fn lines_triangle(l1: &Line, l2: &Line, l3: &Line) -> Option<Triangle> {
    let x12 = l1.intersect(l2)?;
    let x23 = l2.intersect(l3)?;
    let x13 = l1.intersect(l3)?;
    Triangle::new(x12, x23, x13).ok()
}

/// Strict interior membership.
pub fn point_in_triangle(x: Point2, t: &Triangle) -> bool {
    let s1 = orientation(t.a, t.b, x);
    let s2 = orientation(t.b, t.c, x);
    let s3 = orientation(t.c, t.a, x);
    s1 != Sign::Zero && s1 == s2 && s2 == s3
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    const TOL: f64 = 1e-12;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn true_ray_directions() {
        assert_eq!(
            true_ray(p(0., 0.), p(1., 0.)).unwrap().direction.radians(),
            0.0
        );
        let r = true_ray(p(0., 0.), p(0., 3.)).unwrap();
        assert!((r.direction.radians() - FRAC_PI_2).abs() < TOL);
        let r = true_ray(p(2., 1.), p(3., 2.)).unwrap();
        assert!((r.direction.radians() - FRAC_PI_4).abs() < TOL);
        assert!(r.contains(p(3., 2.)));
        assert!(!r.contains(p(2., 1.)));
        assert_eq!(true_ray(p(1., 1.), p(1., 1.)), Err(Error::DegenerateRay));
    }

    #[test]
    fn apply_error_rotates() {
        let r = Ray::new(p(0., 0.), Angle::ZERO);
        let q = apply_error(r, Angle::new(FRAC_PI_4)).unwrap();
        assert!((q.direction.radians() - FRAC_PI_4).abs() < TOL);
        assert_eq!(apply_error(r, Angle::ZERO).unwrap(), r);
        let r = Ray::new(p(1., 1.), Angle::new(FRAC_PI_2));
        let q = apply_error(r, Angle::new(-FRAC_PI_2)).unwrap();
        assert!(q.direction.radians().abs() < TOL);
        assert_eq!(q.origin, p(1., 1.));
        assert!(apply_error(r, Angle::new(PI)).is_err());
    }

    #[test]
    fn halfplane_examples() {
        assert_eq!(halfplane_side(p(0., 0.), p(1., 0.), p(0., 1.)), Sign::Plus);
        assert_eq!(
            halfplane_side(p(0., 0.), p(1., 0.), p(0., -1.)),
            Sign::Minus
        );
        assert_eq!(halfplane_side(p(0., 0.), p(1., 0.), p(5., 0.)), Sign::Zero);
    }

    #[test]
    fn ray_intersections() {
        let r1 = Ray::new(p(0., 0.), Angle::ZERO);
        let r2 = Ray::new(p(1., -1.), Angle::new(FRAC_PI_2));
        let x = intersect_rays(&r1, &r2).unwrap().unwrap();
        assert!(x.dist(p(1., 0.)) < TOL);

        let r3 = Ray::new(p(1., 1.), Angle::ZERO);
        assert_eq!(intersect_rays(&r1, &r3).unwrap(), None);

        let r4 = true_ray(p(2., 1.), p(0., 0.)).unwrap();
        assert_eq!(intersect_rays(&r1, &r4).unwrap(), None);

        let r5 = Ray::new(p(3., 0.), Angle::new(PI));
        assert_eq!(intersect_rays(&r1, &r5), Err(Error::DegenerateOverlap));

        // Meeting behind one origin.
        let r6 = Ray::new(p(-1., -1.), Angle::new(FRAC_PI_2));
        assert_eq!(intersect_rays(&r1, &r6).unwrap(), None);
    }

    #[test]
    fn cones() {
        let c = cone_between(Point2::ORIGIN, Angle::ZERO, Angle::new(FRAC_PI_2)).unwrap();
        assert_eq!(c.start, Angle::ZERO);
        assert!((c.width() - FRAC_PI_2).abs() < TOL);

        let c2 = cone_between(
            Point2::ORIGIN,
            Angle::new(3. * FRAC_PI_4),
            Angle::new(-3. * FRAC_PI_4),
        )
        .unwrap();
        assert!((c2.start.radians() - 3. * FRAC_PI_4).abs() < TOL);
        assert!((c2.width() - FRAC_PI_2).abs() < TOL);
        assert!(c2.contains_direction(Angle::new(PI)));

        // Argument order does not matter.
        let c3 = cone_between(Point2::ORIGIN, Angle::new(FRAC_PI_2), Angle::ZERO).unwrap();
        assert_eq!(c, c3);

        assert_eq!(
            cone_between(Point2::ORIGIN, Angle::ZERO, Angle::new(PI)),
            Err(Error::ImproperCone)
        );
        assert_eq!(
            cone_between(Point2::ORIGIN, Angle::ZERO, Angle::ZERO),
            Err(Error::ImproperCone)
        );
    }

    #[test]
    fn cone_ray_containment() {
        let c = cone_between(Point2::ORIGIN, Angle::ZERO, Angle::new(FRAC_PI_2)).unwrap();
        let ray = |d: f64| Ray::new(Point2::ORIGIN, Angle::new(d));
        assert!(cone_contains_ray(&c, &ray(FRAC_PI_4)).unwrap());
        assert!(!cone_contains_ray(&c, &ray(-FRAC_PI_4)).unwrap());
        assert!(cone_contains_ray(&c, &ray(0.0)).unwrap());
        assert!(cone_contains_ray(&c, &ray(FRAC_PI_2)).unwrap());
        let off = Ray::new(p(1., 0.), Angle::ZERO);
        assert_eq!(cone_contains_ray(&c, &off), Err(Error::ApexMismatch));
    }

    #[test]
    fn cone_c_ij_example() {
        let s = Scenario::new(vec![p(0., 0.), p(4., 0.)], p(2., 1.)).unwrap();
        let c12 = cone_c_ij(&s, 0, 1).unwrap();
        // Directions computed independently from the coordinates.
        let to_p2 = 0.0_f64;
        let r2 = 1.0_f64.atan2(-2.0);
        let r1 = 1.0_f64.atan2(2.0);
        assert!((r2 - 2.6779).abs() < 1e-4 && (r1 - 0.4636).abs() < 1e-4);
        assert!((c12.whole.start.radians() - to_p2).abs() < TOL);
        assert!((c12.whole.end.radians() - r2).abs() < TOL);
        assert!(c12.whole.contains_direction(Angle::new(r1)));
        assert!(!c12.whole.contains_direction(Angle::new(-0.1)));

        let c21 = cone_c_ij(&s, 1, 0).unwrap();
        assert!(c21.whole.contains_direction(Angle::new(r2)));

        for c in [c12, c21] {
            assert!((c.minus_part.width() + c.plus_part.width() - c.whole.width()).abs() < 1e-12);
            assert!(c.whole.contains_cone(&c.minus_part));
            assert!(c.whole.contains_cone(&c.plus_part));
        }
        assert!(cone_c_ij(&s, 0, 0).is_err());
        assert!(cone_c_ij(&s, 0, 2).is_err());
    }

    #[test]
    fn cocked_hat_examples() {
        // Equilateral sites about the origin, rays rotated by -10 degrees.
        let f = Point2::ORIGIN;
        let sites: Vec<Point2> = (0..3)
            .map(|k| {
                let a = FRAC_PI_2 + k as f64 * TAU / 3.0;
                p(a.cos(), a.sin())
            })
            .collect();
        let rays: Vec<Ray> = sites
            .iter()
            .map(|&s| apply_error(true_ray(s, f).unwrap(), Angle::from_degrees(-10.0)).unwrap())
            .collect();
        let hat = cocked_hat(&rays[0], &rays[1], &rays[2]).expect("hat forms");
        assert!(point_in_triangle(f, &hat));

        let a = Ray::new(p(0., 0.), Angle::ZERO);
        let b = Ray::new(p(0., 1.), Angle::ZERO);
        let c = Ray::new(p(1., -1.), Angle::new(FRAC_PI_2));
        assert_eq!(cocked_hat(&a, &b, &c), None);

        // Concurrent rays through (1, 1).
        let target = p(1., 1.);
        let rs: Vec<Ray> = [p(0., 0.), p(3., 0.), p(0., 4.)]
            .iter()
            .map(|&s| true_ray(s, target).unwrap())
            .collect();
        assert_eq!(cocked_hat(&rs[0], &rs[1], &rs[2]), None);
    }

    #[test]
    fn point_in_triangle_strict() {
        let t = Triangle::new(p(-1., -1.), p(2., 0.), p(0., 2.)).unwrap();
        assert!(point_in_triangle(p(0., 0.), &t));
        assert!(!point_in_triangle(p(10., 10.), &t));
        assert!(!point_in_triangle(p(2., 0.), &t));
        assert!(!point_in_triangle(p(0.5, -0.5), &t));
        assert!(Triangle::new(p(0., 0.), p(1., 1.), p(2., 2.)).is_err());
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(TAU + 0.5) - 0.5).abs() < 1e-12);
        assert!((ccw_sweep(3.0, -3.0) - (TAU - 6.0)).abs() < 1e-12);
    }
}
