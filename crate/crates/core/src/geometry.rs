//! Exact 2D predicates for closed convex polygons, circles and segments.

use serde::{Deserialize, Serialize};

/// Tolerance used by orientation tests to absorb degenerate configurations.
pub const GEOM_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    fn norm2(self) -> f64 {
        self.dot(self)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(p: [f64; 2]) -> Self {
        Point2::new(p[0], p[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }
}

/// Twice the signed area of triangle (a, b, c); positive when counterclockwise.
#[inline]
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn sign(v: f64) -> i8 {
    if v > GEOM_EPS {
        1
    } else if v < -GEOM_EPS {
        -1
    } else {
        0
    }
}

/// `p` lies in the bounding box of collinear segment `s`.
fn on_segment_bbox(s: &Segment, p: Point2) -> bool {
    p.x >= s.a.x.min(s.b.x) - GEOM_EPS
        && p.x <= s.a.x.max(s.b.x) + GEOM_EPS
        && p.y >= s.a.y.min(s.b.y) - GEOM_EPS
        && p.y <= s.a.y.max(s.b.y) + GEOM_EPS
}

/// Closed segment intersection, including touching and collinear overlap.
pub fn segments_intersect(s: &Segment, t: &Segment) -> bool {
    let d1 = sign(orient(t.a, t.b, s.a));
    let d2 = sign(orient(t.a, t.b, s.b));
    let d3 = sign(orient(s.a, s.b, t.a));
    let d4 = sign(orient(s.a, s.b, t.b));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment_bbox(t, s.a))
        || (d2 == 0 && on_segment_bbox(t, s.b))
        || (d3 == 0 && on_segment_bbox(s, t.a))
        || (d4 == 0 && on_segment_bbox(s, t.b))
}

/// Squared distance from `p` to the closed segment `s`.
pub fn point_segment_dist2(p: Point2, s: &Segment) -> f64 {
    let ab = s.b.sub(s.a);
    let len2 = ab.norm2();
    let t = if len2 > 0.0 {
        (p.sub(s.a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let proj = Point2::new(s.a.x + t * ab.x, s.a.y + t * ab.y);
    p.sub(proj).norm2()
}

/// Closed convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    points: Vec<Point2>,
}

/// Why a point list was refused as a convex polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolygonDefect {
    TooFewPoints,
    NonFinite,
    NotCounterClockwise,
    NotConvex,
}

impl std::fmt::Display for PolygonDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolygonDefect::TooFewPoints => "polygon needs at least 3 points",
            PolygonDefect::NonFinite => "polygon has a non-finite coordinate",
            PolygonDefect::NotCounterClockwise => "polygon vertices must be counterclockwise",
            PolygonDefect::NotConvex => "polygon is not convex",
        })
    }
}

impl ConvexPolygon {
    pub fn new(points: Vec<Point2>) -> Result<Self, PolygonDefect> {
        if points.len() < 3 {
            return Err(PolygonDefect::TooFewPoints);
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(PolygonDefect::NonFinite);
        }
        let n = points.len();
        let area2: f64 = (0..n)
            .map(|i| {
                let (a, b) = (points[i], points[(i + 1) % n]);
                a.x * b.y - b.x * a.y
            })
            .sum();
        if area2 <= GEOM_EPS {
            return Err(PolygonDefect::NotCounterClockwise);
        }
        for i in 0..n {
            if orient(points[i], points[(i + 1) % n], points[(i + 2) % n]) < -GEOM_EPS {
                return Err(PolygonDefect::NotConvex);
            }
        }
        Ok(ConvexPolygon { points })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, PolygonDefect> {
        ConvexPolygon::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| Segment::new(self.points[i], self.points[(i + 1) % n]))
    }

    /// Closed containment: boundary points count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        self.edges().all(|e| orient(e.a, e.b, p) >= -GEOM_EPS)
    }

    pub fn intersects_segment(&self, s: &Segment) -> bool {
        self.contains(s.a) || self.contains(s.b) || self.edges().any(|e| segments_intersect(&e, s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: Point2) -> bool {
        p.sub(self.center).norm2() <= self.radius * self.radius
    }

    pub fn intersects_segment(&self, s: &Segment) -> bool {
        point_segment_dist2(self.center, s) <= self.radius * self.radius
    }
}
