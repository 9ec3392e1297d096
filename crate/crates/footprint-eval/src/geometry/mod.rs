//! Planar polygon primitives used throughout the evaluation pipeline.
//!
//! Everything here works in projected meters (see [`project_lonlat`]).
//! Rings are validated at construction: at least three distinct vertices,
//! no implicit closure duplicate, simple (non-self-intersecting), nonzero
//! area. Polygons are normalized so the outer ring winds counter-clockwise
//! and holes wind clockwise.

mod clip;

pub use clip::intersection_area;

use crate::error::{Error, Result};

/// Positive-overlap threshold in m². Suppresses floating-point slivers from
/// shared edges; far below any real building overlap.
pub const EPS_AREA: f64 = 1e-6;

/// Earth radius used by the spherical Web Mercator projection, in meters.
pub const MERCATOR_RADIUS: f64 = 6_378_137.0;

/// Latitude bound (exclusive) for [`project_lonlat`], in degrees.
pub const MERCATOR_MAX_LAT: f64 = 85.06;

/// A point in the planar working frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coordinate {
    pub x: f64,
    pub y: f64,
}

impl Coordinate {
    pub fn new(x: f64, y: f64) -> Coordinate {
        Coordinate { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle in meters. Used for analysis boundaries, tile
/// windows, and bounding boxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Rect> {
        if !(min_x.is_finite() && min_y.is_finite() && max_x.is_finite() && max_y.is_finite()) {
            return Err(Error::NonFiniteCoordinate { x: min_x, y: min_y });
        }
        if min_x > max_x || min_y > max_y {
            return Err(Error::Config(format!(
                "rectangle min exceeds max: ({min_x}, {min_y}, {max_x}, {max_y})"
            )));
        }
        Ok(Rect {
            min_x,
            min_y,
            max_x,
            max_y,
        })
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    /// Inclusive point containment (boundary counts as inside).
    pub fn contains(&self, p: Coordinate) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.min_x <= other.max_x
            && self.max_x >= other.min_x
            && self.min_y <= other.max_y
            && self.max_y >= other.min_y
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    fn from_vertices(vertices: &[Coordinate]) -> Rect {
        let mut r = Rect {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        };
        for v in vertices {
            r.min_x = r.min_x.min(v.x);
            r.min_y = r.min_y.min(v.y);
            r.max_x = r.max_x.max(v.x);
            r.max_y = r.max_y.max(v.y);
        }
        r
    }
}

/// A simple closed ring. The first vertex is not repeated at the end;
/// closure is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    vertices: Vec<Coordinate>,
}

impl Ring {
    /// Validate and build a ring. Rejects non-finite coordinates, repeated
    /// consecutive vertices (including an explicit closing duplicate),
    /// fewer than three distinct vertices, zero area, and self-intersection.
    pub fn new(vertices: Vec<Coordinate>) -> Result<Ring> {
        for v in &vertices {
            if !v.is_finite() {
                return Err(Error::NonFiniteCoordinate { x: v.x, y: v.y });
            }
        }
        if vertices.len() < 3 {
            return Err(Error::DegenerateRing(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if a == b {
                return Err(Error::DegenerateRing(format!(
                    "repeated consecutive vertex at index {i}"
                )));
            }
        }
        let ring = Ring { vertices };
        if signed_area(&ring.vertices).abs() < f64::MIN_POSITIVE {
            return Err(Error::DegenerateRing("zero enclosed area".to_string()));
        }
        ring.check_simple()?;
        Ok(ring)
    }

    pub fn vertices(&self) -> &[Coordinate] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Reversed copy (flips orientation).
    pub fn reversed(&self) -> Ring {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Ring { vertices }
    }

    fn check_simple(&self) -> Result<()> {
        let v = &self.vertices;
        let n = v.len();
        // Reversal spikes: adjacent edges folding back over each other.
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let c = v[(i + 2) % n];
            let cross = cross2(b, a, c);
            let dot = (a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y);
            if cross == 0.0 && dot > 0.0 {
                return Err(Error::SelfIntersectingRing);
            }
        }
        // Non-adjacent edge pairs must not touch.
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (v[i], v[(i + 1) % n]);
                let (c, d) = (v[j], v[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::SelfIntersectingRing);
                }
            }
        }
        Ok(())
    }
}

/// A planar polygon: one outer ring plus zero or more holes. After
/// construction the outer ring is counter-clockwise and holes clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    outer: Ring,
    holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(outer: Ring, holes: Vec<Ring>) -> Result<Polygon> {
        let outer = if ring_area(&outer) < 0.0 {
            outer.reversed()
        } else {
            outer
        };
        let mut normalized = Vec::with_capacity(holes.len());
        for hole in holes {
            let hole = if ring_area(&hole) > 0.0 {
                hole.reversed()
            } else {
                hole
            };
            for v in hole.vertices() {
                if !point_in_ring_closed(*v, &outer) {
                    return Err(Error::InvalidPolygon(format!(
                        "hole vertex ({}, {}) outside outer ring",
                        v.x, v.y
                    )));
                }
            }
            normalized.push(hole);
        }
        let poly = Polygon {
            outer,
            holes: normalized,
        };
        let area = polygon_area(&poly);
        if area <= 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "holes exceed outer ring area (net {area} m²)"
            )));
        }
        Ok(poly)
    }

    /// Convenience constructor for a hole-free polygon.
    pub fn from_outer(vertices: Vec<Coordinate>) -> Result<Polygon> {
        Polygon::new(Ring::new(vertices)?, Vec::new())
    }

    /// Axis-aligned rectangle as a polygon.
    pub fn rect(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Polygon> {
        Polygon::from_outer(vec![
            Coordinate::new(min_x, min_y),
            Coordinate::new(max_x, min_y),
            Coordinate::new(max_x, max_y),
            Coordinate::new(min_x, max_y),
        ])
    }

    pub fn outer(&self) -> &Ring {
        &self.outer
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    /// All rings: outer first, then holes.
    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    /// Area centroid, holes subtracted.
    pub fn centroid(&self) -> Coordinate {
        let bbox = bounding_box(self);
        let (sx, sy) = (bbox.min_x, bbox.min_y);
        let mut area2 = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for ring in self.rings() {
            let v = ring.vertices();
            let n = v.len();
            for i in 0..n {
                let a = v[i];
                let b = v[(i + 1) % n];
                let (ax, ay) = (a.x - sx, a.y - sy);
                let (bx, by) = (b.x - sx, b.y - sy);
                let cross = ax * by - bx * ay;
                area2 += cross;
                cx += (ax + bx) * cross;
                cy += (ay + by) * cross;
            }
        }
        Coordinate::new(sx + cx / (3.0 * area2), sy + cy / (3.0 * area2))
    }

    /// Inclusive containment test (boundary counts as inside the outer ring
    /// and as inside the polygon even on hole boundaries).
    pub fn contains_point(&self, p: Coordinate) -> bool {
        if !point_in_ring_closed(p, &self.outer) {
            return false;
        }
        for hole in &self.holes {
            if point_strictly_in_ring(p, hole) {
                return false;
            }
        }
        true
    }
}

/// Signed shoelace area of a ring: positive for counter-clockwise winding,
/// negative for clockwise.
pub fn ring_area(r: &Ring) -> f64 {
    signed_area(r.vertices())
}

fn signed_area(vertices: &[Coordinate]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    // Sum along a canonical traversal (from the lexicographically smallest
    // vertex, toward its smaller neighbor) so a ring and its reversal
    // produce bit-identical magnitudes with opposite signs.
    let lex = |a: &Coordinate, b: &Coordinate| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y));
    let m = (0..n)
        .min_by(|&i, &j| lex(&vertices[i], &vertices[j]))
        .unwrap();
    let next = vertices[(m + 1) % n];
    let prev = vertices[(m + n - 1) % n];
    let forward = lex(&next, &prev) != std::cmp::Ordering::Greater;
    let o = vertices[m];
    let mut sum = 0.0;
    for step in 0..n {
        let (i, j) = if forward {
            ((m + step) % n, (m + step + 1) % n)
        } else {
            ((m + n - step) % n, (m + n - step - 1) % n)
        };
        let a = vertices[i];
        let b = vertices[j];
        sum += (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y);
    }
    if forward {
        sum / 2.0
    } else {
        -sum / 2.0
    }
}

/// Unsigned polygon area: |outer| minus the hole areas.
pub fn polygon_area(p: &Polygon) -> f64 {
    let mut area = ring_area(&p.outer).abs();
    for hole in &p.holes {
        area -= ring_area(hole).abs();
    }
    area
}

/// Intersection over union, in [0, 1].
pub fn iou(a: &Polygon, b: &Polygon) -> f64 {
    let inter = intersection_area(a, b);
    let union = polygon_area(a) + polygon_area(b) - inter;
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}

/// True when the shared area exceeds [`EPS_AREA`]. Edge contact does not
/// count as overlap.
pub fn overlaps(a: &Polygon, b: &Polygon) -> bool {
    overlaps_with_threshold(a, b, EPS_AREA)
}

pub fn overlaps_with_threshold(a: &Polygon, b: &Polygon, min_area_m2: f64) -> bool {
    intersection_area(a, b) > min_area_m2
}

/// Tight axis-aligned bounds of the polygon's vertices.
pub fn bounding_box(p: &Polygon) -> Rect {
    Rect::from_vertices(p.outer.vertices())
}

/// Spherical Web Mercator projection of a lon/lat pair into planar meters.
pub fn project_lonlat(lon: f64, lat: f64) -> Result<Coordinate> {
    if !lat.is_finite() || lat.abs() >= MERCATOR_MAX_LAT {
        return Err(Error::LatitudeOutOfRange(lat));
    }
    if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
        return Err(Error::LongitudeOutOfRange(lon));
    }
    let x = MERCATOR_RADIUS * lon.to_radians();
    let y = MERCATOR_RADIUS * (std::f64::consts::FRAC_PI_4 + lat.to_radians() / 2.0).tan().ln();
    Ok(Coordinate::new(x, y))
}

/// Orientation of `c` relative to the directed line `a -> b`.
fn cross2(a: Coordinate, b: Coordinate, c: Coordinate) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)
}

fn on_segment(a: Coordinate, b: Coordinate, p: Coordinate) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Whether segments ab and cd share any point (crossing, touching, or
/// collinear overlap).
fn segments_intersect(a: Coordinate, b: Coordinate, c: Coordinate, d: Coordinate) -> bool {
    let d1 = cross2(c, d, a);
    let d2 = cross2(c, d, b);
    let d3 = cross2(a, b, c);
    let d4 = cross2(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Even-odd test, boundary inclusive.
fn point_in_ring_closed(p: Coordinate, ring: &Ring) -> bool {
    let v = ring.vertices();
    let n = v.len();
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if point_on_segment(p, a, b) {
            return true;
        }
    }
    ray_cast(p, ring)
}

/// Even-odd test, boundary exclusive.
fn point_strictly_in_ring(p: Coordinate, ring: &Ring) -> bool {
    let v = ring.vertices();
    let n = v.len();
    for i in 0..n {
        if point_on_segment(p, v[i], v[(i + 1) % n]) {
            return false;
        }
    }
    ray_cast(p, ring)
}

fn point_on_segment(p: Coordinate, a: Coordinate, b: Coordinate) -> bool {
    const EPS: f64 = 1e-9;
    let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
    if len == 0.0 {
        return (p.x - a.x).abs() < EPS && (p.y - a.y).abs() < EPS;
    }
    let dist = cross2(a, b, p).abs() / len;
    dist < EPS && on_segment(a, b, p)
}

fn ray_cast(p: Coordinate, ring: &Ring) -> bool {
    let v = ring.vertices();
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}
