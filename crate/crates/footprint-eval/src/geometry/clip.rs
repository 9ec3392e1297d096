//! Pairwise polygon intersection area.
//!
//! Each polygon is decomposed into signed fan triangles from a shared local
//! origin (one triangle per ring edge, holes included). The intersection
//! area is then the signed sum of pairwise triangle-triangle intersection
//! areas, with each triangle pair clipped by Sutherland-Hodgman. This
//! handles concave outlines and holes without tracing the intersection
//! polygon itself, which is all the matching pipeline needs.

use super::{bounding_box, polygon_area, Coordinate, Polygon};

/// Area of `a` ∩ `b` in m². Zero for disjoint inputs; commutative (the pair
/// is evaluated in a canonical order); never exceeds either input area.
pub fn intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    let (ba, bb) = (bounding_box(a), bounding_box(b));
    if ba.max_x.min(bb.max_x) <= ba.min_x.max(bb.min_x)
        || ba.max_y.min(bb.max_y) <= ba.min_y.max(bb.min_y)
    {
        return 0.0;
    }
    let (first, second) = if canonical_before(a, b) { (a, b) } else { (b, a) };
    // Work in a local frame anchored at the combined bbox corner; fan
    // triangles from a far-away origin would lose the area signal to
    // cancellation in projected coordinates.
    let origin = Coordinate::new(ba.min_x.min(bb.min_x), ba.min_y.min(bb.min_y));
    let tris_a = signed_fan(first, origin);
    let tris_b = signed_fan(second, origin);
    let mut total = 0.0;
    for (ta, sa) in &tris_a {
        for (tb, sb) in &tris_b {
            let inter = clip_triangles(ta, tb);
            if inter != 0.0 {
                total += sa * sb * inter;
            }
        }
    }
    total.max(0.0).min(polygon_area(a)).min(polygon_area(b))
}

type SignedTri = ([Coordinate; 3], f64);

/// Fan triangles (origin, vᵢ, vᵢ₊₁) over every ring, each stored in CCW
/// order with its contribution sign. Winding makes hole triangles cancel
/// the outer ring where they overlap.
fn signed_fan(poly: &Polygon, origin: Coordinate) -> Vec<SignedTri> {
    let mut tris = Vec::new();
    let o = Coordinate::new(0.0, 0.0);
    for ring in poly.rings() {
        let v = ring.vertices();
        let n = v.len();
        for i in 0..n {
            let a = Coordinate::new(v[i].x - origin.x, v[i].y - origin.y);
            let b = Coordinate::new(v[(i + 1) % n].x - origin.x, v[(i + 1) % n].y - origin.y);
            let doubled = a.x * b.y - a.y * b.x;
            if doubled == 0.0 {
                continue;
            }
            if doubled > 0.0 {
                tris.push(([o, a, b], 1.0));
            } else {
                tris.push(([o, b, a], -1.0));
            }
        }
    }
    tris
}

/// Intersection area of two CCW triangles via Sutherland-Hodgman.
fn clip_triangles(subject: &[Coordinate; 3], clip: &[Coordinate; 3]) -> f64 {
    let mut poly: Vec<Coordinate> = subject.to_vec();
    for i in 0..3 {
        if poly.is_empty() {
            return 0.0;
        }
        let c1 = clip[i];
        let c2 = clip[(i + 1) % 3];
        poly = clip_halfplane(&poly, c1, c2);
    }
    convex_area(&poly)
}

/// Keep the part of `poly` on the left of the directed edge c1 -> c2.
fn clip_halfplane(poly: &[Coordinate], c1: Coordinate, c2: Coordinate) -> Vec<Coordinate> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let side_cur = side(c1, c2, cur);
        let side_next = side(c1, c2, next);
        if side_cur >= 0.0 {
            out.push(cur);
        }
        if (side_cur > 0.0 && side_next < 0.0) || (side_cur < 0.0 && side_next > 0.0) {
            out.push(line_intersection(c1, c2, cur, next));
        }
    }
    out
}

fn side(a: Coordinate, b: Coordinate, p: Coordinate) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

fn line_intersection(a: Coordinate, b: Coordinate, p: Coordinate, q: Coordinate) -> Coordinate {
    let r = Coordinate::new(b.x - a.x, b.y - a.y);
    let s = Coordinate::new(q.x - p.x, q.y - p.y);
    let denom = r.x * s.y - r.y * s.x;
    let t = ((p.x - a.x) * s.y - (p.y - a.y) * s.x) / denom;
    Coordinate::new(a.x + t * r.x, a.y + t * r.y)
}

fn convex_area(poly: &[Coordinate]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        sum += a.x * b.y - a.y * b.x;
    }
    (sum / 2.0).max(0.0)
}

/// Deterministic pair ordering so the sum is evaluated identically no
/// matter which argument comes first.
fn canonical_before(a: &Polygon, b: &Polygon) -> bool {
    let (ba, bb) = (bounding_box(a), bounding_box(b));
    let key_a = [ba.min_x, ba.min_y, ba.max_x, ba.max_y];
    let key_b = [bb.min_x, bb.min_y, bb.max_x, bb.max_y];
    for (ka, kb) in key_a.iter().zip(key_b.iter()) {
        match ka.total_cmp(kb) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    let va: Vec<Coordinate> = a.rings().flat_map(|r| r.vertices().iter().copied()).collect();
    let vb: Vec<Coordinate> = b.rings().flat_map(|r| r.vertices().iter().copied()).collect();
    if va.len() != vb.len() {
        return va.len() < vb.len();
    }
    for (pa, pb) in va.iter().zip(vb.iter()) {
        match pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    true
}
