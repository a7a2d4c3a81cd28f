//! Grid rasterisation of a buffered sector, in local metres around the apex
//! (x east, y north).

use std::f64::consts::PI;

/// Dense polygon for a sector: the apex followed by the arc.
pub fn sector_polygon(radius: f64, heading_deg: f64, fov_deg: f64, arc_step_deg: f64) -> Vec<(f64, f64)> {
    let mut poly = vec![(0.0, 0.0)];
    let start = heading_deg - fov_deg / 2.0;
    let n = (fov_deg / arc_step_deg).ceil() as usize;
    for i in 0..=n {
        let b = (start + fov_deg * i as f64 / n as f64) * PI / 180.0;
        poly.push((radius * b.sin(), radius * b.cos()));
    }
    poly
}

fn inside(poly: &[(f64, f64)], p: (f64, f64)) -> bool {
    let mut c = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.1 > p.1) != (b.1 > p.1) && p.0 < (b.0 - a.0) * (p.1 - a.1) / (b.1 - a.1) + a.0 {
            c = !c;
        }
        j = i;
    }
    c
}

fn seg_dist(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Whether `p` lies in the polygon or within `buffer` of its boundary.
pub fn in_buffered(poly: &[(f64, f64)], p: (f64, f64), buffer: f64) -> bool {
    if inside(poly, p) {
        return true;
    }
    let n = poly.len();
    (0..n).any(|i| seg_dist(p, poly[i], poly[(i + 1) % n]) <= buffer)
}

/// Cell centres of a square grid of side `2 * half_extent` and pitch `cell`.
pub fn grid(half_extent: f64, cell: f64) -> Vec<(f64, f64)> {
    let n = (2.0 * half_extent / cell).round() as usize;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push((
                -half_extent + (i as f64 + 0.5) * cell,
                -half_extent + (j as f64 + 0.5) * cell,
            ));
        }
    }
    out
}
