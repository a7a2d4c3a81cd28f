//! Naive single-linkage clustering: repeatedly merge any two groups that
//! have a member pair within `eps`, until nothing changes.

const R: f64 = 6_371_000.0;

/// Great-circle distance between `(lat, lon)` pairs in degrees.
pub fn distance_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (p1, p2) = (a.0.to_radians(), b.0.to_radians());
    let dp = p2 - p1;
    let dl = (b.1 - a.1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * R * h.sqrt().min(1.0).asin()
}

/// Groups of indices, each sorted, groups ordered by smallest member.
pub fn single_linkage(points: &[(f64, f64)], eps_m: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    loop {
        let mut merged = false;
        'search: for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let linked = groups[i]
                    .iter()
                    .any(|&a| groups[j].iter().any(|&b| distance_m(points[a], points[b]) <= eps_m));
                if linked {
                    let moved = groups.remove(j);
                    groups[i].extend(moved);
                    merged = true;
                    break 'search;
                }
            }
        }
        if !merged {
            break;
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    groups
}
