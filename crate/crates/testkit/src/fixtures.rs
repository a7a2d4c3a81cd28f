//! Shared fixtures and random instance generators.

use cctv_core::eval::{BBox, Category, Detection, GroundTruthBox};
use cctv_core::geo::{self, GeoPoint, LocalXY};
use cctv_core::graph::{EdgeSpec, GraphBuilder, RoadGraph};
use cctv_core::Camera;
use rand::Rng;

pub fn origin() -> GeoPoint {
    GeoPoint::new(52.52, 13.40).unwrap()
}

/// Point `east`/`north` metres from `base`.
pub fn offset(base: GeoPoint, east: f64, north: f64) -> GeoPoint {
    geo::unproject_local(base, LocalXY::new(east, north)).unwrap()
}

pub const GRID_SPACING_M: f64 = 100.0;

/// Position of grid node (row, col); rows grow northward, columns eastward.
pub fn grid_point(row: f64, col: f64) -> GeoPoint {
    offset(origin(), col * GRID_SPACING_M, row * GRID_SPACING_M)
}

/// `n`×`n` street grid. Nodes are `r{row}c{col}`, horizontal edges
/// `h{row}_{col}` and vertical edges `v{row}_{col}`.
pub fn grid(n: usize) -> RoadGraph {
    let mut b = GraphBuilder::new();
    for r in 0..n {
        for c in 0..n {
            b.add_node(format!("r{r}c{c}"), grid_point(r as f64, c as f64)).unwrap();
        }
    }
    for r in 0..n {
        for c in 0..n {
            if c + 1 < n {
                b.add_edge(EdgeSpec {
                    key: format!("h{r}_{c}"),
                    from: format!("r{r}c{c}"),
                    to: format!("r{r}c{}", c + 1),
                    ..EdgeSpec::default()
                })
                .unwrap();
            }
            if r + 1 < n {
                b.add_edge(EdgeSpec {
                    key: format!("v{r}_{c}"),
                    from: format!("r{r}c{c}"),
                    to: format!("r{}c{c}", r + 1),
                    ..EdgeSpec::default()
                })
                .unwrap();
            }
        }
    }
    b.build()
}

/// Two round cameras watching the middle of row 2 of the 5×5 grid.
pub fn corridor_cameras() -> Vec<Camera> {
    vec![
        Camera::round("corridor-w", grid_point(2.0, 1.5)),
        Camera::round("corridor-e", grid_point(2.0, 2.5)),
    ]
}

/// Ground truth plus two detectors' outputs on 39 medium-size boxes.
///
/// Detector A finds boxes 0..33 exactly; detector B finds boxes 2..35 with a
/// small offset, so the union covers 35 boxes and the overlap is redundant.
pub fn fusion_instance() -> (Vec<GroundTruthBox>, Vec<Detection>, Vec<Detection>) {
    let mut gts = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..39usize {
        let image = (i / 3) as u64;
        let category = if i % 2 == 0 {
            Category::Directed
        } else {
            Category::Round
        };
        let bbox = BBox::new(20.0 + 150.0 * (i % 3) as f64, 40.0, 60.0, 60.0).unwrap();
        gts.push(GroundTruthBox {
            image_id: image,
            category,
            bbox,
        });
        if i < 33 {
            a.push(Detection::new(image, category, bbox, 0.9 - 0.01 * i as f64).unwrap());
        }
        if (2..35).contains(&i) {
            let shifted = BBox::new(bbox.x + 3.0, bbox.y - 2.0, 60.0, 58.0).unwrap();
            b.push(Detection::new(image, category, shifted, 0.85 - 0.01 * i as f64).unwrap());
        }
    }
    (gts, a, b)
}

fn random_box(rng: &mut impl Rng) -> BBox {
    BBox::new(
        rng.gen_range(0..400) as f64,
        rng.gen_range(0..400) as f64,
        rng.gen_range(8..=140) as f64,
        rng.gen_range(8..=140) as f64,
    )
    .unwrap()
}

fn random_category(rng: &mut impl Rng) -> Category {
    if rng.gen_bool(0.5) {
        Category::Directed
    } else {
        Category::Round
    }
}

/// Up to 5 images with up to 6 boxes each. Detections are mostly jittered
/// copies of ground truth; scores come from a coarse grid so ties occur.
pub fn random_eval_instance(rng: &mut impl Rng) -> (Vec<Detection>, Vec<GroundTruthBox>) {
    let mut dets = Vec::new();
    let mut gts = Vec::new();
    for image in 0..rng.gen_range(1..=5u64) {
        let first = gts.len();
        for _ in 0..rng.gen_range(0..=6) {
            gts.push(GroundTruthBox {
                image_id: image,
                category: random_category(rng),
                bbox: random_box(rng),
            });
        }
        let own = &gts[first..];
        for _ in 0..rng.gen_range(0..=6) {
            let (category, bbox) = if !own.is_empty() && rng.gen_bool(0.7) {
                let g = &own[rng.gen_range(0..own.len())];
                let c = if rng.gen_bool(0.85) {
                    g.category
                } else {
                    random_category(rng)
                };
                let w = (g.bbox.w + rng.gen_range(-12..=12) as f64).max(4.0);
                let h = (g.bbox.h + rng.gen_range(-12..=12) as f64).max(4.0);
                let x = g.bbox.x + rng.gen_range(-10..=10) as f64;
                let y = g.bbox.y + rng.gen_range(-10..=10) as f64;
                (c, BBox::new(x, y, w, h).unwrap())
            } else {
                (random_category(rng), random_box(rng))
            };
            let score = rng.gen_range(1..=10) as f64 / 10.0;
            dets.push(Detection::new(image, category, bbox, score).unwrap());
        }
    }
    (dets, gts)
}

pub struct RandomNetwork {
    pub graph: RoadGraph,
    pub cameras: Vec<Camera>,
    pub from: GeoPoint,
    pub to: GeoPoint,
}

/// Sparse random street network of 2..=`max_nodes` nodes inside a 400 m
/// square, with random bends, one-way streets and cameras.
pub fn random_network(rng: &mut impl Rng, max_nodes: usize) -> RandomNetwork {
    let base = origin();
    let n = rng.gen_range(2..=max_nodes.max(2));
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..400.0), rng.gen_range(0.0..400.0)))
        .collect();
    let mut b = GraphBuilder::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        b.add_node(format!("n{i}"), offset(base, x, y)).unwrap();
    }
    let mut pairs = Vec::new();
    for i in 1..n {
        // mostly connected, but leave a few disconnected pieces
        if rng.gen_bool(0.92) {
            pairs.push((rng.gen_range(0..i), i));
        }
    }
    for _ in 0..rng.gen_range(0..=n) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            pairs.push((i, j));
        }
    }
    for (k, (i, j)) in pairs.into_iter().enumerate() {
        let geometry = rng.gen_bool(0.3).then(|| {
            let (a, c) = (pts[i], pts[j]);
            let mid = (
                (a.0 + c.0) / 2.0 + rng.gen_range(-40.0..40.0),
                (a.1 + c.1) / 2.0 + rng.gen_range(-40.0..40.0),
            );
            vec![
                offset(base, a.0, a.1),
                offset(base, mid.0, mid.1),
                offset(base, c.0, c.1),
            ]
        });
        b.add_edge(EdgeSpec {
            key: format!("e{k}"),
            from: format!("n{i}"),
            to: format!("n{j}"),
            width_m: Some(rng.gen_range(4.0..14.0)),
            oneway: rng.gen_bool(0.15),
            geometry,
            ..EdgeSpec::default()
        })
        .unwrap();
    }
    let graph = b.build();
    let cameras = (0..rng.gen_range(0..=5))
        .map(|k| {
            let p = offset(base, rng.gen_range(0.0..400.0), rng.gen_range(0.0..400.0));
            let range = rng.gen_range(10.0..60.0);
            if rng.gen_bool(0.5) {
                Camera::round(format!("c{k}"), p).with_range(range)
            } else {
                Camera::directed(format!("c{k}"), p, rng.gen_range(0.0..360.0))
                    .with_fov(rng.gen_range(30.0..180.0))
                    .with_range(range)
            }
        })
        .collect();
    let mut endpoint = || offset(base, rng.gen_range(-20.0..420.0), rng.gen_range(-20.0..420.0));
    let from = endpoint();
    let to = endpoint();
    RandomNetwork {
        graph,
        cameras,
        from,
        to,
    }
}
