//! Walkable road network with a uniform-grid segment index.
//!
//! Nodes and edges carry their external string ids but are addressed by
//! dense [`NodeId`]/[`EdgeId`] indices in insertion order. Every edge is
//! walkable in both directions unless it is flagged oneway.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::geo::{self, GeoPoint, LocalXY};
use crate::math;

pub const DEFAULT_WIDTH_M: f64 = 8.0;
pub const GRID_CELL_M: f64 = 50.0;
/// Allowed relative gap between a declared edge length and its geometry.
pub const LENGTH_TOLERANCE: f64 = 0.01;

/// Highway classes on which a oneway tag also binds pedestrians.
pub const MOTOR_ROAD_CLASSES: [&str; 2] = ["motorway", "trunk"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    DuplicateNode(String),
    DuplicateEdge(String),
    DanglingReference {
        edge: String,
        node: String,
    },
    NonPositiveLength {
        edge: String,
    },
    LengthMismatch {
        edge: String,
        declared_m: f64,
        geometry_m: f64,
    },
    GeometryMismatch {
        edge: String,
    },
    InvalidWidth {
        edge: String,
    },
    InvalidCoordinate {
        node: String,
    },
    EmptyGraph,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateNode(id) => write!(f, "duplicate node id `{id}`"),
            GraphError::DuplicateEdge(id) => write!(f, "duplicate edge id `{id}`"),
            GraphError::DanglingReference { edge, node } => {
                write!(f, "edge `{edge}` references unknown node `{node}`")
            }
            GraphError::NonPositiveLength { edge } => write!(f, "edge `{edge}` has non-positive length"),
            GraphError::LengthMismatch {
                edge,
                declared_m,
                geometry_m,
            } => write!(
                f,
                "edge `{edge}` declares {declared_m} m but its geometry measures {geometry_m:.3} m"
            ),
            GraphError::GeometryMismatch { edge } => write!(
                f,
                "edge `{edge}` geometry must have at least 2 points and end at its nodes"
            ),
            GraphError::InvalidWidth { edge } => write!(f, "edge `{edge}` width must be positive"),
            GraphError::InvalidCoordinate { node } => write!(f, "node `{node}` has an invalid coordinate"),
            GraphError::EmptyGraph => f.write_str("graph has no edges"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Whether a way is oneway for a pedestrian: the tag only binds on motor
/// roads, everything else is walkable both ways.
pub fn pedestrian_oneway(highway: &str, oneway_tag: bool) -> bool {
    oneway_tag && MOTOR_ROAD_CLASSES.contains(&highway)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub key: String,
    pub position: GeoPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub key: String,
    pub from: NodeId,
    pub to: NodeId,
    pub length_m: f64,
    pub width_m: f64,
    pub oneway: bool,
    /// Polyline from `from` to `to`, endpoints equal to the node positions.
    pub geometry: Vec<GeoPoint>,
}

impl Edge {
    pub fn polyline_m(&self) -> f64 {
        geo::polyline_length_m(&self.geometry)
    }

    /// Point at `fraction` of the polyline length from the start.
    pub fn point_at(&self, fraction: f64) -> GeoPoint {
        let total = self.polyline_m();
        let target = fraction.clamp(0.0, 1.0) * total;
        let mut walked = 0.0;
        for w in self.geometry.windows(2) {
            let seg = geo::haversine_m(w[0], w[1]);
            if walked + seg >= target && seg > 0.0 {
                return lerp(w[0], w[1], (target - walked) / seg);
            }
            walked += seg;
        }
        *self.geometry.last().expect("edge geometry has >= 2 points")
    }

    /// Sub-polyline between two fractions; reversed when `from > to`.
    pub fn slice(&self, from: f64, to: f64) -> Vec<GeoPoint> {
        let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
        let total = self.polyline_m();
        let mut out = alloc::vec![self.point_at(lo)];
        let mut walked = 0.0;
        for w in self.geometry.windows(2) {
            walked += geo::haversine_m(w[0], w[1]);
            let f = if total > 0.0 { walked / total } else { 1.0 };
            if f > lo && f < hi {
                out.push(w[1]);
            }
        }
        out.push(self.point_at(hi));
        if from > to {
            out.reverse();
        }
        out
    }
}

fn lerp(a: GeoPoint, b: GeoPoint, t: f64) -> GeoPoint {
    let xy = geo::project_unchecked(a, b);
    geo::unproject_unchecked(a, LocalXY::new(xy.x * t, xy.y * t))
}

/// One traversable direction of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub edge: EdgeId,
    pub forward: bool,
    pub to: NodeId,
}

/// Input record for [`GraphBuilder::add_edge`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeSpec {
    pub key: String,
    pub from: String,
    pub to: String,
    pub length_m: Option<f64>,
    pub width_m: Option<f64>,
    pub oneway: bool,
    pub geometry: Option<Vec<GeoPoint>>,
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: Vec<Node>,
    node_keys: BTreeMap<String, NodeId>,
    edges: Vec<Edge>,
    edge_keys: BTreeSet<String>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, key: impl Into<String>, position: GeoPoint) -> Result<NodeId, GraphError> {
        let key = key.into();
        if !position.is_valid() {
            return Err(GraphError::InvalidCoordinate { node: key });
        }
        if self.node_keys.contains_key(&key) {
            return Err(GraphError::DuplicateNode(key));
        }
        let id = NodeId(self.nodes.len() as u32);
        self.node_keys.insert(key.clone(), id);
        self.nodes.push(Node { key, position });
        Ok(id)
    }

    pub fn node_id(&self, key: &str) -> Option<NodeId> {
        self.node_keys.get(key).copied()
    }

    pub fn add_edge(&mut self, spec: EdgeSpec) -> Result<EdgeId, GraphError> {
        if self.edge_keys.contains(&spec.key) {
            return Err(GraphError::DuplicateEdge(spec.key));
        }
        let lookup = |k: &str| {
            self.node_id(k).ok_or_else(|| GraphError::DanglingReference {
                edge: spec.key.clone(),
                node: k.into(),
            })
        };
        let from = lookup(&spec.from)?;
        let to = lookup(&spec.to)?;
        let (a, b) = (self.nodes[from.index()].position, self.nodes[to.index()].position);
        let geometry = match spec.geometry {
            Some(g) => {
                let ok = g.len() >= 2
                    && g.iter().all(GeoPoint::is_valid)
                    && g[0].approx_eq(&a)
                    && g[g.len() - 1].approx_eq(&b);
                if !ok {
                    return Err(GraphError::GeometryMismatch { edge: spec.key });
                }
                g
            }
            None => alloc::vec![a, b],
        };
        let geometry_m = geo::polyline_length_m(&geometry);
        let length_m = match spec.length_m {
            Some(l) => {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(GraphError::NonPositiveLength { edge: spec.key });
                }
                if (l - geometry_m).abs() > LENGTH_TOLERANCE * geometry_m {
                    return Err(GraphError::LengthMismatch {
                        edge: spec.key,
                        declared_m: l,
                        geometry_m,
                    });
                }
                l
            }
            None => geometry_m,
        };
        if length_m.is_nan() || length_m <= 0.0 {
            return Err(GraphError::NonPositiveLength { edge: spec.key });
        }
        let width_m = spec.width_m.unwrap_or(DEFAULT_WIDTH_M);
        if !(width_m > 0.0 && width_m.is_finite()) {
            return Err(GraphError::InvalidWidth { edge: spec.key });
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edge_keys.insert(spec.key.clone());
        self.edges.push(Edge {
            key: spec.key,
            from,
            to,
            length_m,
            width_m,
            oneway: spec.oneway,
            geometry,
        });
        Ok(id)
    }

    pub fn build(self) -> RoadGraph {
        let mut adjacency = alloc::vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            let edge = EdgeId(i as u32);
            adjacency[e.from.index()].push(Arc {
                edge,
                forward: true,
                to: e.to,
            });
            if !e.oneway {
                adjacency[e.to.index()].push(Arc {
                    edge,
                    forward: false,
                    to: e.from,
                });
            }
        }
        let index = SegmentGrid::build(&self.nodes, &self.edges);
        RoadGraph {
            nodes: self.nodes,
            node_keys: self.node_keys,
            edges: self.edges,
            adjacency,
            index,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoadGraph {
    nodes: Vec<Node>,
    node_keys: BTreeMap<String, NodeId>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Arc>>,
    index: SegmentGrid,
}

/// Nearest point on the network to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub edge: EdgeId,
    /// Distance along the edge polyline from its start node.
    pub offset_m: f64,
    /// `offset_m` over the polyline length, in `[0, 1]`.
    pub fraction: f64,
    pub snapped: GeoPoint,
    pub distance_m: f64,
}

impl RoadGraph {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    pub fn node_by_key(&self, key: &str) -> Option<NodeId> {
        self.node_keys.get(key).copied()
    }

    pub fn edge_by_key(&self, key: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.key == key).map(|i| EdgeId(i as u32))
    }

    /// Outgoing traversable arcs of a node.
    pub fn arcs(&self, node: NodeId) -> &[Arc] {
        &self.adjacency[node.index()]
    }

    pub fn arc_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Nearest point on any edge; ties go to the smallest edge id.
    pub fn snap(&self, p: GeoPoint) -> Result<Snap, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut best: Option<Candidate> = None;
        self.index.search(p, |edge, seg| {
            let c = self.segment_candidate(p, edge, seg);
            if best.as_ref().is_none_or(|b| c.better_than(b)) {
                best = Some(c);
            }
            best.as_ref().map(|b| b.distance_m)
        });
        Ok(self.finish_snap(best.expect("non-empty graph yields a candidate")))
    }

    /// [`RoadGraph::snap`] without the grid index, scanning every segment.
    pub fn snap_exhaustive(&self, p: GeoPoint) -> Result<Snap, GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut best: Option<Candidate> = None;
        for (i, e) in self.edges.iter().enumerate() {
            for seg in 0..e.geometry.len() - 1 {
                let c = self.segment_candidate(p, EdgeId(i as u32), seg);
                if best.as_ref().is_none_or(|b| c.better_than(b)) {
                    best = Some(c);
                }
            }
        }
        Ok(self.finish_snap(best.expect("non-empty graph yields a candidate")))
    }

    fn segment_candidate(&self, p: GeoPoint, edge: EdgeId, seg: usize) -> Candidate {
        let g = &self.edges[edge.index()].geometry;
        let a = geo::project_unchecked(p, g[seg]);
        let b = geo::project_unchecked(p, g[seg + 1]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (-(a.x * dx + a.y * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let closest = LocalXY::new(a.x + t * dx, a.y + t * dy);
        Candidate {
            distance_m: closest.norm(),
            edge,
            seg,
            t,
            snapped: geo::unproject_unchecked(p, closest),
        }
    }

    fn finish_snap(&self, c: Candidate) -> Snap {
        let e = &self.edges[c.edge.index()];
        let g = &e.geometry;
        let before: f64 = g[..=c.seg].windows(2).map(|w| geo::haversine_m(w[0], w[1])).sum();
        let offset_m = before + c.t * geo::haversine_m(g[c.seg], g[c.seg + 1]);
        let total = e.polyline_m();
        let fraction = if total > 0.0 {
            (offset_m / total).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Snap {
            edge: c.edge,
            offset_m,
            fraction,
            snapped: c.snapped,
            distance_m: c.distance_m,
        }
    }

    /// Edges with at least one segment in a grid cell overlapping the
    /// axis-aligned box of half-size `margin_m` around `p`. Always a
    /// superset of the edges passing within `margin_m` of `p`.
    pub fn edges_near(&self, p: GeoPoint, margin_m: f64) -> BTreeSet<EdgeId> {
        self.index.edges_near(p, margin_m)
    }

    /// Grid frame used by the segment index; exposed for other indices
    /// that want to share cell coordinates.
    pub fn grid_origin(&self) -> GeoPoint {
        self.index.origin
    }
}

struct Candidate {
    distance_m: f64,
    edge: EdgeId,
    seg: usize,
    t: f64,
    snapped: GeoPoint,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (self.distance_m, self.edge, self.seg) < (other.distance_m, other.edge, other.seg)
    }
}

type Cell = (i64, i64);

/// Uniform grid of [`GRID_CELL_M`] cells in an equirectangular frame
/// anchored at the first node. Each segment is registered in every cell its
/// bounding box overlaps.
#[derive(Debug, Clone)]
struct SegmentGrid {
    origin: GeoPoint,
    cells: BTreeMap<Cell, Vec<(EdgeId, usize)>>,
    min: Cell,
    max: Cell,
}

fn cell_of(xy: LocalXY) -> Cell {
    (
        math::floor(xy.x / GRID_CELL_M) as i64,
        math::floor(xy.y / GRID_CELL_M) as i64,
    )
}

impl SegmentGrid {
    fn build(nodes: &[Node], edges: &[Edge]) -> Self {
        let origin = nodes.first().map_or(GeoPoint { lat: 0.0, lon: 0.0 }, |n| n.position);
        let mut cells: BTreeMap<Cell, Vec<(EdgeId, usize)>> = BTreeMap::new();
        let (mut min, mut max) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for (i, e) in edges.iter().enumerate() {
            for (seg, w) in e.geometry.windows(2).enumerate() {
                let a = cell_of(geo::project_unchecked(origin, w[0]));
                let b = cell_of(geo::project_unchecked(origin, w[1]));
                for cx in a.0.min(b.0)..=a.0.max(b.0) {
                    for cy in a.1.min(b.1)..=a.1.max(b.1) {
                        cells.entry((cx, cy)).or_default().push((EdgeId(i as u32), seg));
                        min = (min.0.min(cx), min.1.min(cy));
                        max = (max.0.max(cx), max.1.max(cy));
                    }
                }
            }
        }
        SegmentGrid {
            origin,
            cells,
            min,
            max,
        }
    }

    // Ratio bounding query-frame distances from below by grid-frame ones.
    fn frame_ratio(&self, p: GeoPoint) -> f64 {
        let co = math::cos(self.origin.lat.to_radians());
        let cp = math::cos(p.lat.to_radians());
        let k = if co > 0.0 { (cp / co).min(1.0) } else { 1.0 };
        k * 0.999
    }

    /// Visits segments ring by ring around `p`. `visit` returns the best
    /// distance found so far; the search stops once no unvisited cell can
    /// hold anything closer.
    fn search(&self, p: GeoPoint, mut visit: impl FnMut(EdgeId, usize) -> Option<f64>) {
        if self.cells.is_empty() {
            return;
        }
        let center = cell_of(geo::project_unchecked(self.origin, p));
        let k = self.frame_ratio(p);
        let reach = [
            (center.0 - self.min.0).abs(),
            (self.max.0 - center.0).abs(),
            (center.1 - self.min.1).abs(),
            (self.max.1 - center.1).abs(),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
        let mut best: Option<f64> = None;
        let mut seen: BTreeSet<(EdgeId, usize)> = BTreeSet::new();
        for r in 0..=reach {
            for cell in ring(center, r) {
                if let Some(segs) = self.cells.get(&cell) {
                    for &(edge, seg) in segs {
                        if seen.insert((edge, seg)) {
                            best = visit(edge, seg);
                        }
                    }
                }
            }
            if let Some(b) = best {
                if b <= r as f64 * GRID_CELL_M * k {
                    return;
                }
            }
        }
    }

    fn edges_near(&self, p: GeoPoint, margin_m: f64) -> BTreeSet<EdgeId> {
        let c = geo::project_unchecked(self.origin, p);
        // widen so frame distortion cannot hide a cell
        let m = margin_m / self.frame_ratio(p);
        let lo = cell_of(LocalXY::new(c.x - m, c.y - m));
        let hi = cell_of(LocalXY::new(c.x + m, c.y + m));
        let mut out = BTreeSet::new();
        for cx in lo.0.max(self.min.0)..=hi.0.min(self.max.0) {
            for cy in lo.1.max(self.min.1)..=hi.1.min(self.max.1) {
                if let Some(segs) = self.cells.get(&(cx, cy)) {
                    out.extend(segs.iter().map(|s| s.0));
                }
            }
        }
        out
    }
}

fn ring(center: Cell, r: i64) -> impl Iterator<Item = Cell> {
    let (cx, cy) = center;
    (-r..=r).flat_map(move |dx| {
        (-r..=r)
            .filter(move |dy| dx.abs() == r || dy.abs() == r)
            .map(move |dy| (cx + dx, cy + dy))
    })
}
