//! Default, privacy-first and safety-first routing.
//!
//! All three modes share one label-setting shortest-path search; they only
//! differ in how an edge's exposure shapes its cost:
//!
//! * default: `length`
//! * privacy: `length * (1 + lambda * fraction) + penalty * cameras`
//! * safety: `max(length * (1 - beta * fraction), 0.05 * length)`
//!
//! Endpoints are snapped onto the network and split their edges into
//! pieces for the duration of the query. A piece covering a share `s` of an
//! edge costs `s` times the edge cost and has `s` times its length.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::exposure::{EdgeExposure, ExposureMap};
use crate::geo::GeoPoint;
use crate::graph::{Edge, EdgeId, GraphError, RoadGraph, Snap};

pub const DEFAULT_LAMBDA: f64 = 10.0;
pub const DEFAULT_BETA: f64 = 0.7;
pub const DEFAULT_CAMERA_PENALTY_M: f64 = 50.0;
pub const MAX_BETA: f64 = 0.9;
/// Safety-mode costs never drop below this share of the edge length.
pub const SAFETY_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteMode {
    Default,
    Privacy,
    Safety,
}

impl RouteMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RouteMode::Default => "default",
            RouteMode::Privacy => "privacy",
            RouteMode::Safety => "safety",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "default" => Some(RouteMode::Default),
            "privacy" => Some(RouteMode::Privacy),
            "safety" => Some(RouteMode::Safety),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteError {
    InvalidRequest { field: &'static str, reason: &'static str },
    SnapFailure(GraphError),
    NoPath,
}

impl fmt::Display for RouteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RouteError::InvalidRequest { field, reason } => write!(f, "invalid `{field}`: {reason}"),
            RouteError::SnapFailure(e) => write!(f, "cannot snap endpoint: {e}"),
            RouteError::NoPath => f.write_str("no path between the snapped endpoints"),
        }
    }
}

impl core::error::Error for RouteError {}

/// Cost-shaping parameters shared by the exposure-aware modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub lambda: f64,
    pub beta: f64,
    pub camera_penalty_m: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            lambda: DEFAULT_LAMBDA,
            beta: DEFAULT_BETA,
            camera_penalty_m: DEFAULT_CAMERA_PENALTY_M,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), RouteError> {
        let bad = |field, reason| Err(RouteError::InvalidRequest { field, reason });
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda", "must be a finite value >= 0");
        }
        if !(0.0..=MAX_BETA).contains(&self.beta) {
            return bad("beta", "must be in [0, 0.9]");
        }
        if !(self.camera_penalty_m >= 0.0 && self.camera_penalty_m.is_finite()) {
            return bad("camera_penalty_m", "must be a finite value >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteRequest {
    pub from: GeoPoint,
    pub to: GeoPoint,
    pub mode: RouteMode,
    pub params: CostParams,
}

impl RouteRequest {
    pub fn new(from: GeoPoint, to: GeoPoint, mode: RouteMode) -> Self {
        RouteRequest {
            from,
            to,
            mode,
            params: CostParams::default(),
        }
    }

    pub fn with_params(mut self, params: CostParams) -> Self {
        self.params = params;
        self
    }
}

/// A traversed share of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteLeg {
    pub edge: EdgeId,
    /// Position along the edge where the leg starts and ends, as fractions
    /// of the edge; `start > end` means the edge is walked backwards.
    pub start: f64,
    pub end: f64,
    pub length_m: f64,
    pub cost: f64,
}

impl RouteLeg {
    pub fn forward(&self) -> bool {
        self.start <= self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub legs: Vec<RouteLeg>,
    pub geometry: Vec<GeoPoint>,
    pub total_m: f64,
    pub total_cost: f64,
    pub origin: Snap,
    pub destination: Snap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExposureReport {
    pub distinct_cameras: usize,
    pub exposed_m: f64,
    pub total_m: f64,
    pub exposure_share: f64,
    /// Route length over the default-mode route length for the same endpoints.
    pub detour_ratio: f64,
}

/// Meter-equivalent traversal cost of a whole edge.
pub fn edge_cost(edge: &Edge, exposure: &EdgeExposure, mode: RouteMode, params: &CostParams) -> f64 {
    let len = edge.length_m;
    match mode {
        RouteMode::Default => len,
        RouteMode::Privacy => {
            len * (1.0 + params.lambda * exposure.fraction) + params.camera_penalty_m * exposure.camera_ids.len() as f64
        }
        RouteMode::Safety => (len * (1.0 - params.beta * exposure.fraction)).max(SAFETY_FLOOR * len),
    }
}

#[derive(Debug, Clone, Copy)]
struct Step {
    to: usize,
    leg: RouteLeg,
}

/// The graph with the snapped endpoints spliced in as two extra nodes.
struct Overlay<'a> {
    graph: &'a RoadGraph,
    costs: Vec<f64>,
    split: BTreeSet<EdgeId>,
    extra: BTreeMap<usize, Vec<Step>>,
    source: usize,
    target: usize,
}

impl<'a> Overlay<'a> {
    fn new(graph: &'a RoadGraph, costs: Vec<f64>, origin: &Snap, destination: &Snap) -> Self {
        let n = graph.nodes().len();
        let (source, target) = (n, n + 1);
        let mut cuts: BTreeMap<EdgeId, Vec<(f64, usize)>> = BTreeMap::new();
        cuts.entry(origin.edge).or_default().push((origin.fraction, source));
        cuts.entry(destination.edge)
            .or_default()
            .push((destination.fraction, target));
        let mut overlay = Overlay {
            graph,
            costs,
            split: cuts.keys().copied().collect(),
            extra: BTreeMap::new(),
            source,
            target,
        };
        for (edge, mut points) in cuts {
            // stable: the source stays ahead of the target on ties
            points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
            let e = graph.edge(edge);
            let mut chain = alloc::vec![(0.0, e.from.index())];
            chain.extend(points);
            chain.push((1.0, e.to.index()));
            for w in chain.windows(2) {
                let ((fa, a), (fb, b)) = (w[0], w[1]);
                overlay.add_piece(edge, a, fa, b, fb);
            }
        }
        overlay
    }

    fn add_piece(&mut self, edge: EdgeId, a: usize, fa: f64, b: usize, fb: f64) {
        let e = self.graph.edge(edge);
        let share = fb - fa;
        let leg = |start, end| RouteLeg {
            edge,
            start,
            end,
            length_m: e.length_m * share,
            cost: self.costs[edge.index()] * share,
        };
        let fwd = Step {
            to: b,
            leg: leg(fa, fb),
        };
        let back = (!e.oneway).then(|| Step {
            to: a,
            leg: leg(fb, fa),
        });
        self.extra.entry(a).or_default().push(fwd);
        if let Some(back) = back {
            self.extra.entry(b).or_default().push(back);
        }
    }

    fn for_each_step(&self, u: usize, mut f: impl FnMut(Step)) {
        if u < self.graph.nodes().len() {
            for arc in self.graph.arcs(crate::graph::NodeId(u as u32)) {
                if self.split.contains(&arc.edge) {
                    continue;
                }
                let e = self.graph.edge(arc.edge);
                let (start, end) = if arc.forward { (0.0, 1.0) } else { (1.0, 0.0) };
                f(Step {
                    to: arc.to.index(),
                    leg: RouteLeg {
                        edge: arc.edge,
                        start,
                        end,
                        length_m: e.length_m,
                        cost: self.costs[arc.edge.index()],
                    },
                });
            }
        }
        if let Some(steps) = self.extra.get(&u) {
            steps.iter().copied().for_each(f);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Label {
    cost: f64,
    node: usize,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then node id for determinism
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost route for one mode, without the exposure report.
pub fn shortest_route(graph: &RoadGraph, exposure: &ExposureMap, req: &RouteRequest) -> Result<Route, RouteError> {
    req.params.validate()?;
    let origin = graph.snap(req.from).map_err(RouteError::SnapFailure)?;
    let destination = graph.snap(req.to).map_err(RouteError::SnapFailure)?;
    let costs = graph
        .edges()
        .iter()
        .zip(&exposure.edges)
        .map(|(e, x)| edge_cost(e, x, req.mode, &req.params))
        .collect();
    let overlay = Overlay::new(graph, costs, &origin, &destination);

    let n = graph.nodes().len() + 2;
    let mut dist = alloc::vec![f64::INFINITY; n];
    let mut settled = alloc::vec![false; n];
    let mut pred: Vec<Option<(usize, RouteLeg)>> = alloc::vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[overlay.source] = 0.0;
    heap.push(Label {
        cost: 0.0,
        node: overlay.source,
    });
    while let Some(Label { cost, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if node == overlay.target {
            break;
        }
        overlay.for_each_step(node, |step| {
            let next = cost + step.leg.cost;
            if !settled[step.to] && next < dist[step.to] {
                dist[step.to] = next;
                pred[step.to] = Some((node, step.leg));
                heap.push(Label {
                    cost: next,
                    node: step.to,
                });
            }
        });
    }
    if !settled[overlay.target] {
        return Err(RouteError::NoPath);
    }

    let mut legs = Vec::new();
    let mut at = overlay.target;
    while let Some((prev, leg)) = pred[at] {
        if leg.start != leg.end || leg.cost != 0.0 {
            legs.push(leg);
        }
        at = prev;
    }
    legs.reverse();

    let total_m = legs.iter().map(|l| l.length_m).sum();
    let mut geometry: Vec<GeoPoint> = Vec::new();
    for leg in &legs {
        for p in graph.edge(leg.edge).slice(leg.start, leg.end) {
            if geometry.last() != Some(&p) {
                geometry.push(p);
            }
        }
    }
    if geometry.len() < 2 {
        // degenerate route: keep a valid two-point line
        geometry.clear();
        geometry.push(origin.snapped);
        geometry.push(destination.snapped);
    }
    Ok(Route {
        legs,
        geometry,
        total_m,
        total_cost: dist[overlay.target],
        origin,
        destination,
    })
}

/// Exposure statistics of a route. `detour_ratio` is left at 1; [`route`]
/// fills it in against the default-mode route.
pub fn exposure_report(route: &Route, exposure: &ExposureMap) -> ExposureReport {
    let mut cameras: BTreeSet<&String> = BTreeSet::new();
    let mut exposed_m = 0.0;
    for leg in &route.legs {
        let x = exposure.get(leg.edge);
        exposed_m += x.fraction * leg.length_m;
        if leg.length_m > 0.0 {
            cameras.extend(x.camera_ids.iter());
        }
    }
    let total_m = route.total_m;
    ExposureReport {
        distinct_cameras: cameras.len(),
        exposed_m,
        total_m,
        exposure_share: if total_m > 0.0 { exposed_m / total_m } else { 0.0 },
        detour_ratio: 1.0,
    }
}

/// Route in the requested mode plus its exposure report, with the detour
/// ratio measured against a default-mode run between the same endpoints.
pub fn route(
    graph: &RoadGraph,
    exposure: &ExposureMap,
    req: &RouteRequest,
) -> Result<(Route, ExposureReport), RouteError> {
    let chosen = shortest_route(graph, exposure, req)?;
    let baseline_m = if req.mode == RouteMode::Default {
        chosen.total_m
    } else {
        let default_req = RouteRequest {
            mode: RouteMode::Default,
            ..*req
        };
        shortest_route(graph, exposure, &default_req)?.total_m
    };
    let mut report = exposure_report(&chosen, exposure);
    report.detour_ratio = if baseline_m > 0.0 {
        chosen.total_m / baseline_m
    } else {
        1.0
    };
    Ok((chosen, report))
}
