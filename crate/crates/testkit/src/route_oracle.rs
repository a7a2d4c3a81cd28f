//! Exhaustive route oracle: enumerates every simple path between the snapped
//! endpoints on an explicitly split copy of the graph.

use cctv_core::exposure::ExposureMap;
use cctv_core::graph::{RoadGraph, Snap};
use cctv_core::router::{CostParams, RouteMode};

/// Whole-edge cost, written out from the mode definitions.
pub fn cost_of(length: f64, fraction: f64, cameras: usize, mode: RouteMode, p: &CostParams) -> f64 {
    match mode {
        RouteMode::Default => length,
        RouteMode::Privacy => length * (1.0 + p.lambda * fraction) + p.camera_penalty_m * cameras as f64,
        RouteMode::Safety => {
            let shaped = length * (1.0 - p.beta * fraction);
            let floor = 0.05 * length;
            if shaped > floor {
                shaped
            } else {
                floor
            }
        }
    }
}

struct Piece {
    a: usize,
    b: usize,
    cost: f64,
    oneway: bool,
}

/// Minimum route cost, or `None` if the target is unreachable.
pub fn min_cost(
    graph: &RoadGraph,
    exposure: &ExposureMap,
    mode: RouteMode,
    params: &CostParams,
    origin: &Snap,
    destination: &Snap,
) -> Option<f64> {
    let n = graph.nodes().len();
    let (s, t) = (n, n + 1);
    let mut pieces = Vec::new();
    for (i, e) in graph.edges().iter().enumerate() {
        let x = &exposure.edges[i];
        let cost = cost_of(e.length_m, x.fraction, x.camera_ids.len(), mode, params);
        let mut cuts: Vec<(f64, usize)> = Vec::new();
        if origin.edge.index() == i {
            cuts.push((origin.fraction, s));
        }
        if destination.edge.index() == i {
            let pos = cuts
                .iter()
                .position(|c| c.0 > destination.fraction)
                .unwrap_or(cuts.len());
            cuts.insert(pos, (destination.fraction, t));
        }
        if cuts.is_empty() {
            pieces.push(Piece {
                a: e.from.index(),
                b: e.to.index(),
                cost,
                oneway: e.oneway,
            });
            continue;
        }
        let mut prev = (0.0, e.from.index());
        cuts.push((1.0, e.to.index()));
        for c in cuts {
            pieces.push(Piece {
                a: prev.1,
                b: c.1,
                cost: cost * (c.0 - prev.0),
                oneway: e.oneway,
            });
            prev = c;
        }
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + 2];
    for p in &pieces {
        adj[p.a].push((p.b, p.cost));
        if !p.oneway {
            adj[p.b].push((p.a, p.cost));
        }
    }
    let mut best: Option<f64> = None;
    let mut on_path = vec![false; n + 2];
    dfs(&adj, s, t, 0.0, &mut on_path, &mut best);
    best
}

fn dfs(adj: &[Vec<(usize, f64)>], u: usize, t: usize, acc: f64, on_path: &mut [bool], best: &mut Option<f64>) {
    if u == t {
        if best.is_none_or(|b| acc < b) {
            *best = Some(acc);
        }
        return;
    }
    on_path[u] = true;
    for &(v, c) in &adj[u] {
        if !on_path[v] {
            dfs(adj, v, t, acc + c, on_path, best);
        }
    }
    on_path[u] = false;
}
