//! Brute-force precision/recall oracle for the detection metrics.
//!
//! Matching is re-derived from the protocol (score order, per-image cap,
//! best-IoU claim preferring in-scope ground truth) and AP is integrated by
//! scanning every precision/recall point for every recall level, with no
//! envelope precomputation.

use cctv_core::eval::{BBox, Category, Detection, EvalConfig, GroundTruthBox, SizeFilter};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Pooled,
    PerCategory,
    Only(Category),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integration {
    /// Max precision at recall >= r for r in {0, 0.01, ..., 1}, averaged.
    Points101,
    /// Area under the running-max precision curve.
    Area,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub ap50: Option<f64>,
    pub ap50_95: Option<f64>,
    pub ap_medium: Option<f64>,
    pub ap_large: Option<f64>,
    pub ar100: Option<f64>,
    pub ar_medium: Option<f64>,
    pub ar_large: Option<f64>,
    pub f1_at_50: Option<f64>,
    pub ap50_directed: Option<f64>,
    pub ap50_round: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

fn overlap(a: &BBox, b: &BBox) -> f64 {
    let (ax2, ay2, bx2, by2) = (a.x + a.w, a.y + a.h, b.x + b.w, b.y + b.h);
    let w = ax2.min(bx2) - a.x.max(b.x);
    let h = ay2.min(by2) - a.y.max(b.y);
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let inter = w * h;
    inter / (a.w * a.h + b.w * b.h - inter)
}

fn in_filter(b: &BBox, f: SizeFilter) -> bool {
    let area = b.w * b.h;
    if area < 1024.0 {
        f.small
    } else if area <= 9216.0 {
        f.medium
    } else {
        f.large
    }
}

fn key(scope: Scope, c: Category) -> Option<Option<Category>> {
    match scope {
        Scope::Pooled => Some(None),
        Scope::PerCategory => Some(Some(c)),
        Scope::Only(k) if k == c => Some(Some(c)),
        Scope::Only(_) => None,
    }
}

/// `(score, image, det index, is_tp)` for every counted detection, plus the
/// number of in-scope ground truths.
pub fn outcomes(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    scope: Scope,
    thr: f64,
    max_dets: usize,
    filter: SizeFilter,
) -> (Vec<(f64, u64, usize, bool)>, usize) {
    let mut cells = BTreeSet::new();
    for d in dets {
        if let Some(k) = key(scope, d.category) {
            cells.insert((d.image_id, k));
        }
    }
    for g in gts {
        if let Some(k) = key(scope, g.category) {
            cells.insert((g.image_id, k));
        }
    }
    let mut out = Vec::new();
    let mut npig = 0;
    for (image, k) in cells {
        let mut ds: Vec<usize> = (0..dets.len())
            .filter(|&i| dets[i].image_id == image && key(scope, dets[i].category) == Some(k))
            .collect();
        ds.sort_by(|&a, &b| dets[b].score.partial_cmp(&dets[a].score).unwrap().then(a.cmp(&b)));
        ds.truncate(max_dets);
        let gs: Vec<usize> = (0..gts.len())
            .filter(|&i| gts[i].image_id == image && key(scope, gts[i].category) == Some(k))
            .collect();
        let ignored: Vec<bool> = gs.iter().map(|&g| !in_filter(&gts[g].bbox, filter)).collect();
        npig += ignored.iter().filter(|x| !**x).count();
        let mut used = vec![false; gs.len()];
        for &d in &ds {
            let pick = |want_ignored: bool, used: &Vec<bool>| {
                let mut best: Option<(usize, f64)> = None;
                for (j, &g) in gs.iter().enumerate() {
                    if used[j] || ignored[j] != want_ignored {
                        continue;
                    }
                    let v = overlap(&dets[d].bbox, &gts[g].bbox);
                    if v >= thr && best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((j, v));
                    }
                }
                best.map(|b| b.0)
            };
            let chosen = pick(false, &used)
                .map(|j| (j, false))
                .or_else(|| pick(true, &used).map(|j| (j, true)));
            match chosen {
                Some((j, was_ignored)) => {
                    used[j] = true;
                    if !was_ignored {
                        out.push((dets[d].score, image, d, true));
                    }
                }
                None => {
                    if in_filter(&dets[d].bbox, filter) {
                        out.push((dets[d].score, image, d, false));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    (out, npig)
}

/// Precision/recall after each counted detection.
fn pr_points(hits: &[bool], npig: usize) -> Vec<(f64, f64)> {
    (1..=hits.len())
        .map(|k| {
            let tp = hits[..k].iter().filter(|h| **h).count();
            (tp as f64 / npig as f64, tp as f64 / k as f64)
        })
        .collect()
}

pub fn average_precision(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    scope: Scope,
    thr: f64,
    max_dets: usize,
    filter: SizeFilter,
    integration: Integration,
) -> Option<f64> {
    let (o, npig) = outcomes(dets, gts, scope, thr, max_dets, filter);
    if npig == 0 {
        return None;
    }
    let hits: Vec<bool> = o.iter().map(|x| x.3).collect();
    let pts = pr_points(&hits, npig);
    match integration {
        Integration::Points101 => {
            let mut sum = 0.0;
            for i in 0..=100 {
                let r = i as f64 / 100.0;
                let best = pts.iter().filter(|p| p.0 >= r).map(|p| p.1).fold(0.0, f64::max);
                sum += best;
            }
            Some(sum / 101.0)
        }
        Integration::Area => {
            let mut area = 0.0;
            let mut prev_r = 0.0;
            for k in 0..pts.len() {
                let envelope = pts[k..].iter().map(|p| p.1).fold(0.0, f64::max);
                area += (pts[k].0 - prev_r) * envelope;
                prev_r = pts[k].0;
            }
            Some(area)
        }
    }
}

pub fn recall(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    scope: Scope,
    thr: f64,
    max_dets: usize,
    filter: SizeFilter,
) -> Option<f64> {
    let (o, npig) = outcomes(dets, gts, scope, thr, max_dets, filter);
    (npig > 0).then(|| o.iter().filter(|x| x.3).count() as f64 / npig as f64)
}

fn mean(vals: Vec<Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = vals.into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

pub fn evaluate(dets: &[Detection], gts: &[GroundTruthBox], cfg: &EvalConfig) -> OracleReport {
    let max = cfg.max_dets_per_image;
    let f = cfg.size_filter;
    let medium = SizeFilter {
        small: false,
        medium: true,
        large: false,
    };
    let large = SizeFilter {
        small: false,
        medium: false,
        large: true,
    };
    let ap = |scope, t, filt| average_precision(dets, gts, scope, t, max, filt, Integration::Points101);
    let over = |filt, use_recall: bool| {
        mean(
            cfg.iou_thresholds
                .iter()
                .map(|&t| {
                    if use_recall {
                        recall(dets, gts, Scope::Pooled, t, max, filt)
                    } else {
                        ap(Scope::Pooled, t, filt)
                    }
                })
                .collect(),
        )
    };
    let (o, npig) = outcomes(dets, gts, Scope::Pooled, 0.5, max, f);
    let tp = o.iter().filter(|x| x.3).count();
    let fp = o.len() - tp;
    let fn_ = npig - tp;
    let f1 = (tp + fp + fn_ > 0).then(|| 2.0 * tp as f64 / (2.0 * tp as f64 + fp as f64 + fn_ as f64));
    OracleReport {
        ap50: ap(Scope::Pooled, 0.5, f),
        ap50_95: over(f, false),
        ap_medium: over(medium, false),
        ap_large: over(large, false),
        ar100: over(f, true),
        ar_medium: over(medium, true),
        ar_large: over(large, true),
        f1_at_50: f1,
        ap50_directed: ap(Scope::Only(Category::Directed), 0.5, f),
        ap50_round: ap(Scope::Only(Category::Round), 0.5, f),
        tp,
        fp,
        fn_,
    }
}

/// Field-by-field comparison; returns the first mismatch.
pub fn compare(report: &cctv_core::EvalReport, oracle: &OracleReport, tol: f64) -> Result<(), String> {
    let pairs = [
        ("ap50", report.ap50, oracle.ap50),
        ("ap50_95", report.ap50_95, oracle.ap50_95),
        ("ap_medium", report.ap_medium, oracle.ap_medium),
        ("ap_large", report.ap_large, oracle.ap_large),
        ("ar100", report.ar100, oracle.ar100),
        ("ar_medium", report.ar_medium, oracle.ar_medium),
        ("ar_large", report.ar_large, oracle.ar_large),
        ("f1_at_50", report.f1_at_50, oracle.f1_at_50),
        ("ap50_directed", report.ap50_directed, oracle.ap50_directed),
        ("ap50_round", report.ap50_round, oracle.ap50_round),
    ];
    for (name, got, want) in pairs {
        let ok = match (got, want) {
            (None, None) => true,
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            _ => false,
        };
        if !ok {
            return Err(format!("{name}: got {got:?}, oracle {want:?}"));
        }
    }
    let c = report.counts;
    if (c.tp, c.fp, c.fn_) != (oracle.tp, oracle.fp, oracle.fn_) {
        return Err(format!(
            "counts: got {:?}, oracle {:?}",
            (c.tp, c.fp, c.fn_),
            (oracle.tp, oracle.fp, oracle.fn_)
        ));
    }
    Ok(())
}
