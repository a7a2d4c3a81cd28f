//! COCO-style bounding-box evaluation with the small-object bucket dropped,
//! plus cross-detector fusion.
//!
//! Matching follows the pycocotools protocol: per image and category,
//! detections are taken in descending score order (stable on insertion
//! order), truncated to the per-image cap, and each one claims the unmatched
//! ground truth with the highest IoU at or above the threshold, preferring
//! ground truths inside the active size filter. Detections matched to a
//! filtered-out ground truth, and unmatched detections whose own size falls
//! outside the filter, are ignored rather than counted.
//!
//! Precision/recall points come from a single score-descending sweep over
//! all images (ties broken by image id, then per-image order). Average
//! precision is the 101-point interpolated area by default; the all-point
//! area is available through [`Interpolation::AllPoint`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

pub const SMALL_MAX_AREA: f64 = 32.0 * 32.0;
pub const MEDIUM_MAX_AREA: f64 = 96.0 * 96.0;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// No ground truth survives the size filter; the metric is undefined.
    NoGroundTruth,
    /// F1 with `tp = fp = fn = 0`.
    Undefined,
    InvalidBox,
    InvalidScore,
    InvalidConfig(&'static str),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::NoGroundTruth => f.write_str("no ground truth in scope; metric undefined"),
            EvalError::Undefined => f.write_str("f1 undefined for tp = fp = fn = 0"),
            EvalError::InvalidBox => f.write_str("bounding box width and height must be positive and finite"),
            EvalError::InvalidScore => f.write_str("detection score must be in [0, 1]"),
            EvalError::InvalidConfig(why) => write!(f, "invalid evaluation config: {why}"),
        }
    }
}

impl core::error::Error for EvalError {}

/// Axis-aligned pixel box, top-left anchored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, EvalError> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) || w <= 0.0 || h <= 0.0 {
            return Err(EvalError::InvalidBox);
        }
        Ok(BBox { x, y, w, h })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Directed,
    Round,
}

impl Category {
    /// COCO category id used in annotation files.
    pub fn coco_id(&self) -> u64 {
        match self {
            Category::Directed => 1,
            Category::Round => 2,
        }
    }

    pub fn from_coco_id(id: u64) -> Option<Self> {
        match id {
            1 => Some(Category::Directed),
            2 => Some(Category::Round),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub image_id: u64,
    pub category: Category,
    pub bbox: BBox,
    pub score: f64,
}

impl Detection {
    pub fn new(image_id: u64, category: Category, bbox: BBox, score: f64) -> Result<Self, EvalError> {
        if !(0.0..=1.0).contains(&score) {
            return Err(EvalError::InvalidScore);
        }
        Ok(Detection {
            image_id,
            category,
            bbox,
            score,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthBox {
    pub image_id: u64,
    pub category: Category,
    pub bbox: BBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeBucket {
    Small,
    Medium,
    Large,
}

/// Set of size buckets in scope for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeFilter {
    pub small: bool,
    pub medium: bool,
    pub large: bool,
}

impl SizeFilter {
    pub const ALL: SizeFilter = SizeFilter {
        small: true,
        medium: true,
        large: true,
    };
    pub const MEDIUM_LARGE: SizeFilter = SizeFilter {
        small: false,
        medium: true,
        large: true,
    };

    pub fn only(bucket: SizeBucket) -> Self {
        SizeFilter {
            small: bucket == SizeBucket::Small,
            medium: bucket == SizeBucket::Medium,
            large: bucket == SizeBucket::Large,
        }
    }

    pub fn contains(&self, bucket: SizeBucket) -> bool {
        match bucket {
            SizeBucket::Small => self.small,
            SizeBucket::Medium => self.medium,
            SizeBucket::Large => self.large,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.small || self.medium || self.large)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    pub max_dets_per_image: usize,
    pub size_filter: SizeFilter,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            iou_thresholds: (0..10).map(|i| 0.5 + 0.05 * i as f64).collect(),
            max_dets_per_image: 100,
            size_filter: SizeFilter::MEDIUM_LARGE,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.iou_thresholds.is_empty() {
            return Err(EvalError::InvalidConfig("iou_thresholds is empty"));
        }
        if self.iou_thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(EvalError::InvalidConfig("iou thresholds must lie in [0, 1]"));
        }
        if self.iou_thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EvalError::InvalidConfig("iou thresholds must be strictly increasing"));
        }
        if self.max_dets_per_image == 0 {
            return Err(EvalError::InvalidConfig("max_dets_per_image must be positive"));
        }
        if self.size_filter.is_empty() {
            return Err(EvalError::InvalidConfig("size_filter is empty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Metrics are `None` when undefined (no ground truth in scope).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
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
    /// Pooled counts at IoU 0.5.
    pub counts: MatchCounts,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// `(detection index, ground-truth index)` into the input slices.
    pub pairs: Vec<(usize, usize)>,
    /// Indexed like the input detections; truncated detections are `false`.
    pub det_is_tp: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Mean of the precision envelope at recall 0.00, 0.01, ..., 1.00.
    Coco101,
    /// Exact area under the precision envelope.
    AllPoint,
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let iw = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let ih = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).min(1.0)
    }
}

/// `< 32²` small, `32²..=96²` medium, `> 96²` large.
pub fn size_bucket(b: &BBox) -> SizeBucket {
    let area = b.area();
    if area < SMALL_MAX_AREA {
        SizeBucket::Small
    } else if area <= MEDIUM_MAX_AREA {
        SizeBucket::Medium
    } else {
        SizeBucket::Large
    }
}

pub fn f1_score(tp: usize, fp: usize, fn_: usize) -> Result<f64, EvalError> {
    if tp == 0 && fp == 0 && fn_ == 0 {
        return Err(EvalError::Undefined);
    }
    let tp2 = 2.0 * tp as f64;
    Ok(tp2 / (tp2 + fp as f64 + fn_ as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Tp,
    Fp,
    Ignored,
}

/// Categories in scope for one evaluation pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    /// Both classes merged into one camera class.
    Pooled,
    /// Both classes, each matched only against its own ground truth.
    PerCategory,
    Only(Category),
}

impl Scope {
    fn admits(&self, c: Category) -> bool {
        match self {
            Scope::Pooled | Scope::PerCategory => true,
            Scope::Only(k) => *k == c,
        }
    }

    fn key(&self, c: Category) -> Option<Category> {
        match self {
            Scope::Pooled => None,
            Scope::PerCategory | Scope::Only(_) => Some(c),
        }
    }
}

struct ImageMatch {
    /// Kept detection indices in score order with their outcome.
    outcomes: Vec<(usize, Outcome)>,
    /// Matched (detection, ground truth) pairs, both as input indices.
    pairs: Vec<(usize, usize)>,
    /// Non-ignored ground truths.
    npig: usize,
}

fn by_score_desc(dets: &[Detection]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| dets[b].score.partial_cmp(&dets[a].score).unwrap_or(Ordering::Equal)
}

// Matches one image/category cell. `det_idx` and `gt_idx` index the full
// input slices and are in insertion order.
fn match_cell(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    det_idx: &[usize],
    gt_idx: &[usize],
    iou_thr: f64,
    max_dets: usize,
    filter: Option<SizeFilter>,
) -> ImageMatch {
    let mut order: Vec<usize> = det_idx.to_vec();
    order.sort_by(by_score_desc(dets));
    order.truncate(max_dets);

    let gt_ignored: Vec<bool> = gt_idx
        .iter()
        .map(|&g| filter.is_some_and(|f| !f.contains(size_bucket(&gts[g].bbox))))
        .collect();
    let npig = gt_ignored.iter().filter(|ig| !**ig).count();
    let mut gt_taken = alloc::vec![false; gt_idx.len()];

    let mut outcomes = Vec::with_capacity(order.len());
    let mut pairs = Vec::new();
    for &d in &order {
        let mut best: Option<(usize, f64, bool)> = None;
        for (k, &g) in gt_idx.iter().enumerate() {
            if gt_taken[k] {
                continue;
            }
            let v = iou(&dets[d].bbox, &gts[g].bbox);
            if v < iou_thr {
                continue;
            }
            let ignored = gt_ignored[k];
            let better = match best {
                None => true,
                // in-scope ground truth always wins over an ignored one
                Some((_, bv, bign)) => match (bign, ignored) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => v > bv,
                },
            };
            if better {
                best = Some((k, v, ignored));
            }
        }
        let outcome = match best {
            Some((k, _, ignored)) => {
                gt_taken[k] = true;
                pairs.push((d, gt_idx[k]));
                if ignored {
                    Outcome::Ignored
                } else {
                    Outcome::Tp
                }
            }
            None => {
                let out_of_scope = filter.is_some_and(|f| !f.contains(size_bucket(&dets[d].bbox)));
                if out_of_scope {
                    Outcome::Ignored
                } else {
                    Outcome::Fp
                }
            }
        };
        outcomes.push((d, outcome));
    }
    ImageMatch { outcomes, pairs, npig }
}

type CellKey = (u64, Option<Category>);

fn cells(dets: &[Detection], gts: &[GroundTruthBox], scope: Scope) -> BTreeMap<CellKey, (Vec<usize>, Vec<usize>)> {
    let mut map: BTreeMap<CellKey, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, d) in dets.iter().enumerate().filter(|(_, d)| scope.admits(d.category)) {
        map.entry((d.image_id, scope.key(d.category))).or_default().0.push(i);
    }
    for (i, g) in gts.iter().enumerate().filter(|(_, g)| scope.admits(g.category)) {
        map.entry((g.image_id, scope.key(g.category))).or_default().1.push(i);
    }
    map
}

/// Score-ordered TP/FP sweep across all images plus the in-scope GT count.
struct Sweep {
    /// `true` for TP, `false` for FP, ignored detections removed.
    hits: Vec<bool>,
    npig: usize,
}

fn sweep(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    scope: Scope,
    iou_thr: f64,
    max_dets: usize,
    filter: SizeFilter,
) -> Sweep {
    let mut scored: Vec<(f64, u64, usize, bool)> = Vec::new();
    let mut npig = 0;
    for ((image, _), (det_idx, gt_idx)) in cells(dets, gts, scope) {
        let m = match_cell(dets, gts, &det_idx, &gt_idx, iou_thr, max_dets, Some(filter));
        npig += m.npig;
        for (d, o) in m.outcomes {
            match o {
                Outcome::Tp => scored.push((dets[d].score, image, d, true)),
                Outcome::Fp => scored.push((dets[d].score, image, d, false)),
                Outcome::Ignored => {}
            }
        }
    }
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    Sweep {
        hits: scored.into_iter().map(|s| s.3).collect(),
        npig,
    }
}

impl Sweep {
    fn pr_curve(&self) -> (Vec<f64>, Vec<f64>) {
        let mut recall = Vec::with_capacity(self.hits.len());
        let mut precision = Vec::with_capacity(self.hits.len());
        let (mut tp, mut fp) = (0usize, 0usize);
        for &hit in &self.hits {
            if hit {
                tp += 1;
            } else {
                fp += 1;
            }
            recall.push(tp as f64 / self.npig as f64);
            precision.push(tp as f64 / (tp + fp) as f64);
        }
        (recall, precision)
    }

    fn average_precision(&self, interp: Interpolation) -> Result<f64, EvalError> {
        if self.npig == 0 {
            return Err(EvalError::NoGroundTruth);
        }
        let (recall, mut precision) = self.pr_curve();
        for i in (0..precision.len().saturating_sub(1)).rev() {
            if precision[i + 1] > precision[i] {
                precision[i] = precision[i + 1];
            }
        }
        let ap = match interp {
            Interpolation::Coco101 => {
                let mut sum = 0.0;
                let mut k = 0;
                for i in 0..=100 {
                    let r = i as f64 / 100.0;
                    while k < recall.len() && recall[k] < r {
                        k += 1;
                    }
                    if k < recall.len() {
                        sum += precision[k];
                    }
                }
                sum / 101.0
            }
            Interpolation::AllPoint => {
                let mut area = 0.0;
                let mut prev = 0.0;
                for (r, p) in recall.iter().zip(&precision) {
                    area += (r - prev) * p;
                    prev = *r;
                }
                area
            }
        };
        Ok(ap)
    }

    fn final_recall(&self) -> Result<f64, EvalError> {
        if self.npig == 0 {
            return Err(EvalError::NoGroundTruth);
        }
        let tp = self.hits.iter().filter(|h| **h).count();
        Ok(tp as f64 / self.npig as f64)
    }

    fn counts(&self) -> MatchCounts {
        let tp = self.hits.iter().filter(|h| **h).count();
        MatchCounts {
            tp,
            fp: self.hits.len() - tp,
            fn_: self.npig - tp,
        }
    }
}

/// Greedy matching of one image's detections. Categories are matched
/// separately and truncation to `max_dets` applies per category.
pub fn match_greedy(dets: &[Detection], gts: &[GroundTruthBox], iou_thr: f64, max_dets: usize) -> MatchResult {
    let mut result = MatchResult {
        det_is_tp: alloc::vec![false; dets.len()],
        ..MatchResult::default()
    };
    let mut npig = 0;
    for (det_idx, gt_idx) in cells(dets, gts, Scope::PerCategory).into_values() {
        let m = match_cell(dets, gts, &det_idx, &gt_idx, iou_thr, max_dets, None);
        npig += m.npig;
        for (d, o) in m.outcomes {
            match o {
                Outcome::Tp => {
                    result.tp += 1;
                    result.det_is_tp[d] = true;
                }
                Outcome::Fp => result.fp += 1,
                Outcome::Ignored => {}
            }
        }
        result.pairs.extend(m.pairs);
    }
    result.fn_ = npig - result.tp;
    result.pairs.sort_unstable();
    result
}

/// Single-class AP at one IoU threshold, 101-point interpolated.
///
/// Detections only match ground truth of their own category, but all
/// detections share one precision/recall sweep. Pass single-category input
/// for per-class AP.
pub fn average_precision(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    iou_thr: f64,
    config: &EvalConfig,
) -> Result<f64, EvalError> {
    average_precision_with(dets, gts, iou_thr, config, Interpolation::Coco101)
}

pub fn average_precision_with(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    iou_thr: f64,
    config: &EvalConfig,
    interp: Interpolation,
) -> Result<f64, EvalError> {
    sweep(
        dets,
        gts,
        Scope::PerCategory,
        iou_thr,
        config.max_dets_per_image,
        config.size_filter,
    )
    .average_precision(interp)
}

/// Recall after the per-image detection cap, at one IoU threshold.
pub fn recall_at(
    dets: &[Detection],
    gts: &[GroundTruthBox],
    iou_thr: f64,
    config: &EvalConfig,
) -> Result<f64, EvalError> {
    sweep(
        dets,
        gts,
        Scope::PerCategory,
        iou_thr,
        config.max_dets_per_image,
        config.size_filter,
    )
    .final_recall()
}

fn mean_defined(values: impl Iterator<Item = Result<f64, EvalError>>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values.flatten() {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Full report. Pooled metrics merge both camera classes into one class;
/// `ap50_directed`/`ap50_round` are computed per class.
pub fn evaluate(dets: &[Detection], gts: &[GroundTruthBox], config: &EvalConfig) -> Result<EvalReport, EvalError> {
    config.validate()?;
    let max = config.max_dets_per_image;
    let filter = config.size_filter;
    let pooled = |t: f64, f: SizeFilter| sweep(dets, gts, Scope::Pooled, t, max, f);

    let over_thresholds = |f: SizeFilter, metric: fn(&Sweep) -> Result<f64, EvalError>| {
        mean_defined(config.iou_thresholds.iter().map(|&t| metric(&pooled(t, f))))
    };
    let ap = |s: &Sweep| s.average_precision(Interpolation::Coco101);
    let ar = |s: &Sweep| s.final_recall();

    let at50 = pooled(0.5, filter);
    let counts = at50.counts();
    let per_class = |c: Category| {
        sweep(dets, gts, Scope::Only(c), 0.5, max, filter)
            .average_precision(Interpolation::Coco101)
            .ok()
    };

    Ok(EvalReport {
        ap50: ap(&at50).ok(),
        ap50_95: over_thresholds(filter, ap),
        ap_medium: over_thresholds(SizeFilter::only(SizeBucket::Medium), ap),
        ap_large: over_thresholds(SizeFilter::only(SizeBucket::Large), ap),
        ar100: over_thresholds(filter, ar),
        ar_medium: over_thresholds(SizeFilter::only(SizeBucket::Medium), ar),
        ar_large: over_thresholds(SizeFilter::only(SizeBucket::Large), ar),
        f1_at_50: f1_score(counts.tp, counts.fp, counts.fn_).ok(),
        ap50_directed: per_class(Category::Directed),
        ap50_round: per_class(Category::Round),
        counts,
    })
}

/// Merges two detectors' outputs.
///
/// Per image and category, both sets are pooled and visited by descending
/// score (ties: first set, then insertion order). A detection is dropped
/// when it overlaps an already kept detection from the *other* set with
/// IoU at or above `dedup_iou_thr`; detections from the same set never
/// suppress each other, so `fuse(d, d)` and `fuse(d, [])` both return `d`.
pub fn fuse(dets_a: &[Detection], dets_b: &[Detection], dedup_iou_thr: f64) -> Vec<Detection> {
    type Tagged<'a> = (u8, usize, &'a Detection);
    let mut groups: BTreeMap<(u64, Category), Vec<Tagged>> = BTreeMap::new();
    for (src, set) in [(0u8, dets_a), (1u8, dets_b)] {
        for (i, d) in set.iter().enumerate() {
            groups.entry((d.image_id, d.category)).or_default().push((src, i, d));
        }
    }
    let mut out = Vec::new();
    for mut group in groups.into_values() {
        group.sort_by(|a, b| {
            b.2.score
                .partial_cmp(&a.2.score)
                .unwrap_or(Ordering::Equal)
                .then(a.0.cmp(&b.0))
                .then(a.1.cmp(&b.1))
        });
        let mut kept: Vec<(u8, &Detection)> = Vec::new();
        for (src, _, d) in group {
            let suppressed = kept
                .iter()
                .any(|(ksrc, k)| *ksrc != src && iou(&k.bbox, &d.bbox) >= dedup_iou_thr);
            if !suppressed {
                kept.push((src, d));
            }
        }
        out.extend(kept.into_iter().map(|(_, d)| d.clone()));
    }
    out
}
