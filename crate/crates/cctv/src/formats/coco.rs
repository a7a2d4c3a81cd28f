//! COCO ground-truth and results files. Category 1 is `directed`, 2 is
//! `round`.

use std::collections::BTreeSet;

use cctv_core::eval::{BBox, Category, Detection, GroundTruthBox};
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Deserialize)]
struct GtFile {
    images: Vec<Image>,
    annotations: Vec<Annotation>,
}

#[derive(Deserialize)]
struct Image {
    id: u64,
}

#[derive(Deserialize)]
struct Annotation {
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
    #[serde(default)]
    iscrowd: u8,
}

#[derive(Deserialize)]
struct ResultRow {
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
    score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub image_ids: BTreeSet<u64>,
    pub boxes: Vec<GroundTruthBox>,
}

fn category(id: u64, field: &str) -> Result<Category> {
    Category::from_coco_id(id).ok_or_else(|| Error::invalid(field, format!("unknown category_id {id}")))
}

fn bbox(b: [f64; 4], field: &str) -> Result<BBox> {
    BBox::new(b[0], b[1], b[2], b[3]).map_err(|e| Error::invalid(field, e.to_string()))
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth> {
    let file: GtFile = serde_json::from_str(text).map_err(|e| Error::json("ground truth", &e))?;
    let image_ids: BTreeSet<u64> = file.images.iter().map(|i| i.id).collect();
    let mut boxes = Vec::with_capacity(file.annotations.len());
    for (i, a) in file.annotations.iter().enumerate() {
        let at = |f: &str| format!("annotations[{i}].{f}");
        if !image_ids.contains(&a.image_id) {
            return Err(Error::invalid(at("image_id"), format!("unknown image {}", a.image_id)));
        }
        if a.iscrowd != 0 {
            return Err(Error::invalid(at("iscrowd"), "crowd annotations are not supported"));
        }
        boxes.push(GroundTruthBox {
            image_id: a.image_id,
            category: category(a.category_id, &at("category_id"))?,
            bbox: bbox(a.bbox, &at("bbox"))?,
        });
    }
    Ok(GroundTruth { image_ids, boxes })
}

/// Parses a results file, checking image ids against the ground truth.
pub fn parse_results(text: &str, gt: &GroundTruth) -> Result<Vec<Detection>> {
    let rows: Vec<ResultRow> = serde_json::from_str(text).map_err(|e| Error::json("detections", &e))?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let at = |f: &str| format!("[{i}].{f}");
            if !gt.image_ids.contains(&r.image_id) {
                return Err(Error::invalid(
                    at("image_id"),
                    format!("image {} not in ground truth", r.image_id),
                ));
            }
            Detection::new(
                r.image_id,
                category(r.category_id, &at("category_id"))?,
                bbox(r.bbox, &at("bbox"))?,
                r.score,
            )
            .map_err(|e| Error::invalid(at("score"), e.to_string()))
        })
        .collect()
}

/// Renders detections as a results file.
pub fn results_to_string(dets: &[Detection]) -> String {
    let rows: Vec<serde_json::Value> = dets
        .iter()
        .map(|d| {
            serde_json::json!({
                "image_id": d.image_id,
                "category_id": d.category.coco_id(),
                "bbox": [d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h],
                "score": d.score,
            })
        })
        .collect();
    serde_json::to_string(&rows).expect("results serialize")
}

/// Renders ground truth as an annotation file.
pub fn ground_truth_to_string(gt: &GroundTruth) -> String {
    let doc = serde_json::json!({
        "images": gt.image_ids.iter().map(|id| serde_json::json!({"id": id})).collect::<Vec<_>>(),
        "annotations": gt.boxes.iter().enumerate().map(|(i, b)| serde_json::json!({
            "id": i + 1,
            "image_id": b.image_id,
            "category_id": b.category.coco_id(),
            "bbox": [b.bbox.x, b.bbox.y, b.bbox.w, b.bbox.h],
            "area": b.bbox.area(),
            "iscrowd": 0,
        })).collect::<Vec<_>>(),
        "categories": [{"id": 1, "name": "directed"}, {"id": 2, "name": "round"}],
    });
    serde_json::to_string(&doc).expect("ground truth serializes")
}
