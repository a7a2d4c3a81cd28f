//! Evaluation report as `key: value` text and as JSON. Undefined metrics
//! are written as `absent` / `null`, never as 0.

use cctv_core::eval::EvalReport;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDoc {
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
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl From<&EvalReport> for ReportDoc {
    fn from(r: &EvalReport) -> Self {
        ReportDoc {
            ap50: r.ap50,
            ap50_95: r.ap50_95,
            ap_medium: r.ap_medium,
            ap_large: r.ap_large,
            ar100: r.ar100,
            ar_medium: r.ar_medium,
            ar_large: r.ar_large,
            f1_at_50: r.f1_at_50,
            ap50_directed: r.ap50_directed,
            ap50_round: r.ap50_round,
            tp: r.counts.tp,
            fp: r.counts.fp,
            fn_: r.counts.fn_,
        }
    }
}

pub fn to_text(r: &EvalReport) -> String {
    let metric = |v: Option<f64>| v.map_or_else(|| "absent".to_string(), |v| format!("{v:.4}"));
    let rows = [
        ("ap50", r.ap50),
        ("ap50_95", r.ap50_95),
        ("ap_medium", r.ap_medium),
        ("ap_large", r.ap_large),
        ("ar100", r.ar100),
        ("ar_medium", r.ar_medium),
        ("ar_large", r.ar_large),
        ("f1_at_50", r.f1_at_50),
        ("ap50_directed", r.ap50_directed),
        ("ap50_round", r.ap50_round),
    ];
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k}: {}\n", metric(v)));
    }
    out.push_str(&format!(
        "tp: {}\nfp: {}\nfn: {}\n",
        r.counts.tp, r.counts.fp, r.counts.fn_
    ));
    out
}

pub fn to_json(r: &EvalReport) -> String {
    serde_json::to_string_pretty(&ReportDoc::from(r)).expect("report serializes")
}
