//! Collector observation log.
//!
//! First non-comment line is the schema tag `cctv-obs/1`; every further line
//! is one sighting:
//!
//! ```text
//! timestamp,lat,lon,gps_sigma_m,heading_deg,range_m,range_sigma_m,kind,score,image_ref
//! ```
//!
//! `image_ref` is the last field and may itself contain commas. Blank lines
//! and lines starting with `#` are skipped.

use cctv_core::camera::CameraKind;
use cctv_core::localize::Observation;
use cctv_core::GeoPoint;

use crate::error::{Error, Result};

pub const SCHEMA: &str = "cctv-obs/1";
const FIELDS: [&str; 10] = [
    "timestamp",
    "lat",
    "lon",
    "gps_sigma_m",
    "heading_deg",
    "range_m",
    "range_sigma_m",
    "kind",
    "score",
    "image_ref",
];

fn bad(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::invalid(format!("line {line}: {field}"), message)
}

pub fn parse(text: &str) -> Result<Vec<Observation>> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != SCHEMA {
                return Err(bad(line_no, "header", format!("expected `{SCHEMA}`, found `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let parts: Vec<&str> = line.splitn(FIELDS.len(), ',').map(str::trim).collect();
        if parts.len() != FIELDS.len() {
            return Err(bad(
                line_no,
                "record",
                format!("expected {} fields, found {}", FIELDS.len(), parts.len()),
            ));
        }
        let num = |k: usize| -> Result<f64> {
            parts[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(line_no, FIELDS[k], format!("not a number: `{}`", parts[k])))
        };
        let observer = GeoPoint::new(num(1)?, num(2)?).map_err(|e| bad(line_no, "lat/lon", e.to_string()))?;
        let kind = CameraKind::parse(parts[7]).ok_or_else(|| {
            bad(
                line_no,
                "kind",
                format!("expected directed or round, found `{}`", parts[7]),
            )
        })?;
        let obs = Observation {
            observer,
            gps_sigma_m: num(3)?,
            heading_deg: num(4)?,
            range_m: num(5)?,
            range_sigma_m: num(6)?,
            kind,
            score: num(8)?,
            timestamp: num(0)?,
            image_ref: parts[9].to_string(),
        };
        obs.validate().map_err(|e| bad(line_no, "observation", e.to_string()))?;
        out.push(obs);
    }
    if !seen_header {
        return Err(bad(1, "header", format!("missing `{SCHEMA}` header")));
    }
    Ok(out)
}

pub fn to_string(observations: &[Observation]) -> String {
    let mut s = format!("{SCHEMA}\n");
    for o in observations {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            o.timestamp,
            o.observer.lat,
            o.observer.lon,
            o.gps_sigma_m,
            o.heading_deg,
            o.range_m,
            o.range_sigma_m,
            o.kind.as_str(),
            o.score,
            o.image_ref
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOG: &str =
        "# collector run 7\ncctv-obs/1\n\n1600000000,52.5,13.4,5,90,60,0.002,directed,0.9,frames/a,b.jpg\n";

    #[test]
    fn parses_and_round_trips() {
        let obs = parse(LOG).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].image_ref, "frames/a,b.jpg");
        assert_eq!(obs[0].kind, CameraKind::Directed);
        assert_eq!(parse(&to_string(&obs)).unwrap(), obs);
    }

    #[test]
    fn schema_errors_cite_line() {
        let e = parse("cctv-obs/2\n").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        let e = parse("cctv-obs/1\n1,52,13,5,x,60,0,round,0.5,img\n").unwrap_err();
        assert!(e.to_string().contains("line 2: heading_deg"), "{e}");
        let e = parse("cctv-obs/1\n1,52,13,5,10,60,0,dome,0.5,img\n").unwrap_err();
        assert!(e.to_string().contains("kind"), "{e}");
        assert!(parse("").is_err());
    }
}
