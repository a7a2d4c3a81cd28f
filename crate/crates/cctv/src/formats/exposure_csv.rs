//! Per-edge exposure table: `edge_id,fraction,exposed_m,camera_ids`, with
//! camera ids joined by `;`.

use std::io::Write;

use cctv_core::exposure::ExposureMap;
use cctv_core::graph::RoadGraph;

pub fn write(graph: &RoadGraph, map: &ExposureMap, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_id", "fraction", "exposed_m", "camera_ids"])?;
    for x in &map.edges {
        let ids: Vec<&str> = x.camera_ids.iter().map(String::as_str).collect();
        w.write_record([
            graph.edge(x.edge).key.as_str(),
            &x.fraction.to_string(),
            &x.exposed_m.to_string(),
            &ids.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}
