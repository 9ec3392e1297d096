//! GeoJSON (RFC 7946) reading and writing for polygon feature collections.
//!
//! Coordinates are `[lon, lat]` and get projected to planar meters on
//! ingest, unless the document carries the top-level foreign member
//! `"crs_note": "planar-meters"`, in which case they are taken as meters
//! verbatim. Emission always writes planar meters with that marker.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{project_lonlat, Coordinate, Polygon, Ring};
use crate::ingest::{Feature, FeatureSet, Source};

pub const PLANAR_CRS_NOTE: &str = "planar-meters";

/// A parsed GeoJSON document: the features plus parse bookkeeping.
#[derive(Debug)]
pub struct GeoJsonDocument {
    pub set: FeatureSet,
    /// Features whose geometry was not Polygon/MultiPolygon.
    pub skipped_non_polygonal: usize,
}

pub fn parse_geojson(bytes: &[u8], source: Source) -> Result<GeoJsonDocument> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::GeoJson(format!("not UTF-8: {e}")))?;
    let root: Value = serde_json::from_str(text).map_err(|e| Error::GeoJson(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::GeoJson("document root is not an object".into()))?;
    match obj.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => {}
        other => {
            return Err(Error::GeoJson(format!(
                "expected FeatureCollection, found {other:?}"
            )))
        }
    }
    let planar = obj.get("crs_note").and_then(Value::as_str) == Some(PLANAR_CRS_NOTE);
    let crs_note = if planar { PLANAR_CRS_NOTE } else { "projected-web-mercator" };
    let features = obj
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::GeoJson("missing features array".into()))?;

    let mut set = FeatureSet::new(source, crs_note);
    let mut skipped = 0usize;
    for (index, raw) in features.iter().enumerate() {
        let id = feature_id(raw, index);
        let tags = feature_tags(raw);
        let geometry = raw.get("geometry");
        let Some(geom) = geometry.filter(|g| !g.is_null()) else {
            skipped += 1;
            continue;
        };
        match geom.get("type").and_then(Value::as_str) {
            Some("Polygon") => {
                let rings = coordinates(geom, &id)?;
                let polygon = build_polygon(&rings, planar).map_err(|e| e.with_feature(&id))?;
                set.push(Feature {
                    id,
                    geometry: polygon,
                    source,
                    tags,
                })?;
            }
            Some("MultiPolygon") => {
                let parts = geom
                    .get("coordinates")
                    .and_then(Value::as_array)
                    .ok_or_else(|| {
                        Error::GeoJson(format!("feature '{id}': missing coordinates"))
                    })?;
                for (part_index, part) in parts.iter().enumerate() {
                    let part_id = format!("{id}/{part_index}");
                    let rings = rings_from_value(part, &part_id)?;
                    let polygon =
                        build_polygon(&rings, planar).map_err(|e| e.with_feature(&part_id))?;
                    set.push(Feature {
                        id: part_id,
                        geometry: polygon,
                        source,
                        tags: tags.clone(),
                    })?;
                }
            }
            _ => skipped += 1,
        }
    }
    Ok(GeoJsonDocument {
        set,
        skipped_non_polygonal: skipped,
    })
}

fn feature_id(raw: &Value, index: usize) -> String {
    match raw.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => format!("feature-{index}"),
    }
}

fn feature_tags(raw: &Value) -> BTreeMap<String, String> {
    let mut tags = BTreeMap::new();
    if let Some(props) = raw.get("properties").and_then(Value::as_object) {
        for (k, v) in props {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                _ => continue,
            };
            tags.insert(k.clone(), text);
        }
    }
    tags
}

fn coordinates(geom: &Value, id: &str) -> Result<Vec<Vec<(f64, f64)>>> {
    let coords = geom
        .get("coordinates")
        .ok_or_else(|| Error::GeoJson(format!("feature '{id}': missing coordinates")))?;
    rings_from_value(coords, id)
}

fn rings_from_value(value: &Value, id: &str) -> Result<Vec<Vec<(f64, f64)>>> {
    let rings = value
        .as_array()
        .ok_or_else(|| Error::GeoJson(format!("feature '{id}': coordinates not an array")))?;
    let mut out = Vec::with_capacity(rings.len());
    for ring in rings {
        let positions = ring
            .as_array()
            .ok_or_else(|| Error::GeoJson(format!("feature '{id}': ring not an array")))?;
        let mut pts = Vec::with_capacity(positions.len());
        for pos in positions {
            let pair = pos
                .as_array()
                .filter(|p| p.len() >= 2)
                .ok_or_else(|| Error::GeoJson(format!("feature '{id}': bad position")))?;
            let x = pair[0]
                .as_f64()
                .ok_or_else(|| Error::GeoJson(format!("feature '{id}': non-numeric position")))?;
            let y = pair[1]
                .as_f64()
                .ok_or_else(|| Error::GeoJson(format!("feature '{id}': non-numeric position")))?;
            pts.push((x, y));
        }
        out.push(pts);
    }
    Ok(out)
}

/// Build a polygon from raw rings: strip the RFC 7946 closing duplicate,
/// project unless already planar, validate.
fn build_polygon(rings: &[Vec<(f64, f64)>], planar: bool) -> Result<Polygon> {
    if rings.is_empty() {
        return Err(Error::DegenerateRing("polygon with no rings".into()));
    }
    let mut built = Vec::with_capacity(rings.len());
    for raw in rings {
        let mut pts = raw.clone();
        if pts.len() >= 2 && pts.first() == pts.last() {
            pts.pop();
        }
        let mut vertices = Vec::with_capacity(pts.len());
        for (x, y) in pts {
            let c = if planar {
                Coordinate::new(x, y)
            } else {
                project_lonlat(x, y)?
            };
            vertices.push(c);
        }
        built.push(Ring::new(vertices)?);
    }
    let outer = built.remove(0);
    Polygon::new(outer, built)
}

/// Serialize a feature set as a GeoJSON FeatureCollection in planar meters.
pub fn emit_geojson(fs: &FeatureSet) -> String {
    let features: Vec<Value> = fs.iter().map(|f| feature_to_json(f, &[])).collect();
    collection_to_string(features)
}

pub(crate) fn feature_to_json(feature: &Feature, extra_props: &[(&str, &str)]) -> Value {
    let mut props = Map::new();
    for (k, v) in &feature.tags {
        props.insert(k.clone(), Value::String(v.clone()));
    }
    for (k, v) in extra_props {
        props.insert((*k).to_string(), Value::String((*v).to_string()));
    }
    let mut rings = Vec::new();
    for ring in feature.geometry.rings() {
        let mut positions: Vec<Value> = ring
            .vertices()
            .iter()
            .map(|c| json!([c.x, c.y]))
            .collect();
        // RFC 7946 wants explicit closure.
        positions.push(positions[0].clone());
        rings.push(Value::Array(positions));
    }
    json!({
        "type": "Feature",
        "id": feature.id,
        "properties": Value::Object(props),
        "geometry": {
            "type": "Polygon",
            "coordinates": rings,
        },
    })
}

pub(crate) fn collection_to_string(features: Vec<Value>) -> String {
    let doc = json!({
        "type": "FeatureCollection",
        "crs_note": PLANAR_CRS_NOTE,
        "features": features,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("GeoJSON serialization");
    text.push('\n');
    text
}
