//! Minimal OSM XML reader: `<node id lat lon>` plus `<way>` elements with
//! `<nd ref>` and `<tag k v>` children. Closed ways carrying a `building`
//! tag become ground-truth features; everything else (open ways, other
//! tags, relations) is ignored.

use std::collections::HashMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::geometry::{project_lonlat, Polygon, Ring};
use crate::ingest::{Feature, FeatureSet, Source};

/// A parsed OSM extract: the building features plus parse bookkeeping.
#[derive(Debug)]
pub struct OsmDocument {
    pub set: FeatureSet,
    /// Building ways dropped because an `nd ref` pointed at no known node.
    pub dropped_ways: usize,
}

#[derive(Default)]
struct PendingWay {
    id: String,
    refs: Vec<i64>,
    tags: Vec<(String, String)>,
}

struct DocumentScan {
    nodes: HashMap<i64, (f64, f64)>,
    ways: Vec<PendingWay>,
    current: Option<PendingWay>,
}

pub fn parse_osm_xml(bytes: &[u8]) -> Result<OsmDocument> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);

    let mut scan = DocumentScan {
        nodes: HashMap::new(),
        ways: Vec::new(),
        current: None,
    };
    let mut buf = Vec::new();
    loop {
        let position = reader.buffer_position();
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| Error::OsmXml(format!("at byte {position}: {e}")))?;
        match event {
            Event::Eof => break,
            Event::Start(e) => scan.element(&e, false, position)?,
            Event::Empty(e) => scan.element(&e, true, position)?,
            Event::End(e) => {
                if e.name().as_ref() == b"way" {
                    if let Some(way) = scan.current.take() {
                        scan.ways.push(way);
                    }
                }
            }
            _ => {}
        }
        buf.clear();
    }

    collect_buildings(scan)
}

impl DocumentScan {
    fn element(&mut self, e: &BytesStart, self_closing: bool, position: u64) -> Result<()> {
        match e.name().as_ref() {
            b"node" => {
                let (id, lon, lat) = node_attrs(e, position)?;
                self.nodes.insert(id, (lon, lat));
            }
            b"way" => {
                let way = PendingWay {
                    id: required_attr(e, b"id", position)?,
                    refs: Vec::new(),
                    tags: Vec::new(),
                };
                if self_closing {
                    self.ways.push(way);
                } else {
                    self.current = Some(way);
                }
            }
            b"nd" => {
                if let Some(way) = self.current.as_mut() {
                    let raw = required_attr(e, b"ref", position)?;
                    let r: i64 = raw.parse().map_err(|_| {
                        Error::OsmXml(format!("at byte {position}: bad nd ref '{raw}'"))
                    })?;
                    way.refs.push(r);
                }
            }
            b"tag" => {
                if let Some(way) = self.current.as_mut() {
                    let k = optional_attr(e, b"k", position)?;
                    let v = optional_attr(e, b"v", position)?;
                    if let (Some(k), Some(v)) = (k, v) {
                        way.tags.push((k, v));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn collect_buildings(scan: DocumentScan) -> Result<OsmDocument> {
    let mut set = FeatureSet::new(Source::GroundTruth, "projected-web-mercator");
    let mut dropped = 0usize;
    for way in scan.ways {
        if !way.tags.iter().any(|(k, _)| k == "building") {
            continue;
        }
        // Closed way: first nd ref repeats as last; at least a triangle.
        if way.refs.len() < 4 || way.refs.first() != way.refs.last() {
            continue;
        }
        let id = format!("way/{}", way.id);
        let ring_refs = &way.refs[..way.refs.len() - 1];
        let mut vertices = Vec::with_capacity(ring_refs.len());
        let mut resolved = true;
        for r in ring_refs {
            match scan.nodes.get(r) {
                Some(&(lon, lat)) => {
                    vertices.push(project_lonlat(lon, lat).map_err(|e| e.with_feature(&id))?);
                }
                None => {
                    resolved = false;
                    break;
                }
            }
        }
        if !resolved {
            dropped += 1;
            continue;
        }
        let ring = Ring::new(vertices).map_err(|e| e.with_feature(&id))?;
        let polygon = Polygon::new(ring, Vec::new()).map_err(|e| e.with_feature(&id))?;
        set.push(Feature {
            id,
            geometry: polygon,
            source: Source::GroundTruth,
            tags: way.tags.into_iter().collect(),
        })?;
    }
    Ok(OsmDocument {
        set,
        dropped_ways: dropped,
    })
}

fn node_attrs(e: &BytesStart, position: u64) -> Result<(i64, f64, f64)> {
    let id: i64 = required_attr(e, b"id", position)?
        .parse()
        .map_err(|_| Error::OsmXml(format!("at byte {position}: bad node id")))?;
    let lat: f64 = required_attr(e, b"lat", position)?
        .parse()
        .map_err(|_| Error::OsmXml(format!("at byte {position}: bad lat")))?;
    let lon: f64 = required_attr(e, b"lon", position)?
        .parse()
        .map_err(|_| Error::OsmXml(format!("at byte {position}: bad lon")))?;
    Ok((id, lon, lat))
}

fn required_attr(e: &BytesStart, name: &[u8], position: u64) -> Result<String> {
    optional_attr(e, name, position)?.ok_or_else(|| {
        Error::OsmXml(format!(
            "at byte {position}: missing attribute '{}'",
            String::from_utf8_lossy(name)
        ))
    })
}

fn optional_attr(e: &BytesStart, name: &[u8], position: u64) -> Result<Option<String>> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::OsmXml(format!("at byte {position}: {err}")))?;
        if attr.key.as_ref() == name {
            let value = attr
                .unescape_value()
                .map_err(|err| Error::OsmXml(format!("at byte {position}: {err}")))?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}
