//! Dataset ingestion: GeoJSON and OSM XML parsing into [`FeatureSet`]s,
//! plus analysis-boundary clipping.
//!
//! Parsers are whole-document and pure: bytes in, features out. Every
//! feature that leaves a parser satisfies the polygon invariants; bad
//! geometry fails the parse with the offending feature id.

mod geojson;
mod osm;

pub use geojson::{emit_geojson, parse_geojson, GeoJsonDocument};
pub use osm::{parse_osm_xml, OsmDocument};

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::{Polygon, Rect};

/// Which side of the comparison a dataset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Prediction,
    GroundTruth,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Source::Prediction => "prediction",
            Source::GroundTruth => "ground_truth",
        }
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single building footprint with a stable identifier.
#[derive(Debug, Clone)]
pub struct Feature {
    pub id: String,
    pub geometry: Polygon,
    pub source: Source,
    pub tags: BTreeMap<String, String>,
}

/// An ordered collection of features from one source.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    features: Vec<Feature>,
    ids: HashSet<String>,
    source: Source,
    crs_note: String,
}

impl FeatureSet {
    pub fn new(source: Source, crs_note: impl Into<String>) -> FeatureSet {
        FeatureSet {
            features: Vec::new(),
            ids: HashSet::new(),
            source,
            crs_note: crs_note.into(),
        }
    }

    /// Append a feature, enforcing id uniqueness and source agreement.
    pub fn push(&mut self, feature: Feature) -> Result<()> {
        if feature.source != self.source {
            return Err(Error::SourceMismatch {
                expected: self.source.to_string(),
                found: feature.source.to_string(),
            });
        }
        if !self.ids.insert(feature.id.clone()) {
            return Err(Error::DuplicateFeatureId(feature.id));
        }
        self.features.push(feature);
        Ok(())
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Feature> {
        self.features.iter()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn crs_note(&self) -> &str {
        &self.crs_note
    }
}

/// Keep the features whose centroid lies inside `boundary` (boundary
/// inclusive). Geometries are never cut: a building is in or out as a unit.
pub fn clip_to_boundary(fs: &FeatureSet, boundary: &Rect) -> FeatureSet {
    let mut out = FeatureSet::new(fs.source, fs.crs_note.clone());
    for feature in fs.iter() {
        if boundary.contains(feature.geometry.centroid()) {
            out.push(feature.clone())
                .expect("clipping preserves id uniqueness");
        }
    }
    out
}
