use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate ring: {0}")]
    DegenerateRing(String),

    #[error("self-intersecting ring")]
    SelfIntersectingRing,

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("non-finite coordinate ({x}, {y})")]
    NonFiniteCoordinate { x: f64, y: f64 },

    #[error("latitude {0} outside Web Mercator range (-85.06, 85.06)")]
    LatitudeOutOfRange(f64),

    #[error("longitude {0} outside [-180, 180]")]
    LongitudeOutOfRange(f64),

    #[error("feature '{id}': {source}")]
    InvalidFeature {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("duplicate feature id '{0}'")]
    DuplicateFeatureId(String),

    #[error("GeoJSON parse error: {0}")]
    GeoJson(String),

    #[error("OSM XML parse error: {0}")]
    OsmXml(String),

    #[error("feature set source mismatch: expected {expected}, found {found}")]
    SourceMismatch { expected: String, found: String },

    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),

    #[error("undefined {metric}: tp={tp} fp={fp} fn={fn_} (zero denominator)")]
    UndefinedMetric {
        metric: String,
        tp: usize,
        fp: usize,
        fn_: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("tile ({col}, {row}): {source}")]
    Tile {
        col: usize,
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attach the owning feature id, so boundary rejections name the
    /// offending feature.
    pub fn with_feature(self, id: &str) -> Error {
        match self {
            Error::InvalidFeature { .. } => self,
            other => Error::InvalidFeature {
                id: id.to_string(),
                source: Box::new(other),
            },
        }
    }

    /// Process exit code for the CLI: 2 for input/config problems, 3 for
    /// undefined metrics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UndefinedMetric { .. } => 3,
            Error::InvalidFeature { source, .. } | Error::Tile { source, .. } => {
                source.exit_code()
            }
            _ => 2,
        }
    }
}
