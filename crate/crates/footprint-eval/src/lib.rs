pub mod error;
pub mod geometry;
pub mod ingest;

pub use error::{Error, Result};
