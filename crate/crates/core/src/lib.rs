//! Benchmark harness for geolocating non-standard Italian social-media text.
//!
//! The crate covers the desk-side of the workflow: ingesting the two-subtask
//! TSV data into a merged dataset, producing and parsing the instruction
//! encoding used for model fine-tuning, scoring predictions (macro/micro F1
//! for region classification, average great-circle error in km for
//! coordinate regression), assigning points to region/province polygons for
//! per-area error maps, and a character n-gram baseline so the whole
//! pipeline runs without a GPU.

pub mod baseline;
pub mod encoding;
pub mod geo;
pub mod ingest;
pub mod metrics;
pub mod regions;

pub use encoding::{EncodedExample, ParseStatus, Prediction};
pub use ingest::Record;
pub use regions::Region;
