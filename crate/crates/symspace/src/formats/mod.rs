//! File formats: point/dataset CSV, model JSON and PGM images.

pub mod dataset;
pub mod model;
pub mod pgm;

pub use dataset::{format_f64, read_dataset, write_dataset, Dataset};
pub use model::{covariance_from_name, kernel_from_name, LoadedModel, ModelDoc, ModelSpec};
pub use pgm::{encode_pgm, parse_pgm, PgmEncoding};
