//! Evaluation toolkit for Easy-to-Read (ETR) text generation: text
//! segmentation, automatic metrics, corpus statistics, multi-run scoring
//! and inter-annotator agreement.

pub mod agreement;
pub mod corpus;
pub mod error;
pub mod evalrun;
pub mod metrics;
pub mod stats;
pub mod text;

pub use error::{Error, Result};
