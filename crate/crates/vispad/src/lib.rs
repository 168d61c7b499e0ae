//! Dataset pipeline for the visual scratchpad tasks: parallel generation,
//! image files, JSONL manifests, patch masking, teacher-forcing tuples and
//! scoring of model predictions.

pub mod config;
pub mod dataset;
pub mod error;
pub mod image_io;
pub mod manifest;
pub mod mask;
pub mod score;
pub mod teacher;

pub use config::{DatasetConfig, FrameMode};
pub use error::{PipelineError, Result};
pub use image_io::ImageFormat;
pub use manifest::ManifestRecord;
