//! One JSON object per line describing each generated sample. Keys are
//! written in a fixed order.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IoContext, PipelineError, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const CONFIG_FILE: &str = "config.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleParams {
    pub size: usize,
    pub resolution: usize,
    pub frames: String,
    pub format: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskInfo {
    pub mask_prob: f64,
    pub mask_seed: u64,
    pub masked_patches: usize,
    /// Row-major patch grid, `1` for masked.
    pub mask_bits: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: u64,
    pub task: String,
    pub label: u8,
    pub sample_seed: u64,
    pub params: SampleParams,
    pub input_path: String,
    pub frame_paths: Vec<String>,
    /// Scratchpad length of the instance, also when frames are not written.
    pub num_frames: usize,
    pub d_target: Option<usize>,
    pub d_max: Option<usize>,
    pub split: String,
    pub regime: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<MaskInfo>,
}

pub fn to_jsonl(records: &[ManifestRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| PipelineError::Format(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| PipelineError::Format(format!("line {}: {e}", n + 1))))
        .collect()
}

/// Writes through a temporary file so a reader never sees a partial manifest.
pub fn write_manifest(path: &Path, records: &[ManifestRecord]) -> Result<()> {
    let tmp = path.with_extension("jsonl.tmp");
    let mut f = fs::File::create(&tmp).at(&tmp)?;
    f.write_all(to_jsonl(records)?.as_bytes()).at(&tmp)?;
    f.sync_all().at(&tmp)?;
    fs::rename(&tmp, path).at(path)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    parse_jsonl(&fs::read_to_string(path).at(path)?)
}
