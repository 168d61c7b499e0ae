//! Teacher-forcing tuples: for every sample and step, the frame the model
//! sees and the frame it should produce, plus `tuples.jsonl` indexing them.

use std::fs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vispad_core::oracle::teacher_forcing_tuples;
use vispad_core::raster::downscale;

use crate::config::DatasetConfig;
use crate::dataset::{render_style, sample_instance, thread_pool, Staging, SHARD_SIZE};
use crate::error::{IoContext, PipelineError, Result};
use crate::image_io::encode;

pub const TUPLES_DIR: &str = "tuples";
pub const TUPLES_INDEX: &str = "tuples.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleRecord {
    pub task_id: u64,
    pub step: usize,
    pub y: u8,
    pub halt: bool,
    pub input_path: String,
    pub target_path: String,
    /// Set on the duplicated entries reserved for self-rollout training.
    pub self_rollout: bool,
}

/// Writes tuples for samples `0..cfg.count` under `cfg.out` and returns the
/// index. With `include_self_rollout` every tuple is listed a second time
/// with `self_rollout` set; the image files are shared.
pub fn export_tuples(cfg: &DatasetConfig, include_self_rollout: bool) -> Result<Vec<TupleRecord>> {
    cfg.validate()?;
    let out = &cfg.out;
    fs::create_dir_all(out).at(out)?;
    let staging = Staging::create(out)?;
    let style = render_style(cfg);
    let ext = cfg.format.extension();
    let per_sample = thread_pool(cfg.workers)?.install(|| {
        (0..cfg.count)
            .into_par_iter()
            .map(|id| {
                let task = sample_instance(cfg, id)?;
                let tuples =
                    teacher_forcing_tuples(&task, &style).map_err(|source| PipelineError::Sample { id, source })?;
                let dir = format!("{TUPLES_DIR}/{:04}", id / SHARD_SIZE);
                let mut rows = Vec::with_capacity(tuples.len());
                for t in tuples {
                    let input_path = format!("{dir}/{id:07}_s{:03}_in.{ext}", t.step);
                    let target_path = format!("{dir}/{id:07}_s{:03}_out.{ext}", t.step);
                    for (path, canvas) in [(&input_path, &t.input), (&target_path, &t.target)] {
                        let canvas = if cfg.resolution == canvas.width() {
                            canvas.clone()
                        } else {
                            downscale(canvas, cfg.resolution, cfg.resolution)?
                        };
                        staging.write(path, &encode(&canvas, cfg.format)?)?;
                    }
                    rows.push(TupleRecord {
                        task_id: id,
                        step: t.step,
                        y: t.label.as_u8(),
                        halt: t.halt,
                        input_path,
                        target_path,
                        self_rollout: false,
                    });
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut index: Vec<TupleRecord> = per_sample.into_iter().flatten().collect();
    if include_self_rollout {
        let dup: Vec<TupleRecord> = index
            .iter()
            .map(|r| TupleRecord {
                self_rollout: true,
                ..r.clone()
            })
            .collect();
        index.extend(dup);
    }
    staging.commit_dir(TUPLES_DIR, out)?;
    let mut text = String::new();
    for r in &index {
        text.push_str(&serde_json::to_string(r).map_err(|e| PipelineError::Format(e.to_string()))?);
        text.push('\n');
    }
    let path = out.join(TUPLES_INDEX);
    fs::write(&path, text).at(&path)?;
    Ok(index)
}
