//! Parallel dataset generation.
//!
//! Sample `i` draws from its own stream seeded with `stable_hash(seed, i)` and
//! has label `i mod 2`, so the output does not depend on the worker count or
//! on scheduling. Files go to a staging directory first and are moved into
//! place once every sample succeeded; the manifest is written last.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use vispad_core::raster::downscale;
use vispad_core::task::Label;
use vispad_core::{stable_hash, Canvas, CounterRng, Style, TaskInstance};

use crate::config::{DatasetConfig, FrameMode};
use crate::error::{IoContext, PipelineError, Result};
use crate::image_io::encode;
use crate::manifest::{write_manifest, ManifestRecord, SampleParams, CONFIG_FILE, MANIFEST_FILE};
use crate::mask::{mask_canvas, mask_seed};

pub const SHARD_SIZE: u64 = 1000;
pub const IMAGES_DIR: &str = "images";
const STAGING_DIR: &str = ".tmp-generate";

/// A rendered sample: its manifest record and the file bytes keyed by
/// path relative to the dataset root.
#[derive(Debug, Clone)]
pub struct RenderedSample {
    pub record: ManifestRecord,
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn sample_seed(master: u64, id: u64) -> u64 {
    stable_hash(master, id)
}

pub fn label_for(id: u64) -> Label {
    if id.is_multiple_of(2) {
        Label::Disconnected
    } else {
        Label::Connected
    }
}

pub fn shard_dir(id: u64) -> String {
    format!("{IMAGES_DIR}/{:04}", id / SHARD_SIZE)
}

pub fn render_style(cfg: &DatasetConfig) -> Style {
    Style {
        canvas_size: 448,
        ..cfg.style
    }
}

/// Samples the task instance behind sample `id`.
pub fn sample_instance(cfg: &DatasetConfig, id: u64) -> Result<TaskInstance> {
    let spec = cfg.task_spec()?;
    let mut rng = CounterRng::new(sample_seed(cfg.seed, id));
    spec.sample(label_for(id), &render_style(cfg), &mut rng)
        .map_err(|source| PipelineError::Sample { id, source })
}

fn at_resolution(canvas: Canvas, resolution: usize) -> Result<Canvas> {
    if canvas.width() == resolution {
        Ok(canvas)
    } else {
        Ok(downscale(&canvas, resolution, resolution)?)
    }
}

/// Renders sample `id` in memory. Generation and `inspect` share this path.
pub fn render_sample(cfg: &DatasetConfig, id: u64) -> Result<RenderedSample> {
    let task = sample_instance(cfg, id)?;
    let style = render_style(cfg);
    let schedule = task.schedule();
    let ext = cfg.format.extension();
    let dir = shard_dir(id);
    let wrap = |e: vispad_core::Error| PipelineError::Sample { id, source: e };

    let mut files = Vec::new();
    let mut input = at_resolution(task.render_input(&style).map_err(wrap)?, cfg.resolution)?;
    let mut mask = None;
    if let Some(p) = cfg.mask_prob {
        let (masked, info) = mask_canvas(&input, p, mask_seed(cfg.seed, id))?;
        input = masked;
        mask = Some(info);
    }
    let input_path = format!("{dir}/{id:07}_input.{ext}");
    files.push((input_path.clone(), encode(&input, cfg.format)?));

    let steps: Vec<usize> = match cfg.frames {
        FrameMode::None => vec![],
        FrameMode::Single => vec![schedule.len()],
        FrameMode::Multi => (1..=schedule.len()).collect(),
    };
    let mut frame_paths = Vec::with_capacity(steps.len());
    for k in steps {
        let canvas = task.render(&schedule.frames[k - 1], &style).map_err(wrap)?;
        let path = format!("{dir}/{id:07}_frame{k:03}.{ext}");
        files.push((path.clone(), encode(&at_resolution(canvas, cfg.resolution)?, cfg.format)?));
        frame_paths.push(path);
    }

    let (d_target, d_max) = match &task {
        TaskInstance::Maze(m) => (Some(m.d_target), Some(m.d_max)),
        _ => (None, None),
    };
    let record = ManifestRecord {
        id,
        task: cfg.task.name().into(),
        label: task.label().as_u8(),
        sample_seed: sample_seed(cfg.seed, id),
        params: SampleParams {
            size: cfg.size,
            resolution: cfg.resolution,
            frames: cfg.frames.name().into(),
            format: ext.into(),
        },
        input_path,
        frame_paths,
        num_frames: schedule.len(),
        d_target,
        d_max,
        split: cfg.split.clone(),
        regime: cfg.regime.name().into(),
        mask,
    };
    Ok(RenderedSample { record, files })
}

/// A scratch directory, removed on drop.
pub(crate) struct Staging {
    pub root: PathBuf,
}

impl Staging {
    pub fn create(parent: &Path) -> Result<Self> {
        let root = parent.join(STAGING_DIR);
        if root.exists() {
            fs::remove_dir_all(&root).at(&root)?;
        }
        fs::create_dir_all(&root).at(&root)?;
        Ok(Self { root })
    }

    pub fn write(&self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).at(dir)?;
        }
        fs::write(&path, bytes).at(path)
    }

    /// Moves `rel` from staging into `dest`, replacing what was there.
    pub fn commit_dir(&self, rel: &str, dest: &Path) -> Result<()> {
        let from = self.root.join(rel);
        let to = dest.join(rel);
        if to.exists() {
            fs::remove_dir_all(&to).at(&to)?;
        }
        if from.exists() {
            fs::rename(&from, &to).at(&to)?;
        }
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.root);
    }
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))
}

/// Generates the whole dataset under `cfg.out` and returns the manifest.
pub fn generate_dataset(cfg: &DatasetConfig) -> Result<Vec<ManifestRecord>> {
    cfg.validate()?;
    let out = &cfg.out;
    fs::create_dir_all(out).at(out)?;
    let staging = Staging::create(out)?;
    let records = thread_pool(cfg.workers)?.install(|| {
        (0..cfg.count)
            .into_par_iter()
            .map(|id| {
                let sample = render_sample(cfg, id)?;
                for (rel, bytes) in &sample.files {
                    staging.write(rel, bytes)?;
                }
                Ok(sample.record)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    staging.commit_dir(IMAGES_DIR, out)?;
    let config_path = out.join(CONFIG_FILE);
    fs::write(&config_path, cfg.to_kv_string()).at(&config_path)?;
    write_manifest(&out.join(MANIFEST_FILE), &records)?;
    Ok(records)
}
