//! Patch-masked copies of a dataset for the globality experiments.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use vispad_core::globality::patch_mask;
use vispad_core::{stable_hash, Canvas, CounterRng};

use crate::dataset::{thread_pool, Staging, IMAGES_DIR};
use crate::error::{IoContext, PipelineError, Result};
use crate::image_io::{decode, encode, ImageFormat};
use crate::manifest::{read_manifest, write_manifest, ManifestRecord, MaskInfo, CONFIG_FILE, MANIFEST_FILE};

const MASK_STREAM: u64 = 0x6d61_736b;

/// Seed of the mask drawn for sample `id`, independent of its sample stream.
pub fn mask_seed(master: u64, id: u64) -> u64 {
    stable_hash(stable_hash(master, u64::MAX) ^ MASK_STREAM, id)
}

pub fn mask_canvas(canvas: &Canvas, p: f64, seed: u64) -> Result<(Canvas, MaskInfo)> {
    let (out, mask) = patch_mask(canvas, p, &mut CounterRng::new(seed))?;
    let info = MaskInfo {
        mask_prob: p,
        mask_seed: seed,
        masked_patches: mask.iter().filter(|&&m| m).count(),
        mask_bits: mask.iter().map(|&m| if m { '1' } else { '0' }).collect(),
    };
    Ok((out, info))
}

fn format_of(path: &str) -> Result<ImageFormat> {
    path.rsplit('.').next().unwrap_or_default().parse()
}

/// Writes a copy of the dataset in `src` to `dst` with masked inputs.
/// Scratchpad frames are copied unchanged. `seed` picks the masks.
pub fn export_masked_variant(src: &Path, dst: &Path, p: f64, seed: u64, workers: usize) -> Result<Vec<ManifestRecord>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PipelineError::Config(format!("mask-prob {p} outside [0, 1]")));
    }
    fs::create_dir_all(dst).at(dst)?;
    if fs::canonicalize(src).at(src)? == fs::canonicalize(dst).at(dst)? {
        return Err(PipelineError::Config("mask output must differ from the source dataset".into()));
    }
    let records = read_manifest(&src.join(MANIFEST_FILE))?;
    let staging = Staging::create(dst)?;
    let masked = thread_pool(workers)?.install(|| {
        records
            .par_iter()
            .map(|r| {
                let canvas = decode(&fs::read(src.join(&r.input_path)).at(src.join(&r.input_path))?)?;
                if canvas.width() != 224 || canvas.height() != 224 {
                    return Err(PipelineError::Config(format!(
                        "sample {}: masking needs 224x224 inputs, found {}x{}",
                        r.id,
                        canvas.width(),
                        canvas.height()
                    )));
                }
                let (out, info) = mask_canvas(&canvas, p, mask_seed(seed, r.id))?;
                staging.write(&r.input_path, &encode(&out, format_of(&r.input_path)?)?)?;
                for f in &r.frame_paths {
                    staging.write(f, &fs::read(src.join(f)).at(src.join(f))?)?;
                }
                let mut rec = r.clone();
                rec.mask = Some(info);
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    staging.commit_dir(IMAGES_DIR, dst)?;
    let cfg_src = src.join(CONFIG_FILE);
    if cfg_src.exists() {
        let mut text = fs::read_to_string(&cfg_src).at(&cfg_src)?;
        text.push_str(&format!("# masked copy: mask-prob {p}, mask seed {seed}\n"));
        fs::write(dst.join(CONFIG_FILE), text).at(dst.join(CONFIG_FILE))?;
    }
    write_manifest(&dst.join(MANIFEST_FILE), &masked)?;
    Ok(masked)
}
