//! Scoring of model predictions against a generated dataset.
//!
//! Predictions live in `predictions.jsonl`, one object per sample:
//! `{"id": 3, "label": 1, "halt_step": 4, "frames": ["p/3_1.png", ...]}`.
//! Only `id` is required. Frame paths are relative to the predictions file.
//! A sample without a prediction, or without a label, counts as wrong.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vispad_core::Canvas;

use crate::error::{IoContext, PipelineError, Result};
use crate::image_io::read_image;
use crate::manifest::{parse_jsonl, read_manifest, ManifestRecord, MANIFEST_FILE};

pub const PREDICTIONS_FILE: &str = "predictions.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: u64,
    #[serde(default)]
    pub label: Option<u8>,
    #[serde(default)]
    pub halt_step: Option<usize>,
    #[serde(default)]
    pub frames: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub samples: usize,
    pub predicted: usize,
    pub coverage: f64,
    pub label_accuracy: f64,
    /// Fraction of samples with a halt step whose step equals the true
    /// scratchpad length.
    pub halt_step_exact: Option<f64>,
    pub halt_steps_scored: usize,
    /// Mean squared error per channel on a `[0, 1]` scale.
    pub mean_frame_mse: Option<f64>,
    pub frames_scored: usize,
    pub unknown_ids: usize,
}

/// Mean squared per-channel error of two same-sized images, scaled to [0, 1].
pub fn frame_mse(a: &Canvas, b: &Canvas) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(PipelineError::Format(format!(
            "frame size {}x{} does not match {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let (x, y) = (a.to_rgb_bytes(), b.to_rgb_bytes());
    let sum: f64 = x
        .iter()
        .zip(&y)
        .map(|(&p, &q)| {
            let d = (f64::from(p) - f64::from(q)) / 255.0;
            d * d
        })
        .sum();
    Ok(sum / x.len() as f64)
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    parse_jsonl(&fs::read_to_string(path).at(path)?)
}

/// Scores `predictions` for the dataset rooted at `dataset_dir`. A predicted
/// frame `k` is compared with true frame `k`; past the end of the true
/// sequence it is compared with the final frame, which a halted scratchpad
/// repeats.
pub fn score(
    dataset_dir: &Path,
    records: &[ManifestRecord],
    predictions: &[Prediction],
    predictions_dir: &Path,
) -> Result<ScoreReport> {
    let mut by_id: BTreeMap<u64, &Prediction> = BTreeMap::new();
    for p in predictions {
        if by_id.insert(p.id, p).is_some() {
            return Err(PipelineError::Format(format!("duplicate prediction for id {}", p.id)));
        }
    }
    let known: std::collections::BTreeSet<u64> = records.iter().map(|r| r.id).collect();
    let unknown_ids = by_id.keys().filter(|id| !known.contains(id)).count();

    let (mut predicted, mut correct) = (0usize, 0usize);
    let (mut halt_scored, mut halt_exact) = (0usize, 0usize);
    let (mut frames_scored, mut mse_sum) = (0usize, 0.0f64);
    for r in records {
        let Some(p) = by_id.get(&r.id) else { continue };
        predicted += 1;
        if p.label == Some(r.label) {
            correct += 1;
        }
        if let Some(h) = p.halt_step {
            halt_scored += 1;
            if h == r.num_frames {
                halt_exact += 1;
            }
        }
        if let (Some(frames), Some(last)) = (&p.frames, r.frame_paths.last()) {
            for (k, f) in frames.iter().enumerate() {
                let truth = r.frame_paths.get(k).unwrap_or(last);
                let want = read_image(&dataset_dir.join(truth))?;
                let got = read_image(&predictions_dir.join(f))?;
                mse_sum += frame_mse(&got, &want)?;
                frames_scored += 1;
            }
        }
    }
    let n = records.len();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(ScoreReport {
        samples: n,
        predicted,
        coverage: ratio(predicted, n),
        label_accuracy: ratio(correct, n),
        halt_step_exact: (halt_scored > 0).then(|| ratio(halt_exact, halt_scored)),
        halt_steps_scored: halt_scored,
        mean_frame_mse: (frames_scored > 0).then(|| mse_sum / frames_scored as f64),
        frames_scored,
        unknown_ids,
    })
}

/// Reads the manifest and `predictions.jsonl` from disk and scores them.
pub fn score_dirs(dataset_dir: &Path, predictions_dir: &Path) -> Result<ScoreReport> {
    let records = read_manifest(&dataset_dir.join(MANIFEST_FILE))?;
    let predictions = read_predictions(&predictions_dir.join(PREDICTIONS_FILE))?;
    score(dataset_dir, &records, &predictions, predictions_dir)
}
