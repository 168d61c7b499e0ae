use std::fs;

use vispad::config::DatasetConfig;
use vispad::dataset::generate_dataset;
use vispad::image_io::read_image;
use vispad::manifest::{read_manifest, MANIFEST_FILE};
use vispad::mask::export_masked_variant;
use vispad::score::{frame_mse, score, score_dirs, Prediction};
use vispad_core::{Canvas, Color, TaskKind};

fn small_dataset(dir: &std::path::Path, resolution: usize) -> DatasetConfig {
    let mut cfg = DatasetConfig::new(TaskKind::Cycles);
    cfg.count = 8;
    cfg.size = 8;
    cfg.resolution = resolution;
    cfg.out = dir.to_path_buf();
    cfg.workers = 2;
    generate_dataset(&cfg).unwrap();
    cfg
}

#[test]
fn mask_copies_frames_and_records_bits() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small_dataset(&root.path().join("src"), 224);
    let dst = root.path().join("masked");
    let out = export_masked_variant(&cfg.out, &dst, 0.5, 3, 2).unwrap();
    assert_eq!(out.len(), 8);
    assert_eq!(read_manifest(&dst.join(MANIFEST_FILE)).unwrap(), out);
    for r in &out {
        let m = r.mask.as_ref().unwrap();
        assert_eq!(m.mask_bits.len(), 196);
        assert_eq!(m.mask_bits.matches('1').count(), m.masked_patches);
        let img = read_image(&dst.join(&r.input_path)).unwrap();
        let gray = img.pixels().iter().filter(|&&p| p == Color::MASK_GRAY).count();
        assert!(gray >= m.masked_patches * 256);
        for f in &r.frame_paths {
            assert_eq!(fs::read(cfg.out.join(f)).unwrap(), fs::read(dst.join(f)).unwrap());
        }
    }
    let again = export_masked_variant(&cfg.out, &root.path().join("again"), 0.5, 3, 1).unwrap();
    assert_eq!(again, out);
}

#[test]
fn mask_needs_224_inputs_and_distinct_output() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small_dataset(&root.path().join("src"), 448);
    assert!(export_masked_variant(&cfg.out, &root.path().join("m"), 0.3, 0, 1).is_err());
    assert!(!root.path().join("m/images").exists());
    assert!(export_masked_variant(&cfg.out, &cfg.out, 0.3, 0, 1).is_err());
}

#[test]
fn toy_frame_mse() {
    let got = Canvas::from_pixels(2, 2, vec![Color::BLACK, Color::WHITE, Color::RED, Color::BLUE]).unwrap();
    let want = Canvas::filled(2, 2, Color::WHITE);
    // Squared channel errors: black 3, white 0, red 2, blue 2, over 12 channels.
    assert!((frame_mse(&got, &want).unwrap() - 7.0 / 12.0).abs() < 1e-12);
    assert_eq!(frame_mse(&want, &want).unwrap(), 0.0);
    assert!(frame_mse(&want, &Canvas::new(3, 2)).is_err());
}

fn write_predictions(dir: &std::path::Path, preds: &[Prediction]) {
    let text: String = preds.iter().map(|p| serde_json::to_string(p).unwrap() + "\n").collect();
    fs::write(dir.join("predictions.jsonl"), text).unwrap();
}

#[test]
fn truth_scores_perfectly_and_flipped_scores_zero() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small_dataset(&root.path().join("data"), 224);
    let records = read_manifest(&cfg.out.join(MANIFEST_FILE)).unwrap();
    let pdir = root.path().join("pred");
    fs::create_dir_all(&pdir).unwrap();
    let truth: Vec<Prediction> = records
        .iter()
        .map(|r| Prediction {
            id: r.id,
            label: Some(r.label),
            halt_step: Some(r.num_frames),
            frames: Some(r.frame_paths.iter().map(|f| format!("../data/{f}")).collect()),
        })
        .collect();
    write_predictions(&pdir, &truth);
    let rep = score_dirs(&cfg.out, &pdir).unwrap();
    assert_eq!((rep.coverage, rep.label_accuracy, rep.halt_step_exact), (1.0, 1.0, Some(1.0)));
    assert_eq!(rep.mean_frame_mse, Some(0.0));

    let flipped: Vec<Prediction> = truth
        .iter()
        .map(|p| Prediction {
            label: p.label.map(|l| 1 - l),
            halt_step: p.halt_step.map(|h| h + 1),
            frames: None,
            ..p.clone()
        })
        .collect();
    let rep = score(&cfg.out, &records, &flipped, &pdir).unwrap();
    assert_eq!((rep.label_accuracy, rep.halt_step_exact, rep.mean_frame_mse), (0.0, Some(0.0), None));
}

#[test]
fn missing_predictions_reduce_coverage() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small_dataset(&root.path().join("data"), 224);
    let records = read_manifest(&cfg.out.join(MANIFEST_FILE)).unwrap();
    let half: Vec<Prediction> = records
        .iter()
        .take(4)
        .map(|r| Prediction { id: r.id, label: Some(r.label), halt_step: None, frames: None })
        .chain([Prediction { id: 999, label: Some(0), halt_step: None, frames: None }])
        .collect();
    let rep = score(&cfg.out, &records, &half, root.path()).unwrap();
    assert_eq!((rep.predicted, rep.coverage, rep.label_accuracy, rep.unknown_ids), (4, 0.5, 0.5, 1));
    let dup = vec![half[0].clone(), half[0].clone()];
    assert!(score(&cfg.out, &records, &dup, root.path()).is_err());
}

#[test]
fn frames_past_the_end_compare_with_final_frame() {
    let root = tempfile::tempdir().unwrap();
    let cfg = small_dataset(&root.path().join("data"), 224);
    let records = read_manifest(&cfg.out.join(MANIFEST_FILE)).unwrap();
    let r = &records[0];
    let last = r.frame_paths.last().unwrap();
    let pdir = root.path().join("pred");
    fs::create_dir_all(&pdir).unwrap();
    let frames = vec![format!("../data/{last}"); r.num_frames + 2];
    let pred = Prediction { id: r.id, label: Some(r.label), halt_step: None, frames: Some(frames) };
    let rep = score(&cfg.out, &records[..1], &[pred], &pdir).unwrap();
    assert_eq!(rep.frames_scored, r.num_frames + 2);
    let final_frame = read_image(&cfg.out.join(last)).unwrap();
    let sum: f64 = r
        .frame_paths
        .iter()
        .map(|f| frame_mse(&final_frame, &read_image(&cfg.out.join(f)).unwrap()).unwrap())
        .sum();
    let want = sum / (r.num_frames + 2) as f64;
    assert!(rep.mean_frame_mse.unwrap() > 0.0);
    assert!((rep.mean_frame_mse.unwrap() - want).abs() < 1e-12, "{rep:?}");
}
