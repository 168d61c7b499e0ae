use std::fs;
use std::path::Path;

use vispad::config::{DatasetConfig, FrameMode};
use vispad::dataset::{generate_dataset, render_sample};
use vispad::manifest::{read_manifest, MANIFEST_FILE};
use vispad::teacher::export_tuples;
use vispad::ImageFormat;
use vispad_core::TaskKind;

fn files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn config(task: TaskKind, count: u64, out: &Path) -> DatasetConfig {
    let mut cfg = DatasetConfig::new(task);
    cfg.count = count;
    cfg.out = out.to_path_buf();
    cfg.workers = 2;
    cfg
}

#[test]
fn labels_are_balanced_and_manifest_complete() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(TaskKind::Cycles, 100, dir.path());
    cfg.frames = FrameMode::None;
    cfg.resolution = 224;
    let records = generate_dataset(&cfg).unwrap();
    assert_eq!(records.iter().filter(|r| r.label == 1).count(), 50);
    assert_eq!(read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap(), records);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r.id, i as u64);
        assert!(r.frame_paths.is_empty());
        assert!(r.num_frames >= 1);
        assert!(dir.path().join(&r.input_path).exists());
    }
    assert!(!dir.path().join(".tmp-generate").exists());
}

#[test]
fn manifest_keys_in_fixed_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(TaskKind::MazeCirc, 2, dir.path());
    cfg.frames = FrameMode::Single;
    generate_dataset(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
    let line = text.lines().next().unwrap();
    let keys = [
        "\"id\"", "\"task\"", "\"label\"", "\"sample_seed\"", "\"params\"", "\"input_path\"", "\"frame_paths\"",
        "\"num_frames\"", "\"d_target\"", "\"d_max\"", "\"split\"", "\"regime\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| line.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
    assert!(!line.contains("mask"));
    let r = &read_manifest(&dir.path().join(MANIFEST_FILE)).unwrap()[0];
    assert_eq!(r.frame_paths.len(), 1);
    assert!(r.d_target.is_some() && r.d_max.is_some());
}

#[test]
fn reruns_and_worker_counts_give_identical_bytes() {
    let root = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, workers) in [("a", 1), ("b", 8), ("c", 8)] {
        let mut cfg = config(TaskKind::Strings, 12, &root.path().join(name));
        cfg.workers = workers;
        generate_dataset(&cfg).unwrap();
        outputs.push(files(&cfg.out));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn single_sample_regenerates_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(TaskKind::MazeRect, 40, dir.path());
    cfg.size = 24;
    cfg.resolution = 224;
    let records = generate_dataset(&cfg).unwrap();
    let again = render_sample(&cfg, 37).unwrap();
    assert_eq!(again.record, records[37]);
    for (rel, bytes) in &again.files {
        assert_eq!(&fs::read(dir.path().join(rel)).unwrap(), bytes, "{rel}");
    }
}

#[test]
fn ppm_output_and_multi_frames() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(TaskKind::Cycles, 2, dir.path());
    cfg.format = ImageFormat::Ppm;
    cfg.size = 8;
    let records = generate_dataset(&cfg).unwrap();
    assert_eq!(records[0].frame_paths.len(), 3);
    assert_eq!(records[1].frame_paths.len(), 5);
    let bytes = fs::read(dir.path().join(&records[0].input_path)).unwrap();
    assert!(bytes.starts_with(b"P3\n448 448\n255\n"));
}

#[test]
fn failed_generation_leaves_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(TaskKind::MazeRect, 4, dir.path());
    cfg.size = 4;
    assert!(generate_dataset(&cfg).is_err());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn tuples_index_and_self_rollout() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(TaskKind::Cycles, 2, dir.path());
    cfg.size = 8;
    cfg.resolution = 224;
    let index = export_tuples(&cfg, true).unwrap();
    // 3 steps for the split sample, 5 for the single loop, each listed twice.
    assert_eq!(index.len(), 16);
    assert_eq!(index.iter().filter(|t| t.self_rollout).count(), 8);
    let halts: Vec<_> = index.iter().filter(|t| t.halt && !t.self_rollout).map(|t| (t.task_id, t.step, t.y)).collect();
    assert_eq!(halts, [(0, 2, 0), (1, 4, 1)]);
    let text = fs::read_to_string(dir.path().join("tuples.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().next().unwrap().starts_with("{\"task_id\":0,\"step\":0,\"y\":0,\"halt\":false"));
    for t in &index {
        assert!(dir.path().join(&t.input_path).exists() && dir.path().join(&t.target_path).exists());
    }
}
