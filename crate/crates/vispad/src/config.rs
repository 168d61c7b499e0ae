//! Dataset configuration and its flat `key = value` file format.
//!
//! Keys mirror the command-line flags without the leading dashes (`task`,
//! `size`, `mask-prob`, ...); `_` and `-` are interchangeable. Lines starting
//! with `#` are comments. Values given on the command line replace those
//! from a file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use vispad_core::{Regime, Style, TaskKind, TaskSpec};

use crate::error::{IoContext, PipelineError, Result};
use crate::image_io::ImageFormat;

pub const DEFAULT_COUNT: u64 = 1000;
pub const RESOLUTIONS: [usize; 2] = [448, 224];

/// Which scratchpad frames are written next to each input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrameMode {
    None,
    /// Only the final, fully colored frame.
    Single,
    #[default]
    Multi,
}

impl FrameMode {
    pub fn name(self) -> &'static str {
        match self {
            FrameMode::None => "none",
            FrameMode::Single => "single",
            FrameMode::Multi => "multi",
        }
    }
}

impl fmt::Display for FrameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameMode {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FrameMode::None),
            "single" => Ok(FrameMode::Single),
            "multi" => Ok(FrameMode::Multi),
            other => Err(PipelineError::Config(format!("unknown frame mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub task: TaskKind,
    /// Task number as named in the benchmark: total node count for cycles
    /// and strings, grid side or ring count for mazes.
    pub size: usize,
    pub count: u64,
    pub seed: u64,
    pub regime: Regime,
    pub frames: FrameMode,
    pub resolution: usize,
    pub out: PathBuf,
    pub mask_prob: Option<f64>,
    pub workers: usize,
    pub format: ImageFormat,
    pub split: String,
    pub style: Style,
}

impl DatasetConfig {
    pub fn new(task: TaskKind) -> Self {
        Self {
            task,
            size: task.default_size(),
            count: DEFAULT_COUNT,
            seed: 0,
            regime: Regime::Main,
            frames: FrameMode::default(),
            resolution: 448,
            out: PathBuf::from("out"),
            mask_prob: None,
            workers: default_workers(),
            format: ImageFormat::Png,
            split: "train".into(),
            style: Style::default(),
        }
    }

    pub fn task_spec(&self) -> Result<TaskSpec> {
        Ok(TaskSpec::new(self.task, self.size, self.regime)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.task_spec()?;
        self.style.validate()?;
        if self.count == 0 || !self.count.is_multiple_of(2) {
            return Err(PipelineError::Config(format!(
                "count must be a positive even number for balanced labels, got {}",
                self.count
            )));
        }
        if !RESOLUTIONS.contains(&self.resolution) {
            return Err(PipelineError::Config(format!(
                "resolution must be 448 or 224, got {}",
                self.resolution
            )));
        }
        if let Some(p) = self.mask_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(PipelineError::Config(format!("mask-prob {p} outside [0, 1]")));
            }
            if self.resolution != 224 {
                return Err(PipelineError::Config("mask-prob needs resolution 224".into()));
            }
        }
        if self.workers == 0 {
            return Err(PipelineError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Builds a config from key/value pairs; `task` is required.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let task: TaskKind = pairs
            .get("task")
            .ok_or_else(|| PipelineError::Config("missing required key `task`".into()))?
            .parse()?;
        let mut cfg = Self::new(task);
        for (key, value) in pairs {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| PipelineError::Config(format!("invalid value {value:?} for `{key}`")))
        }
        match key {
            "task" => self.task = value.parse()?,
            "size" => self.size = num(key, value)?,
            "count" => self.count = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "regime" => self.regime = value.parse()?,
            "frames" => self.frames = value.parse()?,
            "resolution" => self.resolution = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "mask-prob" => self.mask_prob = Some(num(key, value)?),
            "workers" => self.workers = num(key, value)?,
            "format" => self.format = value.parse()?,
            "split" => self.split = value.to_string(),
            "node-radius" => self.style.node_radius = num(key, value)?,
            "edge-width" => self.style.edge_width = num(key, value)?,
            "curve-width" => self.style.curve_width = num(key, value)?,
            "anchor-radius" => self.style.anchor_radius = num(key, value)?,
            "wall-width" => self.style.wall_width = num(key, value)?,
            "maze-margin" => self.style.maze_margin = num(key, value)?,
            other => return Err(PipelineError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Settings that determine the output bytes, in `key = value` form.
    /// `out` and `workers` are left out.
    pub fn to_kv_string(&self) -> String {
        let s = &self.style;
        let mut lines = vec![
            format!("task = {}", self.task),
            format!("size = {}", self.size),
            format!("count = {}", self.count),
            format!("seed = {}", self.seed),
            format!("regime = {}", self.regime),
            format!("frames = {}", self.frames),
            format!("resolution = {}", self.resolution),
            format!("format = {}", self.format.extension()),
            format!("split = {}", self.split),
            format!("node-radius = {}", s.node_radius),
            format!("edge-width = {}", s.edge_width),
            format!("curve-width = {}", s.curve_width),
            format!("anchor-radius = {}", s.anchor_radius),
            format!("wall-width = {}", s.wall_width),
            format!("maze-margin = {}", s.maze_margin),
        ];
        if let Some(p) = self.mask_prob {
            lines.push(format!("mask-prob = {p}"));
        }
        lines.join("\n") + "\n"
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-")
}

/// Parses `key = value` lines.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", n + 1)))?;
        out.insert(normalize_key(k), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_kv_file(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_kv(&fs::read_to_string(path).at(path)?)
}

pub fn load_config(path: &Path) -> Result<DatasetConfig> {
    DatasetConfig::from_pairs(&read_kv_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_style_keys_and_comments() {
        let pairs = parse_kv("# run\ntask = maze-rect\n--mask_prob=0.3\n\nsize=24\n").unwrap();
        let cfg = DatasetConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.task, TaskKind::MazeRect);
        assert_eq!(cfg.size, 24);
        assert_eq!(cfg.mask_prob, Some(0.3));
    }

    #[test]
    fn round_trips_through_text() {
        let mut cfg = DatasetConfig::new(TaskKind::Strings);
        cfg.count = 10;
        cfg.frames = FrameMode::Single;
        cfg.style.curve_width = 4.5;
        let back = DatasetConfig::from_pairs(&parse_kv(&cfg.to_kv_string()).unwrap()).unwrap();
        assert_eq!(back.to_kv_string(), cfg.to_kv_string());
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = DatasetConfig::new(TaskKind::Cycles);
        cfg.count = 7;
        assert!(cfg.validate().is_err());
        cfg.count = 8;
        cfg.resolution = 300;
        assert!(cfg.validate().is_err());
        assert!(parse_kv("no equals sign").is_err());
        let pairs = parse_kv("task = cycles\ncolour = red").unwrap();
        assert!(DatasetConfig::from_pairs(&pairs).is_err());
    }
}
