//! Task kinds, sampled instances, colorings and frame schedules.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::cycles::{self, CycleGraph, CyclesParams};
use crate::error::{param_err, Error, Result};
use crate::maze::{self, CellGraph, MazeInstance, MazeShape};
use crate::raster::Canvas;
use crate::rng::CounterRng;
use crate::strings::{self, StringCurve, StringsParams};
use crate::style::Style;

/// Binary label: whether the structure through the anchor reaches
/// everything (cycles, strings) or the sink (mazes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Disconnected = 0,
    Connected = 1,
}

impl Label {
    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Label::Disconnected),
            1 => Ok(Label::Connected),
            _ => Err(param_err!("label must be 0 or 1, got {v}")),
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Disconnected => Label::Connected,
            Label::Connected => Label::Disconnected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Cycles,
    Strings,
    MazeRect,
    MazeCirc,
}

impl TaskKind {
    pub const ALL: [TaskKind; 4] = [
        TaskKind::Cycles,
        TaskKind::Strings,
        TaskKind::MazeRect,
        TaskKind::MazeCirc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Cycles => "cycles",
            TaskKind::Strings => "strings",
            TaskKind::MazeRect => "maze-rect",
            TaskKind::MazeCirc => "maze-circ",
        }
    }

    /// Size used when none is given: cycles 12, strings 12, maze (rect.) 32,
    /// maze (circ.) 16.
    pub fn default_size(self) -> usize {
        match self {
            TaskKind::Cycles | TaskKind::Strings => 12,
            TaskKind::MazeRect => 32,
            TaskKind::MazeCirc => 16,
        }
    }

    pub fn is_maze(self) -> bool {
        matches!(self, TaskKind::MazeRect | TaskKind::MazeCirc)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| param_err!("unknown task {s:?}"))
    }
}

/// Maze difficulty regime: `Main` targets far ends and balanced components,
/// `Easy` targets short distances and a small start component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Regime {
    #[default]
    Main,
    Easy,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Main => "main",
            Regime::Easy => "easy",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(Regime::Main),
            "easy" => Ok(Regime::Easy),
            _ => Err(param_err!("unknown regime {s:?}")),
        }
    }
}

/// A task family at one size. `size` is the benchmark's task number: total
/// node count `2n` for cycles and strings, grid side for rectangular mazes,
/// ring count for circular mazes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub size: usize,
    pub regime: Regime,
}

impl TaskSpec {
    pub fn new(kind: TaskKind, size: usize, regime: Regime) -> Result<Self> {
        let spec = Self { kind, size, regime };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            TaskKind::Cycles | TaskKind::Strings => {
                if !self.size.is_multiple_of(2) || self.size < 6 {
                    return Err(param_err!(
                        "{} size must be an even node count >= 6, got {}",
                        self.kind,
                        self.size
                    ));
                }
            }
            TaskKind::MazeRect => {
                if self.size < 4 {
                    return Err(param_err!("rectangular maze size must be >= 4"));
                }
            }
            TaskKind::MazeCirc => {
                if self.size < 2 {
                    return Err(param_err!("circular maze needs >= 2 rings"));
                }
            }
        }
        Ok(())
    }

    /// Short name such as `cycles-12` or `maze-rect-32`.
    pub fn name(&self) -> String {
        alloc::format!("{}-{}", self.kind, self.size)
    }

    pub fn maze_shape(&self) -> Option<MazeShape> {
        match self.kind {
            TaskKind::MazeRect => Some(MazeShape::Rect(self.size)),
            TaskKind::MazeCirc => Some(MazeShape::Circular(self.size)),
            _ => None,
        }
    }

    /// Draws one instance with the requested label. Randomness is consumed
    /// in the order documented on each task's sampler.
    pub fn sample(&self, label: Label, style: &Style, rng: &mut CounterRng) -> Result<TaskInstance> {
        self.validate()?;
        match self.kind {
            TaskKind::Cycles => {
                let params = CyclesParams::for_canvas(self.size / 2, style.canvas_size);
                cycles::make_cycles_instance(&params, label, rng).map(TaskInstance::Cycles)
            }
            TaskKind::Strings => {
                let params = StringsParams::for_canvas(self.size / 2, style.canvas_size);
                strings::sample_strings_instance(&params, label, rng).map(TaskInstance::Strings)
            }
            TaskKind::MazeRect | TaskKind::MazeCirc => {
                let shape = self.maze_shape().expect("maze kind");
                let graph = CellGraph::build(shape)?;
                maze::generate_maze(graph, label, self.regime, rng).map(TaskInstance::Maze)
            }
        }
    }
}

/// Set of colored nodes, anchors or cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring(Vec<bool>);

impl Coloring {
    pub fn empty(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self(mask)
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::empty(n);
        for i in indices {
            c.0[i] = true;
        }
        c
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.get(i).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i] = true;
    }

    pub fn mask(&self) -> &[bool] {
        &self.0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn is_subset_of(&self, other: &Coloring) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }
}

/// Scratchpad frames `f_1 .. f_T` of one instance. Frame `k` (1-based) is
/// `frames[k - 1]`; the raw input `f_0` has an empty coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSequence {
    pub frames: Vec<Coloring>,
    /// Radius of each frame: hop distance for cycles and strings, BFS depth
    /// for mazes.
    pub radii: Vec<usize>,
}

impl FrameSequence {
    /// Number of frames `T`; the halt signal fires on frame `T`.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn final_frame(&self) -> &Coloring {
        self.frames.last().expect("schedules have at least one frame")
    }

    /// Coloring at step `k`, with step 0 the empty input coloring.
    pub fn at_step(&self, k: usize, n: usize) -> Option<Coloring> {
        match k {
            0 => Some(Coloring::empty(n)),
            _ => self.frames.get(k - 1).cloned(),
        }
    }
}

/// One sampled instance of any task.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskInstance {
    Cycles(CycleGraph),
    Strings(StringCurve),
    Maze(MazeInstance),
}

impl TaskInstance {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskInstance::Cycles(_) => TaskKind::Cycles,
            TaskInstance::Strings(_) => TaskKind::Strings,
            TaskInstance::Maze(m) => match m.graph.shape {
                MazeShape::Rect(_) => TaskKind::MazeRect,
                MazeShape::Circular(_) => TaskKind::MazeCirc,
            },
        }
    }

    pub fn label(&self) -> Label {
        match self {
            TaskInstance::Cycles(g) => g.label,
            TaskInstance::Strings(s) => s.label,
            TaskInstance::Maze(m) => m.label,
        }
    }

    /// Number of colorable items: nodes, anchors or cells.
    pub fn item_count(&self) -> usize {
        match self {
            TaskInstance::Cycles(g) => g.positions.len(),
            TaskInstance::Strings(s) => s.anchors.len(),
            TaskInstance::Maze(m) => m.graph.cell_count(),
        }
    }

    pub fn schedule(&self) -> FrameSequence {
        match self {
            TaskInstance::Cycles(g) => cycles::cycles_frame_schedule(g),
            TaskInstance::Strings(s) => strings::strings_frame_schedule(s),
            TaskInstance::Maze(m) => maze::maze_frame_schedule(m, maze::FRAME_STRIDE),
        }
    }

    /// One local scratchpad step: the next coloring computed from the current
    /// one alone.
    pub fn expand(&self, coloring: &Coloring) -> Coloring {
        match self {
            TaskInstance::Cycles(g) => cycles::expand_hops(&g.adjacency(), g.rightmost, coloring),
            TaskInstance::Strings(s) => cycles::expand_hops(&s.adjacency(), s.rightmost, coloring),
            TaskInstance::Maze(m) => maze::expand_search(m, coloring, maze::FRAME_STRIDE),
        }
    }

    /// Label read off a coloring, or `None` while the search is unfinished.
    pub fn decode(&self, coloring: &Coloring) -> Option<Label> {
        match self {
            TaskInstance::Cycles(g) => cycles::decode_loop_coloring(&g.adjacency(), coloring),
            TaskInstance::Strings(s) => cycles::decode_loop_coloring(&s.adjacency(), coloring),
            TaskInstance::Maze(m) => maze::decode_maze_coloring(m, coloring),
        }
    }

    /// Renders the frame showing `coloring`; an empty coloring is the input.
    pub fn render(&self, coloring: &Coloring, style: &Style) -> Result<Canvas> {
        style.validate()?;
        if coloring.len() != self.item_count() {
            return Err(crate::error::contract_err!(
                "coloring over {} items for an instance with {}",
                coloring.len(),
                self.item_count()
            ));
        }
        Ok(match self {
            TaskInstance::Cycles(g) => cycles::render_cycles(g, coloring, style),
            TaskInstance::Strings(s) => strings::render_strings(s, coloring, style),
            TaskInstance::Maze(m) => maze::render_maze(m, coloring, style),
        })
    }

    pub fn render_input(&self, style: &Style) -> Result<Canvas> {
        self.render(&Coloring::empty(self.item_count()), style)
    }
}
