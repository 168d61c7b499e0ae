//! Rectangular and circular mazes.
//!
//! A maze is a spanning tree over the cell graph built by randomized Kruskal.
//! A start cell is taken next to the first removed wall, an end cell at a
//! sampled distance, and one tree edge is walled back in to split the maze
//! into two components; the label says whether start and end still connect.
//!
//! Random draws, in order: the Kruskal wall shuffle, the start side of the
//! first wall (`below(2)`), the target distance, the end cell among all
//! cells at that distance (in index order).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{param_err, Error, Result};
use crate::geometry::Point;
use crate::graph::{bfs_distances, eccentricity, DisjointSet};
use crate::raster::{Canvas, Color};
use crate::rng::CounterRng;
use crate::style::Style;
use crate::task::{Coloring, FrameSequence, Label, Regime};

/// BFS depth added per scratchpad frame.
pub const FRAME_STRIDE: usize = 10;
/// Main regime: target distance drawn from `[d_max - MAIN_WINDOW, d_max]`.
pub const MAIN_WINDOW: usize = 20;
/// Easy regime: target distance drawn from `[EASY_MIN, EASY_MAX]`.
pub const EASY_MIN: usize = 10;
pub const EASY_MAX: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MazeShape {
    /// `n × n` grid.
    Rect(usize),
    /// Center cell plus this many rings.
    Circular(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellPos {
    Grid { row: usize, col: usize },
    Ring { ring: usize, sector: usize },
}

/// Number of cells in ring `r` of a circular maze (ring 0 is the center).
///
/// Counts double in runs that double in length: one ring of 6, three of 12,
/// six of 24, twelve of 48, and so on.
pub fn ring_cell_count(ring: usize) -> usize {
    if ring == 0 {
        return 1;
    }
    let (mut start, mut len, mut count) = (1usize, 1usize, 6usize);
    loop {
        if ring < start + len {
            return count;
        }
        start += len;
        len = if count == 6 { 3 } else { len * 2 };
        count *= 2;
    }
}

/// Cells and every candidate wall between adjacent cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGraph {
    pub shape: MazeShape,
    pub cells: Vec<CellPos>,
    /// Candidate walls as cell pairs. Angular walls in a circular maze are
    /// stored as `(sector j, sector j + 1)`, radial ones as `(inner, outer)`.
    pub walls: Vec<(usize, usize)>,
    /// Cells per ring for circular mazes, center first; empty for grids.
    pub ring_counts: Vec<usize>,
    incident: Vec<Vec<(usize, usize)>>,
}

impl CellGraph {
    pub fn build(shape: MazeShape) -> Result<Self> {
        let mut cells = Vec::new();
        let mut walls = Vec::new();
        let mut ring_counts = Vec::new();
        let mut ring_offsets = Vec::new();
        match shape {
            MazeShape::Rect(n) => {
                if n < 4 {
                    return Err(param_err!("rectangular maze size must be >= 4, got {n}"));
                }
                for row in 0..n {
                    for col in 0..n {
                        cells.push(CellPos::Grid { row, col });
                    }
                }
                for row in 0..n {
                    for col in 0..n {
                        let i = row * n + col;
                        if col + 1 < n {
                            walls.push((i, i + 1));
                        }
                        if row + 1 < n {
                            walls.push((i, i + n));
                        }
                    }
                }
            }
            MazeShape::Circular(rings) => {
                if rings < 2 {
                    return Err(param_err!("circular maze needs >= 2 rings, got {rings}"));
                }
                for ring in 0..=rings {
                    ring_offsets.push(cells.len());
                    let m = ring_cell_count(ring);
                    ring_counts.push(m);
                    for sector in 0..m {
                        cells.push(CellPos::Ring { ring, sector });
                    }
                }
                for ring in 0..=rings {
                    let m = ring_counts[ring];
                    let base = ring_offsets[ring];
                    for j in 0..m {
                        if ring > 0 {
                            walls.push((base + j, base + (j + 1) % m));
                        }
                        if ring < rings {
                            let next = ring_counts[ring + 1];
                            let nbase = ring_offsets[ring + 1];
                            let children: Vec<usize> = if ring == 0 {
                                (0..next).collect()
                            } else if next == 2 * m {
                                vec![2 * j, 2 * j + 1]
                            } else {
                                vec![j]
                            };
                            for c in children {
                                walls.push((base + j, nbase + c));
                            }
                        }
                    }
                }
            }
        }
        let mut incident = vec![Vec::new(); cells.len()];
        for (w, &(a, b)) in walls.iter().enumerate() {
            incident[a].push((w, b));
            incident[b].push((w, a));
        }
        Ok(Self {
            shape,
            cells,
            walls,
            ring_counts,
            incident,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    /// `(wall index, neighbor)` pairs around `cell`.
    pub fn incident(&self, cell: usize) -> &[(usize, usize)] {
        &self.incident[cell]
    }

    /// Adjacency restricted to walls with `open[w]` set.
    pub fn open_adjacency(&self, open: &[bool]) -> Vec<Vec<usize>> {
        self.incident
            .iter()
            .map(|inc| inc.iter().filter(|(w, _)| open[*w]).map(|&(_, c)| c).collect())
            .collect()
    }

    fn ring_of(&self, cell: usize) -> (usize, usize) {
        match self.cells[cell] {
            CellPos::Ring { ring, sector } => (ring, sector),
            CellPos::Grid { .. } => (0, 0),
        }
    }
}

/// Randomized Kruskal: walks a shuffled wall order and opens a wall whenever
/// its cells are not yet connected. Returns the open-wall mask of the
/// spanning tree and the first wall opened.
pub fn kruskal_generate(graph: &CellGraph, rng: &mut CounterRng) -> (Vec<bool>, usize) {
    let mut order: Vec<usize> = (0..graph.wall_count()).collect();
    rng.shuffle(&mut order);
    let mut sets = DisjointSet::new(graph.cell_count());
    let mut open = vec![false; graph.wall_count()];
    let mut first = None;
    let mut opened = 0;
    for w in order {
        let (a, b) = graph.walls[w];
        if sets.union(a, b) {
            open[w] = true;
            first.get_or_insert(w);
            opened += 1;
            if opened + 1 == graph.cell_count() {
                break;
            }
        }
    }
    (open, first.expect("a maze has at least one wall"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Endpoints {
    pub start: usize,
    pub end: usize,
    pub d_target: usize,
    pub d_max: usize,
}

/// Inclusive range the target distance is drawn from.
pub fn target_range(regime: Regime, d_max: usize) -> Result<(usize, usize)> {
    match regime {
        Regime::Main => {
            if d_max < MAIN_WINDOW {
                return Err(param_err!(
                    "maze too small for the main regime: d_max = {d_max} < {MAIN_WINDOW}"
                ));
            }
            // Distance 0 would put the end on the start.
            Ok(((d_max - MAIN_WINDOW).max(1), d_max))
        }
        Regime::Easy => {
            if d_max < EASY_MIN {
                return Err(param_err!(
                    "maze too small for the easy regime: d_max = {d_max} < {EASY_MIN}"
                ));
            }
            Ok((EASY_MIN, EASY_MAX.min(d_max)))
        }
    }
}

/// Start next to the first removed wall, end at a sampled tree distance.
pub fn pick_start_end(
    graph: &CellGraph,
    tree: &[bool],
    first_wall: usize,
    regime: Regime,
    rng: &mut CounterRng,
) -> Result<Endpoints> {
    let (a, b) = graph.walls[first_wall];
    let start = if rng.below(2) == 0 { a } else { b };
    let dist = bfs_distances(&graph.open_adjacency(tree), start);
    let d_max = eccentricity(&dist);
    let (lo, hi) = target_range(regime, d_max)?;
    let d_target = rng.inclusive(lo, hi);
    let candidates: Vec<usize> = dist
        .iter()
        .enumerate()
        .filter_map(|(i, d)| (*d == Some(d_target)).then_some(i))
        .collect();
    let end = candidates[rng.index(candidates.len())];
    Ok(Endpoints {
        start,
        end,
        d_target,
        d_max,
    })
}

/// Parent wall and cell of every cell in a tree rooted at `root`, plus
/// subtree sizes and depths.
struct RootedTree {
    parent: Vec<Option<(usize, usize)>>,
    subtree: Vec<usize>,
    depth: Vec<usize>,
}

fn root_tree(graph: &CellGraph, tree: &[bool], root: usize) -> RootedTree {
    let n = graph.cell_count();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    depth[root] = 0;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &(w, v) in graph.incident(u) {
            if tree[w] && depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                parent[v] = Some((w, u));
                order.push(v);
            }
        }
    }
    let mut subtree = vec![1usize; n];
    for &u in order.iter().rev() {
        if let Some((_, p)) = parent[u] {
            subtree[p] += subtree[u];
        }
    }
    RootedTree {
        parent,
        subtree,
        depth,
    }
}

/// Chooses the tree wall to re-insert.
///
/// Label 0 candidates are the walls on the start–end path, label 1
/// candidates all other tree walls. The main regime minimizes the size
/// difference of the two components; the easy regime picks the start
/// component size closest to `(EASY_MAX / d_max) · (cells / 2)`. Ties go to
/// the lowest wall index.
pub fn split_components(
    graph: &CellGraph,
    tree: &[bool],
    start: usize,
    end: usize,
    label: Label,
    regime: Regime,
) -> Result<usize> {
    let rooted = root_tree(graph, tree, start);
    let cells = graph.cell_count();
    if rooted.depth[end] == usize::MAX {
        return Err(param_err!("end cell is not in the start's tree"));
    }
    let mut on_path = vec![false; graph.wall_count()];
    let mut v = end;
    while let Some((w, p)) = rooted.parent[v] {
        on_path[w] = true;
        v = p;
    }
    let d_max = rooted.depth.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    let easy_target = if d_max == 0 {
        0.0
    } else {
        EASY_MAX as f64 / d_max as f64 * (cells as f64 / 2.0)
    };
    let mut best: Option<(f64, usize)> = None;
    for (w, &(a, b)) in graph.walls.iter().enumerate() {
        if !tree[w] || on_path[w] != (label == Label::Disconnected) {
            continue;
        }
        let child = if rooted.depth[a] > rooted.depth[b] { a } else { b };
        let start_side = cells - rooted.subtree[child];
        let score = match regime {
            Regime::Main => (2 * start_side).abs_diff(cells) as f64,
            Regime::Easy => (start_side as f64 - easy_target).abs(),
        };
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, w));
        }
    }
    best.map(|(_, w)| w).ok_or_else(|| {
        Error::Parameter(alloc::format!(
            "no wall can be re-inserted for label {}",
            label.as_u8()
        ))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MazeInstance {
    pub graph: CellGraph,
    /// Open walls of the spanning tree, before the split.
    pub tree: Vec<bool>,
    pub first_wall: usize,
    pub start: usize,
    pub end: usize,
    pub label: Label,
    pub split_wall: usize,
    pub d_target: usize,
    pub d_max: usize,
    pub regime: Regime,
}

impl MazeInstance {
    /// Open walls after the split.
    pub fn open(&self) -> Vec<bool> {
        let mut open = self.tree.clone();
        open[self.split_wall] = false;
        open
    }

    pub fn open_adjacency(&self) -> Vec<Vec<usize>> {
        self.graph.open_adjacency(&self.open())
    }

    /// Distances from the start after the split.
    pub fn start_distances(&self) -> Vec<Option<usize>> {
        bfs_distances(&self.open_adjacency(), self.start)
    }

    /// Depth at which the search stops: the end's distance when reachable,
    /// otherwise the start's eccentricity in its component.
    pub fn d_stop(&self) -> usize {
        let dist = self.start_distances();
        dist[self.end].unwrap_or_else(|| eccentricity(&dist))
    }
}

pub fn generate_maze(graph: CellGraph, label: Label, regime: Regime, rng: &mut CounterRng) -> Result<MazeInstance> {
    let (tree, first_wall) = kruskal_generate(&graph, rng);
    let ep = pick_start_end(&graph, &tree, first_wall, regime, rng)?;
    let split_wall = split_components(&graph, &tree, ep.start, ep.end, label, regime)?;
    Ok(MazeInstance {
        graph,
        tree,
        first_wall,
        start: ep.start,
        end: ep.end,
        label,
        split_wall,
        d_target: ep.d_target,
        d_max: ep.d_max,
        regime,
    })
}

/// Label recomputed from connectivity of start and end after the split.
pub fn maze_label(maze: &MazeInstance) -> Label {
    if maze.start_distances()[maze.end].is_some() {
        Label::Connected
    } else {
        Label::Disconnected
    }
}

/// Frame `k` colors the start component within depth `min(stride·k, d_stop)`.
/// There are `ceil(d_stop / stride)` frames, and never fewer than one.
pub fn maze_frame_schedule(maze: &MazeInstance, stride: usize) -> FrameSequence {
    let dist = maze.start_distances();
    let d_stop = dist[maze.end].unwrap_or_else(|| eccentricity(&dist));
    let count = d_stop.div_ceil(stride).max(1);
    let radii: Vec<usize> = (1..=count).map(|k| (stride * k).min(d_stop)).collect();
    let frames = radii
        .iter()
        .map(|&r| Coloring::from_mask(dist.iter().map(|d| d.is_some_and(|d| d <= r)).collect()))
        .collect();
    FrameSequence { frames, radii }
}

/// One search step from the current coloring: extend the explored depth by
/// `stride`, stopping at the end cell once it comes into reach.
pub fn expand_search(maze: &MazeInstance, coloring: &Coloring, stride: usize) -> Coloring {
    let dist = maze.start_distances();
    let current = coloring.indices().filter_map(|c| dist[c]).max();
    let mut next = match current {
        None => stride,
        Some(r) => r + stride,
    };
    if let Some(d_end) = dist[maze.end] {
        next = next.min(d_end.max(current.unwrap_or(0)));
    }
    Coloring::from_mask(dist.iter().map(|d| d.is_some_and(|d| d <= next)).collect())
}

/// `Connected` once the end is colored; `Disconnected` once the colored
/// region has no open passage to an uncolored cell; undecided otherwise.
pub fn decode_maze_coloring(maze: &MazeInstance, coloring: &Coloring) -> Option<Label> {
    if coloring.contains(maze.end) {
        return Some(Label::Connected);
    }
    if coloring.count() == 0 {
        return None;
    }
    let adj = maze.open_adjacency();
    let closed = coloring
        .indices()
        .all(|v| adj[v].iter().all(|&u| coloring.contains(u)));
    closed.then_some(Label::Disconnected)
}

/// Pixel layout of a maze on a canvas.
#[derive(Debug, Clone, Copy)]
pub enum MazeLayout {
    Grid { n: usize, origin: f64, cell: f64 },
    Rings { rings: usize, center: Point, thickness: f64 },
}

impl MazeLayout {
    pub fn new(shape: MazeShape, style: &Style) -> Self {
        let size = style.canvas_size as f64;
        match shape {
            MazeShape::Rect(n) => {
                let avail = size - 2.0 * style.maze_margin;
                let mut cell = libm::floor(avail / n as f64);
                if cell < 1.0 {
                    cell = avail / n as f64;
                }
                MazeLayout::Grid {
                    n,
                    origin: (size - cell * n as f64) / 2.0,
                    cell,
                }
            }
            MazeShape::Circular(rings) => MazeLayout::Rings {
                rings,
                center: style.center(),
                thickness: (size / 2.0 - style.maze_margin) / (rings + 1) as f64,
            },
        }
    }
}

/// A wall in pixel space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallShape {
    Segment(Point, Point),
    /// Arc of the given radius over `[angle0, angle1)`.
    Arc { radius: f64, angle0: f64, angle1: f64 },
}

fn sector_angles(m: usize, sector: usize) -> (f64, f64) {
    (TAU * sector as f64 / m as f64, TAU * (sector + 1) as f64 / m as f64)
}

/// Geometry of candidate wall `w`.
pub fn wall_shape(graph: &CellGraph, layout: &MazeLayout, w: usize) -> WallShape {
    let (a, b) = graph.walls[w];
    match *layout {
        MazeLayout::Grid { origin, cell, .. } => {
            let (CellPos::Grid { row, col }, CellPos::Grid { row: rb, .. }) = (graph.cells[a], graph.cells[b]) else {
                unreachable!("grid layout on a grid maze")
            };
            let x0 = origin + col as f64 * cell;
            let y0 = origin + row as f64 * cell;
            if rb == row {
                WallShape::Segment(Point::new(x0 + cell, y0), Point::new(x0 + cell, y0 + cell))
            } else {
                WallShape::Segment(Point::new(x0, y0 + cell), Point::new(x0 + cell, y0 + cell))
            }
        }
        MazeLayout::Rings { center, thickness, .. } => {
            let (ra, _) = graph.ring_of(a);
            let (rb, sb) = graph.ring_of(b);
            let m = graph.ring_counts[rb];
            let (b0, b1) = sector_angles(m, sb);
            if ra == rb {
                let r0 = ra as f64 * thickness;
                WallShape::Segment(Point::polar(center, r0, b0), Point::polar(center, r0 + thickness, b0))
            } else {
                WallShape::Arc {
                    radius: rb as f64 * thickness,
                    angle0: b0,
                    angle1: b1,
                }
            }
        }
    }
}

/// Outer boundary of the maze.
pub fn boundary_shapes(layout: &MazeLayout) -> Vec<WallShape> {
    match *layout {
        MazeLayout::Grid { n, origin, cell } => {
            let lo = origin;
            let hi = origin + cell * n as f64;
            vec![
                WallShape::Segment(Point::new(lo, lo), Point::new(hi, lo)),
                WallShape::Segment(Point::new(hi, lo), Point::new(hi, hi)),
                WallShape::Segment(Point::new(hi, hi), Point::new(lo, hi)),
                WallShape::Segment(Point::new(lo, hi), Point::new(lo, lo)),
            ]
        }
        MazeLayout::Rings { rings, thickness, .. } => vec![WallShape::Arc {
            radius: (rings + 1) as f64 * thickness,
            angle0: 0.0,
            angle1: TAU,
        }],
    }
}

fn draw_wall(canvas: &mut Canvas, layout: &MazeLayout, shape: WallShape, width: f64) {
    match shape {
        WallShape::Segment(a, b) => canvas.draw_segment(a, b, width, Color::BLACK),
        WallShape::Arc { radius, angle0, angle1 } => {
            let MazeLayout::Rings { center, .. } = *layout else {
                unreachable!("arcs only occur in circular mazes")
            };
            let h = width / 2.0;
            canvas.draw_annulus_arc(center, (radius - h).max(0.0), radius + h, angle0, angle1, Color::BLACK);
        }
    }
}

fn fill_cell(canvas: &mut Canvas, graph: &CellGraph, layout: &MazeLayout, cell: usize, color: Color) {
    match (*layout, graph.cells[cell]) {
        (MazeLayout::Grid { origin, cell: size, .. }, CellPos::Grid { row, col }) => {
            let x0 = origin + col as f64 * size;
            let y0 = origin + row as f64 * size;
            canvas.fill_rect(x0, y0, x0 + size, y0 + size, color);
        }
        (MazeLayout::Rings { center, thickness, .. }, CellPos::Ring { ring, sector }) => {
            let (a0, a1) = if ring == 0 {
                (0.0, TAU)
            } else {
                sector_angles(graph.ring_counts[ring], sector)
            };
            let r0 = ring as f64 * thickness;
            canvas.draw_annulus_arc(center, r0, r0 + thickness, a0, a1, color);
        }
        _ => unreachable!("layout matches the maze shape"),
    }
}

/// Colored cells and the start in blue, the end in red, then every closed
/// wall and the boundary in black.
pub fn render_maze(maze: &MazeInstance, coloring: &Coloring, style: &Style) -> Canvas {
    let graph = &maze.graph;
    let layout = MazeLayout::new(graph.shape, style);
    let mut canvas = Canvas::new(style.canvas_size, style.canvas_size);
    for cell in coloring.indices() {
        fill_cell(&mut canvas, graph, &layout, cell, Color::BLUE);
    }
    fill_cell(&mut canvas, graph, &layout, maze.start, Color::BLUE);
    fill_cell(&mut canvas, graph, &layout, maze.end, Color::RED);
    let open = maze.open();
    for w in 0..graph.wall_count() {
        if !open[w] {
            draw_wall(&mut canvas, &layout, wall_shape(graph, &layout, w), style.wall_width);
        }
    }
    for shape in boundary_shapes(&layout) {
        draw_wall(&mut canvas, &layout, shape, style.wall_width);
    }
    canvas
}
