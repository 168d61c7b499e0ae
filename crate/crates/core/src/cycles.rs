//! Cycles task: `2n` nodes on an invisible circle joined by `2n` edges that
//! form either one `2n`-cycle (label 1) or two `n`-cycles (label 0).
//!
//! Random draws, in order: `2n - 1` spacing uniforms and the rotation for
//! [`sample_node_angles`], then one Fisher-Yates permutation of `0..2n` for
//! [`sample_cycle_topology`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{param_err, Result};
use crate::geometry::{wrap_angle, Point};
use crate::graph::{adjacency, bfs_distances, eccentricity};
use crate::raster::{Canvas, Color};
use crate::rng::CounterRng;
use crate::style::Style;
use crate::task::{Coloring, FrameSequence, Label};

/// Minimum angular gap between consecutive nodes, in radians.
pub const DEFAULT_EPSILON: f64 = 0.2;
/// Node circle radius on a 448-pixel canvas.
pub const DEFAULT_RADIUS: f64 = 220.0;
pub const DEFAULT_CANVAS: usize = 448;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclesParams {
    pub n_half: usize,
    pub image_size: usize,
    pub radius: f64,
    pub epsilon: f64,
}

impl CyclesParams {
    /// Defaults with the node radius scaled to `image_size`.
    pub fn for_canvas(n_half: usize, image_size: usize) -> Self {
        Self {
            n_half,
            image_size,
            radius: DEFAULT_RADIUS * image_size as f64 / DEFAULT_CANVAS as f64,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// Angles of `count` points on a circle with every circular gap at least
/// `epsilon`.
///
/// Sorts `count - 1` uniforms `x_i` on `[0, 2π - count·ε)`, draws a rotation
/// `β` on `[0, 2π)`, and returns `θ_1 = β`, `θ_{i+1} = β + x_i + i·ε`, each
/// wrapped into `[0, 2π)`.
pub fn sample_node_angles(count: usize, epsilon: f64, rng: &mut CounterRng) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(param_err!("need at least one angle"));
    }
    if !(epsilon >= 0.0) || count as f64 * epsilon >= TAU {
        return Err(param_err!(
            "{count} points cannot be {epsilon} rad apart on a circle"
        ));
    }
    let span = TAU - count as f64 * epsilon;
    let mut xs: Vec<f64> = (0..count - 1).map(|_| rng.uniform_range(0.0, span)).collect();
    xs.sort_by(f64::total_cmp);
    let beta = rng.uniform_range(0.0, TAU);
    let mut angles = Vec::with_capacity(count);
    angles.push(wrap_angle(beta));
    for (i, x) in xs.iter().enumerate() {
        angles.push(wrap_angle(beta + x + (i + 1) as f64 * epsilon));
    }
    Ok(angles)
}

/// Smallest circular gap between any two of `angles`.
pub fn min_circular_gap(angles: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = angles.iter().map(|&a| wrap_angle(a)).collect();
    sorted.sort_by(f64::total_cmp);
    let mut min = f64::INFINITY;
    for w in sorted.windows(2) {
        min = min.min(w[1] - w[0]);
    }
    if let (Some(first), Some(last)) = (sorted.first(), sorted.last()) {
        if sorted.len() > 1 {
            min = min.min(first + TAU - last);
        }
    }
    min
}

/// Cyclic node sequences for a label: one loop through all `2n` nodes, or a
/// uniform split into two loops of `n`, each in uniformly random cyclic order.
pub fn sample_cycle_topology(n_half: usize, label: Label, rng: &mut CounterRng) -> Result<Vec<Vec<usize>>> {
    if n_half < 3 {
        return Err(param_err!("cycles need n >= 3, got {n_half}"));
    }
    let perm = rng.permutation(2 * n_half);
    Ok(match label {
        Label::Connected => vec![perm],
        Label::Disconnected => vec![perm[..n_half].to_vec(), perm[n_half..].to_vec()],
    })
}

/// Consecutive pairs of each loop, closing back to its start.
pub fn loop_edges(loops: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for lp in loops {
        for (i, &a) in lp.iter().enumerate() {
            edges.push((a, lp[(i + 1) % lp.len()]));
        }
    }
    edges
}

/// Index of the point with the largest `x`; ties go to the lowest index.
pub fn rightmost_index(points: &[Point]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate().skip(1) {
        if p.x > points[best].x {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleGraph {
    pub n_half: usize,
    pub positions: Vec<Point>,
    pub edges: Vec<(usize, usize)>,
    pub loops: Vec<Vec<usize>>,
    pub label: Label,
    pub rightmost: usize,
}

impl CycleGraph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        adjacency(self.positions.len(), &self.edges)
    }
}

pub fn make_cycles_instance(params: &CyclesParams, label: Label, rng: &mut CounterRng) -> Result<CycleGraph> {
    let n = 2 * params.n_half;
    if params.n_half < 3 {
        return Err(param_err!("cycles need n >= 3, got {}", params.n_half));
    }
    let angles = sample_node_angles(n, params.epsilon, rng)?;
    let c = params.image_size as f64 / 2.0;
    let center = Point::new(c, c);
    let positions: Vec<Point> = angles
        .iter()
        .map(|&a| Point::polar(center, params.radius, a))
        .collect();
    let loops = sample_cycle_topology(params.n_half, label, rng)?;
    Ok(CycleGraph {
        n_half: params.n_half,
        rightmost: rightmost_index(&positions),
        edges: loop_edges(&loops),
        positions,
        loops,
        label,
    })
}

/// Label recomputed from the edges: connected iff BFS from node 0 reaches
/// every node.
pub fn cycles_label(graph: &CycleGraph) -> Label {
    let dist = bfs_distances(&graph.adjacency(), 0);
    if dist.iter().all(Option::is_some) {
        Label::Connected
    } else {
        Label::Disconnected
    }
}

/// Hop-ball frames around `root`: frame `k + 1` holds every vertex within
/// `k` hops, up to the root's eccentricity.
pub fn hop_schedule(adj: &[Vec<usize>], root: usize) -> FrameSequence {
    let dist = bfs_distances(adj, root);
    let ecc = eccentricity(&dist);
    let frames = (0..=ecc)
        .map(|k| Coloring::from_mask(dist.iter().map(|d| d.is_some_and(|d| d <= k)).collect()))
        .collect();
    FrameSequence {
        frames,
        radii: (0..=ecc).collect(),
    }
}

pub fn cycles_frame_schedule(graph: &CycleGraph) -> FrameSequence {
    hop_schedule(&graph.adjacency(), graph.rightmost)
}

/// One coloring step: colors the root when nothing is colored, otherwise
/// adds every neighbor of a colored vertex.
pub fn expand_hops(adj: &[Vec<usize>], root: usize, coloring: &Coloring) -> Coloring {
    if coloring.count() == 0 {
        return Coloring::from_indices(adj.len(), [root]);
    }
    let mut next = coloring.clone();
    for v in coloring.indices() {
        for &u in &adj[v] {
            next.insert(u);
        }
    }
    next
}

/// `Connected` when every vertex is colored, `Disconnected` when the coloring
/// is closed under adjacency and covers exactly half, otherwise undecided.
pub fn decode_loop_coloring(adj: &[Vec<usize>], coloring: &Coloring) -> Option<Label> {
    let total = adj.len();
    let count = coloring.count();
    if count == total {
        return Some(Label::Connected);
    }
    let closed = coloring
        .indices()
        .all(|v| adj[v].iter().all(|&u| coloring.contains(u)));
    (closed && 2 * count == total).then_some(Label::Disconnected)
}

/// Draws edges, then node markers; colored items in blue, others in black.
/// An edge is colored once both endpoints are.
pub fn render_cycles(graph: &CycleGraph, coloring: &Coloring, style: &Style) -> Canvas {
    let mut canvas = Canvas::new(style.canvas_size, style.canvas_size);
    let color_of = |on: bool| if on { Color::BLUE } else { Color::BLACK };
    // Black strokes first so blue ones stay on top at crossings.
    for pass in [false, true] {
        for &(a, b) in &graph.edges {
            let on = coloring.contains(a) && coloring.contains(b);
            if on == pass {
                canvas.draw_segment(graph.positions[a], graph.positions[b], style.edge_width, color_of(on));
            }
        }
    }
    for (i, &p) in graph.positions.iter().enumerate() {
        canvas.draw_disc(p, style.node_radius, color_of(coloring.contains(i)));
    }
    canvas
}

pub fn render_cycles_input(graph: &CycleGraph, style: &Style) -> Result<Canvas> {
    style.validate()?;
    Ok(render_cycles(graph, &Coloring::empty(graph.positions.len()), style))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infeasible_spacing_is_rejected() {
        let mut rng = CounterRng::new(0);
        assert!(sample_node_angles(32, 0.2, &mut rng).is_err());
        assert!(sample_node_angles(0, 0.2, &mut rng).is_err());
        assert!(sample_node_angles(31, 0.2, &mut rng).is_ok());
    }

    #[test]
    fn two_angles_are_spaced_both_ways() {
        let mut rng = CounterRng::new(5);
        for _ in 0..1000 {
            let a = sample_node_angles(2, 0.2, &mut rng).unwrap();
            assert!(min_circular_gap(&a) >= 0.2 - 1e-12);
        }
    }

    #[test]
    fn small_n_is_rejected() {
        let mut rng = CounterRng::new(0);
        assert!(sample_cycle_topology(2, Label::Connected, &mut rng).is_err());
    }

    #[test]
    fn triangles_for_n3_label0() {
        let mut rng = CounterRng::new(11);
        let loops = sample_cycle_topology(3, Label::Disconnected, &mut rng).unwrap();
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|l| l.len() == 3));
        let mut all: Vec<usize> = loops.concat();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn rightmost_ties_go_low() {
        let pts = [Point::new(1.0, 0.0), Point::new(3.0, 0.0), Point::new(3.0, 5.0)];
        assert_eq!(rightmost_index(&pts), 1);
    }

    #[test]
    fn zero_width_edges_rejected() {
        let mut rng = CounterRng::new(1);
        let g = make_cycles_instance(&CyclesParams::for_canvas(3, 448), Label::Connected, &mut rng).unwrap();
        let style = Style {
            edge_width: 0.0,
            ..Style::default()
        };
        assert!(render_cycles_input(&g, &style).is_err());
    }
}
