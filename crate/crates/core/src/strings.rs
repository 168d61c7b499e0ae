//! Strings task: `2n` invisible anchors on a circle joined by a C¹ chain of
//! cubic Béziers forming one closed string (label 1) or two (label 0).
//!
//! Random draws follow the cycles task exactly: anchor angles, then the loop
//! permutation.

use alloc::vec::Vec;

use crate::cycles::{self, hop_schedule, loop_edges, rightmost_index, DEFAULT_CANVAS, DEFAULT_EPSILON};
use crate::error::{param_err, Result};
use crate::geometry::{CubicBezier, Point};
use crate::graph::adjacency;
use crate::raster::{Canvas, Color};
use crate::rng::CounterRng;
use crate::style::Style;
use crate::task::{Coloring, FrameSequence, Label};

pub const DEFAULT_RADIUS: f64 = 200.0;
pub const DEFAULT_ALPHA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringsParams {
    pub n_half: usize,
    pub image_size: usize,
    pub radius: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl StringsParams {
    pub fn for_canvas(n_half: usize, image_size: usize) -> Self {
        Self {
            n_half,
            image_size,
            radius: DEFAULT_RADIUS * image_size as f64 / DEFAULT_CANVAS as f64,
            epsilon: DEFAULT_EPSILON,
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// Control points for every segment of a closed loop of anchors.
///
/// For consecutive anchors `A', A, B, B'` the segment `A → B` gets
/// `c1 = A + α(B − A')` and `c2 = B − α(B' − A)`, so the tangent leaving each
/// anchor equals the tangent arriving at it.
pub fn compute_control_points(points: &[Point], alpha: f64) -> Result<Vec<(Point, Point)>> {
    let n = points.len();
    if n < 3 {
        return Err(param_err!("a closed string needs >= 3 anchors, got {n}"));
    }
    Ok((0..n)
        .map(|i| {
            let a_prev = points[(i + n - 1) % n];
            let a = points[i];
            let b = points[(i + 1) % n];
            let b_next = points[(i + 2) % n];
            (a + (b - a_prev) * alpha, b - (b_next - a) * alpha)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringSegment {
    pub start: usize,
    pub end: usize,
    pub c1: Point,
    pub c2: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StringCurve {
    pub n_half: usize,
    pub anchors: Vec<Point>,
    pub segments: Vec<StringSegment>,
    pub loops: Vec<Vec<usize>>,
    pub label: Label,
    pub rightmost: usize,
}

impl StringCurve {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let edges: Vec<(usize, usize)> = self.segments.iter().map(|s| (s.start, s.end)).collect();
        adjacency(self.anchors.len(), &edges)
    }

    pub fn bezier(&self, seg: &StringSegment) -> CubicBezier {
        CubicBezier::new(self.anchors[seg.start], seg.c1, seg.c2, self.anchors[seg.end])
    }
}

/// Builds the curve for given anchors and loops.
pub fn build_curve(
    n_half: usize,
    anchors: Vec<Point>,
    loops: Vec<Vec<usize>>,
    label: Label,
    alpha: f64,
) -> Result<StringCurve> {
    let mut segments = Vec::with_capacity(anchors.len());
    for lp in &loops {
        let pts: Vec<Point> = lp.iter().map(|&i| anchors[i]).collect();
        let controls = compute_control_points(&pts, alpha)?;
        for ((a, b), (c1, c2)) in loop_edges(core::slice::from_ref(lp)).into_iter().zip(controls) {
            segments.push(StringSegment { start: a, end: b, c1, c2 });
        }
    }
    Ok(StringCurve {
        n_half,
        rightmost: rightmost_index(&anchors),
        anchors,
        segments,
        loops,
        label,
    })
}

pub fn sample_strings_instance(params: &StringsParams, label: Label, rng: &mut CounterRng) -> Result<StringCurve> {
    if params.n_half < 3 {
        return Err(param_err!("strings need n >= 3, got {}", params.n_half));
    }
    let angles = cycles::sample_node_angles(2 * params.n_half, params.epsilon, rng)?;
    let c = params.image_size as f64 / 2.0;
    let center = Point::new(c, c);
    let anchors = angles
        .iter()
        .map(|&a| Point::polar(center, params.radius, a))
        .collect();
    let loops = cycles::sample_cycle_topology(params.n_half, label, rng)?;
    build_curve(params.n_half, anchors, loops, label, params.alpha)
}

/// Largest mismatch `|3(c1 − A) − 3(A − c2_prev)|` over all anchors, where
/// `c2_prev` belongs to the segment arriving at `A`.
pub fn continuity_report(curve: &StringCurve) -> f64 {
    let mut arriving = alloc::vec![None; curve.anchors.len()];
    for (i, s) in curve.segments.iter().enumerate() {
        arriving[s.end] = Some(i);
    }
    let mut worst: f64 = 0.0;
    for s in &curve.segments {
        let a = curve.anchors[s.start];
        let Some(prev) = arriving[s.start] else {
            return f64::INFINITY;
        };
        let incoming = (a - curve.segments[prev].c2) * 3.0;
        let outgoing = (s.c1 - a) * 3.0;
        worst = worst.max((outgoing - incoming).norm());
    }
    worst
}

pub fn strings_frame_schedule(curve: &StringCurve) -> FrameSequence {
    hop_schedule(&curve.adjacency(), curve.rightmost)
}

/// Black curves with colored segments (both anchors colored) in blue, plus a
/// blue mark on the rightmost anchor once it is colored. Anchors themselves
/// are never drawn.
pub fn render_strings(curve: &StringCurve, coloring: &Coloring, style: &Style) -> Canvas {
    let mut canvas = Canvas::new(style.canvas_size, style.canvas_size);
    for pass in [false, true] {
        for seg in &curve.segments {
            let on = coloring.contains(seg.start) && coloring.contains(seg.end);
            if on == pass {
                let color = if on { Color::BLUE } else { Color::BLACK };
                canvas.draw_cubic_bezier(&curve.bezier(seg), style.curve_width, color);
            }
        }
    }
    if coloring.contains(curve.rightmost) {
        canvas.draw_disc(curve.anchors[curve.rightmost], style.anchor_radius, Color::BLUE);
    }
    canvas
}

pub fn render_strings_input(curve: &StringCurve, style: &Style) -> Result<Canvas> {
    style.validate()?;
    Ok(render_strings(curve, &Coloring::empty(curve.anchors.len()), style))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_loop_rejected() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(compute_control_points(&pts, 0.25).is_err());
    }

    #[test]
    fn alpha_zero_gives_chords() {
        let pts = [Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(2.0, 3.0)];
        let cps = compute_control_points(&pts, 0.0).unwrap();
        for (i, (c1, c2)) in cps.iter().enumerate() {
            assert_eq!(*c1, pts[i]);
            assert_eq!(*c2, pts[(i + 1) % 3]);
        }
    }

    #[test]
    fn anchor_count_and_loops() {
        let mut rng = CounterRng::new(3);
        let p = StringsParams::for_canvas(4, 448);
        let s = sample_strings_instance(&p, Label::Disconnected, &mut rng).unwrap();
        assert_eq!(s.anchors.len(), 8);
        assert_eq!(s.segments.len(), 8);
        assert_eq!(s.loops.iter().map(Vec::len).collect::<Vec<_>>(), [4, 4]);
    }
}
