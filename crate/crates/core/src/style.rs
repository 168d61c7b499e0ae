//! Stroke widths, marker sizes and canvas size shared by all renderers.

use crate::error::{param_err, Result};

/// Rendering parameters. Defaults target a 448×448 canvas and stay legible
/// after a 2× downscale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Style {
    pub canvas_size: usize,
    /// Cycles node marker radius.
    pub node_radius: f64,
    /// Cycles edge stroke width.
    pub edge_width: f64,
    /// Strings curve stroke width.
    pub curve_width: f64,
    /// Radius of the scratchpad mark on the strings anchor.
    pub anchor_radius: f64,
    pub wall_width: f64,
    /// Gap between the canvas border and the maze.
    pub maze_margin: f64,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            canvas_size: 448,
            node_radius: 6.0,
            edge_width: 3.0,
            curve_width: 3.0,
            anchor_radius: 6.0,
            wall_width: 2.0,
            maze_margin: 10.0,
        }
    }
}

impl Style {
    pub fn validate(&self) -> Result<()> {
        if self.canvas_size == 0 {
            return Err(param_err!("canvas size must be positive"));
        }
        for (name, v) in [
            ("edge_width", self.edge_width),
            ("curve_width", self.curve_width),
            ("wall_width", self.wall_width),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(param_err!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("node_radius", self.node_radius),
            ("anchor_radius", self.anchor_radius),
            ("maze_margin", self.maze_margin),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(param_err!("{name} must be non-negative, got {v}"));
            }
        }
        if 2.0 * self.maze_margin >= self.canvas_size as f64 {
            return Err(param_err!("maze margin leaves no drawing area"));
        }
        Ok(())
    }

    pub fn center(&self) -> crate::Point {
        let c = self.canvas_size as f64 / 2.0;
        crate::Point::new(c, c)
    }
}
