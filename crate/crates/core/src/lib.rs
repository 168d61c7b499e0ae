//! Deterministic task generators and ground-truth oracle for global visual
//! reasoning benchmarks: cycles, strings, rectangular mazes and circular mazes.
//!
//! Everything in this crate is pure computation over owned values. It needs an
//! allocator but no operating system; file formats and the CLI live in the
//! `vispad` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cycles;
pub mod error;
pub mod geometry;
pub mod globality;
pub mod graph;
pub mod maze;
pub mod oracle;
pub mod raster;
pub mod rng;
pub mod strings;
pub mod style;
pub mod task;

pub use error::{Error, Result};
pub use geometry::Point;
pub use raster::{Canvas, Color};
pub use rng::{stable_hash, CounterRng};
pub use style::Style;
pub use task::{Coloring, FrameSequence, Regime, TaskInstance, TaskKind, TaskSpec};
