//! Ground-truth Markovian scratchpad step.
//!
//! [`oracle_step`] maps a frame to `(next frame, label estimate, halt)` using
//! only the current frame and the instance it belongs to. Iterating it from
//! the raw input reproduces the instance's frame schedule exactly.

use alloc::vec::Vec;

use crate::error::{contract_err, param_err, Error, Result};
use crate::raster::Canvas;
use crate::style::Style;
use crate::task::{Coloring, Label, TaskInstance};

/// Step budget for [`run_to_halt`] when none is given.
pub const DEFAULT_MAX_STEPS: usize = 64;

/// A scratchpad frame: step 0 is the raw input with nothing colored.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameState<'a> {
    pub task: &'a TaskInstance,
    pub step: usize,
    pub coloring: Coloring,
}

impl<'a> FrameState<'a> {
    pub fn input(task: &'a TaskInstance) -> Self {
        Self {
            task,
            step: 0,
            coloring: Coloring::empty(task.item_count()),
        }
    }

    /// The frame at `step` of the task's schedule. Steps past the end give
    /// the final frame.
    pub fn at_step(task: &'a TaskInstance, step: usize) -> Self {
        let schedule = task.schedule();
        let k = step.min(schedule.len());
        let coloring = schedule
            .at_step(k, task.item_count())
            .expect("step clamped to schedule");
        Self { task, step, coloring }
    }

    pub fn canvas(&self, style: &Style) -> Result<Canvas> {
        self.task.render(&self.coloring, style)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput<'a> {
    pub next: FrameState<'a>,
    /// Decoded label, or 0 when the next frame does not decide it yet.
    pub label_estimate: Label,
    /// Whether `label_estimate` was actually decoded rather than defaulted.
    pub decided: bool,
    pub halt: bool,
}

fn check_consistent(state: &FrameState<'_>) -> Result<()> {
    let task = state.task;
    if state.coloring.len() != task.item_count() {
        return Err(contract_err!(
            "frame colors {} items, instance has {}",
            state.coloring.len(),
            task.item_count()
        ));
    }
    let schedule = task.schedule();
    let k = state.step.min(schedule.len());
    let expected = schedule
        .at_step(k, task.item_count())
        .expect("step clamped to schedule");
    if expected != state.coloring {
        return Err(contract_err!(
            "frame at step {} does not match the instance's schedule",
            state.step
        ));
    }
    Ok(())
}

/// Label read from a frame, `None` while undecided.
pub fn decode_label_from_frame(task: &TaskInstance, coloring: &Coloring) -> Option<Label> {
    task.decode(coloring)
}

/// Advances one scratchpad step. A final frame maps to itself with `halt`.
pub fn oracle_step<'a>(state: &FrameState<'a>) -> Result<StepOutput<'a>> {
    check_consistent(state)?;
    let task = state.task;
    let next = task.expand(&state.coloring);
    let halt = task.expand(&next) == next;
    let decoded = task.decode(&next);
    Ok(StepOutput {
        next: FrameState {
            task,
            step: state.step + 1,
            coloring: next,
        },
        label_estimate: decoded.unwrap_or(Label::Disconnected),
        decided: decoded.is_some(),
        halt,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Frames `f_1 .. f_T` produced by the run.
    pub frames: Vec<Coloring>,
    pub label: Label,
    pub steps: usize,
}

/// Steps from the raw input until the halt signal, failing with
/// [`Error::Budget`] after `max_steps` steps without halting.
pub fn run_to_halt(task: &TaskInstance, max_steps: usize) -> Result<RunOutcome> {
    if max_steps == 0 {
        return Err(param_err!("max_steps must be at least 1"));
    }
    let mut state = FrameState::input(task);
    let mut frames = Vec::new();
    for steps in 1..=max_steps {
        let out = oracle_step(&state)?;
        frames.push(out.next.coloring.clone());
        if out.halt {
            return Ok(RunOutcome {
                frames,
                label: out.label_estimate,
                steps,
            });
        }
        state = out.next;
    }
    Err(Error::Budget(alloc::format!(
        "no halt within {max_steps} steps"
    )))
}

/// Supervision tuple `f_i → (f_{i+1}, y, 1(i + 1 = T))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TeacherTuple {
    /// Index `i` of the input frame.
    pub step: usize,
    pub input: Canvas,
    pub target: Canvas,
    pub label: Label,
    pub halt: bool,
}

/// All consecutive frame pairs of the schedule, starting with the raw input.
pub fn teacher_forcing_tuples(task: &TaskInstance, style: &Style) -> Result<Vec<TeacherTuple>> {
    let schedule = task.schedule();
    let n = task.item_count();
    let mut canvases = Vec::with_capacity(schedule.len() + 1);
    canvases.push(task.render(&Coloring::empty(n), style)?);
    for frame in &schedule.frames {
        canvases.push(task.render(frame, style)?);
    }
    let t = schedule.len();
    Ok((0..t)
        .map(|i| TeacherTuple {
            step: i,
            input: canvases[i].clone(),
            target: canvases[i + 1].clone(),
            label: task.label(),
            halt: i + 1 == t,
        })
        .collect())
}
