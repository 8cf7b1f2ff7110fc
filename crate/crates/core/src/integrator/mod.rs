//! Integrating-factor Runge–Kutta time stepping with step-doubling control.

pub mod checkpoint;
pub mod config;
pub mod control;
pub mod stepper;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use config::IntegratorConfig;
pub use control::{run, stable_dt, CheckpointReason, NullSink, RunRecord, Sink, StepInfo, Termination};
pub use stepper::{step, Integrator, Scheme};
