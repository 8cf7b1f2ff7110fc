//! Adaptive run loop and stability bound.

use std::time::Instant;

use crate::dynamics::{State, STATE_BAND};
use crate::error::Result;
use crate::init::SimParams;
use crate::integrator::config::IntegratorConfig;
use crate::integrator::stepper::{Integrator, Scheme};
use crate::norms::sobolev_norm_sq;

/// `min(c Δx / max(|u|,|b|), c / (|σ| max|b| k²), c / (κ max|b|² k²), dt_max)`
/// with `k` the largest wavenumber of the state band.
pub fn stable_dt(state: &State, params: &SimParams, safety: f64, dt_max: f64) -> f64 {
    let grid = state.grid();
    let max_mag = |v: &crate::field::SpectralVectorField| {
        let p = v.to_physical();
        let mut best: f64 = 0.0;
        for ((a, b), c) in p[0].iter().zip(p[1].iter()).zip(p[2].iter()) {
            best = best.max(a * a + b * b + c * c);
        }
        best.sqrt()
    };
    let umax = max_mag(&state.u);
    let bmax = max_mag(&state.b);
    let kmax2 = grid.kmax(STATE_BAND).powi(2);
    let mut dt = dt_max;
    let vmax = umax.max(bmax);
    if vmax > 0.0 {
        dt = dt.min(safety * grid.spacing() / vmax);
    }
    if params.sigma != 0.0 && bmax > 0.0 {
        dt = dt.min(safety / (params.sigma.abs() * bmax * kmax2));
    }
    if params.kappa > 0.0 && bmax > 0.0 {
        dt = dt.min(safety / (params.kappa * bmax * bmax * kmax2));
    }
    dt
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    /// The controller asked for a step below `dt_min`.
    DtUnderflow,
    /// A stage produced NaN or infinity.
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckpointReason {
    Periodic,
    Final,
    Failure,
}

#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub accepted: u64,
    pub rejected: u64,
    /// Length of the last accepted step (0 before the first).
    pub dt_last: f64,
}

/// Receives diagnostics and checkpoints in time order.
pub trait Sink {
    fn diagnostics(&mut self, _state: &State, _info: &StepInfo) -> Result<()> {
        Ok(())
    }
    fn checkpoint(&mut self, _state: &State, _dt_next: f64, _reason: CheckpointReason) -> Result<()> {
        Ok(())
    }
}

pub struct NullSink;
impl Sink for NullSink {}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub accepted: u64,
    pub rejected: u64,
    pub dt_history: Vec<f64>,
    /// `½(‖u‖² + ‖b‖²)` at the start and after every accepted step.
    pub energy_history: Vec<f64>,
    pub wall_time: f64,
    pub termination: Termination,
    pub t_final: f64,
    /// Step size the controller would try next.
    pub dt_next: f64,
}

impl RunRecord {
    /// Largest energy increase over a single accepted step.
    pub fn max_energy_increase(&self) -> f64 {
        self.energy_history
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Schedule of events at `k * interval`.
struct Schedule {
    interval: f64,
    next: u64,
}

impl Schedule {
    fn new(interval: f64, t: f64) -> Self {
        let next = if interval > 0.0 {
            (t / interval * (1.0 + 1e-12)).floor() as u64 + 1
        } else {
            0
        };
        Self { interval, next }
    }
    fn time(&self) -> f64 {
        if self.interval > 0.0 {
            self.next as f64 * self.interval
        } else {
            f64::INFINITY
        }
    }
    /// Whether `t` has reached the pending event; advances past it.
    fn hit(&mut self, t: f64) -> bool {
        if self.interval <= 0.0 {
            return false;
        }
        let mut hit = false;
        while self.time() <= t * (1.0 + 1e-12) + 1e-300 {
            self.next += 1;
            hit = true;
        }
        hit
    }
}

fn relative_difference(a: &State, b: &State) -> f64 {
    let du = a.u.sub_unchecked(&b.u);
    let db = a.b.sub_unchecked(&b.b);
    let num = (sobolev_norm_sq(&du, 0.0) + sobolev_norm_sq(&db, 0.0)).sqrt();
    let den = (sobolev_norm_sq(&a.u, 0.0) + sobolev_norm_sq(&a.b, 0.0)).sqrt();
    num / den.max(1e-300)
}

/// Integrates from `initial` to `config.t_end`. `dt_start` overrides
/// `config.dt_init` (used on restart).
pub fn run(
    initial: &State,
    params: &SimParams,
    config: &IntegratorConfig,
    dt_start: Option<f64>,
    sink: &mut dyn Sink,
) -> Result<RunRecord> {
    params.validate()?;
    config.validate()?;
    let clock = Instant::now();
    let scheme = Scheme::from_order(config.order)?;
    let stepper = Integrator::new(params, scheme);
    let p = scheme.order() as i32;
    let mut state = initial.clone();
    let mut h = dt_start.unwrap_or(config.dt_init);
    let mut diag = Schedule::new(config.diagnostics_interval, state.t);
    let mut chk = Schedule::new(config.checkpoint_interval, state.t);
    let mut info = StepInfo {
        accepted: 0,
        rejected: 0,
        dt_last: 0.0,
    };
    let mut record = RunRecord {
        accepted: 0,
        rejected: 0,
        dt_history: Vec::new(),
        energy_history: vec![state.energy()],
        wall_time: 0.0,
        termination: Termination::Completed,
        t_final: state.t,
        dt_next: h,
    };
    sink.diagnostics(&state, &info)?;
    let mut last_diag_t = state.t;
    let t_end = config.t_end;
    let tiny = 1e-12 * t_end.max(1.0);
    while state.t < t_end - tiny {
        let next_event = t_end.min(diag.time()).min(chk.time());
        let to_event = next_event - state.t;
        let mut try_h = h;
        if config.adaptive {
            try_h = try_h.min(stable_dt(&state, params, config.safety, config.dt_max));
            if try_h < config.dt_min && to_event >= config.dt_min {
                record.termination = Termination::DtUnderflow;
                break;
            }
        }
        let clipped = try_h >= to_event - tiny;
        if clipped {
            try_h = to_event;
        }
        let attempt = if config.adaptive {
            adaptive_attempt(&stepper, &state, try_h, p, config.tolerance)
        } else {
            stepper.step(&state, try_h).map(|s| (s, 0.0))
        };
        let (candidate, err) = match attempt {
            Ok(v) => v,
            Err(crate::error::Error::NonFinite(_)) => {
                record.termination = Termination::NonFinite;
                break;
            }
            Err(e) => return Err(e),
        };
        if config.adaptive {
            let factor = if err > 0.0 {
                (0.9 * (config.tolerance / err).powf(1.0 / (p as f64 + 1.0))).clamp(0.2, 2.0)
            } else {
                2.0
            };
            let h_new = try_h * factor;
            if err > config.tolerance {
                info.rejected += 1;
                h = h_new;
                if h < config.dt_min {
                    record.termination = Termination::DtUnderflow;
                    break;
                }
                continue;
            }
            // A step shortened to land on an event does not shrink the proposal.
            h = if clipped { h.max(h_new).min(config.dt_max) } else { h_new.min(config.dt_max) };
        }
        let mut next = candidate;
        if clipped {
            next.t = next_event;
        }
        state = next;
        info.accepted += 1;
        info.dt_last = try_h;
        record.dt_history.push(try_h);
        record.energy_history.push(state.energy());
        let at_diag = diag.hit(state.t) || config.diagnostics_interval == 0.0;
        let at_end = state.t >= t_end - tiny;
        if at_diag || (at_end && state.t != last_diag_t) {
            sink.diagnostics(&state, &info)?;
            last_diag_t = state.t;
        }
        if chk.hit(state.t) && !at_end {
            sink.checkpoint(&state, h, CheckpointReason::Periodic)?;
        }
    }
    record.accepted = info.accepted;
    record.rejected = info.rejected;
    record.t_final = state.t;
    record.dt_next = h;
    record.wall_time = clock.elapsed().as_secs_f64();
    let reason = if record.termination == Termination::Completed {
        CheckpointReason::Final
    } else {
        CheckpointReason::Failure
    };
    sink.checkpoint(&state, h, reason)?;
    Ok(record)
}

/// Full step and two half steps; returns the half-step result and the
/// Richardson error estimate.
fn adaptive_attempt(stepper: &Integrator, state: &State, h: f64, p: i32, _tol: f64) -> Result<(State, f64)> {
    let full = stepper.step(state, h)?;
    let half = stepper.step(state, 0.5 * h)?;
    let two = stepper.step(&half, 0.5 * h)?;
    let err = relative_difference(&two, &full) / (2f64.powi(p) - 1.0);
    Ok((two, err))
}
