use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// 3 or 4.
    pub order: u32,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Relative local error tolerance (step doubling).
    pub tolerance: f64,
    /// Safety factor `c` of the stability bound.
    pub safety: f64,
    pub t_end: f64,
    /// Time between checkpoints; 0 disables periodic checkpoints.
    pub checkpoint_interval: f64,
    /// Time between diagnostics records; 0 records every accepted step.
    pub diagnostics_interval: f64,
    /// With `false` every step has length `dt_init` (no error control, no
    /// stability cap); used for refinement studies.
    pub adaptive: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            order: 4,
            dt_init: 1e-2,
            dt_min: 1e-8,
            dt_max: 0.5,
            tolerance: 1e-6,
            safety: 0.5,
            t_end: 1.0,
            checkpoint_interval: 0.0,
            diagnostics_interval: 0.1,
            adaptive: true,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order != 3 && self.order != 4 {
            return Err(invalid("order", format!("{} is not 3 or 4", self.order)));
        }
        if !(self.dt_min > 0.0) {
            return Err(invalid("dt_min", format!("{} must be positive", self.dt_min)));
        }
        if !(self.dt_init >= self.dt_min) {
            return Err(invalid("dt_init", format!("{} is below dt_min", self.dt_init)));
        }
        if !(self.dt_max >= self.dt_init) {
            return Err(invalid("dt_max", format!("{} is below dt_init", self.dt_max)));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", format!("{} must be positive", self.tolerance)));
        }
        if !(self.safety > 0.0) {
            return Err(invalid("safety", format!("{} must be positive", self.safety)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("{} must be finite and non-negative", self.t_end)));
        }
        if !(self.checkpoint_interval >= 0.0) {
            return Err(invalid("checkpoint_interval", "must be non-negative"));
        }
        if !(self.diagnostics_interval >= 0.0) {
            return Err(invalid("diagnostics_interval", "must be non-negative"));
        }
        Ok(())
    }
}
