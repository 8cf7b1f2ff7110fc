use crate::error::{invalid, Result};

/// Physical and data-construction parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SimParams {
    pub nu: f64,
    pub mu: f64,
    /// Hall coefficient.
    pub sigma: f64,
    /// Ion-slip coefficient.
    pub kappa: f64,
    /// Fractional exponent of the velocity dissipation.
    pub alpha: f64,
    /// Cutoff radius.
    pub m0: f64,
    /// Fourier-ℓ¹ budget of the Beltrami profile.
    pub m1: f64,
    /// Pointwise-bound constant; only enters reported bound expressions.
    pub m2: f64,
    /// Target annulus half-width.
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Total H³ budget of the small parts, split evenly between `u01` and `b01`.
    pub small_budget: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            nu: 1.0,
            mu: 1.0,
            sigma: 0.5,
            kappa: 0.1,
            alpha: 2.0,
            m0: 1.0,
            m1: 1.0,
            m2: 1.0,
            delta: 0.25,
            alpha1: 1.0,
            alpha2: 1.0,
            small_budget: 1.0,
            seed: 0,
        }
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{v} is not finite")))
    }
}

impl SimParams {
    /// Default small-part budget `M0^{-1/2}`.
    pub fn theorem_budget(&self) -> f64 {
        self.m0.powf(-0.5)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("nu", self.nu),
            ("mu", self.mu),
            ("sigma", self.sigma),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("m0", self.m0),
            ("m1", self.m1),
            ("m2", self.m2),
            ("delta", self.delta),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("small_budget", self.small_budget),
        ] {
            finite(name, v)?;
        }
        if self.nu <= 0.0 {
            return Err(invalid("nu", format!("{} must be positive", self.nu)));
        }
        if self.mu <= 0.0 {
            return Err(invalid("mu", format!("{} must be positive", self.mu)));
        }
        if self.kappa < 0.0 {
            return Err(invalid("kappa", format!("{} must be non-negative", self.kappa)));
        }
        if !(0.0..=2.0).contains(&self.alpha) {
            return Err(invalid("alpha", format!("{} is outside [0, 2]", self.alpha)));
        }
        if self.m0 < 1.0 {
            return Err(invalid("m0", format!("{} is below 1", self.m0)));
        }
        if self.m1 <= 0.0 {
            return Err(invalid("m1", format!("{} must be positive", self.m1)));
        }
        if self.m2 <= 0.0 {
            return Err(invalid("m2", format!("{} must be positive", self.m2)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(invalid("delta", format!("{} is outside (0, 1/2]", self.delta)));
        }
        if self.small_budget < 0.0 {
            return Err(invalid("small_budget", format!("{} is negative", self.small_budget)));
        }
        Ok(())
    }

    /// `(name, value)` pairs in a fixed order, used by file headers.
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("nu", self.nu),
            ("mu", self.mu),
            ("sigma", self.sigma),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("m0", self.m0),
            ("m1", self.m1),
            ("m2", self.m2),
            ("delta", self.delta),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("small_budget", self.small_budget),
            ("seed", self.seed as f64),
        ]
    }

    /// Inverse of [`named_values`](Self::named_values); unknown names are ignored.
    pub fn set_named(&mut self, name: &str, v: f64) -> bool {
        match name {
            "nu" => self.nu = v,
            "mu" => self.mu = v,
            "sigma" => self.sigma = v,
            "kappa" => self.kappa = v,
            "alpha" => self.alpha = v,
            "m0" => self.m0 = v,
            "m1" => self.m1 = v,
            "m2" => self.m2 = v,
            "delta" => self.delta = v,
            "alpha1" => self.alpha1 = v,
            "alpha2" => self.alpha2 = v,
            "small_budget" => self.small_budget = v,
            "seed" => self.seed = v as u64,
            _ => return false,
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn field_of(e: Error) -> &'static str {
        match e {
            Error::InvalidParameter { name, .. } => name,
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_named_fields() {
        let ok = SimParams::default();
        ok.validate().unwrap();
        let cases: Vec<(SimParams, &str)> = vec![
            (SimParams { kappa: -0.1, ..ok.clone() }, "kappa"),
            (SimParams { alpha: 2.5, ..ok.clone() }, "alpha"),
            (SimParams { delta: 0.0, ..ok.clone() }, "delta"),
            (SimParams { delta: 0.6, ..ok.clone() }, "delta"),
            (SimParams { m0: 0.5, ..ok.clone() }, "m0"),
            (SimParams { nu: 0.0, ..ok.clone() }, "nu"),
        ];
        for (p, name) in cases {
            assert_eq!(field_of(p.validate().unwrap_err()), name);
        }
    }

    #[test]
    fn named_round_trip() {
        let p = SimParams {
            sigma: -0.3,
            seed: 42,
            ..SimParams::default()
        };
        let mut q = SimParams::default();
        for (k, v) in p.named_values() {
            assert!(q.set_named(k, v));
        }
        assert_eq!(p, q);
    }
}
