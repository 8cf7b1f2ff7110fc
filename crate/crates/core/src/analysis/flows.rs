//! Free reference flows `f = e^{-νtΛ^α} u02`, `g = e^{μtΔ} b02` and their
//! localisations `f̃ = M(χ f)`, `g̃ = M(χ g)`, where `M` truncates to the
//! state band.

use crate::error::{invalid, Result};
use crate::field::SpectralVectorField;
use crate::init::{localize_band, Cutoff, InitialData, SimParams};
use crate::ops::{heat_propagator, lambda_symbol, apply_radial};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    F,
    G,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::F => "f",
            Which::G => "g",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReferenceFlows {
    pub u02: SpectralVectorField,
    pub b02: SpectralVectorField,
    pub cutoff: Cutoff,
    pub nu: f64,
    pub mu: f64,
    pub alpha: f64,
}

impl ReferenceFlows {
    pub fn new(u02: SpectralVectorField, b02: SpectralVectorField, cutoff: Cutoff, params: &SimParams) -> Self {
        Self {
            u02,
            b02,
            cutoff,
            nu: params.nu,
            mu: params.mu,
            alpha: params.alpha,
        }
    }

    pub fn from_data(data: &InitialData, params: &SimParams) -> Self {
        Self::new(data.u02.clone(), data.b02.clone(), data.cutoff.clone(), params)
    }

    /// `(coefficient, exponent)` of the flow's dissipation.
    fn law(&self, which: Which) -> (f64, f64) {
        match which {
            Which::F => (self.nu, self.alpha),
            Which::G => (self.mu, 2.0),
        }
    }

    fn data(&self, which: Which) -> &SpectralVectorField {
        match which {
            Which::F => &self.u02,
            Which::G => &self.b02,
        }
    }

    /// `f(t)` or `g(t)`.
    pub fn free_flow(&self, which: Which, t: f64) -> Result<SpectralVectorField> {
        if !(t >= 0.0) {
            return Err(invalid("t", format!("{t} is negative")));
        }
        let (c, a) = self.law(which);
        if t == 0.0 {
            return Ok(self.data(which).clone());
        }
        heat_propagator(self.data(which), t, c, a)
    }

    /// `∂_t f(t) = -νΛ^α f(t)` (resp. `μΔg`).
    pub fn free_rate(&self, which: Which, t: f64) -> Result<SpectralVectorField> {
        let (c, a) = self.law(which);
        let v = self.free_flow(which, t)?;
        Ok(apply_radial(&v, |k2| -c * lambda_symbol(k2, a)))
    }

    /// `f̃(t)` or `g̃(t)`.
    pub fn localized(&self, which: Which, t: f64) -> Result<SpectralVectorField> {
        localize_band(&self.cutoff, &self.free_flow(which, t)?)
    }

    /// `∂_t f̃(t) = M(χ ∂_t f)`.
    pub fn localized_rate(&self, which: Which, t: f64) -> Result<SpectralVectorField> {
        localize_band(&self.cutoff, &self.free_rate(which, t)?)
    }

    /// `(f̃(t), g̃(t))`.
    pub fn at(&self, t: f64) -> Result<(SpectralVectorField, SpectralVectorField)> {
        Ok((self.localized(Which::F, t)?, self.localized(Which::G, t)?))
    }
}

/// Standalone form of [`ReferenceFlows::free_flow`].
pub fn free_flow(flows: &ReferenceFlows, which: Which, t: f64) -> Result<SpectralVectorField> {
    flows.free_flow(which, t)
}
