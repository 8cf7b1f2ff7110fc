//! Perturbation `U = u - f̃`, `B = b - g̃`, the forcing fields `F`, `G` and
//! a two-route check of the perturbation equations.
//!
//! Route 1 differentiates the decomposition: `U_t = u_t - ∂_t f̃` with `u_t`
//! from [`full_rhs`]. Route 2 assembles the right-hand sides term by term
//! from the multilinear expansion in `U, B, f̃, g̃`:
//!
//! ```text
//! U_t = P[-νΛ^α U - (U·∇)U - (f̃·∇)U - (U·∇)f̃ + (B·∇)B + (g̃·∇)B + (B·∇)g̃ + F]
//! B_t =  μΔB - (U·∇)B - (f̃·∇)B - (U·∇)g̃ + (B·∇)U + (g̃·∇)U + (B·∇)f̃
//!        - σ[H(B,B) + H(B,g̃) + H(g̃,B) + H(g̃,g̃)]
//!        + κ[T(B,B,B) + six mixed T terms] + G
//! F = f̃×(∇×f̃) - g̃×(∇×g̃) + C_ν
//! G = ∇×(f̃×g̃) + g̃(∇·f̃) - f̃(∇·g̃) + C_μ + κ T(g̃,g̃,g̃)
//! ```
//!
//! with `H(x,y) = ∇×((∇×x)×y)`, `T(x,y,z) = ∇×(((∇×x)×y)×z)` and the
//! dissipation commutators `C_ν`, `C_μ` of [`CommutatorMode`]. Every product
//! is truncated to the state band, matching the solver.

use std::sync::Arc;

use ndarray::Array3;

use crate::analysis::flows::{ReferenceFlows, Which};
use crate::dynamics::{full_rhs, State, STATE_BAND};
use crate::error::{Error, Result};
use crate::field::{PhysVector, SpectralVectorField, C64};
use crate::grid::Grid;
use crate::init::{localize_band, SimParams};
use crate::norms::sobolev_norm;
use crate::ops::{apply_radial, curl, divergence, gradient, lambda_symbol, leray_project};
use crate::product::{cross, dot, scale};

/// `f̃`, `g̃` at one time.
#[derive(Clone, Debug)]
pub struct FlowSnapshot {
    pub t: f64,
    pub f_tilde: SpectralVectorField,
    pub g_tilde: SpectralVectorField,
}

impl ReferenceFlows {
    pub fn snapshot(&self, t: f64) -> Result<FlowSnapshot> {
        let (f_tilde, g_tilde) = self.at(t)?;
        Ok(FlowSnapshot { t, f_tilde, g_tilde })
    }
}

fn times_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// `(U, B) = (u - f̃, b - g̃)`.
pub fn perturbation_extract(state: &State, flows: &FlowSnapshot) -> Result<(SpectralVectorField, SpectralVectorField)> {
    if !times_match(state.t, flows.t) {
        return Err(Error::TimeMismatch { state: state.t, flows: flows.t });
    }
    Ok((state.u.sub(&flows.f_tilde)?, state.b.sub(&flows.g_tilde)?))
}

/// How the dissipation commutators `C_ν = ν(χΛ^α f - Λ^α f̃)` and
/// `C_μ = μ(Δg̃ - χΔg)` are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutatorMode {
    /// Local form `ν[(Δχ) f + 2(∇χ·∇) f]`, with `G` also using the local
    /// divergences `∇·f̃ = ∇χ·f`, `∇·g̃ = ∇χ·g`. Exact only for `α = 2`.
    Local,
    /// Spectral multipliers applied to `χ f` and `f`, valid for every `α`.
    Spectral,
}

impl CommutatorMode {
    pub fn name(self) -> &'static str {
        match self {
            CommutatorMode::Local => "local",
            CommutatorMode::Spectral => "spectral",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ForcingFields {
    pub f_force: SpectralVectorField,
    pub g_force: SpectralVectorField,
    pub mode: CommutatorMode,
    /// Set when the local form was requested with `α ≠ 2`.
    pub local_form_mismatch: bool,
}

fn band(v: PhysVector, grid: &Arc<Grid>) -> Result<SpectralVectorField> {
    Ok(SpectralVectorField::forward(grid, &v)?.masked(STATE_BAND))
}

fn phys(v: &SpectralVectorField) -> PhysVector {
    v.masked(STATE_BAND).to_physical()
}

/// `M[(v·∇)w]`.
fn adv(v: &SpectralVectorField, w: &SpectralVectorField) -> Result<SpectralVectorField> {
    let vp = phys(v);
    let w = w.masked(STATE_BAND);
    let mut out: Vec<Array3<f64>> = Vec::with_capacity(3);
    for i in 0..3 {
        let gi = gradient(&w.scalar(i)).to_physical();
        out.push(dot(&vp, &gi));
    }
    let mut it = out.into_iter();
    band([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()], v.grid())
}

/// `∇×M[(∇×x)×y]`.
fn hall(x: &SpectralVectorField, y: &SpectralVectorField) -> Result<SpectralVectorField> {
    let j = phys(&curl(&x.masked(STATE_BAND)));
    Ok(curl(&band(cross(&j, &phys(y)), x.grid())?))
}

/// `∇×M[((∇×x)×y)×z]`.
fn slip(x: &SpectralVectorField, y: &SpectralVectorField, z: &SpectralVectorField) -> Result<SpectralVectorField> {
    let j = phys(&curl(&x.masked(STATE_BAND)));
    let jy = cross(&j, &phys(y));
    Ok(curl(&band(cross(&jy, &phys(z)), x.grid())?))
}

fn sum(terms: &[(f64, &SpectralVectorField)]) -> SpectralVectorField {
    let mut acc = terms[0].1.scaled(terms[0].0);
    for (c, t) in &terms[1..] {
        acc = acc.add_unchecked(&t.scaled(*c));
    }
    acc
}

/// `c M[(Δχ) v + 2(∇χ·∇) v]`, products taken against the interpolant of `χ`.
fn local_commutator(flows: &ReferenceFlows, v: &SpectralVectorField, c: f64) -> Result<SpectralVectorField> {
    let cutoff = &flows.cutoff;
    let mut comps = cutoff.weighted(&cutoff.padded.laplacian, v)?.into_components();
    for (i, comp) in comps.iter_mut().enumerate() {
        let t = cutoff.gradient_dot(&gradient(&v.scalar(i)))?;
        *comp = &*comp + &(t.coeffs() * C64::new(2.0, 0.0));
    }
    Ok(SpectralVectorField::from_components(v.grid(), comps)?.masked(STATE_BAND).scaled(c))
}

/// `F` and `G` at time `t`.
pub fn forcing_fields(flows: &ReferenceFlows, t: f64, params: &SimParams, mode: CommutatorMode) -> Result<ForcingFields> {
    let f = flows.free_flow(Which::F, t)?;
    let g = flows.free_flow(Which::G, t)?;
    let snap = flows.snapshot(t)?;
    let (ft, gt) = (&snap.f_tilde, &snap.g_tilde);
    let grid = f.grid().clone();
    let fp = phys(ft);
    let gp = phys(gt);
    let rot = band(cross(&fp, &phys(&curl(ft))), &grid)?.sub_unchecked(&band(cross(&gp, &phys(&curl(gt))), &grid)?);
    let (cu, cb, divs) = match mode {
        CommutatorMode::Spectral => {
            let (nu, mu, a) = (params.nu, params.mu, params.alpha);
            let chi_lf = localize_band(&flows.cutoff, &apply_radial(&f, |k2| lambda_symbol(k2, a)))?;
            let cu = chi_lf.sub_unchecked(&apply_radial(ft, |k2| lambda_symbol(k2, a))).scaled(nu);
            let chi_lg = localize_band(&flows.cutoff, &apply_radial(&g, |k2| -k2))?;
            let cb = apply_radial(gt, |k2| -k2).sub_unchecked(&chi_lg).scaled(mu);
            let df = divergence(ft).to_physical();
            let dg = divergence(gt).to_physical();
            let divs = band(scale(&df, &gp), &grid)?.sub_unchecked(&band(scale(&dg, &fp), &grid)?);
            (cu, cb, divs)
        }
        CommutatorMode::Local => {
            let cu = local_commutator(flows, &f, params.nu)?;
            let cb = local_commutator(flows, &g, params.mu)?;
            // ∇·f̃ = M(∇χ·f) since f is solenoidal.
            let df = flows.cutoff.gradient_dot(&f)?.masked(STATE_BAND).to_physical();
            let dg = flows.cutoff.gradient_dot(&g)?.masked(STATE_BAND).to_physical();
            let divs = band(scale(&df, &gp), &grid)?.sub_unchecked(&band(scale(&dg, &fp), &grid)?);
            (cu, cb, divs)
        }
    };
    let f_force = rot.add_unchecked(&cu);
    let induction = curl(&band(cross(&fp, &gp), &grid)?);
    let mut g_force = induction.add_unchecked(&divs).add_unchecked(&cb);
    if params.kappa != 0.0 {
        g_force = g_force.add_unchecked(&slip(gt, gt, gt)?.scaled(params.kappa));
    }
    Ok(ForcingFields {
        f_force,
        g_force,
        mode,
        local_form_mismatch: mode == CommutatorMode::Local && params.alpha != 2.0,
    })
}

#[derive(Clone, Debug)]
pub struct PerturbationResidual {
    pub mode: CommutatorMode,
    /// `‖route1 - route2‖_{H³}` for the projected `U` equation.
    pub u_abs: f64,
    /// `‖route1‖_{H³}`.
    pub u_scale: f64,
    pub b_abs: f64,
    pub b_scale: f64,
    pub local_form_mismatch: bool,
}

impl PerturbationResidual {
    pub fn u_rel(&self) -> f64 {
        self.u_abs / self.u_scale.max(1e-300)
    }
    pub fn b_rel(&self) -> f64 {
        self.b_abs / self.b_scale.max(1e-300)
    }
    pub fn worst_rel(&self) -> f64 {
        self.u_rel().max(self.b_rel())
    }
}

/// Both routes for `(U_t, B_t)`: `(route1_u, route1_b, route2_u, route2_b)`.
pub fn perturbation_routes(
    state: &State,
    flows: &ReferenceFlows,
    params: &SimParams,
    mode: CommutatorMode,
) -> Result<([SpectralVectorField; 2], [SpectralVectorField; 2], bool)> {
    let t = state.t;
    let snap = flows.snapshot(t)?;
    let (uu, bb) = perturbation_extract(state, &snap)?;
    let (ft, gt) = (&snap.f_tilde, &snap.g_tilde);

    let tend = full_rhs(state, params)?;
    let r1u = leray_project(&tend.du.sub_unchecked(&flows.localized_rate(Which::F, t)?));
    let r1b = tend.db.sub_unchecked(&flows.localized_rate(Which::G, t)?);

    let forcing = forcing_fields(flows, t, params, mode)?;
    let nonlinear_u = sum(&[
        (-1.0, &adv(&uu, &uu)?),
        (-1.0, &adv(ft, &uu)?),
        (-1.0, &adv(&uu, ft)?),
        (1.0, &adv(&bb, &bb)?),
        (1.0, &adv(gt, &bb)?),
        (1.0, &adv(&bb, gt)?),
        (1.0, &forcing.f_force),
    ]);
    let lin_u = apply_radial(&uu, |k2| -params.nu * lambda_symbol(k2, params.alpha));
    // The pressure fixes only the solenoidal part of `U_t`.
    let r2u = leray_project(&lin_u.add_unchecked(&nonlinear_u));

    let mut terms_b = vec![
        (-1.0, adv(&uu, &bb)?),
        (-1.0, adv(ft, &bb)?),
        (-1.0, adv(&uu, gt)?),
        (1.0, adv(&bb, &uu)?),
        (1.0, adv(gt, &uu)?),
        (1.0, adv(&bb, ft)?),
        (1.0, forcing.g_force.clone()),
    ];
    if params.sigma != 0.0 {
        let s = -params.sigma;
        terms_b.push((s, hall(&bb, &bb)?));
        terms_b.push((s, hall(&bb, gt)?));
        terms_b.push((s, hall(gt, &bb)?));
        terms_b.push((s, hall(gt, gt)?));
    }
    if params.kappa != 0.0 {
        let k = params.kappa;
        terms_b.push((k, slip(&bb, &bb, &bb)?));
        terms_b.push((k, slip(&bb, &bb, gt)?));
        terms_b.push((k, slip(&bb, gt, &bb)?));
        terms_b.push((k, slip(&bb, gt, gt)?));
        terms_b.push((k, slip(gt, &bb, &bb)?));
        terms_b.push((k, slip(gt, &bb, gt)?));
        terms_b.push((k, slip(gt, gt, &bb)?));
    }
    let refs: Vec<(f64, &SpectralVectorField)> = terms_b.iter().map(|(c, v)| (*c, v)).collect();
    let lin_b = apply_radial(&bb, |k2| -params.mu * k2);
    let r2b = lin_b.add_unchecked(&sum(&refs));
    Ok(([r1u, r1b], [r2u, r2b], forcing.local_form_mismatch))
}

/// `H³` norms of the difference between the two routes.
pub fn perturbation_residual(
    state: &State,
    flows: &ReferenceFlows,
    params: &SimParams,
    mode: CommutatorMode,
) -> Result<PerturbationResidual> {
    let ([r1u, r1b], [r2u, r2b], mismatch) = perturbation_routes(state, flows, params, mode)?;
    Ok(PerturbationResidual {
        mode,
        u_abs: sobolev_norm(&r1u.sub_unchecked(&r2u), 3.0),
        u_scale: sobolev_norm(&r1u, 3.0),
        b_abs: sobolev_norm(&r1b.sub_unchecked(&r2b), 3.0),
        b_scale: sobolev_norm(&r1b, 3.0),
        local_form_mismatch: mismatch,
    })
}
