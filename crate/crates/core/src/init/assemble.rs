use std::sync::Arc;

use crate::error::Result;
use crate::field::SpectralVectorField;
use crate::grid::{Grid, Mask};
use crate::init::beltrami::{make_beltrami, AnnulusRealization};
use crate::init::cutoff::{Cutoff, CutoffReport};
use crate::init::params::SimParams;
use crate::init::small::make_small_part;
use crate::norms::{linf_norm, sobolev_norm, Sampling};
use crate::ops::leray_in_place;

#[derive(Clone, Copy, Debug)]
pub struct AssemblyOptions {
    /// Leray-project `χ α v0` after band-limiting it. Without it
    /// `u0 = u01 + M(χ α1 v0)` with `M` the state-band truncation, which is
    /// not divergence-free.
    pub leray_project: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { leray_project: true }
    }
}

/// What the assembly realised, for file headers.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub delta_target: f64,
    pub delta_eff: f64,
    pub mode_count: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub v0_l1: f64,
    pub v0_h3: f64,
    pub u01_h3: f64,
    pub b01_h3: f64,
    pub u0_h3: f64,
    pub b0_h3: f64,
    pub u0_linf: f64,
    pub b0_linf: f64,
    /// H³ norm of what the projection removed from `χ α1 v0` (resp. `α2`).
    pub u_projection_defect: f64,
    pub b_projection_defect: f64,
    pub leray_project: bool,
    pub cutoff: CutoffReport,
}

impl Provenance {
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        let mut v = vec![
            ("delta_target", self.delta_target),
            ("delta_eff", self.delta_eff),
            ("mode_count", self.mode_count as f64),
            ("k_min", self.k_min),
            ("k_max", self.k_max),
            ("v0_l1", self.v0_l1),
            ("v0_h3", self.v0_h3),
            ("u01_h3", self.u01_h3),
            ("b01_h3", self.b01_h3),
            ("u0_h3", self.u0_h3),
            ("b0_h3", self.b0_h3),
            ("u0_linf", self.u0_linf),
            ("b0_linf", self.b0_linf),
            ("u_projection_defect", self.u_projection_defect),
            ("b_projection_defect", self.b_projection_defect),
            ("leray_project", if self.leray_project { 1.0 } else { 0.0 }),
            ("cutoff_identically_one", if self.cutoff.identically_one { 1.0 } else { 0.0 }),
        ];
        const RADIAL: [&str; 6] = ["chi_radial_d0", "chi_radial_d1", "chi_radial_d2", "chi_radial_d3", "chi_radial_d4", "chi_radial_d5"];
        const GRID: [&str; 6] = ["chi_grid_d0", "chi_grid_d1", "chi_grid_d2", "chi_grid_d3", "chi_grid_d4", "chi_grid_d5"];
        const PROFILE: [&str; 6] = ["chi_profile_d0", "chi_profile_d1", "chi_profile_d2", "chi_profile_d3", "chi_profile_d4", "chi_profile_d5"];
        for k in 0..6 {
            v.push((PROFILE[k], self.cutoff.profile_max[k]));
            v.push((RADIAL[k], self.cutoff.radial_max[k]));
            v.push((GRID[k], self.cutoff.grid_max[k]));
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct InitialData {
    pub u0: SpectralVectorField,
    pub b0: SpectralVectorField,
    pub u01: SpectralVectorField,
    pub b01: SpectralVectorField,
    /// `α1 v0` and `α2 v0`.
    pub u02: SpectralVectorField,
    pub b02: SpectralVectorField,
    pub v0: SpectralVectorField,
    pub cutoff: Cutoff,
    pub annulus: AnnulusRealization,
    pub provenance: Provenance,
}

/// `χ · v` with `χ` replaced by its trigonometric interpolant, as an exact
/// convolution truncated to the grid.
pub fn localize(cutoff: &Cutoff, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    cutoff.multiply(v)
}

/// [`localize`] truncated to the state band.
pub fn localize_band(cutoff: &Cutoff, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    Ok(localize(cutoff, v)?.masked(Mask::Cubic))
}

fn large_part(cutoff: &Cutoff, v: &SpectralVectorField, project: bool) -> Result<(SpectralVectorField, f64)> {
    if !project {
        return Ok((localize_band(cutoff, v)?, 0.0));
    }
    let raw = localize(cutoff, v)?;
    let mut p = raw.masked(Mask::Cubic);
    leray_in_place(&mut p);
    let defect = sobolev_norm(&raw.sub_unchecked(&p), 3.0);
    Ok((p, defect))
}

pub fn assemble_with(params: &SimParams, grid: &Arc<Grid>, opts: AssemblyOptions) -> Result<InitialData> {
    params.validate()?;
    let cutoff = Cutoff::new(grid, params.m0)?;
    let (v0, annulus) = make_beltrami(grid, params.delta, params.m1)?;
    let half = 0.5 * params.small_budget;
    let u01 = make_small_part(grid, params.seed, half)?;
    let b01 = make_small_part(grid, params.seed.wrapping_add(1), half)?;
    let u02 = v0.scaled(params.alpha1);
    let b02 = v0.scaled(params.alpha2);
    let (lu, du) = large_part(&cutoff, &u02, opts.leray_project)?;
    let (lb, db) = large_part(&cutoff, &b02, opts.leray_project)?;
    let u0 = u01.add_unchecked(&lu);
    let b0 = b01.add_unchecked(&lb);
    let provenance = Provenance {
        delta_target: params.delta,
        delta_eff: annulus.delta_eff,
        mode_count: annulus.mode_count(),
        k_min: annulus.k_min,
        k_max: annulus.k_max,
        v0_l1: crate::init::beltrami::fourier_l1(&v0),
        v0_h3: sobolev_norm(&v0, 3.0),
        u01_h3: sobolev_norm(&u01, 3.0),
        b01_h3: sobolev_norm(&b01, 3.0),
        u0_h3: sobolev_norm(&u0, 3.0),
        b0_h3: sobolev_norm(&b0, 3.0),
        u0_linf: linf_norm(&u0, Sampling::Native),
        b0_linf: linf_norm(&b0, Sampling::Native),
        u_projection_defect: du,
        b_projection_defect: db,
        leray_project: opts.leray_project,
        cutoff: cutoff.report.clone(),
    };
    Ok(InitialData {
        u0,
        b0,
        u01,
        b01,
        u02,
        b02,
        v0,
        cutoff,
        annulus,
        provenance,
    })
}

/// `u0 = u01 + P(χ α1 v0)`, `b0 = b01 + P(χ α2 v0)`.
pub fn assemble_initial_data(
    params: &SimParams,
    grid: &Arc<Grid>,
) -> Result<(SpectralVectorField, SpectralVectorField, Provenance)> {
    let d = assemble_with(params, grid, AssemblyOptions::default())?;
    Ok((d.u0, d.b0, d.provenance))
}
