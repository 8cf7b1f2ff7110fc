//! Right-hand side of the Hall-MHD system with ion-slip,
//!
//! ```text
//! u_t = -ν Λ^α u + P[-(u·∇)u + (b·∇)b]
//! b_t =  μ Δb - (u·∇)b + (b·∇)u - σ ∇×((∇×b)×b) + κ ∇×(((∇×b)×b)×b)
//! ```
//!
//! States live in the cubic band `|m_i| < n/4`. Inputs are truncated to the
//! band before every product and outputs after it, so each product of band
//! fields is exact on the grid and the energy identities hold to round-off.
//!
//! Tendency entries keep right-hand-side signs:
//!
//! | entry           | value                         |
//! |-----------------|-------------------------------|
//! | `advection_u`   | `-P (u·∇)u`                   |
//! | `lorentz`       | `+P (b·∇)b`                   |
//! | `dissipation_u` | `-ν Λ^α u`                    |
//! | `advection_b`   | `-(u·∇)b`                     |
//! | `stretching`    | `+(b·∇)u`                     |
//! | `hall`          | `-σ ∇×((∇×b)×b)`              |
//! | `ionslip`       | `+κ ∇×(((∇×b)×b)×b)`          |
//! | `dissipation_b` | `-μ |k|² b`                   |

use std::sync::Arc;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::field::{check_grids, forward_many, inverse_many, PhysVector, SpectralScalarField, SpectralVectorField, C64};
use crate::grid::{Grid, Mask};
use crate::init::SimParams;
use crate::norms::{inner_unchecked, sobolev_norm_sq, weighted_norm_sq};
use crate::ops::{apply_radial, curl, gradient, lambda_symbol, leray_in_place};
use crate::product::{cross, fill3, slices, zeros3};

/// Spectral band of every evolved field.
pub const STATE_BAND: Mask = Mask::Cubic;

#[derive(Clone, Debug)]
pub struct State {
    pub u: SpectralVectorField,
    pub b: SpectralVectorField,
    pub t: f64,
}

impl State {
    pub fn new(u: SpectralVectorField, b: SpectralVectorField, t: f64) -> Result<Self> {
        check_grids(u.grid(), b.grid())?;
        Ok(Self { u, b, t })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            u: SpectralVectorField::zeros(grid),
            b: SpectralVectorField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u.grid()
    }

    /// `½(‖u‖² + ‖b‖²)`.
    pub fn energy(&self) -> f64 {
        0.5 * (sobolev_norm_sq(&self.u, 0.0) + sobolev_norm_sq(&self.b, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.b.is_finite() && self.t.is_finite()
    }
}

#[derive(Clone, Debug)]
pub struct Breakdown {
    pub advection_u: SpectralVectorField,
    pub lorentz: SpectralVectorField,
    pub dissipation_u: SpectralVectorField,
    pub advection_b: SpectralVectorField,
    pub stretching: SpectralVectorField,
    pub hall: SpectralVectorField,
    pub ionslip: SpectralVectorField,
    pub dissipation_b: SpectralVectorField,
}

#[derive(Clone, Debug)]
pub struct Tendency {
    pub du: SpectralVectorField,
    pub db: SpectralVectorField,
    pub breakdown: Breakdown,
}

impl Breakdown {
    pub fn sum_u(&self) -> SpectralVectorField {
        self.advection_u
            .add_unchecked(&self.lorentz)
            .add_unchecked(&self.dissipation_u)
    }

    pub fn sum_b(&self) -> SpectralVectorField {
        self.advection_b
            .add_unchecked(&self.stretching)
            .add_unchecked(&self.hall)
            .add_unchecked(&self.ionslip)
            .add_unchecked(&self.dissipation_b)
    }
}

/// `(v·∇)w` in physical space from samples of `v` and of `∇w` (`g[i][j] = ∂_j w_i`).
fn directional(v: &PhysVector, g: &[Array3<f64>]) -> PhysVector {
    let mut out = zeros3(&v[0]);
    let vs = slices(v);
    let gs: Vec<&[f64]> = g.iter().map(|a| a.as_slice().expect("standard layout")).collect();
    fill3(&mut out, |q| {
        let (v0, v1, v2) = (vs[0][q], vs[1][q], vs[2][q]);
        [
            v0 * gs[0][q] + v1 * gs[1][q] + v2 * gs[2][q],
            v0 * gs[3][q] + v1 * gs[4][q] + v2 * gs[5][q],
            v0 * gs[6][q] + v1 * gs[7][q] + v2 * gs[8][q],
        ]
    });
    out
}

/// Spectra of `∂_j w_i`, ordered `i`-major.
fn gradient_spectra(w: &SpectralVectorField) -> Vec<Array3<C64>> {
    (0..3).flat_map(|i| gradient(&w.scalar(i)).into_components()).collect()
}

fn to_spectral(grid: &Arc<Grid>, v: &PhysVector, mask: Mask) -> SpectralVectorField {
    let mut out = forward_many(grid, &[&v[0], &v[1], &v[2]]).into_iter();
    let mut s = SpectralVectorField::from_parts(grid, [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()]);
    s.apply_mask(mask);
    s
}

fn split_phys(mut it: impl Iterator<Item = Array3<f64>>) -> PhysVector {
    [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
}

/// `(vel·∇)field` with inputs and output truncated to the quadratic mask.
pub fn advection(vel: &SpectralVectorField, field: &SpectralVectorField) -> Result<SpectralVectorField> {
    check_grids(vel.grid(), field.grid())?;
    Ok(advection_masked(vel, field, Mask::Quadratic))
}

fn advection_masked(vel: &SpectralVectorField, field: &SpectralVectorField, mask: Mask) -> SpectralVectorField {
    let grid = vel.grid().clone();
    let v = vel.masked(mask);
    let f = field.masked(mask);
    let grads = gradient_spectra(&f);
    let mut refs: Vec<&Array3<C64>> = v.components().iter().collect();
    refs.extend(grads.iter());
    let mut phys = inverse_many(&grid, &refs).into_iter();
    let vp = split_phys(phys.by_ref());
    let g: Vec<Array3<f64>> = phys.collect();
    to_spectral(&grid, &directional(&vp, &g), mask)
}

/// `σ ∇×((∇×b)×b)` with the quadratic mask.
pub fn hall_term(b: &SpectralVectorField, sigma: f64) -> SpectralVectorField {
    let grid = b.grid().clone();
    let bb = b.masked(Mask::Quadratic);
    let j = curl(&bb);
    let bp = bb.to_physical();
    let jp = j.to_physical();
    curl(&to_spectral(&grid, &cross(&jp, &bp), Mask::Quadratic)).scaled(sigma)
}

/// `κ ∇×(((∇×b)×b)×b)` with the cubic mask. Enters the `b` equation with a
/// plus sign on the right-hand side.
pub fn ionslip_term(b: &SpectralVectorField, kappa: f64) -> SpectralVectorField {
    let grid = b.grid().clone();
    let bb = b.masked(Mask::Cubic);
    let j = curl(&bb);
    let bp = bb.to_physical();
    let jp = j.to_physical();
    let jxb = cross(&jp, &bp);
    curl(&to_spectral(&grid, &cross(&jxb, &bp), Mask::Cubic)).scaled(kappa)
}

/// Linear dissipation rates `ν|k|^α` and `μ|k|²`.
pub fn dissipation_u(u: &SpectralVectorField, nu: f64, alpha: f64) -> SpectralVectorField {
    apply_radial(u, |k2| -nu * lambda_symbol(k2, alpha))
}

pub fn dissipation_b(b: &SpectralVectorField, mu: f64) -> SpectralVectorField {
    apply_radial(b, |k2| -mu * k2)
}

fn check_finite(t: &SpectralVectorField, what: &'static str) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Full tendency in convective form with every term kept separately.
pub fn full_rhs(state: &State, params: &SimParams) -> Result<Tendency> {
    let grid = state.grid().clone();
    let u = state.u.masked(STATE_BAND);
    let b = state.b.masked(STATE_BAND);
    let j = curl(&b);
    let gu = gradient_spectra(&u);
    let gb = gradient_spectra(&b);
    let mut refs: Vec<&Array3<C64>> = Vec::with_capacity(27);
    refs.extend(u.components().iter());
    refs.extend(b.components().iter());
    refs.extend(j.components().iter());
    refs.extend(gu.iter());
    refs.extend(gb.iter());
    let mut phys = inverse_many(&grid, &refs).into_iter();
    let up = split_phys(phys.by_ref());
    let bp = split_phys(phys.by_ref());
    let jp = split_phys(phys.by_ref());
    let gup: Vec<Array3<f64>> = phys.by_ref().take(9).collect();
    let gbp: Vec<Array3<f64>> = phys.collect();

    let uu = directional(&up, &gup);
    let bb = directional(&bp, &gbp);
    let ub = directional(&up, &gbp);
    let bu = directional(&bp, &gup);
    let jxb = cross(&jp, &bp);
    let jxbxb = cross(&jxb, &bp);

    let mut advection_u = to_spectral(&grid, &uu, STATE_BAND).scaled(-1.0);
    leray_in_place(&mut advection_u);
    let mut lorentz = to_spectral(&grid, &bb, STATE_BAND);
    leray_in_place(&mut lorentz);
    let advection_b = to_spectral(&grid, &ub, STATE_BAND).scaled(-1.0);
    let stretching = to_spectral(&grid, &bu, STATE_BAND);
    let hall = curl(&to_spectral(&grid, &jxb, STATE_BAND)).scaled(-params.sigma);
    let ionslip = curl(&to_spectral(&grid, &jxbxb, STATE_BAND)).scaled(params.kappa);
    let breakdown = Breakdown {
        advection_u,
        lorentz,
        dissipation_u: dissipation_u(&state.u, params.nu, params.alpha),
        advection_b,
        stretching,
        hall,
        ionslip,
        dissipation_b: dissipation_b(&state.b, params.mu),
    };
    let du = breakdown.sum_u();
    let db = breakdown.sum_b();
    check_finite(&du, "velocity tendency")?;
    check_finite(&db, "magnetic tendency")?;
    Ok(Tendency { du, db, breakdown })
}

/// Nonlinear tendencies in rotational/curl form, used by the time stepper:
/// `P[u×ω + J×b]` and `∇×[u×b - σ J×b + κ (J×b)×b]`. Equal to the
/// convective nonlinear terms of [`full_rhs`] up to round-off.
pub fn nonlinear_rhs(
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    sigma: f64,
    kappa: f64,
) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let grid = u.grid().clone();
    let u = u.masked(STATE_BAND);
    let b = b.masked(STATE_BAND);
    let w = curl(&u);
    let j = curl(&b);
    let refs: Vec<&Array3<C64>> = u
        .components()
        .iter()
        .chain(b.components())
        .chain(w.components())
        .chain(j.components())
        .collect();
    let mut phys = inverse_many(&grid, &refs).into_iter();
    let up = split_phys(phys.by_ref());
    let bp = split_phys(phys.by_ref());
    let wp = split_phys(phys.by_ref());
    let jp = split_phys(phys.by_ref());
    let (us, bs, ws, js) = (slices(&up), slices(&bp), slices(&wp), slices(&jp));
    let crs = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let at = |s: &[&[f64]; 3], q: usize| [s[0][q], s[1][q], s[2][q]];
    let mut nu = zeros3(&up[0]);
    fill3(&mut nu, |q| {
        let (uq, bq) = (at(&us, q), at(&bs, q));
        let uxw = crs(uq, at(&ws, q));
        let jxb = crs(at(&js, q), bq);
        [uxw[0] + jxb[0], uxw[1] + jxb[1], uxw[2] + jxb[2]]
    });
    let mut e = zeros3(&up[0]);
    fill3(&mut e, |q| {
        let (uq, bq) = (at(&us, q), at(&bs, q));
        let uxb = crs(uq, bq);
        let jxb = crs(at(&js, q), bq);
        let slip = crs(jxb, bq);
        [
            uxb[0] - sigma * jxb[0] + kappa * slip[0],
            uxb[1] - sigma * jxb[1] + kappa * slip[1],
            uxb[2] - sigma * jxb[2] + kappa * slip[2],
        ]
    });
    let mut spec = forward_many(&grid, &[&nu[0], &nu[1], &nu[2], &e[0], &e[1], &e[2]]).into_iter();
    let mut du = SpectralVectorField::from_parts(&grid, [spec.next().unwrap(), spec.next().unwrap(), spec.next().unwrap()]);
    let mut ef = SpectralVectorField::from_parts(&grid, [spec.next().unwrap(), spec.next().unwrap(), spec.next().unwrap()]);
    du.apply_mask(STATE_BAND);
    leray_in_place(&mut du);
    ef.apply_mask(STATE_BAND);
    let db = curl(&ef);
    check_finite(&du, "velocity tendency")?;
    check_finite(&db, "magnetic tendency")?;
    Ok((du, db))
}

/// Total tendency through the rotational path.
pub fn fused_rhs(state: &State, params: &SimParams) -> Result<(SpectralVectorField, SpectralVectorField)> {
    let (mut du, mut db) = nonlinear_rhs(&state.u, &state.b, params.sigma, params.kappa)?;
    let (nu, mu, alpha) = (params.nu, params.mu, params.alpha);
    let du_lin = dissipation_u(&state.u, nu, alpha);
    let db_lin = dissipation_b(&state.b, mu);
    du = du.add_unchecked(&du_lin);
    db = db.add_unchecked(&db_lin);
    Ok((du, db))
}

/// Mean-free pressure `p = (-Δ)^{-1} ∇·((u·∇)u - (b·∇)b)`.
pub fn pressure_recover(state: &State) -> SpectralScalarField {
    let n = advection_masked(&state.u, &state.u, STATE_BAND)
        .sub_unchecked(&advection_masked(&state.b, &state.b, STATE_BAND));
    let grid = state.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let [a, b, c] = n.components();
    let p = Array3::from_shape_fn(grid.shape(), |(i, j, l)| {
        let (k1, k2, k3) = (kd[i], kd[j], kd[l]);
        let q = k1 * k1 + k2 * k2 + k3 * k3;
        if q == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(0.0, 1.0) * (k1 * a[[i, j, l]] + k2 * b[[i, j, l]] + k3 * c[[i, j, l]]) / q
        }
    });
    SpectralScalarField::from_coeffs(&grid, p).expect("shape")
}

/// Instantaneous terms of `d/dt ½(‖u‖² + ‖b‖²)`.
#[derive(Clone, Debug)]
pub struct EnergyBudget {
    pub energy: f64,
    /// `-ν ‖Λ^{α/2} u‖²` from the multiplier sum.
    pub dissipation_u: f64,
    /// `-μ ‖∇b‖²`.
    pub dissipation_b: f64,
    /// `-κ ‖(∇×b)×b‖²`.
    pub ionslip_expected: f64,
    pub dissipation_u_measured: f64,
    pub dissipation_b_measured: f64,
    pub ionslip_measured: f64,
    /// `∫ advection_u·u + ∫ advection_b·b`.
    pub advection: f64,
    /// `∫ lorentz·u + ∫ stretching·b`.
    pub lorentz_cross: f64,
    pub hall: f64,
    /// `∫ du·u + ∫ db·b`.
    pub measured_rate: f64,
    pub expected_rate: f64,
    /// Sum of magnitudes of all measured contributions; the natural scale for
    /// relative comparisons.
    pub scale: f64,
}

impl EnergyBudget {
    pub fn residual(&self) -> f64 {
        self.measured_rate - self.expected_rate
    }

    pub fn relative_residual(&self) -> f64 {
        let s = self.expected_rate.abs().max(f64::MIN_POSITIVE);
        self.residual().abs() / s
    }
}

/// `‖(∇×b)×b‖²` with `b` truncated to the state band.
pub fn lorentz_force_norm_sq(b: &SpectralVectorField) -> f64 {
    let grid = b.grid().clone();
    let bb = b.masked(STATE_BAND);
    let jxb = cross(&curl(&bb).to_physical(), &bb.to_physical());
    let w = grid.volume() / grid.points() as f64;
    let parts: f64 = jxb.iter().map(|a| crate::norms::reduce(a, |_, _, _, v| v * v)).sum();
    w * parts
}

pub fn energy_budget(state: &State, params: &SimParams) -> Result<EnergyBudget> {
    let t = full_rhs(state, params)?;
    Ok(budget_from(state, params, &t))
}

pub fn budget_from(state: &State, params: &SimParams, t: &Tendency) -> EnergyBudget {
    let (u, b, br) = (&state.u, &state.b, &t.breakdown);
    let ip = |x: &SpectralVectorField, y: &SpectralVectorField| inner_unchecked(x, y);
    let alpha = params.alpha;
    let dissipation_u = -params.nu * weighted_norm_sq(u, |k2| lambda_symbol(k2, alpha));
    let dissipation_b = -params.mu * weighted_norm_sq(b, |k2| k2);
    let ionslip_expected = -params.kappa * lorentz_force_norm_sq(b);
    let terms = [
        ip(&br.advection_u, u),
        ip(&br.advection_b, b),
        ip(&br.lorentz, u),
        ip(&br.stretching, b),
        ip(&br.hall, b),
        ip(&br.ionslip, b),
        ip(&br.dissipation_u, u),
        ip(&br.dissipation_b, b),
    ];
    let measured_rate = ip(&t.du, u) + ip(&t.db, b);
    EnergyBudget {
        energy: state.energy(),
        dissipation_u,
        dissipation_b,
        ionslip_expected,
        dissipation_u_measured: terms[6],
        dissipation_b_measured: terms[7],
        ionslip_measured: terms[5],
        advection: terms[0] + terms[1],
        lorentz_cross: terms[2] + terms[3],
        hall: terms[4],
        measured_rate,
        expected_rate: dissipation_u + dissipation_b + ionslip_expected,
        scale: terms.iter().map(|x| x.abs()).sum(),
    }
}

/// Random band-limited divergence-free state with prescribed H³ norms.
pub fn random_state(grid: &Arc<Grid>, seed: u64, u_h3: f64, b_h3: f64) -> Result<State> {
    let u = crate::init::make_small_part(grid, seed.wrapping_mul(2), u_h3)?;
    let b = crate::init::make_small_part(grid, seed.wrapping_mul(2).wrapping_add(1), b_h3)?;
    State::new(u, b, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use crate::init::make_beltrami;
    use crate::norms::{inner, sobolev_norm};
    use crate::ops::{divergence, leray_project};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(alpha: f64) -> SimParams {
        SimParams {
            nu: 0.7,
            mu: 0.3,
            sigma: 0.8,
            kappa: 0.25,
            alpha,
            ..SimParams::default()
        }
    }

    fn l2(v: &SpectralVectorField) -> f64 {
        sobolev_norm(v, 0.0)
    }

    #[test]
    fn zero_state_has_zero_tendency() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let t = full_rhs(&State::zeros(&g), &params(1.0)).unwrap();
        assert_eq!(t.du.max_abs(), 0.0);
        assert_eq!(t.db.max_abs(), 0.0);
        assert_eq!(pressure_recover(&State::zeros(&g)).max_abs(), 0.0);
    }

    #[test]
    fn breakdown_sums_and_divergence() {
        let g = Grid::new(16, 5.0).unwrap();
        let s = random_state(&g, 3, 2.0, 1.5).unwrap();
        let t = full_rhs(&s, &params(1.5)).unwrap();
        assert!(l2(&t.du.sub(&t.breakdown.sum_u()).unwrap()) <= 1e-12 * l2(&t.du));
        assert!(l2(&t.db.sub(&t.breakdown.sum_b()).unwrap()) <= 1e-12 * l2(&t.db));
        assert!(sobolev_norm(&divergence(&t.du), 0.0) <= 1e-11 * sobolev_norm(&t.du, 1.0));
        assert!(sobolev_norm(&divergence(&t.db), 0.0) <= 1e-11 * sobolev_norm(&t.db, 1.0));
    }

    #[test]
    fn fused_path_matches_convective_path() {
        let g = Grid::new(16, 4.0).unwrap();
        let s = random_state(&g, 5, 3.0, 2.0).unwrap();
        let p = params(1.0);
        let t = full_rhs(&s, &p).unwrap();
        let (du, db) = fused_rhs(&s, &p).unwrap();
        assert!(l2(&du.sub(&t.du).unwrap()) <= 1e-12 * l2(&t.du));
        assert!(l2(&db.sub(&t.db).unwrap()) <= 1e-12 * l2(&t.db));
    }

    #[test]
    fn single_mode_linear_decay_rate() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let uy = SpectralScalarField::forward(&g, &sample(&g, |x| (x[0] + x[2]).sin())).unwrap();
        let u = SpectralVectorField::from_scalars(SpectralScalarField::zeros(&g), uy, SpectralScalarField::zeros(&g)).unwrap();
        let p = params(1.5);
        let d = dissipation_u(&u, p.nu, p.alpha);
        let rate = p.nu * 2f64.powf(0.75);
        assert!(l2(&d.add(&u.scaled(rate)).unwrap()) < 1e-14 * l2(&d));
    }

    #[test]
    fn advection_by_constant_velocity() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let c = [0.3, -1.2, 0.5];
        let cst = |v: f64| SpectralScalarField::forward(&g, &Array3::from_elem(g.shape(), v)).unwrap();
        let vel = SpectralVectorField::from_scalars(cst(c[0]), cst(c[1]), cst(c[2])).unwrap();
        let f = SpectralScalarField::forward(&g, &sample(&g, |x| (2.0 * x[0] - x[1] + 3.0 * x[2]).cos())).unwrap();
        let field = SpectralVectorField::from_scalars(f.clone(), SpectralScalarField::zeros(&g), f.scaled(2.0)).unwrap();
        let a = advection(&vel, &field).unwrap();
        let want = crate::ops::apply_indexed_clone(&field, |i, j, l| {
            let k = g.wavevector(i, j, l);
            C64::new(0.0, c[0] * k[0] + c[1] * k[1] + c[2] * k[2])
        });
        assert!(l2(&a.sub(&want).unwrap()) < 1e-13 * l2(&want));
        assert!(l2(&advection(&field, &vel).unwrap()) < 1e-13);
    }

    #[test]
    fn beltrami_field_has_no_hall_or_ionslip() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let (b, _) = make_beltrami(&g, 0.25, 1.0).unwrap();
        assert!(l2(&hall_term(&b, 1.0)) < 1e-14);
        assert!(l2(&ionslip_term(&b, 1.0)) < 1e-14);
        assert_eq!(l2(&ionslip_term(&b, 0.0)), 0.0);
    }

    #[test]
    fn pressure_gradient_is_projection_complement() {
        let g = Grid::new(16, 3.0).unwrap();
        let s = random_state(&g, 11, 2.0, 2.0).unwrap();
        let n = advection_masked(&s.u, &s.u, STATE_BAND).sub_unchecked(&advection_masked(&s.b, &s.b, STATE_BAND));
        let complement = n.sub_unchecked(&leray_project(&n));
        let gp = gradient(&pressure_recover(&s));
        assert!(l2(&gp.add(&complement).unwrap()) <= 1e-12 * l2(&complement));
        let uy = SpectralScalarField::forward(&g, &sample(&g, |x| (2.0 * PI * x[1] / 3.0).sin())).unwrap();
        let shear = SpectralVectorField::from_scalars(uy, SpectralScalarField::zeros(&g), SpectralScalarField::zeros(&g)).unwrap();
        let st = State::new(shear, SpectralVectorField::zeros(&g), 0.0).unwrap();
        assert!(pressure_recover(&st).max_abs() < 1e-15);
    }

    #[test]
    fn ideal_budget_vanishes_and_magnetic_only() {
        let g = Grid::new(16, 4.0).unwrap();
        let s = random_state(&g, 2, 2.0, 2.0).unwrap();
        let p = SimParams { nu: 0.0, mu: 0.0, kappa: 0.0, ..params(2.0) };
        let t = full_rhs(&s, &p).unwrap();
        let bud = budget_from(&s, &p, &t);
        assert!(bud.measured_rate.abs() <= 1e-10 * bud.scale);
        let s0 = State::new(SpectralVectorField::zeros(&g), s.b.clone(), 0.0).unwrap();
        let bud0 = energy_budget(&s0, &params(2.0)).unwrap();
        assert_eq!(bud0.dissipation_u, 0.0);
        assert!(bud0.advection.abs() <= 1e-14 * bud0.scale);
        assert!(bud0.lorentz_cross.abs() <= 1e-14 * bud0.scale);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn energy_law_and_null_work(seed in 0u64..10_000, alpha in prop_oneof![Just(0.0), Just(1.0), Just(1.5), Just(2.0)]) {
            let g = Grid::new(16, 3.5).unwrap();
            let s = random_state(&g, seed, 4.0, 3.0).unwrap();
            let p = params(alpha);
            let bud = energy_budget(&s, &p).unwrap();
            prop_assert!(bud.relative_residual() <= 1e-10);
            prop_assert!((bud.dissipation_u - bud.dissipation_u_measured).abs() <= 1e-12 * bud.dissipation_u.abs());
            prop_assert!((bud.ionslip_measured - bud.ionslip_expected).abs() <= 1e-10 * bud.ionslip_expected.abs());
            prop_assert!(bud.lorentz_cross.abs() <= 1e-11 * bud.scale);
            let hall = inner(&hall_term(&s.b, p.sigma), &s.b).unwrap();
            let bound = 1e-11 * sobolev_norm(&curl(&s.b), 0.0) * l2(&s.b) * p.sigma.abs();
            prop_assert!(hall.abs() <= bound);
            let f = s.u.clone();
            prop_assert!(inner(&advection(&s.u, &f).unwrap(), &f).unwrap().abs() <= 1e-11 * l2(&f) * sobolev_norm(&f, 1.0) * crate::norms::linf_norm(&s.u, crate::norms::Sampling::Native) * 10.0);
        }
    }
}
