//! Randomised spot-check of the commutator estimate
//! `‖[Λ^s, f] g‖_{L²} ≤ C (‖Λ^s f‖_{L²} ‖g‖_{L∞} + ‖Λ^{s-1} g‖_{L²} ‖∇f‖_{L∞})`:
//! reports the ratio of the two sides and its invariance under `f → λf`.
//! Not a certification of the inequality.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::field::SpectralScalarField;
use crate::grid::{Grid, Mask};
use crate::init::make_small_part;
use crate::norms::{linf_norm, sobolev_norm, Sampling};
use crate::ops::{apply_radial, gradient};
use crate::product::dealiased_product;

#[derive(Clone, Debug)]
pub struct CommutatorSample {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `ratio(λ f) / ratio(f)`, ideally 1.
    pub homogeneity: f64,
}

/// `|k|^s` with `|0|^0 = 1`.
fn lambda_s(f: &SpectralScalarField, s: f64) -> SpectralScalarField {
    apply_radial(f, |k2| if s == 0.0 { 1.0 } else { k2.powf(0.5 * s) })
}

fn sides(f: &SpectralScalarField, g: &SpectralScalarField, s: f64) -> Result<(f64, f64)> {
    let fg = dealiased_product(&[f, g])?;
    let fl = dealiased_product(&[f, &lambda_s(g, s)])?;
    let comm = lambda_s(&fg, s).sub(&fl)?;
    let lhs = sobolev_norm(&comm, 0.0);
    let grad_f = gradient(f);
    let rhs = sobolev_norm(&lambda_s(f, s), 0.0) * linf_norm(g, Sampling::Native)
        + sobolev_norm(&lambda_s(g, s - 1.0), 0.0) * linf_norm(&grad_f, Sampling::Native);
    Ok((lhs, rhs))
}

/// `count` random pairs of band-limited scalars with `s ∈ [1, 3]`.
pub fn commutator_spot_check(grid: &Arc<Grid>, s: f64, count: usize, seed: u64) -> Result<Vec<CommutatorSample>> {
    if !(1.0..=3.0).contains(&s) {
        return Err(invalid("s", format!("{s} is outside [1, 3]")));
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count as u64 {
        let sd = seed.wrapping_add(2 * k);
        let f = make_small_part(grid, sd, 1.0)?.scalar(0).masked(Mask::Quadratic);
        let g = make_small_part(grid, sd + 1, 1.0)?.scalar(1).masked(Mask::Quadratic);
        let (lhs, rhs) = sides(&f, &g, s)?;
        let (l2, r2) = sides(&f.scaled(3.0), &g, s)?;
        let ratio = lhs / rhs;
        out.push(CommutatorSample {
            seed: sd,
            lhs,
            rhs,
            ratio,
            homogeneity: (l2 / r2) / ratio,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ratios_are_finite_and_scale_free() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        for s in [1.0, 2.5] {
            for c in commutator_spot_check(&g, s, 4, 7).unwrap() {
                assert!(c.ratio.is_finite() && c.ratio > 0.0);
                assert!((c.homogeneity - 1.0).abs() < 1e-12, "{c:?}");
            }
        }
    }
}
