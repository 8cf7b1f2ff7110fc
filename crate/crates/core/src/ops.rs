//! Spectral differential operators and Fourier multipliers.

use ndarray::{Array3, Zip};

use crate::error::{invalid, Error, Result};
use crate::field::{SpectralField, SpectralScalarField, SpectralVectorField, C64};
use crate::grid::Grid;

const I: C64 = C64::new(0.0, 1.0);

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=2.0).contains(&alpha) {
        Ok(())
    } else {
        Err(invalid("alpha", format!("{alpha} is outside [0, 2]")))
    }
}

/// `|k|^alpha` from `|k|²`, with `|0|^0 = 1`.
#[inline]
pub fn lambda_symbol(k2: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if alpha == 2.0 {
        k2
    } else {
        k2.powf(0.5 * alpha)
    }
}

/// Multiplies every array by `m(|k|²)`.
pub fn apply_radial<F: SpectralField>(field: &F, m: impl Fn(f64) -> f64 + Sync) -> F {
    let mut out = field.clone();
    apply_radial_in_place(&mut out, m);
    out
}

pub fn apply_radial_in_place<F: SpectralField>(field: &mut F, m: impl Fn(f64) -> f64 + Sync) {
    let grid = field.grid().clone();
    let k2 = grid.k_squared();
    for arr in field.arrays_mut() {
        Zip::from(arr).and(k2).par_for_each(|c, &q| *c *= m(q));
    }
}

/// `Λ^α`, the multiplier `|k|^α`.
pub fn frac_laplacian<F: SpectralField>(field: &F, alpha: f64) -> Result<F> {
    check_alpha(alpha)?;
    Ok(apply_radial(field, |k2| lambda_symbol(k2, alpha)))
}

/// `Δ`, the multiplier `-|k|²`.
pub fn laplacian<F: SpectralField>(field: &F) -> F {
    apply_radial(field, |k2| -k2)
}

/// `e^{-coeff |k|^α t}`.
pub fn heat_propagator<F: SpectralField>(field: &F, t: f64, coeff: f64, alpha: f64) -> Result<F> {
    check_alpha(alpha)?;
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} is negative")));
    }
    if !(coeff >= 0.0) {
        return Err(invalid("coeff", format!("{coeff} is negative")));
    }
    Ok(apply_radial(field, |k2| (-coeff * lambda_symbol(k2, alpha) * t).exp()))
}

pub fn gradient(f: &SpectralScalarField) -> SpectralVectorField {
    let grid = f.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let c = f.coeffs();
    let mut comps = [
        Array3::from_elem(grid.shape(), C64::default()),
        Array3::from_elem(grid.shape(), C64::default()),
        Array3::from_elem(grid.shape(), C64::default()),
    ];
    let [gx, gy, gz] = &mut comps;
    Zip::indexed(gx).and(gy).and(gz).and(c).par_for_each(|(i, j, l), x, y, z, &v| {
        *x = I * kd[i] * v;
        *y = I * kd[j] * v;
        *z = I * kd[l] * v;
    });
    SpectralVectorField::from_parts(&grid, comps)
}

/// `i k × v`.
pub fn curl(v: &SpectralVectorField) -> SpectralVectorField {
    let grid = v.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let [a, b, c] = v.components();
    let mut comps = [
        Array3::from_elem(grid.shape(), C64::default()),
        Array3::from_elem(grid.shape(), C64::default()),
        Array3::from_elem(grid.shape(), C64::default()),
    ];
    let [x, y, z] = &mut comps;
    Zip::indexed(x).and(y).and(z).par_for_each(|(i, j, l), x, y, z| {
        let (k1, k2, k3) = (kd[i], kd[j], kd[l]);
        let (a, b, c) = (a[[i, j, l]], b[[i, j, l]], c[[i, j, l]]);
        *x = I * (k2 * c - k3 * b);
        *y = I * (k3 * a - k1 * c);
        *z = I * (k1 * b - k2 * a);
    });
    SpectralVectorField::from_parts(&grid, comps)
}

/// `i k · v`.
pub fn divergence(v: &SpectralVectorField) -> SpectralScalarField {
    let grid = v.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let [a, b, c] = v.components();
    let mut out = Array3::from_elem(grid.shape(), C64::default());
    Zip::indexed(&mut out)
        .and(a)
        .and(b)
        .and(c)
        .par_for_each(|(i, j, l), o, &a, &b, &c| {
            *o = I * (kd[i] * a + kd[j] * b + kd[l] * c);
        });
    SpectralScalarField::from_coeffs(&grid, out).expect("shape")
}

/// `v - k (k·v)/|k|²`; the mean mode is left alone.
pub fn leray_project(v: &SpectralVectorField) -> SpectralVectorField {
    let mut out = v.clone();
    leray_in_place(&mut out);
    out
}

pub fn leray_in_place(v: &mut SpectralVectorField) {
    let grid = v.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let [a, b, c] = v.components_mut();
    Zip::indexed(a).and(b).and(c).par_for_each(|(i, j, l), a, b, c| {
        let (k1, k2, k3) = (kd[i], kd[j], kd[l]);
        let q = k1 * k1 + k2 * k2 + k3 * k3;
        if q > 0.0 {
            let p = (k1 * *a + k2 * *b + k3 * *c) / q;
            *a -= k1 * p;
            *b -= k2 * p;
            *c -= k3 * p;
        }
    });
}

/// Largest `|k·v(k)| / |v(k)|` over modes where `v` is not negligible.
pub fn divergence_defect(v: &SpectralVectorField) -> f64 {
    let grid = v.grid().clone();
    let kd = grid.deriv_wavenumbers();
    let [a, b, c] = v.components();
    let scale = v.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for ((i, j, l), x) in a.indexed_iter() {
        let (y, z) = (b[[i, j, l]], c[[i, j, l]]);
        let mag = (x.norm_sqr() + y.norm_sqr() + z.norm_sqr()).sqrt();
        if mag <= 1e-14 * scale {
            continue;
        }
        let (k1, k2, k3) = (kd[i], kd[j], kd[l]);
        let kk = (k1 * k1 + k2 * k2 + k3 * k3).sqrt();
        if kk == 0.0 {
            continue;
        }
        let d = (k1 * x + k2 * y + k3 * z).norm() / kk;
        worst = worst.max(d / mag);
    }
    worst
}

/// Applies `m(i, j, l)` to every coefficient of every array.
pub fn apply_indexed<F: SpectralField>(field: &mut F, m: impl Fn(usize, usize, usize) -> C64 + Sync) {
    for arr in field.arrays_mut() {
        Zip::indexed(arr).par_for_each(|(i, j, l), c| *c *= m(i, j, l));
    }
}

/// Copy of `field` with every coefficient multiplied by `m(i, j, l)`.
pub fn apply_indexed_clone<F: SpectralField>(field: &F, m: impl Fn(usize, usize, usize) -> C64 + Sync) -> F {
    let mut out = field.clone();
    apply_indexed(&mut out, m);
    out
}

pub(crate) fn require_same(a: &Grid, b: &Grid) -> Result<()> {
    if crate::grid::same_grid(a, b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}
