//! Zero padding to a grid of twice the resolution and back.
//!
//! Products of a trigonometric polynomial on the `n` grid with a field in the
//! cubic band have modes below `3n/4`, so on the `2n` grid they are exact.
//! Truncating back keeps every mode the small grid can hold except Nyquist.

use std::sync::Arc;

use ndarray::Array3;

use crate::error::Result;
use crate::field::{SpectralScalarField, SpectralVectorField, C64};
use crate::grid::Grid;

/// The `2n` grid over the same box.
pub fn doubled(grid: &Grid) -> Result<Arc<Grid>> {
    Grid::new(2 * grid.n(), grid.length())
}

/// Small-grid array indices that survive padding (Nyquist excluded), with
/// their big-grid counterparts.
fn index_map(small: &Grid, big: &Grid) -> Vec<(usize, usize)> {
    (0..small.n())
        .filter(|&i| i != small.n() / 2)
        .map(|i| (i, big.index_of(small.mode(i))))
        .collect()
}

fn copy_modes(from: &Array3<C64>, to: &mut Array3<C64>, map: &[(usize, usize)], small_to_big: bool) {
    for &(i, bi) in map {
        for &(j, bj) in map {
            for &(l, bl) in map {
                if small_to_big {
                    to[[bi, bj, bl]] = from[[i, j, l]];
                } else {
                    to[[i, j, l]] = from[[bi, bj, bl]];
                }
            }
        }
    }
}

pub fn pad(f: &SpectralScalarField, big: &Arc<Grid>) -> Result<SpectralScalarField> {
    let map = index_map(f.grid(), big);
    let mut out = Array3::from_elem(big.shape(), C64::default());
    copy_modes(f.coeffs(), &mut out, &map, true);
    SpectralScalarField::from_coeffs(big, out)
}

pub fn truncate(f: &SpectralScalarField, small: &Arc<Grid>) -> Result<SpectralScalarField> {
    let map = index_map(small, f.grid());
    let mut out = Array3::from_elem(small.shape(), C64::default());
    copy_modes(f.coeffs(), &mut out, &map, false);
    SpectralScalarField::from_coeffs(small, out)
}

pub fn pad_vector(v: &SpectralVectorField, big: &Arc<Grid>) -> Result<SpectralVectorField> {
    SpectralVectorField::from_scalars(pad(&v.scalar(0), big)?, pad(&v.scalar(1), big)?, pad(&v.scalar(2), big)?)
}

pub fn truncate_vector(v: &SpectralVectorField, small: &Arc<Grid>) -> Result<SpectralVectorField> {
    SpectralVectorField::from_scalars(
        truncate(&v.scalar(0), small)?,
        truncate(&v.scalar(1), small)?,
        truncate(&v.scalar(2), small)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample;
    use std::f64::consts::PI;

    #[test]
    fn padding_preserves_values_and_round_trips() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let big = doubled(&g).unwrap();
        let f = |x: [f64; 3]| (x[0] + 2.0 * x[1]).sin() + (3.0 * x[2]).cos() * x[0].cos();
        let s = SpectralScalarField::forward(&g, &sample(&g, f)).unwrap();
        let p = pad(&s, &big).unwrap();
        let direct = sample(&big, f);
        let err = (&p.to_physical() - &direct).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-13, "{err}");
        let back = truncate(&p, &g).unwrap();
        assert!(back.sub(&s).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn nyquist_is_dropped() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let big = doubled(&g).unwrap();
        let s = SpectralScalarField::forward(&g, &sample(&g, |x| (4.0 * x[0]).cos())).unwrap();
        assert!(s.max_abs() > 0.5);
        assert_eq!(pad(&s, &big).unwrap().max_abs(), 0.0);
    }
}
