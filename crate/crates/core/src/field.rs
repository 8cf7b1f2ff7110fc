//! Spectral fields and the physical/spectral transform contract.
//!
//! Coefficients follow the physical-amplitude convention: `c(k)` multiplies
//! `e^{ik·x}`, so the forward transform is the DFT divided by `n³`.
//! Forward transforms symmetrise `c(k) = (Z(k) + conj Z(-k))/2`, which makes
//! the output exactly Hermitian.

use std::sync::Arc;

use ndarray::{Array3, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{same_grid, Grid, Mask};

pub type C64 = Complex64;
/// Physical samples of a vector field, one array per component.
pub type PhysVector = [Array3<f64>; 3];

const ZERO: C64 = C64::new(0.0, 0.0);

/// Shared view over scalar and vector spectral fields.
pub trait SpectralField: Clone + Send + Sync {
    fn grid(&self) -> &Arc<Grid>;
    fn arrays(&self) -> &[Array3<C64>];
    fn arrays_mut(&mut self) -> &mut [Array3<C64>];
}

impl SpectralField for SpectralScalarField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn arrays(&self) -> &[Array3<C64>] {
        std::slice::from_ref(&self.coeffs)
    }
    fn arrays_mut(&mut self) -> &mut [Array3<C64>] {
        std::slice::from_mut(&mut self.coeffs)
    }
}

impl SpectralField for SpectralVectorField {
    fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    fn arrays(&self) -> &[Array3<C64>] {
        &self.comps
    }
    fn arrays_mut(&mut self) -> &mut [Array3<C64>] {
        &mut self.comps
    }
}

#[derive(Clone, Debug)]
pub struct SpectralScalarField {
    grid: Arc<Grid>,
    coeffs: Array3<C64>,
}

#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: Arc<Grid>,
    comps: [Array3<C64>; 3],
}

fn check_shape(grid: &Grid, shape: &[usize]) -> Result<()> {
    let n = grid.n();
    if shape != [n, n, n] {
        return Err(Error::SizeMismatch {
            expected: grid.points(),
            got: shape.iter().product(),
        });
    }
    Ok(())
}

pub(crate) fn check_grids(a: &Grid, b: &Grid) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

impl SpectralScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: Array3::from_elem(grid.shape(), ZERO),
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Array3<C64>) -> Result<Self> {
        check_shape(grid, coeffs.shape())?;
        Ok(Self {
            grid: grid.clone(),
            coeffs: coeffs.as_standard_layout().into_owned(),
        })
    }

    /// Forward transform of real samples.
    pub fn forward(grid: &Arc<Grid>, samples: &Array3<f64>) -> Result<Self> {
        check_shape(grid, samples.shape())?;
        Ok(Self {
            grid: grid.clone(),
            coeffs: forward_real(grid, samples),
        })
    }

    /// Inverse transform to real samples (imaginary round-off is dropped).
    pub fn to_physical(&self) -> Array3<f64> {
        inverse_real(&self.grid, &self.coeffs)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array3<C64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array3<C64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array3<C64> {
        self.coeffs
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: &self.coeffs * C64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_grids(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_grids(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: &self.coeffs - &other.coeffs,
        })
    }

    pub fn masked(&self, mask: Mask) -> Self {
        let mut out = self.clone();
        apply_mask(&self.grid, &mut out.coeffs, mask);
        out
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.grid, &self.coeffs)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let z = Array3::from_elem(grid.shape(), ZERO);
        Self {
            grid: grid.clone(),
            comps: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: [Array3<C64>; 3]) -> Result<Self> {
        for c in &comps {
            check_shape(grid, c.shape())?;
        }
        let [a, b, c] = comps;
        Ok(Self {
            grid: grid.clone(),
            comps: [
                a.as_standard_layout().into_owned(),
                b.as_standard_layout().into_owned(),
                c.as_standard_layout().into_owned(),
            ],
        })
    }

    pub(crate) fn from_parts(grid: &Arc<Grid>, comps: [Array3<C64>; 3]) -> Self {
        Self {
            grid: grid.clone(),
            comps,
        }
    }

    pub fn from_scalars(x: SpectralScalarField, y: SpectralScalarField, z: SpectralScalarField) -> Result<Self> {
        check_grids(&x.grid, &y.grid)?;
        check_grids(&x.grid, &z.grid)?;
        let grid = x.grid.clone();
        Ok(Self {
            grid,
            comps: [x.coeffs, y.coeffs, z.coeffs],
        })
    }

    pub fn forward(grid: &Arc<Grid>, samples: &PhysVector) -> Result<Self> {
        for s in samples {
            check_shape(grid, s.shape())?;
        }
        let mut out = forward_many(grid, &[&samples[0], &samples[1], &samples[2]]).into_iter();
        Ok(Self {
            grid: grid.clone(),
            comps: [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()],
        })
    }

    pub fn to_physical(&self) -> PhysVector {
        let mut out = inverse_many(&self.grid, &[&self.comps[0], &self.comps[1], &self.comps[2]]).into_iter();
        [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()]
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &Array3<C64> {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut Array3<C64> {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[Array3<C64>; 3] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Array3<C64>; 3] {
        &mut self.comps
    }

    pub fn into_components(self) -> [Array3<C64>; 3] {
        self.comps
    }

    pub fn scalar(&self, i: usize) -> SpectralScalarField {
        SpectralScalarField {
            grid: self.grid.clone(),
            coeffs: self.comps[i].clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let f = C64::new(s, 0.0);
        Self {
            grid: self.grid.clone(),
            comps: [&self.comps[0] * f, &self.comps[1] * f, &self.comps[2] * f],
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_grids(&self.grid, &other.grid)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_grids(&self.grid, &other.grid)?;
        Ok(self.sub_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        Self {
            grid: self.grid.clone(),
            comps: [
                &self.comps[0] + &other.comps[0],
                &self.comps[1] + &other.comps[1],
                &self.comps[2] + &other.comps[2],
            ],
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &Self) -> Self {
        Self {
            grid: self.grid.clone(),
            comps: [
                &self.comps[0] - &other.comps[0],
                &self.comps[1] - &other.comps[1],
                &self.comps[2] - &other.comps[2],
            ],
        }
    }

    pub fn masked(&self, mask: Mask) -> Self {
        let mut out = self.clone();
        out.apply_mask(mask);
        out
    }

    pub fn apply_mask(&mut self, mask: Mask) {
        for c in &mut self.comps {
            apply_mask(&self.grid, c, mask);
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| hermitian_defect(&self.grid, c))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

pub fn apply_mask(grid: &Grid, coeffs: &mut Array3<C64>, mask: Mask) {
    let keep = grid.axis_mask(mask);
    Zip::indexed(coeffs).par_for_each(|(i, j, l), c| {
        if !(keep[i] && keep[j] && keep[l]) {
            *c = ZERO;
        }
    });
}

/// Zero every coefficient on a Nyquist plane.
pub fn zero_nyquist(grid: &Grid, coeffs: &mut Array3<C64>) {
    Zip::indexed(coeffs).par_for_each(|(i, j, l), c| {
        if grid.is_nyquist(i, j, l) {
            *c = ZERO;
        }
    });
}

/// Largest `|c(-k) - conj c(k)|` over the lattice.
pub fn hermitian_defect(grid: &Grid, coeffs: &Array3<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for ((i, j, l), c) in coeffs.indexed_iter() {
        let d = coeffs[[grid.negate(i), grid.negate(j), grid.negate(l)]] - c.conj();
        worst = worst.max(d.norm());
    }
    worst
}

/// `(Z(k) + conj Z(-k))/2 * scale` and `(Z(k) - conj Z(-k))/(2i) * scale`.
fn split_pair(grid: &Grid, z: &Array3<C64>, scale: f64, want_second: bool) -> (Array3<C64>, Option<Array3<C64>>) {
    let half = 0.5 * scale;
    let mut first = Array3::from_elem(grid.shape(), ZERO);
    Zip::indexed(&mut first).par_for_each(|(i, j, l), out| {
        let a = z[[i, j, l]];
        let b = z[[grid.negate(i), grid.negate(j), grid.negate(l)]].conj();
        *out = (a + b) * half;
    });
    let second = want_second.then(|| {
        let mut second = Array3::from_elem(grid.shape(), ZERO);
        Zip::indexed(&mut second).par_for_each(|(i, j, l), out| {
            let a = z[[i, j, l]];
            let b = z[[grid.negate(i), grid.negate(j), grid.negate(l)]].conj();
            let d = (a - b) * half;
            *out = C64::new(d.im, -d.re);
        });
        second
    });
    (first, second)
}

pub fn forward_real(grid: &Grid, samples: &Array3<f64>) -> Array3<C64> {
    let mut z: Array3<C64> = samples.mapv(|x| C64::new(x, 0.0));
    grid.fft().forward(z.as_slice_mut().expect("standard layout"));
    split_pair(grid, &z, 1.0 / grid.points() as f64, false).0
}

pub fn inverse_real(grid: &Grid, coeffs: &Array3<C64>) -> Array3<f64> {
    let mut z = coeffs.as_standard_layout().into_owned();
    grid.fft().inverse(z.as_slice_mut().expect("standard layout"));
    z.mapv(|c| c.re)
}

/// Two real fields through one complex transform.
pub fn forward_pair(grid: &Grid, x: &Array3<f64>, y: &Array3<f64>) -> (Array3<C64>, Array3<C64>) {
    let mut z = Array3::from_elem(grid.shape(), ZERO);
    Zip::from(&mut z).and(x).and(y).par_for_each(|z, &a, &b| *z = C64::new(a, b));
    grid.fft().forward(z.as_slice_mut().expect("standard layout"));
    let (a, b) = split_pair(grid, &z, 1.0 / grid.points() as f64, true);
    (a, b.unwrap())
}

pub fn inverse_pair(grid: &Grid, a: &Array3<C64>, b: &Array3<C64>) -> (Array3<f64>, Array3<f64>) {
    let mut z = Array3::from_elem(grid.shape(), ZERO);
    Zip::from(&mut z)
        .and(a)
        .and(b)
        .par_for_each(|z, &p, &q| *z = p + C64::new(-q.im, q.re));
    grid.fft().inverse(z.as_slice_mut().expect("standard layout"));
    let re = z.mapv(|c| c.re);
    let im = z.mapv(|c| c.im);
    (re, im)
}

/// Forward transforms of several real fields, paired two at a time.
pub fn forward_many(grid: &Grid, fields: &[&Array3<f64>]) -> Vec<Array3<C64>> {
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        if let [x, y] = chunk {
            let (a, b) = forward_pair(grid, x, y);
            out.push(a);
            out.push(b);
        } else {
            out.push(forward_real(grid, chunk[0]));
        }
    }
    out
}

/// Inverse transforms of several Hermitian spectra, paired two at a time.
pub fn inverse_many(grid: &Grid, fields: &[&Array3<C64>]) -> Vec<Array3<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        if let [a, b] = chunk {
            let (x, y) = inverse_pair(grid, a, b);
            out.push(x);
            out.push(y);
        } else {
            out.push(inverse_real(grid, chunk[0]));
        }
    }
    out
}

/// Physical coordinates `x_i = i L / n` along one axis.
pub fn coordinates(grid: &Grid) -> Vec<f64> {
    (0..grid.n()).map(|i| i as f64 * grid.spacing()).collect()
}

/// Samples `f(x, y, z)` on the grid.
pub fn sample<F: Fn([f64; 3]) -> f64 + Sync>(grid: &Grid, f: F) -> Array3<f64> {
    let x = coordinates(grid);
    let mut out = Array3::zeros(grid.shape());
    Zip::indexed(&mut out).par_for_each(|(i, j, l), v| *v = f([x[i], x[j], x[l]]));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_real(grid: &Grid, seed: u64) -> Array3<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array3::from_shape_simple_fn(grid.shape(), || rng.gen_range(-1.0..1.0))
    }

    fn rel(a: &Array3<f64>, b: &Array3<f64>) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
        num / den
    }

    #[test]
    fn constant_field_hits_zero_mode() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let c = forward_real(&g, &Array3::from_elem(g.shape(), 1.0));
        for ((i, j, l), v) in c.indexed_iter() {
            let want = if (i, j, l) == (0, 0, 0) { 1.0 } else { 0.0 };
            assert!((v - C64::new(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn cosine_has_half_amplitudes() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let c = forward_real(&g, &sample(&g, |x| x[0].cos()));
        assert!((c[[1, 0, 0]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((c[[7, 0, 0]] - C64::new(0.5, 0.0)).norm() < 1e-15);
        let total: f64 = c.iter().map(|v| v.norm()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_random() {
        for n in [8, 16, 32] {
            let g = Grid::new(n, 1.7).unwrap();
            let x = random_real(&g, n as u64);
            let back = inverse_real(&g, &forward_real(&g, &x));
            assert!(rel(&back, &x) < 1e-13, "n = {n}");
            let c = forward_real(&g, &x);
            assert_eq!(hermitian_defect(&g, &c), 0.0);
        }
    }

    #[test]
    fn paired_transforms_match_single() {
        let g = Grid::new(16, 2.0).unwrap();
        let x = random_real(&g, 1);
        let y = random_real(&g, 2);
        let (a, b) = forward_pair(&g, &x, &y);
        let a1 = forward_real(&g, &x);
        let b1 = forward_real(&g, &y);
        for (p, q) in a.iter().zip(&a1).chain(b.iter().zip(&b1)) {
            assert!((p - q).norm() < 1e-15);
        }
        let (xb, yb) = inverse_pair(&g, &a, &b);
        assert!(rel(&xb, &x) < 1e-13);
        assert!(rel(&yb, &y) < 1e-13);
    }
}
