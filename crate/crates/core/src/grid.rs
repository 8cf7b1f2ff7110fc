//! Periodic box geometry and the integer wavevector lattice.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::fft::Fft3;

/// Spectral truncation masks. Both are boxes in mode space: `Quadratic`
/// keeps `|m_i| < n/3`, `Cubic` keeps `|m_i| < n/4`, which makes products of
/// two (three) masked fields alias-free inside the mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mask {
    Quadratic,
    Cubic,
}

pub struct Grid {
    n: usize,
    length: f64,
    modes: Vec<i64>,
    wavenumbers: Vec<f64>,
    deriv_wavenumbers: Vec<f64>,
    keep_quadratic: Vec<bool>,
    keep_cubic: Vec<bool>,
    k_squared: Array3<f64>,
    fft: Fft3,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

pub fn make_grid(n: usize, box_length: f64) -> Result<Arc<Grid>> {
    Grid::new(n, box_length)
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Arc<Self>> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n = {n} is below the minimum of 8")));
        }
        if !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} is not a power of two")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {length} must be positive")));
        }
        let modes: Vec<i64> = (0..n)
            .map(|i| if i < n / 2 { i as i64 } else { i as i64 - n as i64 })
            .collect();
        let dk = 2.0 * PI / length;
        let wavenumbers: Vec<f64> = modes.iter().map(|&m| dk * m as f64).collect();
        // Odd derivatives of a Nyquist mode cannot stay Hermitian, so the
        // derivative wavenumber is zero there.
        let deriv_wavenumbers: Vec<f64> = (0..n)
            .map(|i| if i == n / 2 { 0.0 } else { wavenumbers[i] })
            .collect();
        let keep_quadratic = modes.iter().map(|&m| 3 * m.unsigned_abs() < n as u64).collect();
        let keep_cubic = modes.iter().map(|&m| 4 * m.unsigned_abs() < n as u64).collect();
        let k_squared = Array3::from_shape_fn((n, n, n), |(i, j, l)| {
            wavenumbers[i].powi(2) + wavenumbers[j].powi(2) + wavenumbers[l].powi(2)
        });
        Ok(Arc::new(Self {
            n,
            length,
            modes,
            wavenumbers,
            deriv_wavenumbers,
            keep_quadratic,
            keep_cubic,
            k_squared,
            fft: Fft3::new(n),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n, self.n, self.n)
    }

    pub fn points(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Grid spacing `L/n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    /// Lattice spacing `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Integer mode number stored at array index `idx`.
    pub fn mode(&self, idx: usize) -> i64 {
        self.modes[idx]
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.wavenumbers[idx]
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumbers used by first-derivative operators (zero on Nyquist).
    pub fn deriv_wavenumbers(&self) -> &[f64] {
        &self.deriv_wavenumbers
    }

    pub fn wavevector(&self, i: usize, j: usize, l: usize) -> [f64; 3] {
        [self.wavenumbers[i], self.wavenumbers[j], self.wavenumbers[l]]
    }

    /// Array index holding integer mode `m` (modular).
    pub fn index_of(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Index of `-k` for the index of `k` along one axis.
    pub fn negate(&self, idx: usize) -> usize {
        (self.n - idx) % self.n
    }

    pub fn is_nyquist(&self, i: usize, j: usize, l: usize) -> bool {
        let h = self.n / 2;
        i == h || j == h || l == h
    }

    pub fn k_squared(&self) -> &Array3<f64> {
        &self.k_squared
    }

    pub fn keeps(&self, mask: Mask, i: usize, j: usize, l: usize) -> bool {
        let keep = self.axis_mask(mask);
        keep[i] && keep[j] && keep[l]
    }

    pub fn axis_mask(&self, mask: Mask) -> &[bool] {
        match mask {
            Mask::Quadratic => &self.keep_quadratic,
            Mask::Cubic => &self.keep_cubic,
        }
    }

    pub fn mask_array(&self, mask: Mask) -> Array3<bool> {
        Array3::from_shape_fn(self.shape(), |(i, j, l)| self.keeps(mask, i, j, l))
    }

    /// Largest integer `|m_i|` kept by the mask.
    pub fn mask_limit(&self, mask: Mask) -> i64 {
        let keep = self.axis_mask(mask);
        self.modes
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(m, _)| m.abs())
            .max()
            .unwrap_or(0)
    }

    /// Largest `|k|` inside the mask (corner of the mode box).
    pub fn kmax(&self, mask: Mask) -> f64 {
        self.dk() * self.mask_limit(mask) as f64 * 3f64.sqrt()
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }
}

/// Two grids are interchangeable when they have the same size and box.
pub fn same_grid(a: &Grid, b: &Grid) -> bool {
    std::ptr::eq(a, b) || (a.n == b.n && a.length == b.length)
}
