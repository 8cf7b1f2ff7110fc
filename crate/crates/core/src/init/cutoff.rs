//! Radial cutoff `χ_{M0}(x) = χ(|x|/M0)` centred at the origin.
//!
//! The unit profile is 1 on `[0, 1]`, 0 on `[2, ∞)` and `1 - S(r - 1)` in
//! between, where `S` is the degree-11 smoothstep whose first five
//! derivatives vanish at both ends (so `χ` is C⁵).

use std::sync::Arc;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::field::{coordinates, SpectralScalarField, SpectralVectorField};
use crate::grid::Grid;
use crate::norms::{winf_norm, Sampling};
use crate::ops::{gradient, laplacian};
use crate::padding::{doubled, pad, pad_vector, truncate, truncate_vector};
use crate::product::{dot, scale};

const ORDERS: usize = 6;
const RADIAL_SAMPLES: usize = 200_000;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monomial coefficients of the smoothstep `S(x) = x⁶ Σ_j C(5+j,j) C(11,5-j) (-x)^j`.
pub fn smoothstep_coefficients() -> [f64; 12] {
    let mut c = [0.0; 12];
    for j in 0..=5u64 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        c[6 + j as usize] = sign * binomial(5 + j, j) * binomial(11, 5 - j);
    }
    c
}

/// `d^k S / dx^k` at `x` in `[0, 1]`.
pub fn smoothstep_derivative(x: f64, k: usize) -> f64 {
    let c = smoothstep_coefficients();
    let mut acc = 0.0;
    for p in (k..12).rev() {
        let falling: f64 = (0..k).map(|i| (p - i) as f64).product();
        acc = acc * x + c[p] * falling;
    }
    acc
}

/// `d^k χ / dr^k` of the unit profile.
pub fn profile_derivative(r: f64, k: usize) -> f64 {
    if r <= 1.0 {
        if k == 0 {
            1.0
        } else {
            0.0
        }
    } else if r >= 2.0 {
        0.0
    } else if k == 0 {
        1.0 - smoothstep_derivative(r - 1.0, 0)
    } else {
        -smoothstep_derivative(r - 1.0, k)
    }
}

/// `d^k/dr^k χ(r / M0)`.
pub fn scaled_profile_derivative(r: f64, k: usize, m0: f64) -> f64 {
    profile_derivative(r / m0, k) * m0.powi(-(k as i32))
}

#[derive(Clone, Debug)]
pub struct CutoffReport {
    pub m0: f64,
    pub plateau_radius: f64,
    pub support_radius: f64,
    /// `max_r |χ^{(k)}(r)|` of the unit profile, by dense radial sampling.
    pub profile_max: [f64; ORDERS],
    /// Same for `χ_{M0}`, i.e. `M0^{-k} profile_max[k]`.
    pub radial_max: [f64; ORDERS],
    /// `max_{|β|=k} |∂^β χ_{M0}|` from spectral derivatives of the grid samples.
    pub grid_max: [f64; ORDERS],
    /// Whether the unit-profile bound exceeds 2.
    pub exceeds_two: [bool; ORDERS],
    /// The box is small enough that `χ_{M0} ≡ 1` on the whole torus.
    pub identically_one: bool,
    pub sample_spacing: f64,
}

#[derive(Clone, Debug)]
pub struct Cutoff {
    pub m0: f64,
    /// Exact samples on the grid.
    pub samples: Array3<f64>,
    pub field: SpectralScalarField,
    pub padded: PaddedCutoff,
    pub report: CutoffReport,
}

/// Radial maxima of the unit profile derivatives.
pub fn profile_maxima() -> [f64; ORDERS] {
    let mut out = [0.0; ORDERS];
    out[0] = 1.0;
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        let mut best: f64 = 0.0;
        for s in 0..=RADIAL_SAMPLES {
            let x = s as f64 / RADIAL_SAMPLES as f64;
            best = best.max(smoothstep_derivative(x, k).abs());
        }
        *slot = best;
    }
    out
}

/// Minimum-image distance of grid point `(i, j, l)` from the origin.
pub(crate) fn torus_radius(grid: &Grid, x: &[f64], i: usize, j: usize, l: usize) -> f64 {
    let len = grid.length();
    let wrap = |v: f64| if v > 0.5 * len { v - len } else { v };
    let (a, b, c) = (wrap(x[i]), wrap(x[j]), wrap(x[l]));
    (a * a + b * b + c * c).sqrt()
}

impl Cutoff {
    pub fn new(grid: &Arc<Grid>, m0: f64) -> Result<Self> {
        let len = grid.length();
        let identically_one = m0 >= 0.5 * 3f64.sqrt() * len;
        if !(2.0 * m0 <= 0.5 * len || identically_one) {
            return Err(Error::CutoffDoesNotFit {
                support: 2.0 * m0,
                length: len,
            });
        }
        let x = coordinates(grid);
        let samples = Array3::from_shape_fn(grid.shape(), |(i, j, l)| {
            profile_derivative(torus_radius(grid, &x, i, j, l) / m0, 0)
        });
        let field = SpectralScalarField::forward(grid, &samples)?;
        let profile_max = profile_maxima();
        let mut radial_max = [0.0; ORDERS];
        let mut exceeds_two = [false; ORDERS];
        for k in 0..ORDERS {
            radial_max[k] = profile_max[k] * m0.powi(-(k as i32));
            exceeds_two[k] = profile_max[k] > 2.0;
        }
        let w = winf_norm(&field, ORDERS - 1, Sampling::Native)?;
        let mut grid_max = [0.0; ORDERS];
        grid_max.copy_from_slice(&w.per_order);
        let padded = PaddedCutoff::new(&field)?;
        Ok(Self {
            m0,
            samples,
            field,
            padded,
            report: CutoffReport {
                m0,
                plateau_radius: m0,
                support_radius: 2.0 * m0,
                profile_max,
                radial_max,
                grid_max,
                exceeds_two,
                identically_one,
                sample_spacing: grid.spacing(),
            },
        })
    }
}

/// The trigonometric interpolant of `χ` and its derivatives, sampled on the
/// doubled grid (Nyquist modes dropped).
#[derive(Clone, Debug)]
pub struct PaddedCutoff {
    pub grid: Arc<Grid>,
    pub chi: Array3<f64>,
    pub gradient: [Array3<f64>; 3],
    pub laplacian: Array3<f64>,
}

impl PaddedCutoff {
    fn new(field: &SpectralScalarField) -> Result<Self> {
        let big = doubled(field.grid())?;
        let chi = pad(field, &big)?;
        let gradient = pad_vector(&gradient(field), &big)?.to_physical();
        let laplacian = pad(&laplacian(field), &big)?.to_physical();
        Ok(Self { chi: chi.to_physical(), grid: big, gradient, laplacian })
    }
}

impl Cutoff {
    /// `w · v` with `w` sampled on the doubled grid, truncated back to the
    /// small grid. Exact in every mode that sees no Nyquist factor.
    pub fn weighted(&self, w: &Array3<f64>, v: &SpectralVectorField) -> Result<SpectralVectorField> {
        let small = v.grid();
        let p = pad_vector(v, &self.padded.grid)?.to_physical();
        let prod = SpectralVectorField::forward(&self.padded.grid, &scale(w, &p))?;
        truncate_vector(&prod, small)
    }

    /// `χ v` as a truncated convolution with the interpolant of `χ`.
    pub fn multiply(&self, v: &SpectralVectorField) -> Result<SpectralVectorField> {
        self.weighted(&self.padded.chi, v)
    }

    /// `∇χ · v` as a truncated convolution.
    pub fn gradient_dot(&self, v: &SpectralVectorField) -> Result<SpectralScalarField> {
        let small = v.grid();
        let p = pad_vector(v, &self.padded.grid)?.to_physical();
        let prod = SpectralScalarField::forward(&self.padded.grid, &dot(&self.padded.gradient, &p))?;
        truncate(&prod, small)
    }
}

pub fn make_cutoff(grid: &Arc<Grid>, m0: f64) -> Result<(SpectralScalarField, CutoffReport)> {
    let c = Cutoff::new(grid, m0)?;
    Ok((c.field, c.report))
}
