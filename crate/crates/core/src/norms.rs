//! Sobolev norms, L² inner products and sampled `W^{k,∞}` norms.
//!
//! Reductions sum each `i`-plane sequentially and fold the plane totals in
//! order, so the result does not depend on the thread count.

use std::sync::Arc;

use ndarray::{Array3, Axis, Zip};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::field::{inverse_many, SpectralField, C64};
use crate::grid::Grid;
use crate::ops::require_same;

/// Deterministic sum of `f(i, j, l, c)` over an `n³` array.
pub(crate) fn reduce<T: Sync>(arr: &Array3<T>, f: impl Fn(usize, usize, usize, &T) -> f64 + Sync) -> f64 {
    let parts: Vec<f64> = arr
        .axis_iter(Axis(0))
        .into_par_iter()
        .enumerate()
        .map(|(i, plane)| {
            let mut s = 0.0;
            for ((j, l), c) in plane.indexed_iter() {
                s += f(i, j, l, c);
            }
            s
        })
        .collect();
    parts.iter().sum()
}

pub(crate) fn reduce2(
    a: &Array3<C64>,
    b: &Array3<C64>,
    f: impl Fn(usize, usize, usize, C64, C64) -> f64 + Sync,
) -> f64 {
    let parts: Vec<f64> = a
        .axis_iter(Axis(0))
        .into_par_iter()
        .zip(b.axis_iter(Axis(0)).into_par_iter())
        .enumerate()
        .map(|(i, (pa, pb))| {
            let mut s = 0.0;
            for ((j, l), x) in pa.indexed_iter() {
                s += f(i, j, l, *x, pb[[j, l]]);
            }
            s
        })
        .collect();
    parts.iter().sum()
}

/// `(L³ Σ (1+|k|²)^s |c(k)|²)^{1/2}`, summed over components.
pub fn sobolev_norm<F: SpectralField>(field: &F, s: f64) -> f64 {
    sobolev_norm_sq(field, s).sqrt()
}

pub fn sobolev_norm_sq<F: SpectralField>(field: &F, s: f64) -> f64 {
    let grid = field.grid();
    let k2 = grid.k_squared();
    let weight = |q: f64| {
        if s == 0.0 {
            1.0
        } else if s == 3.0 {
            let w = 1.0 + q;
            w * w * w
        } else {
            (1.0 + q).powf(s)
        }
    };
    let total: f64 = field
        .arrays()
        .iter()
        .map(|arr| reduce(arr, |i, j, l, c| weight(k2[[i, j, l]]) * c.norm_sqr()))
        .sum();
    grid.volume() * total
}

/// `Σ_k m(|k|²) |c(k)|² · L³`.
pub fn weighted_norm_sq<F: SpectralField>(field: &F, m: impl Fn(f64) -> f64 + Sync) -> f64 {
    let grid = field.grid();
    let k2 = grid.k_squared();
    let total: f64 = field
        .arrays()
        .iter()
        .map(|arr| reduce(arr, |i, j, l, c| m(k2[[i, j, l]]) * c.norm_sqr()))
        .sum();
    grid.volume() * total
}

/// `∫ f·g dx = L³ Σ Re(conj f̂ ĝ)`.
pub fn inner<F: SpectralField>(f: &F, g: &F) -> Result<f64> {
    require_same(f.grid(), g.grid())?;
    Ok(inner_unchecked(f, g))
}

pub(crate) fn inner_unchecked<F: SpectralField>(f: &F, g: &F) -> f64 {
    let total: f64 = f
        .arrays()
        .iter()
        .zip(g.arrays())
        .map(|(a, b)| reduce2(a, b, |_, _, _, x, y| (x.conj() * y).re))
        .sum();
    f.grid().volume() * total
}

/// How `winf_norm` samples the derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Native,
    /// Zero-padded to twice the resolution before sampling.
    Padded,
}

#[derive(Clone, Debug)]
pub struct WinfReport {
    pub value: f64,
    /// Largest `|∂^β f|` for each order `|β| = 0..=kmax`.
    pub per_order: Vec<f64>,
    pub kmax: usize,
    /// Spacing of the sampling grid; the continuum supremum can exceed the
    /// sampled maximum.
    pub sample_spacing: f64,
    pub sampling: Sampling,
}

/// All multi-indices `β` with `|β| = order`.
pub fn multi_indices(order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in (0..=order).rev() {
        for b in (0..=order - a).rev() {
            out.push([a, b, order - a - b]);
        }
    }
    out
}

/// Spectrum on the `2n` grid with identical physical content.
pub fn zero_pad(grid: &Grid, big: &Grid, arr: &Array3<C64>) -> Array3<C64> {
    let n = grid.n();
    let nb = big.n();
    let targets: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            if i == n / 2 {
                vec![(n / 2, 0.5), (nb - n / 2, 0.5)]
            } else {
                vec![(big.index_of(grid.mode(i)), 1.0)]
            }
        })
        .collect();
    let mut out = Array3::from_elem(big.shape(), C64::default());
    for ((i, j, l), c) in arr.indexed_iter() {
        if *c == C64::default() {
            continue;
        }
        for &(ti, wi) in &targets[i] {
            for &(tj, wj) in &targets[j] {
                for &(tl, wl) in &targets[l] {
                    out[[ti, tj, tl]] += *c * (wi * wj * wl);
                }
            }
        }
    }
    out
}

fn derivative(grid: &Grid, arr: &Array3<C64>, beta: [usize; 3]) -> Array3<C64> {
    let kd = grid.deriv_wavenumbers();
    let ik = |k: f64, p: usize| -> C64 {
        let mut z = C64::new(1.0, 0.0);
        for _ in 0..p {
            z *= C64::new(0.0, k);
        }
        z
    };
    let mut out = arr.clone();
    Zip::indexed(&mut out).par_for_each(|(i, j, l), c| {
        *c *= ik(kd[i], beta[0]) * ik(kd[j], beta[1]) * ik(kd[l], beta[2]);
    });
    out
}

fn max_magnitude(parts: &[Array3<f64>]) -> f64 {
    let mut sq = parts[0].mapv(|x| x * x);
    for p in &parts[1..] {
        Zip::from(&mut sq).and(p).for_each(|s, &x| *s += x * x);
    }
    sq.iter().fold(0.0f64, |m, &v| m.max(v)).sqrt()
}

/// `max_{x, |β| ≤ kmax} |∂^β f(x)|` sampled on the grid (Euclidean norm over
/// vector components).
pub fn winf_norm<F: SpectralField>(field: &F, kmax: usize, sampling: Sampling) -> Result<WinfReport> {
    if kmax > 5 {
        return Err(invalid("kmax", format!("{kmax} exceeds 5")));
    }
    let grid = field.grid().clone();
    let (work_grid, arrays): (Arc<Grid>, Vec<Array3<C64>>) = match sampling {
        Sampling::Native => (grid.clone(), field.arrays().to_vec()),
        Sampling::Padded => {
            let big = Grid::new(2 * grid.n(), grid.length())?;
            let arrays = field.arrays().iter().map(|a| zero_pad(&grid, &big, a)).collect();
            (big, arrays)
        }
    };
    let mut per_order = Vec::with_capacity(kmax + 1);
    for order in 0..=kmax {
        let betas = multi_indices(order);
        let mut best: f64 = 0.0;
        if arrays.len() == 1 {
            let specs: Vec<Array3<C64>> = betas.iter().map(|&b| derivative(&work_grid, &arrays[0], b)).collect();
            let refs: Vec<&Array3<C64>> = specs.iter().collect();
            for phys in inverse_many(&work_grid, &refs) {
                best = best.max(max_magnitude(std::slice::from_ref(&phys)));
            }
        } else {
            for &b in &betas {
                let specs: Vec<Array3<C64>> = arrays.iter().map(|a| derivative(&work_grid, a, b)).collect();
                let refs: Vec<&Array3<C64>> = specs.iter().collect();
                best = best.max(max_magnitude(&inverse_many(&work_grid, &refs)));
            }
        }
        per_order.push(best);
    }
    Ok(WinfReport {
        value: per_order.iter().cloned().fold(0.0, f64::max),
        per_order,
        kmax,
        sample_spacing: work_grid.spacing(),
        sampling,
    })
}

/// Sampled sup-norm.
pub fn linf_norm<F: SpectralField>(field: &F, sampling: Sampling) -> f64 {
    winf_norm(field, 0, sampling).expect("kmax 0").value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample, SpectralScalarField};
    use std::f64::consts::PI;

    #[test]
    fn parseval_for_cosine() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let f = SpectralScalarField::forward(&g, &sample(&g, |x| x[0].cos())).unwrap();
        let want = (2.0 * PI).powf(1.5) / 2f64.sqrt();
        assert!((sobolev_norm(&f, 0.0) - want).abs() < 1e-12);
        assert!((want - 11.1366).abs() < 1e-4);
        assert!((sobolev_norm(&f, 3.0) - 2f64.powf(1.5) * want).abs() < 1e-11);
        assert_eq!(sobolev_norm(&SpectralScalarField::zeros(&g), 3.0), 0.0);
    }

    #[test]
    fn sup_norms_of_sine_and_constant() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let f = SpectralScalarField::forward(&g, &sample(&g, |x| x[0].sin())).unwrap();
        for s in [Sampling::Native, Sampling::Padded] {
            let r0 = winf_norm(&f, 0, s).unwrap();
            assert!((r0.value - 1.0).abs() < 1e-3);
            let r1 = winf_norm(&f, 1, s).unwrap();
            assert!((r1.value - 1.0).abs() < 1e-3);
        }
        let c = SpectralScalarField::forward(&g, &Array3::from_elem(g.shape(), 3.0)).unwrap();
        let r = winf_norm(&c, 5, Sampling::Native).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!(winf_norm(&c, 6, Sampling::Native).is_err());
    }

    #[test]
    fn multi_index_counts() {
        let total: usize = (0..=5).map(|k| multi_indices(k).len()).sum();
        assert_eq!(total, 56);
    }
}
