//! Dealiased pointwise products and physical-space vector algebra.

use ndarray::{Array3, Zip};

use crate::error::{invalid, Result};
use crate::field::{forward_real, PhysVector, SpectralScalarField};
use crate::grid::Mask;
use crate::ops::require_same;

/// Mask that makes a product of `count` band-limited factors alias-free.
pub fn mask_for(count: usize) -> Result<Mask> {
    match count {
        2 => Ok(Mask::Quadratic),
        3 => Ok(Mask::Cubic),
        _ => Err(invalid("factors", format!("{count} factors; expected 2 or 3"))),
    }
}

/// Product of 2 or 3 scalar fields. Inputs and output are truncated with the
/// matching mask, so the result equals the exact convolution of the masked
/// coefficients.
pub fn dealiased_product(factors: &[&SpectralScalarField]) -> Result<SpectralScalarField> {
    let mask = mask_for(factors.len())?;
    let grid = factors[0].grid().clone();
    for f in &factors[1..] {
        require_same(&grid, f.grid())?;
    }
    // One transform per factor: pairing would leak round-off between factors.
    let phys: Vec<Array3<f64>> = factors.iter().map(|f| f.masked(mask).to_physical()).collect();
    let mut prod = phys[0].clone();
    for p in &phys[1..] {
        Zip::from(&mut prod).and(p).par_for_each(|a, &b| *a *= b);
    }
    let out = SpectralScalarField::from_coeffs(&grid, forward_real(&grid, &prod))?;
    Ok(out.masked(mask))
}

/// Same as [`dealiased_product`] for factors given as physical samples.
pub fn dealiased_product_physical(
    grid: &std::sync::Arc<crate::grid::Grid>,
    factors: &[&Array3<f64>],
) -> Result<SpectralScalarField> {
    let spectral: Vec<SpectralScalarField> = factors
        .iter()
        .map(|f| SpectralScalarField::forward(grid, f))
        .collect::<Result<_>>()?;
    let refs: Vec<&SpectralScalarField> = spectral.iter().collect();
    dealiased_product(&refs)
}

pub fn cross(a: &PhysVector, b: &PhysVector) -> PhysVector {
    let dim = a[0].raw_dim();
    let mut out = [Array3::zeros(dim), Array3::zeros(dim), Array3::zeros(dim)];
    let [x, y, z] = &mut out;
    Zip::indexed(x).and(y).and(z).par_for_each(|ix, x, y, z| {
        let (a0, a1, a2) = (a[0][ix], a[1][ix], a[2][ix]);
        let (b0, b1, b2) = (b[0][ix], b[1][ix], b[2][ix]);
        *x = a1 * b2 - a2 * b1;
        *y = a2 * b0 - a0 * b2;
        *z = a0 * b1 - a1 * b0;
    });
    out
}

pub fn dot(a: &PhysVector, b: &PhysVector) -> Array3<f64> {
    let mut out = &a[0] * &b[0];
    Zip::from(&mut out)
        .and(&a[1])
        .and(&b[1])
        .and(&a[2])
        .and(&b[2])
        .par_for_each(|o, &a1, &b1, &a2, &b2| *o += a1 * b1 + a2 * b2);
    out
}

/// Fills three arrays with `f(q)` at every flat index `q`.
pub(crate) fn fill3(out: &mut PhysVector, f: impl Fn(usize) -> [f64; 3] + Sync) {
    const CHUNK: usize = 1024;
    let [a, b, c] = out;
    let a = a.as_slice_mut().expect("standard layout");
    let b = b.as_slice_mut().expect("standard layout");
    let c = c.as_slice_mut().expect("standard layout");
    use rayon::prelude::*;
    a.par_chunks_mut(CHUNK)
        .zip(b.par_chunks_mut(CHUNK))
        .zip(c.par_chunks_mut(CHUNK))
        .enumerate()
        .for_each(|(k, ((a, b), c))| {
            for r in 0..a.len() {
                let v = f(k * CHUNK + r);
                a[r] = v[0];
                b[r] = v[1];
                c[r] = v[2];
            }
        });
}

pub(crate) fn zeros3(like: &Array3<f64>) -> PhysVector {
    let dim = like.raw_dim();
    [Array3::zeros(dim.clone()), Array3::zeros(dim.clone()), Array3::zeros(dim)]
}

/// Flat slices of the three components.
pub(crate) fn slices(v: &PhysVector) -> [&[f64]; 3] {
    [
        v[0].as_slice().expect("standard layout"),
        v[1].as_slice().expect("standard layout"),
        v[2].as_slice().expect("standard layout"),
    ]
}

/// `s * v` componentwise.
pub fn scale(s: &Array3<f64>, v: &PhysVector) -> PhysVector {
    [s * &v[0], s * &v[1], s * &v[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample, C64};
    use crate::grid::Grid;
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn random_masked(grid: &Arc<Grid>, mask: Mask, vals: &[f64]) -> SpectralScalarField {
        let mut it = vals.iter().cycle();
        let phys = Array3::from_shape_simple_fn(grid.shape(), || *it.next().unwrap());
        SpectralScalarField::forward(grid, &phys).unwrap().masked(mask)
    }

    /// Direct convolution over the nonzero modes of each factor.
    fn convolve(grid: &Grid, factors: &[&SpectralScalarField], mask: Mask) -> Array3<C64> {
        let support = |f: &SpectralScalarField| -> Vec<([i64; 3], C64)> {
            f.coeffs()
                .indexed_iter()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|((i, j, l), c)| ([grid.mode(i), grid.mode(j), grid.mode(l)], *c))
                .collect()
        };
        let mut acc: Vec<([i64; 3], C64)> = vec![([0, 0, 0], C64::new(1.0, 0.0))];
        for f in factors {
            let s = support(&f.masked(mask));
            let mut next = Vec::new();
            for (m, c) in &acc {
                for (q, d) in &s {
                    next.push(([m[0] + q[0], m[1] + q[1], m[2] + q[2]], c * d));
                }
            }
            acc = next;
        }
        let mut out = Array3::from_elem(grid.shape(), C64::default());
        let lim = grid.mask_limit(mask);
        for (m, c) in acc {
            if m.iter().all(|v| v.abs() <= lim) {
                out[[grid.index_of(m[0]), grid.index_of(m[1]), grid.index_of(m[2])]] += c;
            }
        }
        out
    }

    #[test]
    fn cosine_squared() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let c = SpectralScalarField::forward(&g, &sample(&g, |x| x[0].cos())).unwrap();
        let p = dealiased_product(&[&c, &c]).unwrap();
        let want = SpectralScalarField::forward(&g, &sample(&g, |x| 0.5 + 0.5 * (2.0 * x[0]).cos())).unwrap();
        for (a, b) in p.coeffs().iter().zip(want.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
        let z = SpectralScalarField::zeros(&g);
        assert_eq!(dealiased_product(&[&c, &z]).unwrap().max_abs(), 0.0);
        assert!(dealiased_product(&[&c]).is_err());
    }

    #[test]
    fn triple_single_modes_match_convolution() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let a = SpectralScalarField::forward(&g, &sample(&g, |x| x[0].cos())).unwrap();
        let b = SpectralScalarField::forward(&g, &sample(&g, |x| x[1].sin())).unwrap();
        let c = SpectralScalarField::forward(&g, &sample(&g, |x| (x[0] - x[2]).cos())).unwrap();
        let p = dealiased_product(&[&a, &b, &c]).unwrap();
        let want = convolve(&g, &[&a, &b, &c], Mask::Cubic);
        for (x, y) in p.coeffs().iter().zip(&want) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn random_products_match_convolution(
            vals in proptest::collection::vec(-1.0f64..1.0, 37..64),
            shift in 0usize..30,
        ) {
            let g = Grid::new(8, 2.0 * PI).unwrap();
            let mut rot = vals.clone();
            rot.rotate_left(shift % vals.len());
            for count in [2usize, 3] {
                let mask = mask_for(count).unwrap();
                let a = random_masked(&g, mask, &vals);
                let b = random_masked(&g, mask, &rot);
                let c = random_masked(&g, mask, &vals[1..]);
                let fs: Vec<&SpectralScalarField> = [&a, &b, &c][..count].to_vec();
                let p = dealiased_product(&fs).unwrap();
                let want = convolve(&g, &fs, mask);
                for (x, y) in p.coeffs().iter().zip(&want) {
                    prop_assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }
}
