use std::sync::Arc;

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::field::{SpectralVectorField, C64};
use crate::grid::{Grid, Mask};
use crate::norms::sobolev_norm;
use crate::ops::leray_in_place;

/// Random divergence-free field, white in the band `|m_i| < n/4`, mean-free,
/// rescaled to `‖·‖_{H³} = h3_budget`. Deterministic in `seed`.
pub fn make_small_part(grid: &Arc<Grid>, seed: u64, h3_budget: f64) -> Result<SpectralVectorField> {
    if !(h3_budget >= 0.0 && h3_budget.is_finite()) {
        return Err(invalid("small_budget", format!("{h3_budget} must be non-negative")));
    }
    if h3_budget == 0.0 {
        return Ok(SpectralVectorField::zeros(grid));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Array3::from_shape_simple_fn(grid.shape(), || rng.gen_range(-1.0..1.0));
    let phys = [draw(), draw(), draw()];
    let mut v = SpectralVectorField::forward(grid, &phys)?;
    v.apply_mask(Mask::Cubic);
    for c in v.components_mut() {
        c[[0, 0, 0]] = C64::new(0.0, 0.0);
    }
    leray_in_place(&mut v);
    let h3 = sobolev_norm(&v, 3.0);
    Ok(v.scaled(h3_budget / h3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::divergence_defect;

    #[test]
    fn budget_and_determinism() {
        let g = Grid::new(16, 5.0).unwrap();
        assert_eq!(make_small_part(&g, 3, 0.0).unwrap().max_abs(), 0.0);
        let a = make_small_part(&g, 3, 0.1).unwrap();
        assert!((sobolev_norm(&a, 3.0) - 0.1).abs() < 1e-12);
        let b = make_small_part(&g, 3, 0.1).unwrap();
        assert_eq!(a.components(), b.components());
        assert!(divergence_defect(&a) < 1e-12);
        assert_eq!(a.masked(Mask::Cubic).components(), a.components());
        let c = make_small_part(&g, 4, 0.1).unwrap();
        assert_ne!(a.components(), c.components());
    }
}
