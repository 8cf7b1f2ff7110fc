//! Positive-helicity field supported on a thin lattice annulus around `|k| = 1`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::field::{SpectralVectorField, C64};
use crate::grid::{Grid, Mask};

/// Band every constructed field is confined to.
pub const BELTRAMI_BAND: Mask = Mask::Cubic;

#[derive(Clone, Debug)]
pub struct AnnulusRealization {
    /// Selected integer modes `m` (the wavevector is `2π m / L`).
    pub modes: Vec<[i64; 3]>,
    pub delta_target: f64,
    /// `max ||k| - 1|` over the selected modes.
    pub delta_eff: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl AnnulusRealization {
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `m` lies in the half-space on which the frame rule is applied directly.
pub fn is_canonical(m: [i64; 3]) -> bool {
    m[2] > 0 || (m[2] == 0 && (m[1] > 0 || (m[1] == 0 && m[0] > 0)))
}

/// `h₊(k) = (e₁ + i e₂)/√2` with `e₁ = normalize(k × a)`, `a = ẑ` unless
/// `k ∥ ẑ` (then `x̂`), `e₂ = k̂ × e₁`. The rule is applied on the canonical
/// half-space; the opposite half takes `h₊(-k) = conj h₊(k)`.
pub fn helical_basis(k: [f64; 3]) -> [C64; 3] {
    let canonical = k[2] > 0.0 || (k[2] == 0.0 && (k[1] > 0.0 || (k[1] == 0.0 && k[0] > 0.0)));
    let kc = if canonical { k } else { [-k[0], -k[1], -k[2]] };
    let a = if kc[0] == 0.0 && kc[1] == 0.0 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = cross(kc, a);
    let n1 = norm(e1);
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let nk = norm(kc);
    let khat = [kc[0] / nk, kc[1] / nk, kc[2] / nk];
    let e2 = cross(khat, e1);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [
        C64::new(e1[0] * s, e2[0] * s),
        C64::new(e1[1] * s, e2[1] * s),
        C64::new(e1[2] * s, e2[2] * s),
    ];
    if canonical {
        h
    } else {
        [h[0].conj(), h[1].conj(), h[2].conj()]
    }
}

/// Band-limited lattice modes with `||k| - 1| <= delta`.
pub fn annulus_modes(grid: &Grid, delta: f64) -> Vec<[i64; 3]> {
    let lim = grid.mask_limit(BELTRAMI_BAND);
    let dk = grid.dk();
    let mut out = Vec::new();
    for a in -lim..=lim {
        for b in -lim..=lim {
            for c in -lim..=lim {
                let k = dk * ((a * a + b * b + c * c) as f64).sqrt();
                if (k - 1.0).abs() <= delta && !(a == 0 && b == 0 && c == 0) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Number of integer triples with `|m_i| <= lim` and `|m|² = q`.
fn shell_count(q: i64, lim: i64) -> usize {
    let mut count = 0;
    for a in -lim..=lim {
        for b in -lim..=lim {
            let r = q - a * a - b * b;
            if r < 0 {
                continue;
            }
            let c = (r as f64).sqrt().round() as i64;
            if c * c == r && c <= lim {
                count += if c == 0 { 1 } else { 2 };
            }
        }
    }
    count
}

/// Smallest box length `>= from` whose annulus holds at least six band modes.
pub fn minimal_length(n: usize, from: f64, delta: f64) -> f64 {
    let lim = (n as i64 - 1) / 4;
    let mut best = f64::INFINITY;
    for q in 1..=3 * lim * lim {
        if shell_count(q, lim) < 6 {
            continue;
        }
        let lo = 2.0 * PI * (q as f64).sqrt() / (1.0 + delta);
        let hi = 2.0 * PI * (q as f64).sqrt() / (1.0 - delta);
        if hi >= from {
            best = best.min(if lo > from { lo * (1.0 + 1e-12) } else { from });
        }
    }
    best
}

/// `v̂₀(k) = c h₊(k)` on every annulus mode with equal weights scaled so that
/// `Σ_k |v̂₀(k)| = m1_budget`.
pub fn make_beltrami(
    grid: &Arc<Grid>,
    delta_target: f64,
    m1_budget: f64,
) -> Result<(SpectralVectorField, AnnulusRealization)> {
    if !(delta_target > 0.0 && delta_target <= 0.5) {
        return Err(invalid("delta", format!("{delta_target} is outside (0, 1/2]")));
    }
    if !(m1_budget >= 0.0 && m1_budget.is_finite()) {
        return Err(invalid("m1", format!("{m1_budget} must be non-negative")));
    }
    let modes = annulus_modes(grid, delta_target);
    if modes.len() < 6 {
        return Err(Error::EmptyAnnulus {
            lo: 1.0 - delta_target,
            hi: 1.0 + delta_target,
            found: modes.len(),
            minimal_length: minimal_length(grid.n(), grid.length(), delta_target),
        });
    }
    let mut v = SpectralVectorField::zeros(grid);
    let weight = m1_budget / modes.len() as f64;
    let dk = grid.dk();
    let mut delta_eff: f64 = 0.0;
    let (mut k_min, mut k_max) = (f64::INFINITY, 0.0f64);
    let mut l1 = 0.0;
    for m in &modes {
        let k = [dk * m[0] as f64, dk * m[1] as f64, dk * m[2] as f64];
        let kk = norm(k);
        delta_eff = delta_eff.max((kk - 1.0).abs());
        k_min = k_min.min(kk);
        k_max = k_max.max(kk);
        let h = helical_basis(k);
        let idx = [grid.index_of(m[0]), grid.index_of(m[1]), grid.index_of(m[2])];
        let comps = v.components_mut();
        for d in 0..3 {
            comps[d][idx] = h[d] * weight;
        }
        l1 += (h[0].norm_sqr() + h[1].norm_sqr() + h[2].norm_sqr()).sqrt() * weight;
    }
    if l1 > 0.0 {
        v = v.scaled(m1_budget / l1);
    }
    Ok((
        v,
        AnnulusRealization {
            modes,
            delta_target,
            delta_eff,
            k_min,
            k_max,
        },
    ))
}

/// `Σ_k |v̂(k)|` with the Euclidean norm of each complex 3-vector.
pub fn fourier_l1(v: &SpectralVectorField) -> f64 {
    let [a, b, c] = v.components();
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (x.norm_sqr() + y.norm_sqr() + z.norm_sqr()).sqrt())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sobolev_norm;
    use crate::ops::{curl, divergence, frac_laplacian};

    #[test]
    fn unit_x_mode_matches_reference_vector() {
        let h = helical_basis([1.0, 0.0, 0.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let reference = [C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, s)];
        // Unit eigenvectors agree up to a phase; here the phase is -1.
        let overlap: C64 = (0..3).map(|d| reference[d].conj() * h[d]).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-15);
        assert!((overlap + C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigen_relation_and_conjugation() {
        for k in [[1.0, 2.0, -0.5], [0.0, 0.0, 3.0], [0.0, 0.0, -1.0], [-2.0, 0.0, 0.0], [0.3, -1.0, 0.0]] {
            let h = helical_basis(k);
            let kk = norm(k);
            let ik = [C64::new(0.0, k[0]), C64::new(0.0, k[1]), C64::new(0.0, k[2])];
            let ikxh = [
                ik[1] * h[2] - ik[2] * h[1],
                ik[2] * h[0] - ik[0] * h[2],
                ik[0] * h[1] - ik[1] * h[0],
            ];
            for d in 0..3 {
                assert!((ikxh[d] - h[d] * kk).norm() < 1e-14);
            }
            let hn = helical_basis([-k[0], -k[1], -k[2]]);
            for d in 0..3 {
                assert_eq!(hn[d], h[d].conj());
            }
        }
    }

    #[test]
    fn two_pi_box_selects_unit_vectors() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let (v, ann) = make_beltrami(&g, 0.25, 2.0).unwrap();
        let mut modes = ann.modes.clone();
        modes.sort();
        let mut want = vec![[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0], [0, 0, -1], [0, 0, 1]];
        want.sort();
        assert_eq!(modes, want);
        assert!(ann.delta_eff < 1e-15);
        assert!((fourier_l1(&v) - 2.0).abs() < 1e-12);
        assert_eq!(v.hermitian_defect(), 0.0);
    }

    #[test]
    fn curl_equals_lambda_on_all_resolutions() {
        for (n, len, delta) in [(16, 2.0 * PI, 0.25), (32, 8.0 * PI, 0.05), (64, 32.0, 0.01)] {
            let g = Grid::new(n, len).unwrap();
            let (v, ann) = make_beltrami(&g, delta, 1.0).unwrap();
            assert!(ann.mode_count() >= 6);
            let h3 = sobolev_norm(&v, 3.0);
            let defect = sobolev_norm(&curl(&v).sub(&frac_laplacian(&v, 1.0).unwrap()).unwrap(), 3.0);
            assert!(defect / h3 <= 1e-12, "n = {n}: {}", defect / h3);
            assert!(sobolev_norm(&divergence(&v), 3.0) / h3 <= 1e-12);
        }
    }

    #[test]
    fn empty_annulus_reports_length() {
        let g = Grid::new(16, 9.0).unwrap();
        match make_beltrami(&g, 0.01, 1.0) {
            Err(Error::EmptyAnnulus { minimal_length, .. }) => {
                assert!(minimal_length >= 9.0 && minimal_length.is_finite());
                let g2 = Grid::new(16, minimal_length).unwrap();
                assert!(make_beltrami(&g2, 0.01, 1.0).is_ok());
            }
            other => panic!("expected empty annulus, got {other:?}"),
        }
    }
}
