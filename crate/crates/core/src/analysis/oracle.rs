//! Continuous-Fourier oracle for the `f × g` interaction and the radial
//! multiplier suprema, independent of any lattice.
//!
//! With `v̂0` replaced by the radial bump `ρ(|ξ|)` on `[1-δ, 1+δ]`, the
//! Fourier-`L¹` norm of the symmetrised interaction
//!
//! ```text
//! ½|α1 α2| ∫∫ |e^{-(ν|ζ|^α + μ|η|²)t} - e^{-(μ|ζ|² + ν|η|^α)t}| ρ(|ζ|) ρ(|η|) dζ dη
//! ```
//!
//! depends only on the radii `a = |ζ|`, `b = |η|`, so the angular integrals
//! give `(4π)²` and a double radial integral remains.

use crate::analysis::fit::{fit_power, PowerFit};
use crate::analysis::quadrature::{integrate, integrate_fn, Quadrature, QuadratureOptions};
use crate::error::{invalid, Result};

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(invalid("delta", format!("{delta} is outside (0, 1/2]")));
    }
    Ok(())
}

/// Radial profile `ρ(r) = A (1 - ((r-1)/δ)²)³` normalised so that
/// `4π ∫ ρ(r) r² dr = M1`.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureOracle {
    pub delta: f64,
    pub m1: f64,
    pub amplitude: f64,
}

impl QuadratureOracle {
    pub fn new(delta: f64, m1: f64) -> Result<Self> {
        check_delta(delta)?;
        // ∫_{-1}^{1} (1-x²)³ (1+δx)² dx = 32/35 + 32δ²/315.
        let mass = 4.0 * std::f64::consts::PI * delta * (32.0 / 35.0 + 32.0 * delta * delta / 315.0);
        Ok(Self {
            delta,
            m1,
            amplitude: m1 / mass,
        })
    }

    pub fn profile(&self, r: f64) -> f64 {
        let x = (r - 1.0) / self.delta;
        if x.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - x * x).powi(3)
        }
    }

    /// `4π r² ρ(r)`, the shell density.
    pub fn shell(&self, r: f64) -> f64 {
        4.0 * std::f64::consts::PI * r * r * self.profile(r)
    }

    pub fn lo(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn hi(&self) -> f64 {
        1.0 + self.delta
    }

    /// `∫∫ w(a, b) shell(a) shell(b) da db`, split along `a = b`. `w_scale`
    /// bounds `|w|`; errors below `1e-14 w_scale M1²` count as converged.
    pub fn pair_integral(&self, w: impl Fn(f64, f64) -> f64, w_scale: f64, rel_tol: f64) -> Result<Quadrature> {
        let floor = 1e-14 * w_scale * self.m1;
        let inner_opts = QuadratureOptions { rel_tol: 0.1 * rel_tol, abs_tol: 0.1 * floor, max_intervals: 4000 };
        let outer_opts = QuadratureOptions { rel_tol, abs_tol: floor * self.m1, max_intervals: 4000 };
        let (lo, hi) = (self.lo(), self.hi());
        let mut evaluations = 0usize;
        let mut inner_error = 0.0f64;
        let q = integrate(
            |a| {
                let inner = integrate_fn(|b| w(a, b) * self.shell(b), lo, hi, &[a], inner_opts)?;
                evaluations += inner.evaluations;
                inner_error = inner_error.max(inner.error / inner.value.abs().max(1e-300));
                Ok(inner.value * self.shell(a))
            },
            lo,
            hi,
            &[1.0],
            outer_opts,
        )?;
        Ok(Quadrature {
            value: q.value,
            error: q.error + inner_error * q.value.abs(),
            intervals: q.intervals,
            evaluations: evaluations + q.evaluations,
        })
    }
}

/// Exponents `P = ν a^α + μ b²`, `Q = μ a² + ν b^α` of the two kernel terms.
fn exponents(a: f64, b: f64, nu: f64, mu: f64, alpha: f64) -> (f64, f64) {
    (nu * a.powf(alpha) + mu * b * b, mu * a * a + nu * b.powf(alpha))
}

#[derive(Clone, Copy, Debug)]
pub struct CrossParams {
    pub nu: f64,
    pub mu: f64,
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub m1: f64,
}

#[derive(Clone, Debug)]
pub struct CrossIntegral {
    pub delta: f64,
    /// `∫_0^{t_max} ‖f×g‖^_{L¹} dt` by quadrature in time.
    pub time_route: f64,
    pub time_route_error: f64,
    /// Bound on the neglected `∫_{t_max}^∞`.
    pub tail_bound: f64,
    pub t_max: f64,
    /// Same integral with the time integral done in closed form,
    /// `∫_0^∞ |e^{-Pt} - e^{-Qt}| dt = |1/P - 1/Q|`.
    pub closed_route: f64,
    pub closed_route_error: f64,
}

impl CrossIntegral {
    /// Relative gap between the two routes.
    pub fn route_gap(&self) -> f64 {
        let scale = self.closed_route.abs().max(1e-300);
        (self.time_route - self.closed_route).abs() / scale
    }
}

/// Smallest kernel exponent over the annulus pair.
fn min_exponent(o: &QuadratureOracle, p: &CrossParams) -> f64 {
    let n = 64;
    let mut m = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n {
            let a = o.lo() + (o.hi() - o.lo()) * i as f64 / n as f64;
            let b = o.lo() + (o.hi() - o.lo()) * j as f64 / n as f64;
            let (pp, qq) = exponents(a, b, p.nu, p.mu, p.alpha);
            m = m.min(pp.min(qq));
        }
    }
    m
}

/// `‖(f×g)^(·, t)‖_{L¹}` majorant at one time.
pub fn cross_l1_at(o: &QuadratureOracle, p: &CrossParams, t: f64, rel_tol: f64) -> Result<Quadrature> {
    let c = 0.5 * (p.alpha1 * p.alpha2).abs();
    let q = o.pair_integral(
        |a, b| {
            let (pp, qq) = exponents(a, b, p.nu, p.mu, p.alpha);
            ((-pp * t).exp() - (-qq * t).exp()).abs()
        },
        1.0,
        rel_tol,
    )?;
    Ok(Quadrature { value: c * q.value, error: c * q.error, ..q })
}

/// Both routes of `∫_0^∞ ‖(f×g)^‖_{L¹} dt`. `t_max` defaults to `40 / m`
/// with `m` the smallest kernel exponent.
pub fn fg_cross_value(delta: f64, p: &CrossParams, t_max: Option<f64>, rel_tol: f64) -> Result<CrossIntegral> {
    let o = QuadratureOracle::new(delta, p.m1)?;
    let c = 0.5 * (p.alpha1 * p.alpha2).abs();
    let m = min_exponent(&o, p);
    let closed = o.pair_integral(
        |a, b| {
            let (pp, qq) = exponents(a, b, p.nu, p.mu, p.alpha);
            (1.0 / pp - 1.0 / qq).abs()
        },
        1.0 / m,
        rel_tol,
    )?;
    let t_max = t_max.unwrap_or(40.0 / m);
    // |e^{-Pt} - e^{-Qt}| ≤ e^{-mt}; the shells integrate to M1 each.
    let tail_bound = c * p.m1 * p.m1 * (-m * t_max).exp() / m;
    let time_opts = QuadratureOptions { rel_tol, abs_tol: 1e-14 * c * p.m1 * p.m1 * t_max, max_intervals: 400 };
    // The integrand rises from 0 at t = 0 and peaks near t ~ 1/m.
    let breaks = [0.25 / m, 1.0 / m, 4.0 / m, 16.0 / m];
    let time = integrate(|t| Ok(cross_l1_at(&o, p, t, 0.1 * rel_tol)?.value), 0.0, t_max, &breaks, time_opts)?;
    Ok(CrossIntegral {
        delta,
        time_route: time.value,
        time_route_error: time.error,
        tail_bound,
        t_max,
        closed_route: c * closed.value,
        closed_route_error: c * closed.error,
    })
}

#[derive(Clone, Debug)]
pub struct CrossScaling {
    pub values: Vec<CrossIntegral>,
    /// Power fit of the closed-route values against `δ`; `None` when all
    /// values vanish.
    pub fit: Option<PowerFit>,
}

/// [`fg_cross_value`] at each `δ` and the fitted exponent `p` of `∝ δ^p`.
pub fn fg_cross_scaling(deltas: &[f64], p: &CrossParams, rel_tol: f64) -> Result<CrossScaling> {
    let values: Vec<CrossIntegral> = deltas
        .iter()
        .map(|&d| fg_cross_value(d, p, None, rel_tol))
        .collect::<Result<_>>()?;
    let ys: Vec<f64> = values.iter().map(|v| v.closed_route).collect();
    let fit = if ys.iter().all(|v| *v > 0.0) {
        Some(fit_power(deltas, &ys)?)
    } else {
        None
    };
    Ok(CrossScaling { values, fit })
}

/// Value at `δ` and `δ/2` with the two-point scaling exponent.
pub fn fg_cross_integral(delta: f64, p: &CrossParams, rel_tol: f64) -> Result<CrossScaling> {
    fg_cross_scaling(&[delta, 0.5 * delta], p, rel_tol)
}

/// Realised suprema of the radial multipliers
/// `E1 = |a² - b²| / a^α` and `E2 = |a^α - b^α| / a²` over `a, b ∈ [1-δ, 1+δ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierReport {
    pub delta: f64,
    pub alpha: f64,
    pub resolution: usize,
    pub sup_first: f64,
    pub sup_second: f64,
    /// `3^{1-α} δ`.
    pub stated_first: f64,
    /// `8 α δ`.
    pub stated_second: f64,
    pub violates_first: bool,
    pub violates_second: bool,
}

impl MultiplierReport {
    pub fn first_over_delta(&self) -> f64 {
        self.sup_first / self.delta
    }
    pub fn second_over_delta(&self) -> f64 {
        self.sup_second / self.delta
    }
    pub fn any_violation(&self) -> bool {
        self.violates_first || self.violates_second
    }
}

/// Brute-force maximisation on a `resolution × resolution` grid of radii
/// (endpoints included).
pub fn multiplier_bounds_check(delta: f64, alpha: f64, resolution: usize) -> Result<MultiplierReport> {
    if !(0.0..=0.5).contains(&delta) {
        return Err(invalid("delta", format!("{delta} is outside [0, 1/2]")));
    }
    if !(0.0..=2.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} is outside [0, 2]")));
    }
    if resolution < 2 {
        return Err(invalid("resolution", "needs at least 2 points"));
    }
    let r = |i: usize| 1.0 - delta + 2.0 * delta * i as f64 / (resolution - 1) as f64;
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for i in 0..resolution {
        let a = r(i);
        let aa = a.powf(alpha);
        for j in 0..resolution {
            let b = r(j);
            s1 = s1.max((a * a - b * b).abs() / aa);
            s2 = s2.max((aa - b.powf(alpha)).abs() / (a * a));
        }
    }
    let stated_first = 3f64.powf(1.0 - alpha) * delta;
    let stated_second = 8.0 * alpha * delta;
    Ok(MultiplierReport {
        delta,
        alpha,
        resolution,
        sup_first: s1,
        sup_second: s2,
        stated_first,
        stated_second,
        violates_first: s1 > stated_first * (1.0 + 1e-12),
        violates_second: s2 > stated_second * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_carries_the_budget() {
        // Oracle: plain quadrature of the shell density.
        for delta in [0.5, 0.25, 0.0625] {
            let o = QuadratureOracle::new(delta, 2.5).unwrap();
            let q = integrate_fn(|r| o.shell(r), o.lo(), o.hi(), &[], QuadratureOptions { rel_tol: 1e-13, ..Default::default() })
                .unwrap();
            assert!((q.value - 2.5).abs() < 1e-12, "{delta}: {}", q.value);
        }
        assert!(QuadratureOracle::new(0.0, 1.0).is_err());
        assert!(QuadratureOracle::new(0.6, 1.0).is_err());
    }

    #[test]
    fn symmetric_case_vanishes() {
        let p = CrossParams { nu: 1.3, mu: 1.3, alpha: 2.0, alpha1: 1.0, alpha2: 1.0, m1: 1.0 };
        let v = fg_cross_value(0.25, &p, None, 1e-6).unwrap();
        assert!(v.closed_route.abs() < 1e-14, "{v:?}");
        assert!(v.time_route.abs() < 1e-14);
    }

    #[test]
    fn routes_agree() {
        for alpha in [0.0, 1.0, 2.0] {
            let p = CrossParams { nu: 1.0, mu: 2.0, alpha, alpha1: 1.0, alpha2: 1.0, m1: 1.0 };
            let v = fg_cross_value(0.25, &p, None, 1e-7).unwrap();
            assert!(v.route_gap() < 1e-5, "alpha {alpha}: {v:?}");
            assert!(v.tail_bound < 1e-12 * v.closed_route);
        }
    }

    #[test]
    fn multipliers_at_zero_width() {
        let r = multiplier_bounds_check(0.0, 1.0, 11).unwrap();
        assert_eq!(r.sup_first, 0.0);
        assert_eq!(r.sup_second, 0.0);
    }

    #[test]
    fn multiplier_suprema_match_corner_values() {
        // Both ratios are maximal at a = 1-δ, b = 1+δ for these α.
        let d: f64 = 0.25;
        let (lo, hi) = (1.0 - d, 1.0 + d);
        let r = multiplier_bounds_check(d, 2.0, 401).unwrap();
        assert!((r.sup_first - (hi * hi - lo * lo) / (lo * lo)).abs() < 1e-14);
        assert_eq!(r.sup_second, r.sup_first);
        let r = multiplier_bounds_check(d, 1.0, 401).unwrap();
        assert!((r.sup_first - (hi * hi - lo * lo) / lo).abs() < 1e-14);
        assert!((r.sup_second - (hi - lo) / (lo * lo)).abs() < 1e-14);
        let r = multiplier_bounds_check(d, 0.0, 401).unwrap();
        assert!((r.sup_first - 4.0 * d).abs() < 1e-14);
        assert_eq!(r.sup_second, 0.0);
    }
}
