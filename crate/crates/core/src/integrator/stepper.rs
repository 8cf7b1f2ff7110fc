//! Lawson (integrating-factor) Runge–Kutta steps. With `E(s) = e^{-Ls}` the
//! exact linear propagator, a tableau `(a, b, c)` with nondecreasing `c` gives
//!
//! ```text
//! Y_i     = E(c_i h) y + h Σ_j a_ij E((c_i - c_j) h) N(Y_j)
//! y_{n+1} = E(h) y     + h Σ_j b_j  E((1 - c_j) h)  N(Y_j)
//! ```

use ndarray::{Array3, Zip};

use crate::dynamics::{nonlinear_rhs, State, STATE_BAND};
use crate::error::{invalid, Error, Result};
use crate::field::{SpectralVectorField, C64};
use crate::init::SimParams;
use crate::ops::{lambda_symbol, leray_in_place};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Kutta's third-order method.
    Rk3,
    /// Classical fourth-order method.
    Rk4,
}

impl Scheme {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            3 => Ok(Self::Rk3),
            4 => Ok(Self::Rk4),
            _ => Err(invalid("order", format!("{order} is not 3 or 4"))),
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Self::Rk3 => 3,
            Self::Rk4 => 4,
        }
    }

    fn tableau(self) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        match self {
            Self::Rk3 => (
                vec![vec![], vec![0.5], vec![-1.0, 2.0]],
                vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                vec![0.0, 0.5, 1.0],
            ),
            Self::Rk4 => (
                vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
                vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
                vec![0.0, 0.5, 0.5, 1.0],
            ),
        }
    }
}

/// One time stepper for fixed parameters.
pub struct Integrator {
    pub params: SimParams,
    pub scheme: Scheme,
    /// Test hook: drop the nonlinear terms so steps are pure propagation.
    pub linear_only: bool,
}

struct Propagator {
    u: Array3<f64>,
    b: Array3<f64>,
}

impl Integrator {
    pub fn new(params: &SimParams, scheme: Scheme) -> Self {
        Self {
            params: params.clone(),
            scheme,
            linear_only: false,
        }
    }

    fn propagator(&self, state: &State, s: f64) -> Propagator {
        let k2 = state.grid().k_squared();
        let (nu, mu, alpha) = (self.params.nu, self.params.mu, self.params.alpha);
        Propagator {
            u: k2.mapv(|q| (-nu * lambda_symbol(q, alpha) * s).exp()),
            b: k2.mapv(|q| (-mu * q * s).exp()),
        }
    }

    fn nonlinear(&self, u: &SpectralVectorField, b: &SpectralVectorField) -> Result<(SpectralVectorField, SpectralVectorField)> {
        if self.linear_only {
            let z = SpectralVectorField::zeros(u.grid());
            return Ok((z.clone(), z));
        }
        nonlinear_rhs(u, b, self.params.sigma, self.params.kappa)
    }

    /// Advances `state` by `dt` and re-projects the result.
    pub fn step(&self, state: &State, dt: f64) -> Result<State> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("{dt} must be positive")));
        }
        let (a, bw, c) = self.scheme.tableau();
        let stages = c.len();
        let mut props: Vec<(f64, Propagator)> = Vec::new();
        let prop_index = |s: f64, props: &mut Vec<(f64, Propagator)>| -> Option<usize> {
            if s == 0.0 {
                return None;
            }
            if let Some(i) = props.iter().position(|(v, _)| *v == s) {
                return Some(i);
            }
            props.push((s, self.propagator(state, s * dt)));
            Some(props.len() - 1)
        };
        let mut ks: Vec<(SpectralVectorField, SpectralVectorField)> = Vec::with_capacity(stages);
        for i in 0..stages {
            let mut terms: Vec<(f64, Option<usize>, usize)> = Vec::new();
            for (j, &aij) in a[i].iter().enumerate() {
                if aij != 0.0 {
                    terms.push((dt * aij, prop_index(c[i] - c[j], &mut props), j));
                }
            }
            let base = prop_index(c[i], &mut props);
            let (yu, yb) = combine(state, base, &terms, &ks, &props);
            ks.push(self.nonlinear(&yu, &yb)?);
        }
        let mut terms = Vec::new();
        for (j, &bj) in bw.iter().enumerate() {
            if bj != 0.0 {
                terms.push((dt * bj, prop_index(1.0 - c[j], &mut props), j));
            }
        }
        let base = prop_index(1.0, &mut props);
        let (mut u, mut b) = combine(state, base, &terms, &ks, &props);
        for v in [&mut u, &mut b] {
            v.apply_mask(STATE_BAND);
            leray_in_place(v);
        }
        if !(u.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite("time step"));
        }
        Ok(State { u, b, t: state.t + dt })
    }
}

/// `E_base y + Σ w E_p K_j` for both fields.
fn combine(
    state: &State,
    base: Option<usize>,
    terms: &[(f64, Option<usize>, usize)],
    ks: &[(SpectralVectorField, SpectralVectorField)],
    props: &[(f64, Propagator)],
) -> (SpectralVectorField, SpectralVectorField) {
    let mut u = state.u.clone();
    let mut b = state.b.clone();
    for (which, field) in [&mut u, &mut b].into_iter().enumerate() {
        let factor = |p: usize| if which == 0 { &props[p].1.u } else { &props[p].1.b };
        for d in 0..3 {
            let arr = &mut field.components_mut()[d];
            if let Some(p) = base {
                Zip::from(&mut *arr).and(factor(p)).par_for_each(|x, &f| *x *= f);
            }
            for &(w, p, j) in terms {
                let k = if which == 0 { &ks[j].0 } else { &ks[j].1 };
                let kd = &k.components()[d];
                match p {
                    Some(p) => {
                        Zip::from(&mut *arr)
                            .and(kd)
                            .and(factor(p))
                            .par_for_each(|x, &y, &f| *x += y * (w * f));
                    }
                    None => {
                        let wc = C64::new(w, 0.0);
                        Zip::from(&mut *arr).and(kd).par_for_each(|x, &y| *x += wc * y);
                    }
                }
            }
        }
    }
    (u, b)
}

/// One step of the given order with all physics on.
pub fn step(state: &State, params: &SimParams, dt: f64, order: u32) -> Result<State> {
    Integrator::new(params, Scheme::from_order(order)?).step(state, dt)
}
