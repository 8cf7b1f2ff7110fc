//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point rule on `[a, b]`: `(kronrod, |kronrod - gauss|)`.
pub fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x)? + f(c + x)?;
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-interval error estimates.
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            max_intervals: 2000,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Integrates over `[a, b]` split first at `breaks`, bisecting the interval
/// with the largest error until `error ≤ max(abs_tol, rel_tol |value|)`.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadratureOptions,
) -> Result<Quadrature> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                error,
                intervals: heap.len(),
                evaluations,
            });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureStall(format!(
                "{} intervals, error {error:e} for value {value:e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureStall(format!("interval [{}, {}] cannot be split", worst.a, worst.b)));
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, lo, hi)?;
            evaluations += 15;
            heap.push(Piece { a: lo, b: hi, value, error });
        }
    }
}

/// Infallible-integrand convenience wrapper.
pub fn integrate_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], opts: QuadratureOptions) -> Result<Quadrature> {
    integrate(|x| Ok(f(x)), a, b, breaks, opts)
}
