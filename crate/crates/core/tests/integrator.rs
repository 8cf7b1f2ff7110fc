use std::f64::consts::PI;

use hismhd_core::dynamics::{random_state, State};
use hismhd_core::grid::Grid;
use hismhd_core::init::SimParams;
use hismhd_core::integrator::checkpoint::{decode, encode};
use hismhd_core::integrator::{
    run, stable_dt, CheckpointReason, Integrator, IntegratorConfig, NullSink, Scheme, Sink, StepInfo, Termination,
};
use hismhd_core::norms::sobolev_norm;
use hismhd_core::{SpectralVectorField, C64};

fn params() -> SimParams {
    SimParams {
        nu: 0.05,
        mu: 0.08,
        sigma: 0.3,
        kappa: 0.05,
        alpha: 1.5,
        ..SimParams::default()
    }
}

fn single_mode(g: &std::sync::Arc<Grid>, m: [i64; 3], amp: [C64; 3]) -> SpectralVectorField {
    let mut v = SpectralVectorField::zeros(g);
    let (i, j, l) = (g.index_of(m[0]), g.index_of(m[1]), g.index_of(m[2]));
    let (ni, nj, nl) = (g.negate(i), g.negate(j), g.negate(l));
    for d in 0..3 {
        v.components_mut()[d][[i, j, l]] = amp[d];
        v.components_mut()[d][[ni, nj, nl]] = amp[d].conj();
    }
    v
}

fn distance(a: &State, b: &State) -> f64 {
    (sobolev_norm(&a.u.sub(&b.u).unwrap(), 0.0).powi(2) + sobolev_norm(&a.b.sub(&b.b).unwrap(), 0.0).powi(2)).sqrt()
}

#[test]
fn linear_only_step_is_exact_propagation() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let z = C64::new(0.0, 0.0);
    // k = (1, 2, 0), amplitude orthogonal to k.
    let u = single_mode(&g, [1, 2, 0], [C64::new(2.0, 1.0), C64::new(-1.0, -0.5), z]);
    let b = single_mode(&g, [0, 1, 1], [C64::new(0.0, 0.3), z, z]);
    let s = State::new(u.clone(), b.clone(), 0.0).unwrap();
    for scheme in [Scheme::Rk3, Scheme::Rk4] {
        let mut it = Integrator::new(&params(), scheme);
        it.linear_only = true;
        let dt = 0.37;
        let out = it.step(&s, dt).unwrap();
        let fu = (-0.05 * 5f64.powf(0.75) * dt).exp();
        let fb = (-0.08 * 2.0 * dt).exp();
        let (i, j, l) = (g.index_of(1), g.index_of(2), g.index_of(0));
        let got = out.u.components()[0][[i, j, l]];
        assert!((got - C64::new(2.0, 1.0) * fu).norm() < 1e-15);
        let (i, j, l) = (g.index_of(0), g.index_of(1), g.index_of(1));
        let got = out.b.components()[0][[i, j, l]];
        assert!((got - C64::new(0.0, 0.3) * fb).norm() < 1e-15);
        assert!((out.t - dt).abs() == 0.0);
    }
}

#[test]
fn nonpositive_dt_is_rejected() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let s = State::zeros(&g);
    let it = Integrator::new(&params(), Scheme::Rk4);
    assert!(it.step(&s, 0.0).is_err());
    assert!(it.step(&s, -1e-3).is_err());
    assert!(it.step(&s, f64::NAN).is_err());
}

/// Errors against a fine reference on a dt ladder; returns the fitted slope.
fn convergence_slope(scheme: Scheme) -> f64 {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let s0 = random_state(&g, 11, 3.0, 3.0).unwrap();
    let it = Integrator::new(&params(), scheme);
    let horizon = 0.4;
    let advance = |steps: usize| {
        let dt = horizon / steps as f64;
        let mut s = s0.clone();
        for _ in 0..steps {
            s = it.step(&s, dt).unwrap();
        }
        s
    };
    let reference = advance(640);
    let ladder = [10usize, 20, 40];
    let errs: Vec<f64> = ladder.iter().map(|&k| distance(&advance(k), &reference)).collect();
    let xs: Vec<f64> = ladder.iter().map(|&k| (horizon / k as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 3.0;
    let my = ys.iter().sum::<f64>() / 3.0;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn rk3_converges_at_third_order() {
    let p = convergence_slope(Scheme::Rk3);
    assert!((p - 3.0).abs() < 0.2, "slope {p}");
}

#[test]
fn rk4_converges_at_fourth_order() {
    let p = convergence_slope(Scheme::Rk4);
    assert!((p - 4.0).abs() < 0.2, "slope {p}");
}

#[test]
fn stable_dt_formula() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let p = params();
    assert_eq!(stable_dt(&State::zeros(&g), &p, 0.5, 0.25), 0.25);
    // Ion-slip dominated: tiny σ, no velocity.
    let q = SimParams { sigma: 0.0, kappa: 10.0, ..p.clone() };
    let s = random_state(&g, 3, 0.0, 20.0).unwrap();
    let mut s2 = s.clone();
    s2.b = s.b.scaled(2.0);
    let d1 = stable_dt(&s, &q, 0.5, 1e9);
    let d2 = stable_dt(&s2, &q, 0.5, 1e9);
    assert!((d1 / d2 - 4.0).abs() < 1e-12, "{d1} {d2}");
}

#[derive(Default)]
struct Recorder {
    diagnostics: Vec<(f64, u64)>,
    checkpoints: Vec<(Vec<u8>, f64, CheckpointReason)>,
}

impl Sink for Recorder {
    fn diagnostics(&mut self, state: &State, info: &StepInfo) -> hismhd_core::Result<()> {
        self.diagnostics.push((state.t, info.accepted));
        Ok(())
    }
    fn checkpoint(&mut self, state: &State, dt_next: f64, reason: CheckpointReason) -> hismhd_core::Result<()> {
        let entries = vec![("dt_next".to_string(), dt_next)];
        self.checkpoints.push((encode(state, &entries), dt_next, reason));
        Ok(())
    }
}

#[test]
fn zero_horizon_takes_no_steps() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let s = random_state(&g, 1, 1.0, 1.0).unwrap();
    let cfg = IntegratorConfig { t_end: 0.0, ..IntegratorConfig::default() };
    let mut rec = Recorder::default();
    let r = run(&s, &params(), &cfg, None, &mut rec).unwrap();
    assert_eq!(r.accepted, 0);
    assert_eq!(r.termination, Termination::Completed);
    assert_eq!(rec.diagnostics, vec![(0.0, 0)]);
}

#[test]
fn restart_reproduces_trajectory_bitwise() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let s = random_state(&g, 5, 4.0, 4.0).unwrap();
        let cfg = IntegratorConfig {
            t_end: 0.6,
            dt_init: 1e-3,
            tolerance: 1e-7,
            checkpoint_interval: 0.25,
            diagnostics_interval: 0.05,
            ..IntegratorConfig::default()
        };
        let mut full = Recorder::default();
        let r = run(&s, &params(), &cfg, None, &mut full).unwrap();
        assert_eq!(r.termination, Termination::Completed);
        assert!(r.accepted >= 1);
        let (bytes, dt_next, reason) = &full.checkpoints[0];
        assert_eq!(*reason, CheckpointReason::Periodic);
        let chk = decode(bytes, Some(&g)).unwrap();
        assert_eq!(chk.state.t, 0.25);
        assert_eq!(chk.get("dt_next"), Some(*dt_next));
        let mut resumed = Recorder::default();
        run(&chk.state, &params(), &cfg, Some(*dt_next), &mut resumed).unwrap();
        let a = &full.checkpoints.last().unwrap().0;
        let b = &resumed.checkpoints.last().unwrap().0;
        assert_eq!(a, b);
        // Diagnostics after the restart point coincide.
        let tail: Vec<_> = full.diagnostics.iter().filter(|d| d.0 >= 0.25).map(|d| d.0).collect();
        let again: Vec<_> = resumed.diagnostics.iter().map(|d| d.0).collect();
        assert_eq!(tail, again);
    });
}

#[test]
fn half_stable_dt_keeps_energy_nonincreasing() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let p = params();
    let mut s = random_state(&g, 9, 6.0, 6.0).unwrap();
    let it = Integrator::new(&p, Scheme::Rk4);
    let mut e = s.energy();
    for _ in 0..1000 {
        let dt = 0.5 * stable_dt(&s, &p, 0.5, 0.05);
        s = it.step(&s, dt).unwrap();
        let e2 = s.energy();
        assert!(e2 <= e + 1e-12, "{e} -> {e2}");
        e = e2;
    }
}

#[test]
fn adaptive_run_decreases_energy_every_step() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let s = random_state(&g, 21, 5.0, 5.0).unwrap();
    let cfg = IntegratorConfig { t_end: 1.0, dt_init: 1e-3, ..IntegratorConfig::default() };
    let r = run(&s, &params(), &cfg, None, &mut NullSink).unwrap();
    assert_eq!(r.termination, Termination::Completed);
    assert_eq!(r.energy_history.len() as u64, r.accepted + 1);
    assert!(r.max_energy_increase() < 0.0);
    assert!((r.t_final - 1.0).abs() < 1e-12);
}

#[test]
fn underflow_aborts_with_failure_checkpoint() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let s = random_state(&g, 2, 40.0, 40.0).unwrap();
    let cfg = IntegratorConfig {
        t_end: 1.0,
        dt_init: 0.1,
        dt_min: 0.05,
        dt_max: 0.5,
        tolerance: 1e-14,
        ..IntegratorConfig::default()
    };
    let mut rec = Recorder::default();
    let r = run(&s, &params(), &cfg, None, &mut rec).unwrap();
    assert_eq!(r.termination, Termination::DtUnderflow);
    assert_eq!(rec.checkpoints.last().unwrap().2, CheckpointReason::Failure);
}
