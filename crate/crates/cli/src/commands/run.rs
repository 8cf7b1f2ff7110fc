use std::path::{Path, PathBuf};

use hismhd_core::analysis::{perturbation_extract, theorem_monitor, MonitorSample, ReferenceFlows};
use hismhd_core::dynamics::{energy_budget, State};
use hismhd_core::integrator::{read_checkpoint, run as integrate, write_checkpoint, CheckpointReason, Sink, StepInfo, Termination};
use hismhd_core::norms::sobolev_norm;
use hismhd_core::init::SimParams;

use crate::commands::gen_data::INITIAL;
use crate::config::RunConfig;
use crate::error::{build_data, usage, EXIT_INTEGRATION};
use crate::output::{write_pairs, CsvOut};

pub const TIMESERIES: &str = "timeseries.csv";
pub const MONITOR: &str = "monitor.csv";
pub const FINAL: &str = "final.chk";
pub const FAILURE: &str = "failure.chk";

pub const COLUMNS: [&str; 15] = [
    "t",
    "dt",
    "u_h3",
    "b_h3",
    "U_h3",
    "B_h3",
    "energy",
    "dE_dt",
    "dissipation_u",
    "dissipation_b",
    "ionslip",
    "advection",
    "lorentz_cross",
    "hall",
    "budget_residual",
];

/// Keys that fix the initial data; a checkpoint must agree with the config on them.
const DATA_KEYS: [&str; 10] = ["m0", "m1", "delta", "alpha1", "alpha2", "small_budget", "seed", "n", "length", "leray_project"];

pub fn periodic_name(index: u64) -> String {
    format!("chk_{index:04}.chk")
}

struct RunSink<'a> {
    csv: CsvOut,
    flows: &'a ReferenceFlows,
    params: &'a SimParams,
    header: Vec<(String, f64)>,
    out: PathBuf,
    samples: Vec<MonitorSample>,
    periodic: u64,
}

fn io(e: anyhow::Error) -> hismhd_core::Error {
    hismhd_core::Error::Io(std::io::Error::other(format!("{e:#}")))
}

impl RunSink<'_> {
    fn record(&mut self, state: &State, info: &StepInfo) -> anyhow::Result<()> {
        let snap = self.flows.snapshot(state.t)?;
        let (uu, bb) = perturbation_extract(state, &snap)?;
        let e = energy_budget(state, self.params)?;
        let (uh, bh) = (sobolev_norm(&uu, 3.0), sobolev_norm(&bb, 3.0));
        self.samples.push(MonitorSample { t: state.t, u_h3: uh, b_h3: bh });
        self.csv.numbers(&[
            state.t,
            info.dt_last,
            sobolev_norm(&state.u, 3.0),
            sobolev_norm(&state.b, 3.0),
            uh,
            bh,
            e.energy,
            e.measured_rate,
            e.dissipation_u,
            e.dissipation_b,
            e.ionslip_measured,
            e.advection,
            e.lorentz_cross,
            e.hall,
            e.residual(),
        ])?;
        self.csv.flush()
    }
}

impl Sink for RunSink<'_> {
    fn diagnostics(&mut self, state: &State, info: &StepInfo) -> hismhd_core::Result<()> {
        self.record(state, info).map_err(io)
    }

    fn checkpoint(&mut self, state: &State, dt_next: f64, reason: CheckpointReason) -> hismhd_core::Result<()> {
        let name = match reason {
            CheckpointReason::Periodic => {
                self.periodic += 1;
                periodic_name(self.periodic)
            }
            CheckpointReason::Final => FINAL.to_string(),
            CheckpointReason::Failure => FAILURE.to_string(),
        };
        let mut entries = self.header.clone();
        entries.push(("dt_next".into(), dt_next));
        self.csv.flush().map_err(io)?;
        write_checkpoint(&self.out.join(name), state, &entries)
    }
}

pub fn run(cfg: &RunConfig, out: &Path, initial: Option<&Path>, restart: Option<&Path>) -> anyhow::Result<u8> {
    let (grid, data) = build_data(cfg)?;
    let (path, is_restart) = match (restart, initial) {
        (Some(_), Some(_)) => return Err(usage("--initial and --restart are exclusive")),
        (Some(r), None) => (r.to_path_buf(), true),
        (None, Some(i)) => (i.to_path_buf(), false),
        (None, None) => (out.join(INITIAL), false),
    };
    if !path.exists() {
        return Err(usage(format!("checkpoint {} does not exist; run gen-data first", path.display())));
    }
    let chk = read_checkpoint(&path)?;
    let header = cfg.header_values();
    for key in DATA_KEYS {
        let want = header.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        if chk.get(key) != want {
            return Err(usage(format!(
                "checkpoint {} was made with {key} = {:?}, config has {:?}",
                path.display(),
                chk.get(key),
                want
            )));
        }
    }
    if chk.state.grid().n() != grid.n() || chk.state.grid().length() != grid.length() {
        return Err(usage("checkpoint grid differs from the configured grid"));
    }
    let dt_start = if is_restart { chk.get("dt_next") } else { None };
    let flows = ReferenceFlows::from_data(&data, &cfg.params);
    std::fs::create_dir_all(out)?;
    let mut meta = header.clone();
    meta.push(("t_start".into(), chk.state.t));
    meta.push(("t_end".into(), cfg.integrator.t_end));
    meta.push(("order".into(), cfg.integrator.order as f64));
    meta.push(("tolerance".into(), cfg.integrator.tolerance));
    meta.push(("delta_eff".into(), data.provenance.delta_eff));
    let csv = CsvOut::create(&out.join(TIMESERIES), "timeseries", &meta, &COLUMNS)?;
    let mut sink = RunSink {
        csv,
        flows: &flows,
        params: &cfg.params,
        header,
        out: out.to_path_buf(),
        samples: Vec::new(),
        periodic: 0,
    };
    let record = integrate(&chk.state, &cfg.params, &cfg.integrator, dt_start, &mut sink)?;
    let verdict = theorem_monitor(&sink.samples, cfg.params.m0, cfg.monitor_budget)?;
    let energy_monotone = record.max_energy_increase() <= 0.0;
    let pairs = vec![
        ("sup_U_plus_B_h3".to_string(), verdict.sup),
        ("t_of_sup".into(), verdict.t_of_sup),
        ("reference_m0_inv_sqrt".into(), verdict.reference),
        ("reference_ok".into(), f64::from(u8::from(verdict.reference_status.acceptable()))),
        ("budget".into(), verdict.budget),
        ("budget_ok".into(), f64::from(u8::from(verdict.status.acceptable()))),
        ("samples".into(), verdict.samples as f64),
        ("t_last".into(), verdict.t_last),
        ("accepted_steps".into(), record.accepted as f64),
        ("rejected_steps".into(), record.rejected as f64),
        ("max_energy_increase".into(), record.max_energy_increase()),
        ("energy_monotone".into(), f64::from(u8::from(energy_monotone))),
        ("completed".into(), f64::from(u8::from(record.termination == Termination::Completed))),
        ("wall_time".into(), record.wall_time),
    ];
    write_pairs(&out.join(MONITOR), "monitor", &cfg.header_values(), &pairs)?;
    println!(
        "t = {:.6}: {} steps ({} rejected); sup |U|+|B| (H3) = {:.6e} at t = {:.4}; vs M0^-1/2 = {:.6e}: {}; vs budget {:.6e}: {}",
        record.t_final,
        record.accepted,
        record.rejected,
        verdict.sup,
        verdict.t_of_sup,
        verdict.reference,
        verdict.reference_status.name(),
        verdict.budget,
        verdict.status.name()
    );
    match record.termination {
        Termination::Completed => Ok(0),
        t => {
            eprintln!("integration stopped at t = {:.6}: {t:?}; state written to {FAILURE}", record.t_final);
            Ok(EXIT_INTEGRATION)
        }
    }
}
