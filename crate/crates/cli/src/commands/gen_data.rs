use std::path::Path;

use hismhd_core::dynamics::State;
use hismhd_core::integrator::write_checkpoint;

use crate::config::RunConfig;
use crate::error::build_data;
use crate::output::write_pairs;

pub const INITIAL: &str = "initial.chk";
pub const PROVENANCE: &str = "provenance.csv";

pub fn gen_data(cfg: &RunConfig, out: &Path) -> anyhow::Result<u8> {
    let (_, data) = build_data(cfg)?;
    std::fs::create_dir_all(out)?;
    let prov: Vec<(String, f64)> =
        data.provenance.named_values().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut entries = cfg.header_values();
    entries.extend(prov.iter().cloned());
    let state = State::new(data.u0, data.b0, 0.0)?;
    write_checkpoint(&out.join(INITIAL), &state, &entries)?;
    write_pairs(&out.join(PROVENANCE), "provenance", &cfg.header_values(), &prov)?;
    let p = &data.provenance;
    println!(
        "initial data: {} annulus modes, delta_eff {:.6}, |u0|_H3 {:.6e}, |b0|_H3 {:.6e}, projection defect {:.3e}",
        p.mode_count, p.delta_eff, p.u0_h3, p.b0_h3, p.u_projection_defect.max(p.b_projection_defect)
    );
    Ok(0)
}
