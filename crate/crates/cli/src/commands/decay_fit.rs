use std::path::Path;

use hismhd_core::analysis::fit_decay;

use crate::error::usage;
use crate::output::{read_numeric, write_pairs};

pub const DECAY_FIT: &str = "decay_fit.csv";

/// Fits `y ≈ A e^{-r t}` to one column of a time-series CSV over `t ≥ from`.
pub fn decay_fit(input: &Path, column: &str, from: f64, out: &Path) -> anyhow::Result<u8> {
    let (header, rows) = read_numeric(input)?;
    let ti = header.iter().position(|h| h == "t").ok_or_else(|| usage(format!("{} has no `t` column", input.display())))?;
    let ci = header
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| usage(format!("{} has no `{column}` column; available: {}", input.display(), header.join(", "))))?;
    let (t, y): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r[ti] >= from).map(|r| (r[ti], r[ci])).unzip();
    let fit = fit_decay(&t, &y)?;
    std::fs::create_dir_all(out)?;
    let meta = vec![("from".to_string(), from)];
    write_pairs(
        &out.join(DECAY_FIT),
        &format!("decay-fit {column}"),
        &meta,
        &[
            ("rate".into(), fit.rate),
            ("amplitude".into(), fit.amplitude),
            ("residual".into(), fit.residual),
            ("samples".into(), fit.samples as f64),
        ],
    )?;
    println!("{column}: rate {:.6e}, amplitude {:.6e}, residual {:.3e}, {} samples", fit.rate, fit.amplitude, fit.residual, fit.samples);
    Ok(0)
}
