//! Binary checkpoint container.
//!
//! Layout (all little-endian):
//!
//! ```text
//! "HISMHD01"                    8 bytes
//! n                             u64
//! L, t                          f64, f64
//! entry count                   u32
//! per entry: name length (u16), name (UTF-8), value (f64)
//! u_x, u_y, u_z, b_x, b_y, b_z  n³ complex each, (re, im) f64 pairs, last index fastest
//! ```

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use ndarray::Array3;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::field::{SpectralVectorField, C64};
use crate::grid::Grid;

pub const MAGIC: &[u8; 8] = b"HISMHD01";

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub state: State,
    /// Named header values (parameters, next step size, provenance).
    pub entries: Vec<(String, f64)>,
}

impl Checkpoint {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

pub fn encode(state: &State, entries: &[(String, f64)]) -> Vec<u8> {
    let grid = state.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(64 + 6 * 16 * n * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    out.extend_from_slice(&grid.length().to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    out.extend_from_slice(&(entries.len() as u32).to_le_bytes());
    for (name, v) in entries {
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&v.to_le_bytes());
    }
    for field in [&state.u, &state.b] {
        for comp in field.components() {
            for c in comp.iter() {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
    }
    out
}

pub fn write_checkpoint(path: &Path, state: &State, entries: &[(String, f64)]) -> Result<()> {
    let bytes = encode(state, entries);
    let tmp = path.with_extension("partial");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.pos + k > self.data.len() {
            return Err(Error::Checkpoint("truncated file".into()));
        }
        let s = &self.data[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Decodes a checkpoint; the grid is rebuilt unless `grid` already matches.
pub fn decode(bytes: &[u8], grid: Option<&Arc<Grid>>) -> Result<Checkpoint> {
    let mut c = Cursor { data: bytes, pos: 0 };
    if c.take(8)? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let n = c.u64()? as usize;
    let length = c.f64()?;
    let t = c.f64()?;
    let grid = match grid {
        Some(g) if g.n() == n && g.length() == length => g.clone(),
        _ => Grid::new(n, length)?,
    };
    let count = c.u32()? as usize;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let len = c.u16()? as usize;
        let name = std::str::from_utf8(c.take(len)?)
            .map_err(|_| Error::Checkpoint("entry name is not UTF-8".into()))?
            .to_string();
        entries.push((name, c.f64()?));
    }
    let mut arrays = Vec::with_capacity(6);
    for _ in 0..6 {
        let mut a = Array3::from_elem(grid.shape(), C64::default());
        for v in a.iter_mut() {
            let re = c.f64()?;
            let im = c.f64()?;
            *v = C64::new(re, im);
        }
        arrays.push(a);
    }
    if c.pos != bytes.len() {
        return Err(Error::Checkpoint("trailing bytes".into()));
    }
    let mut it = arrays.into_iter();
    let mut next3 = || [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
    let u = SpectralVectorField::from_components(&grid, next3())?;
    let b = SpectralVectorField::from_components(&grid, next3())?;
    Ok(Checkpoint {
        state: State { u, b, t },
        entries,
    })
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes, None)
}
