//! `LVF1` layout: the magic bytes, then `n, N, N_t` as `u64`, `Δt, Δx` as
//! `f64` and the seed as `u64`, all little-endian, followed by the
//! `(N_t + 1)·Nⁿ` values row by row. `Δt` is the spacing of stored rows.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FieldPath;
use crate::error::{Error, Result};
use crate::noise::TorusLattice;

pub const LVF1_MAGIC: &[u8; 4] = b"LVF1";

fn bad(msg: impl Into<String>) -> Error {
    Error::Io(msg.into())
}

impl FieldPath {
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(LVF1_MAGIC)?;
        w.write_all(&(self.lattice.dim as u64).to_le_bytes())?;
        w.write_all(&(self.lattice.points as u64).to_le_bytes())?;
        w.write_all(&(self.rows() as u64 - 1).to_le_bytes())?;
        w.write_all(&self.row_dt.to_le_bytes())?;
        w.write_all(&self.lattice.dx().to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != LVF1_MAGIC {
            return Err(bad("not an LVF1 file"));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word)?;
            Ok(word)
        };
        let dim = u64::from_le_bytes(next(&mut r)?) as usize;
        let points = u64::from_le_bytes(next(&mut r)?) as usize;
        let steps = u64::from_le_bytes(next(&mut r)?) as usize;
        let row_dt = f64::from_le_bytes(next(&mut r)?);
        let dx = f64::from_le_bytes(next(&mut r)?);
        let seed = u64::from_le_bytes(next(&mut r)?);
        let lattice = TorusLattice::new(dim, points, dx * points as f64).map_err(|e| bad(e.to_string()))?;
        let count = (steps + 1)
            .checked_mul(lattice.len())
            .ok_or_else(|| bad("header sizes overflow"))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != count * 8 {
            return Err(bad(format!("expected {} value bytes, found {}", count * 8, bytes.len())));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(Self {
            lattice,
            row_dt,
            scheme_dt: row_dt,
            seed,
            replica: 0,
            mode_cutoff: points / 2,
            values,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_binary(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_binary(BufReader::new(File::open(path)?))
    }

    /// Columns `t, x1[, x2, …], u`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dims: Vec<String> = (1..=self.lattice.dim).map(|d| format!("x{d}")).collect();
        writeln!(w, "t,{},u", dims.join(","))?;
        let dx = self.lattice.dx();
        for i in 0..self.rows() {
            let t = self.time(i);
            for (j, v) in self.row(i).iter().enumerate() {
                let coords: Vec<String> = self
                    .lattice
                    .unravel(j)
                    .iter()
                    .map(|k| format!("{:.16e}", *k as f64 * dx))
                    .collect();
                writeln!(w, "{t:.16e},{},{v:.16e}", coords.join(","))?;
            }
        }
        Ok(())
    }
}
