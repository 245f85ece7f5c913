//! `.scat` files: little-endian header
//! `"SSCT" u32 version  u32 L  f64 alpha  u32 J0  u32 D  u8 policy
//!  u8 multires  u32 L0  u32 path_count`
//! followed, per path in lexicographic order, by `u32 depth`, `depth x u32`
//! scales and `L0^2` complex coefficients as `(f64 re, f64 im)` pairs.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path as FsPath;

use super::network::{Provenance, ScatteringCoefficients};
use super::path::{Path, PathPolicy};
use crate::error::{Error, Result};
use crate::sht::io::{Reader, FORMAT_VERSION};
use crate::sht::HarmonicCoefficients;

pub const SCAT_MAGIC: &[u8; 4] = b"SSCT";

pub fn write_scat<W: Write>(mut w: W, coeffs: &ScatteringCoefficients) -> Result<()> {
    let p = &coeffs.provenance;
    w.write_all(SCAT_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(p.bandlimit as u32).to_le_bytes())?;
    w.write_all(&p.alpha.to_le_bytes())?;
    w.write_all(&(p.j0 as u32).to_le_bytes())?;
    w.write_all(&(p.depth as u32).to_le_bytes())?;
    w.write_all(&[p.policy.code(), p.multires as u8])?;
    w.write_all(&(p.l0 as u32).to_le_bytes())?;
    w.write_all(&(coeffs.entries.len() as u32).to_le_bytes())?;
    for (path, c) in &coeffs.entries {
        if c.bandlimit() != p.l0 {
            return Err(Error::Format(format!(
                "channel {path} has band-limit {}, expected L0 = {}",
                c.bandlimit(),
                p.l0
            )));
        }
        w.write_all(&(path.depth() as u32).to_le_bytes())?;
        for &j in path.scales() {
            w.write_all(&(j as u32).to_le_bytes())?;
        }
        for v in c.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_scat<R: Read>(r: R) -> Result<ScatteringCoefficients> {
    let mut r = Reader::new(r);
    r.magic(SCAT_MAGIC)?;
    r.version()?;
    let bandlimit = r.u32()? as usize;
    let alpha = r.f64()?;
    let j0 = r.u32()? as usize;
    let depth = r.u32()? as usize;
    let policy = PathPolicy::from_code(r.u8()?)?;
    let multires = r.flag()?;
    let l0 = r.u32()? as usize;
    let count = r.u32()? as usize;
    let mut entries = BTreeMap::new();
    for _ in 0..count {
        let d = r.u32()? as usize;
        if d > depth {
            return Err(Error::Format(format!("path depth {d} exceeds header depth {depth}")));
        }
        let mut scales = Vec::with_capacity(d);
        for _ in 0..d {
            scales.push(r.u32()? as usize);
        }
        let mut values = Vec::with_capacity(l0 * l0);
        for _ in 0..l0 * l0 {
            values.push(r.complex()?);
        }
        let path = Path(scales);
        let c = HarmonicCoefficients::from_values(l0, values, true)?;
        if entries.insert(path.clone(), c).is_some() {
            return Err(Error::Format(format!("duplicate path {path}")));
        }
    }
    r.finish()?;
    Ok(ScatteringCoefficients {
        entries,
        provenance: Provenance {
            bandlimit,
            alpha,
            j0,
            depth,
            policy,
            multires,
            l0,
        },
    })
}

pub fn save_scat(path: impl AsRef<FsPath>, coeffs: &ScatteringCoefficients) -> Result<()> {
    let mut buf = Vec::new();
    write_scat(&mut buf, coeffs)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_scat(path: impl AsRef<FsPath>) -> Result<ScatteringCoefficients> {
    read_scat(std::fs::read(path)?.as_slice())
}
