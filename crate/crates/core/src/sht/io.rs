//! Binary `.shc` (harmonic coefficients) and `.ssig` (sampled signal)
//! files. All integers and floats are little-endian.
//!
//! ```text
//! .shc   "SSHC" u32 version=1  u32 L  u8 reality   L^2 x (f64 re, f64 im)
//! .ssig  "SSIG" u32 version=1  u32 L  u8 scheme  u8 complex
//!        samples theta-major, f64 re (and f64 im when complex)
//! ```

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{make_grid, HarmonicCoefficients, Scheme, SphericalSignal};
use crate::error::{Error, Result};

pub const SHC_MAGIC: &[u8; 4] = b"SSHC";
pub const SSIG_MAGIC: &[u8; 4] = b"SSIG";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_shc<W: Write>(mut w: W, coeffs: &HarmonicCoefficients) -> Result<()> {
    w.write_all(SHC_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(coeffs.bandlimit() as u32).to_le_bytes())?;
    w.write_all(&[coeffs.is_real() as u8])?;
    for c in coeffs.values() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_shc<R: Read>(r: R) -> Result<HarmonicCoefficients> {
    let mut r = Reader::new(r);
    r.magic(SHC_MAGIC)?;
    r.version()?;
    let bl = r.u32()? as usize;
    let real = r.flag()?;
    let mut values = Vec::with_capacity(bl * bl);
    for _ in 0..bl * bl {
        values.push(r.complex()?);
    }
    r.finish()?;
    HarmonicCoefficients::from_values(bl, values, real)
}

pub fn write_ssig<W: Write>(mut w: W, signal: &SphericalSignal) -> Result<()> {
    let complex = !signal.is_real(0.0);
    w.write_all(SSIG_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(signal.grid().bandlimit() as u32).to_le_bytes())?;
    w.write_all(&[signal.grid().scheme().code(), complex as u8])?;
    for s in signal.samples() {
        w.write_all(&s.re.to_le_bytes())?;
        if complex {
            w.write_all(&s.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_ssig<R: Read>(r: R) -> Result<SphericalSignal> {
    let mut r = Reader::new(r);
    r.magic(SSIG_MAGIC)?;
    r.version()?;
    let bl = r.u32()? as usize;
    let scheme = Scheme::from_code(r.u8()?).map_err(|e| Error::Format(e.to_string()))?;
    let complex = r.flag()?;
    let grid = make_grid(bl, scheme).map_err(|e| Error::Format(e.to_string()))?;
    let mut samples = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        samples.push(if complex {
            r.complex()?
        } else {
            Complex64::new(r.f64()?, 0.0)
        });
    }
    r.finish()?;
    SphericalSignal::new(grid, samples)
}

pub fn save_shc(path: impl AsRef<Path>, coeffs: &HarmonicCoefficients) -> Result<()> {
    let mut buf = Vec::new();
    write_shc(&mut buf, coeffs)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_shc(path: impl AsRef<Path>) -> Result<HarmonicCoefficients> {
    read_shc(std::fs::read(path)?.as_slice())
}

pub fn save_ssig(path: impl AsRef<Path>, signal: &SphericalSignal) -> Result<()> {
    let mut buf = Vec::new();
    write_ssig(&mut buf, signal)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn load_ssig(path: impl AsRef<Path>) -> Result<SphericalSignal> {
    read_ssig(std::fs::read(path)?.as_slice())
}

/// Little-endian reader mapping every short read to a format error.
pub(crate) struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    pub(crate) fn new(inner: R) -> Self {
        Self { inner }
    }

    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| Error::Format("truncated file".into()))?;
        Ok(buf)
    }

    pub(crate) fn magic(&mut self, want: &[u8; 4]) -> Result<()> {
        let got = self.bytes::<4>()?;
        if &got != want {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&got),
                String::from_utf8_lossy(want)
            )));
        }
        Ok(())
    }

    pub(crate) fn version(&mut self) -> Result<()> {
        let v = self.u32()?;
        if v != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {v}")));
        }
        Ok(())
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    pub(crate) fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(Error::Format(format!("invalid flag byte {b}"))),
        }
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }

    pub(crate) fn complex(&mut self) -> Result<Complex64> {
        let re = self.f64()?;
        let im = self.f64()?;
        Ok(Complex64::new(re, im))
    }

    /// Rejects trailing bytes.
    pub(crate) fn finish(mut self) -> Result<()> {
        let mut extra = [0u8; 1];
        match self.inner.read(&mut extra) {
            Ok(0) => Ok(()),
            Ok(_) => Err(Error::Format("trailing bytes after payload".into())),
            Err(e) => Err(Error::Io(e)),
        }
    }
}
