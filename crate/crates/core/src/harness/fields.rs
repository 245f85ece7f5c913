use std::path::Path;

use crate::error::{Error, Result};
use crate::sht::{random_bandlimited, HarmonicCoefficients};

/// Gaussian random field with per-degree power `spectrum[l]`, `l < L`.
pub fn gaussian_field(spectrum: &[f64], bandlimit: usize, seed: u64) -> Result<HarmonicCoefficients> {
    random_bandlimited(bandlimit, seed, Some(spectrum))
}

/// Parses a two-column `l, C_l` CSV. Blank lines, `#` comments and a
/// non-numeric header line are skipped; degrees must cover `0..n` exactly
/// once, in any order.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::Format(format!("spectrum line {}: expected 2 columns", i + 1)));
        }
        let (Ok(l), Ok(c)) = (cols[0].parse::<usize>(), cols[1].parse::<f64>()) else {
            if entries.is_empty() && cols[0].parse::<f64>().is_err() {
                continue; // header
            }
            return Err(Error::Format(format!("spectrum line {}: unparsable '{line}'", i + 1)));
        };
        entries.push((l, c));
    }
    let mut out = vec![f64::NAN; entries.len()];
    for (l, c) in entries {
        let slot = out
            .get_mut(l)
            .ok_or_else(|| Error::Format(format!("spectrum degrees are not contiguous from 0 (saw l = {l})")))?;
        if !slot.is_nan() {
            return Err(Error::Format(format!("spectrum degree {l} repeated")));
        }
        *slot = c;
    }
    if out.iter().any(|c| c.is_nan()) {
        return Err(Error::InvalidSpectrum("spectrum contains NaN".into()));
    }
    Ok(out)
}

pub fn load_spectrum(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_spectrum(&std::fs::read_to_string(path)?)
}
