use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::bank::FilterBank;
use crate::error::{Error, Result};
use crate::sht::HarmonicCoefficients;

/// Scaling and per-scale wavelet coefficients of one signal.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletCoefficients {
    pub scaling: HarmonicCoefficients,
    pub wavelets: BTreeMap<usize, HarmonicCoefficients>,
    pub multires: bool,
}

impl WaveletCoefficients {
    /// `||w||^2 + sum_j ||w_j||^2`.
    pub fn energy(&self) -> f64 {
        self.scaling.norm_sqr() + self.wavelets.values().map(|w| w.norm_sqr()).sum::<f64>()
    }
}

/// Convolution with an axisymmetric kernel:
/// `h_lm = sqrt(4pi/(2l+1)) f_lm kernel_l`.
///
/// The output is band-limited at `min(L_f, out_bandlimit)` when a
/// truncation is requested. Kernel entries past its length count as zero.
pub fn axisym_convolve(f: &HarmonicCoefficients, kernel: &[f64], out_bandlimit: Option<usize>) -> HarmonicCoefficients {
    let bl = out_bandlimit.map_or(f.bandlimit(), |b| b.min(f.bandlimit()));
    let mut out = HarmonicCoefficients::zeros(bl, f.is_real());
    let active = bl.min(kernel.len());
    for (l, &k) in kernel.iter().enumerate().take(active) {
        let w = (4.0 * PI / (2 * l + 1) as f64).sqrt() * k;
        if w == 0.0 {
            continue;
        }
        let range = l * l..(l + 1) * (l + 1);
        for (o, v) in out.values_mut()[range.clone()].iter_mut().zip(&f.values()[range]) {
            *o = v * w;
        }
    }
    out
}

/// Wavelet analysis. With `multires` each `w_j` is stored at its minimal
/// band-limit `L_j`; otherwise at `L`. The scaling part is always at `L0`.
pub fn analyze(f: &HarmonicCoefficients, bank: &FilterBank, multires: bool) -> Result<WaveletCoefficients> {
    if f.bandlimit() != bank.bandlimit() {
        return Err(Error::Dimension(format!(
            "signal band-limit {} differs from bank band-limit {}",
            f.bandlimit(),
            bank.bandlimit()
        )));
    }
    let scaling = axisym_convolve(f, bank.phi(), Some(bank.scaling_bandlimit()));
    let wavelets = bank
        .scales()
        .map(|j| {
            let cap = multires.then(|| bank.wavelet_bandlimit(j));
            (j, axisym_convolve(f, bank.psi(j), cap))
        })
        .collect();
    Ok(WaveletCoefficients {
        scaling,
        wavelets,
        multires,
    })
}

/// Inverse of [`analyze`]: returns coefficients at the bank band-limit.
pub fn synthesize(wc: &WaveletCoefficients, bank: &FilterBank) -> Result<HarmonicCoefficients> {
    let keys: Vec<usize> = wc.wavelets.keys().copied().collect();
    let expected: Vec<usize> = bank.scales().collect();
    if keys != expected {
        return Err(Error::Incompatible(format!(
            "wavelet scales {keys:?} do not match bank scales {expected:?}"
        )));
    }
    let bl = bank.bandlimit();
    let parts = std::iter::once((bank.phi(), &wc.scaling)).chain(wc.wavelets.iter().map(|(j, w)| (bank.psi(*j), w)));
    let mut out = HarmonicCoefficients::zeros(bl, true);
    let mut real = true;
    for (kernel, w) in parts {
        if w.bandlimit() > bl {
            return Err(Error::Incompatible(format!(
                "coefficients at band-limit {} exceed bank band-limit {bl}",
                w.bandlimit()
            )));
        }
        real &= w.is_real();
        for (l, &k) in kernel.iter().enumerate().take(w.bandlimit()) {
            let g = (4.0 * PI / (2 * l + 1) as f64).sqrt() * k;
            if g == 0.0 {
                continue;
            }
            let range = l * l..(l + 1) * (l + 1);
            for (o, v) in out.values_mut()[range.clone()].iter_mut().zip(&w.values()[range]) {
                *o += v * g;
            }
        }
    }
    out.set_real(real);
    Ok(out)
}

/// A zero `WaveletCoefficients` laid out like [`analyze`] output.
pub fn zero_coefficients(bank: &FilterBank, multires: bool) -> WaveletCoefficients {
    WaveletCoefficients {
        scaling: HarmonicCoefficients::zeros(bank.scaling_bandlimit(), true),
        wavelets: bank
            .scales()
            .map(|j| {
                let bl = if multires {
                    bank.wavelet_bandlimit(j)
                } else {
                    bank.bandlimit()
                };
                (j, HarmonicCoefficients::zeros(bl, true))
            })
            .collect(),
        multires,
    }
}
