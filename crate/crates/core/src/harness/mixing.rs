use rayon::prelude::*;

use super::output::{num, CsvTable};
use crate::error::{Error, Result};
use crate::sht::{forward_sht, inverse_sht, make_grid, power_spectrum, random_bandlimited, Scheme};
use crate::wavelets::{axisym_convolve, build_filter_bank, KernelConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct PowerMixingConfig {
    pub bandlimit: usize,
    pub alpha: f64,
    pub j0: usize,
    pub n_signals: usize,
    /// Signal `i` is drawn with seed `seed + i`.
    pub seed: u64,
    /// Modulus grid band-limit factor, as in the scattering propagator.
    pub oversample: usize,
}

impl PowerMixingConfig {
    /// `(128, 2, 2)` with 20 signals.
    pub fn desk() -> Self {
        Self {
            bandlimit: 128,
            alpha: 2.0,
            j0: 2,
            n_signals: 20,
            seed: 0,
            oversample: 1,
        }
    }

    /// `(128, 2, 2)` with 100 signals.
    pub fn full() -> Self {
        Self {
            n_signals: 100,
            ..Self::desk()
        }
    }
}

/// Mean power spectra of full-resolution wavelet coefficients `w_j` and of
/// `|w_j|`, one pair per scale.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerMixingReport {
    pub config: PowerMixingConfig,
    pub scales: Vec<usize>,
    pub before: Vec<Vec<f64>>,
    pub after: Vec<Vec<f64>>,
}

/// `sum_l l (2l+1) C_l / sum_l (2l+1) C_l`; `NaN` for a zero spectrum.
pub fn spectral_centroid(spectrum: &[f64]) -> f64 {
    let (num, den) = spectrum.iter().enumerate().fold((0.0, 0.0), |(n, d), (l, c)| {
        let w = (2 * l + 1) as f64 * c;
        (n + l as f64 * w, d + w)
    });
    num / den
}

fn energy<'a>(spectrum: &'a [f64], keep: impl Fn(usize) -> bool + 'a) -> f64 {
    spectrum
        .iter()
        .enumerate()
        .filter(|(l, _)| keep(*l))
        .map(|(l, c)| (2 * l + 1) as f64 * c)
        .sum()
}

impl PowerMixingReport {
    fn position(&self, j: usize) -> Option<usize> {
        self.scales.iter().position(|&s| s == j)
    }

    /// Open support `(alpha^{j-1}, alpha^{j+1})` of wavelet `j`.
    pub fn support(&self, j: usize) -> (f64, f64) {
        let a = self.config.alpha;
        (a.powi(j as i32 - 1), a.powi(j as i32 + 1))
    }

    /// Fraction of the energy of `w_j` outside the wavelet support.
    pub fn leakage_before(&self, j: usize) -> Option<f64> {
        let s = &self.before[self.position(j)?];
        let (lo, hi) = self.support(j);
        Some(energy(s, move |l| (l as f64) <= lo || (l as f64) >= hi) / energy(s, |_| true))
    }

    /// Energy of `|w_j|` at degrees `l < alpha^{j-1}`.
    pub fn low_degree_energy_after(&self, j: usize) -> Option<f64> {
        let s = &self.after[self.position(j)?];
        let (lo, _) = self.support(j);
        Some(energy(s, move |l| (l as f64) < lo))
    }

    /// `(centroid before, centroid after)` for scale `j`.
    pub fn centroids(&self, j: usize) -> Option<(f64, f64)> {
        let k = self.position(j)?;
        Some((spectral_centroid(&self.before[k]), spectral_centroid(&self.after[k])))
    }

    pub fn to_csv(&self) -> CsvTable {
        let c = &self.config;
        let mut cols = vec!["l".to_string()];
        cols.extend(self.scales.iter().map(|j| format!("before_j{j}")));
        cols.extend(self.scales.iter().map(|j| format!("after_j{j}")));
        let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        let mut t = CsvTable::new("power-mixing", &col_refs);
        t.meta("L", c.bandlimit)
            .meta("alpha", c.alpha)
            .meta("J0", c.j0)
            .meta("n_signals", c.n_signals)
            .meta("seed", c.seed)
            .meta("multires", false)
            .meta("oversample", c.oversample)
            .meta("spectrum", "mean over signals of C_l = sum_m |f_lm|^2 / (2l+1)");
        for l in 0..c.bandlimit {
            let mut row = vec![l.to_string()];
            row.extend(self.before.iter().map(|s| num(s[l])));
            row.extend(self.after.iter().map(|s| num(s[l])));
            t.push_row(row);
        }
        t
    }
}

/// Per-scale spectra of one signal before and after the modulus.
type Spectra = (Vec<Vec<f64>>, Vec<Vec<f64>>);

pub fn power_mixing_experiment(config: &PowerMixingConfig) -> Result<PowerMixingReport> {
    if config.n_signals == 0 || config.oversample == 0 {
        return Err(Error::InvalidConfig(
            "need at least one signal and oversample >= 1".into(),
        ));
    }
    let bank = build_filter_bank(&KernelConfig::new(config.bandlimit, config.alpha, config.j0)?)?;
    let scales: Vec<usize> = bank.scales().collect();
    let grid = make_grid(config.bandlimit * config.oversample, Scheme::Mw)?;
    let per_signal: Vec<Spectra> = (0..config.n_signals as u64)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let f = random_bandlimited(config.bandlimit, config.seed + i, None)?;
            let mut before = Vec::new();
            let mut after = Vec::new();
            for &j in &scales {
                let w = axisym_convolve(&f, bank.psi(j), None);
                before.push(power_spectrum(&w));
                let m = forward_sht(&inverse_sht(&w, &grid)?.modulus())?.with_bandlimit(config.bandlimit);
                after.push(power_spectrum(&m));
            }
            Ok((before, after))
        })
        .collect::<Result<_>>()?;
    let n = config.n_signals as f64;
    let mean = |pick: &dyn Fn(&Spectra) -> &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        let mut acc = vec![vec![0.0; config.bandlimit]; scales.len()];
        for s in &per_signal {
            for (a, spec) in acc.iter_mut().zip(pick(s)) {
                for (x, c) in a.iter_mut().zip(spec) {
                    *x += c / n;
                }
            }
        }
        acc
    };
    Ok(PowerMixingReport {
        config: config.clone(),
        before: mean(&|s| &s.0),
        after: mean(&|s| &s.1),
        scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centroid_examples() {
        assert_eq!(spectral_centroid(&[1.0, 0.0, 0.0]), 0.0);
        assert_eq!(spectral_centroid(&[0.0, 0.0, 2.0]), 2.0);
        // l = 1 carries 3x the weight of l = 0
        assert_eq!(spectral_centroid(&[1.0, 1.0]), 0.75);
        assert!(spectral_centroid(&[0.0, 0.0]).is_nan());
    }

    #[test]
    fn mixing_moves_power_down() {
        let cfg = PowerMixingConfig {
            bandlimit: 32,
            n_signals: 3,
            ..PowerMixingConfig::desk()
        };
        let r = power_mixing_experiment(&cfg).unwrap();
        assert_eq!(r.scales, vec![2, 3, 4, 5]);
        for &j in &r.scales {
            assert!(r.leakage_before(j).unwrap() <= 1e-10);
            assert!(r.low_degree_energy_after(j).unwrap() > 0.0);
            let (b, a) = r.centroids(j).unwrap();
            assert!(a < b, "j = {j}: {a} vs {b}");
        }
        let t = r.to_csv();
        assert_eq!(t.columns.len(), 1 + 2 * 4);
        assert_eq!(t.rows.len(), 32);
        assert_eq!(t.columns[1], "before_j2");
        assert_eq!(t.columns[8], "after_j5");
        assert_eq!(r.leakage_before(9), None);
    }
}
