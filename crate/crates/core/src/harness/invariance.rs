use rayon::prelude::*;

use super::median;
use super::output::{num, CsvTable};
use crate::error::{Error, Result};
use crate::scattering::{enumerate_paths, scattering_distance, scattering_network, PathPolicy, ScatteringOptions};
use crate::sht::{random_bandlimited, rotate, sample_uniform_rotation, EulerAngles};
use crate::wavelets::{build_filter_bank, KernelConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceConfig {
    pub bandlimit: usize,
    pub alpha: f64,
    pub j0_values: Vec<usize>,
    pub depth: usize,
    pub policy: PathPolicy,
    pub n_signals: usize,
    pub n_rotations: usize,
    pub signal_seed: u64,
    pub rotation_seed: u64,
    /// Fixes the rotation angle: each rotation becomes
    /// `Rz(a) Ry(beta) Rz(-a)` with a random azimuth `a`, a turn by `beta`
    /// about a random equatorial axis.
    pub beta: Option<f64>,
    pub options: ScatteringOptions,
}

impl InvarianceConfig {
    /// `L = 64`, depth 2, `J0 in 0..=4`, 2 signals x 5 rotations.
    pub fn desk() -> Self {
        Self {
            bandlimit: 64,
            alpha: 2.0,
            j0_values: (0..=4).collect(),
            depth: 2,
            policy: PathPolicy::Descending,
            n_signals: 2,
            n_rotations: 5,
            signal_seed: 0,
            rotation_seed: 1_000_000,
            beta: None,
            options: ScatteringOptions {
                multires: true,
                oversample: 4,
            },
        }
    }

    pub fn full() -> Self {
        Self {
            n_signals: 10,
            n_rotations: 10,
            ..Self::desk()
        }
    }

    fn rotation(&self, r: u64) -> EulerAngles {
        let rho = sample_uniform_rotation(self.rotation_seed + r);
        match self.beta {
            Some(beta) => EulerAngles::new(rho.alpha, beta, -rho.alpha),
            None => rho,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceRow {
    pub j0: usize,
    pub l0: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub config: InvarianceConfig,
    pub rows: Vec<InvarianceRow>,
}

impl InvarianceReport {
    pub fn to_csv(&self) -> CsvTable {
        let c = &self.config;
        let mut t = CsvTable::new(
            "invariance-sweep",
            &["J0", "L0", "min_error", "median_error", "max_error"],
        );
        t.meta("L", c.bandlimit)
            .meta("alpha", c.alpha)
            .meta("D", c.depth)
            .meta("policy", c.policy)
            .meta("n_signals", c.n_signals)
            .meta("n_rotations", c.n_rotations)
            .meta("signal_seed", c.signal_seed)
            .meta("rotation_seed", c.rotation_seed)
            .meta("beta", c.beta.map_or("uniform".to_string(), |b| b.to_string()))
            .meta("multires", c.options.multires)
            .meta("oversample", c.options.oversample)
            .meta("error", "||S(R f) - S(f)|| / ||S(f)|| over all channels");
        for r in &self.rows {
            t.push_row(vec![
                r.j0.to_string(),
                r.l0.to_string(),
                num(r.min),
                num(r.median),
                num(r.max),
            ]);
        }
        t
    }
}

/// Relative scattering distance between a signal and its rotations, per
/// scaling scale `J0`.
pub fn invariance_vs_scale(config: &InvarianceConfig) -> Result<InvarianceReport> {
    if config.n_signals == 0 || config.n_rotations == 0 || config.j0_values.is_empty() {
        return Err(Error::InvalidConfig(
            "need at least one signal, one rotation and one J0 value".into(),
        ));
    }
    let signals: Vec<_> = (0..config.n_signals as u64)
        .map(|i| random_bandlimited(config.bandlimit, config.signal_seed + i, None))
        .collect::<Result<_>>()?;
    let rotations: Vec<_> = (0..config.n_rotations as u64).map(|r| config.rotation(r)).collect();
    let rotated: Vec<Vec<_>> = signals
        .iter()
        .map(|f| rotations.iter().map(|&rho| rotate(f, rho)).collect())
        .collect();

    let mut rows = Vec::new();
    for &j0 in &config.j0_values {
        let bank = build_filter_bank(&KernelConfig::new(config.bandlimit, config.alpha, j0)?)?;
        let paths = enumerate_paths(j0, bank.j_max(), config.depth as i64, config.policy)?;
        let errors: Vec<Vec<f64>> = signals
            .par_iter()
            .zip(rotated.par_iter())
            .map(|(f, rfs)| -> Result<Vec<f64>> {
                let sf = scattering_network(f, &paths, &bank, config.options)?;
                let norm = sf.norm();
                rfs.par_iter()
                    .map(|rf| {
                        let srf = scattering_network(rf, &paths, &bank, config.options)?;
                        Ok(scattering_distance(&sf, &srf)? / norm)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut all: Vec<f64> = errors.concat();
        all.sort_by(f64::total_cmp);
        rows.push(InvarianceRow {
            j0,
            l0: bank.scaling_bandlimit(),
            min: all[0],
            median: median(&all).unwrap_or(f64::NAN),
            max: all[all.len() - 1],
        });
    }
    Ok(InvarianceReport {
        config: config.clone(),
        rows,
    })
}
