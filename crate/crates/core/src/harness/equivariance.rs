use rayon::prelude::*;

use super::median;
use super::output::{num, CsvTable};
use crate::error::{Error, Result};
use crate::scattering::{enumerate_paths, scattering_network, PathPolicy, ScatteringOptions};
use crate::sht::{random_bandlimited, rotate, sample_uniform_rotation};
use crate::wavelets::{build_filter_bank, FilterBank, KernelConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceConfig {
    pub bandlimit: usize,
    pub alpha: f64,
    pub l0: usize,
    pub depth: usize,
    pub policy: PathPolicy,
    pub n_signals: usize,
    pub n_rotations: usize,
    /// Signal `i` is drawn with seed `signal_seed + i`.
    pub signal_seed: u64,
    /// Rotation `r` is drawn with seed `rotation_seed + r`.
    pub rotation_seed: u64,
    pub options: ScatteringOptions,
}

impl EquivarianceConfig {
    /// `(128, 2, L0 = 32)`, descending depth 3, 10 signals x 10 rotations.
    pub fn desk() -> Self {
        Self {
            bandlimit: 128,
            alpha: 2.0,
            l0: 32,
            depth: 3,
            policy: PathPolicy::Descending,
            n_signals: 10,
            n_rotations: 10,
            signal_seed: 0,
            rotation_seed: 1_000_000,
            options: ScatteringOptions {
                multires: true,
                oversample: 4,
            },
        }
    }

    /// `(256, 2, L0 = 32)` with 100 signals x 100 rotations.
    pub fn full() -> Self {
        Self {
            bandlimit: 256,
            n_signals: 100,
            n_rotations: 100,
            ..Self::desk()
        }
    }

    pub fn bank(&self) -> Result<FilterBank> {
        build_filter_bank(&KernelConfig::from_scaling_bandlimit(
            self.bandlimit,
            self.alpha,
            self.l0,
        )?)
    }

    fn validate(&self) -> Result<()> {
        if self.n_signals == 0 || self.n_rotations == 0 {
            return Err(Error::InvalidConfig("need at least one signal and one rotation".into()));
        }
        Ok(())
    }
}

/// Aggregates over every (signal, rotation, path) triple of one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthRow {
    pub depth: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    /// Median over signals of `sum_{|p| = d} ||S[p] f||^2 / ||f||^2`.
    pub median_energy: f64,
    /// Number of relative errors aggregated.
    pub samples: usize,
    /// Triples skipped because the rotated reference channel is zero.
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceReport {
    pub config: EquivarianceConfig,
    pub rows: Vec<DepthRow>,
}

impl EquivarianceReport {
    pub fn row(&self, depth: usize) -> Option<&DepthRow> {
        self.rows.iter().find(|r| r.depth == depth)
    }

    pub fn to_csv(&self) -> CsvTable {
        let c = &self.config;
        let mut t = CsvTable::new(
            "equivariance",
            &[
                "depth",
                "min_error",
                "median_error",
                "max_error",
                "median_energy",
                "samples",
                "excluded",
            ],
        );
        t.meta("L", c.bandlimit)
            .meta("alpha", c.alpha)
            .meta("L0", c.l0)
            .meta("D", c.depth)
            .meta("policy", c.policy)
            .meta("n_signals", c.n_signals)
            .meta("n_rotations", c.n_rotations)
            .meta("signal_seed", c.signal_seed)
            .meta("rotation_seed", c.rotation_seed)
            .meta("multires", c.options.multires)
            .meta("oversample", c.options.oversample)
            .meta(
                "error",
                "||S[p](R f) - R(S[p] f)|| / ||R(S[p] f)||, rotation applied at L0",
            )
            .meta(
                "energy",
                "sum over depth-d paths of ||S[p] f||^2 / ||f||^2, median over signals",
            );
        for r in &self.rows {
            t.push_row(vec![
                r.depth.to_string(),
                num(r.min),
                num(r.median),
                num(r.max),
                num(r.median_energy),
                r.samples.to_string(),
                r.excluded.to_string(),
            ]);
        }
        t
    }
}

struct SignalResult {
    /// relative errors per depth
    errors: Vec<Vec<f64>>,
    excluded: Vec<usize>,
    energy: Vec<f64>,
}

/// Per-depth relative equivariance error of the scattering network under
/// random rotations.
pub fn equivariance_experiment(config: &EquivarianceConfig) -> Result<EquivarianceReport> {
    config.validate()?;
    let bank = config.bank()?;
    let paths = enumerate_paths(bank.j0(), bank.j_max(), config.depth as i64, config.policy)?;
    let rotations: Vec<_> = (0..config.n_rotations as u64)
        .map(|r| sample_uniform_rotation(config.rotation_seed + r))
        .collect();
    let depths = config.depth + 1;

    let per_signal: Vec<SignalResult> = (0..config.n_signals as u64)
        .into_par_iter()
        .map(|i| -> Result<SignalResult> {
            let f = random_bandlimited(config.bandlimit, config.signal_seed + i, None)?;
            let sf = scattering_network(&f, &paths, &bank, config.options)?;
            let f_energy = f.norm_sqr();
            let energy = sf
                .energy_by_depth()
                .into_iter()
                .map(|e| if f_energy > 0.0 { e / f_energy } else { 0.0 })
                .collect();
            let per_rotation: Vec<(Vec<Vec<f64>>, Vec<usize>)> = rotations
                .par_iter()
                .map(|&rho| -> Result<_> {
                    let srf = scattering_network(&rotate(&f, rho), &paths, &bank, config.options)?;
                    let mut errors = vec![Vec::new(); depths];
                    let mut excluded = vec![0; depths];
                    for (p, c) in &sf.entries {
                        let reference = rotate(c, rho);
                        let n = reference.norm();
                        if n == 0.0 {
                            excluded[p.depth()] += 1;
                        } else {
                            errors[p.depth()].push(srf.entries[p].distance(&reference) / n);
                        }
                    }
                    Ok((errors, excluded))
                })
                .collect::<Result<_>>()?;
            let mut errors = vec![Vec::new(); depths];
            let mut excluded = vec![0; depths];
            for (e, x) in per_rotation {
                for d in 0..depths {
                    errors[d].extend(e[d].iter().copied());
                    excluded[d] += x[d];
                }
            }
            Ok(SignalResult {
                errors,
                excluded,
                energy,
            })
        })
        .collect::<Result<_>>()?;

    let rows = (0..depths)
        .map(|d| {
            let mut errs: Vec<f64> = per_signal.iter().flat_map(|s| s.errors[d].iter().copied()).collect();
            errs.sort_by(f64::total_cmp);
            let energies: Vec<f64> = per_signal.iter().map(|s| s.energy[d]).collect();
            DepthRow {
                depth: d,
                min: errs.first().copied().unwrap_or(f64::NAN),
                median: median(&errs).unwrap_or(f64::NAN),
                max: errs.last().copied().unwrap_or(f64::NAN),
                median_energy: median(&energies).unwrap_or(f64::NAN),
                samples: errs.len(),
                excluded: per_signal.iter().map(|s| s.excluded[d]).sum(),
            }
        })
        .collect();
    Ok(EquivarianceReport {
        config: config.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EquivarianceConfig {
        EquivarianceConfig {
            bandlimit: 16,
            l0: 4,
            depth: 2,
            n_signals: 2,
            n_rotations: 2,
            options: ScatteringOptions::default(),
            ..EquivarianceConfig::desk()
        }
    }

    #[test]
    fn rows_cover_every_depth_and_are_ordered() {
        let r = equivariance_experiment(&small()).unwrap();
        assert_eq!(r.rows.len(), 3);
        for row in &r.rows {
            assert!(row.min >= 0.0 && row.min <= row.median && row.median <= row.max);
            assert!(row.median_energy >= 0.0);
            assert_eq!(row.excluded, 0);
        }
        assert!(r.row(0).unwrap().max <= 1e-6);
        // 2 signals x 2 rotations x 1 empty path
        assert_eq!(r.row(0).unwrap().samples, 4);
    }

    #[test]
    fn csv_echoes_config() {
        let r = equivariance_experiment(&small()).unwrap();
        let t = r.to_csv();
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.meta_value("L0"), Some("4"));
        assert_eq!(t.meta_value("policy"), Some("descending"));
        assert_eq!(t.column("median_error").unwrap()[0], r.rows[0].median);
    }

    #[test]
    fn reproducible() {
        let a = equivariance_experiment(&small()).unwrap().to_csv().render();
        let b = equivariance_experiment(&small()).unwrap().to_csv().render();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_empty_sweeps() {
        let cfg = EquivarianceConfig {
            n_rotations: 0,
            ..small()
        };
        assert!(equivariance_experiment(&cfg).is_err());
    }
}
