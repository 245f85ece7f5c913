use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use super::median;
use super::output::{num, CsvTable};
use crate::error::{Error, Result};
use crate::scattering::{enumerate_paths, scattering_distance, scattering_network, PathPolicy, ScatteringOptions};
use crate::sht::{
    evaluate_rings, forward_sht, make_grid, random_bandlimited, HarmonicCoefficients, Scheme, SphericalSignal,
};
use crate::wavelets::{build_filter_bank, KernelConfig};

/// Families of deformations `w -> zeta_eps(w)` of the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffeoKind {
    /// `theta' = theta + (eps/2) sin 2theta`, `phi' = phi + eps sin^2 theta`:
    /// a colatitude squeeze plus a latitude-dependent azimuthal shear,
    /// fixing both poles. A bijection iff `|eps| < 1`.
    Smooth,
    /// `phi' = phi + eps`, an isometry for every `eps`.
    ZRotation,
}

impl DiffeoKind {
    pub fn name(self) -> &'static str {
        match self {
            DiffeoKind::Smooth => "smooth",
            DiffeoKind::ZRotation => "z-rotation",
        }
    }
}

impl fmt::Display for DiffeoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DiffeoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(DiffeoKind::Smooth),
            "z-rotation" | "rotation" => Ok(DiffeoKind::ZRotation),
            other => Err(Error::Usage(format!("unknown deformation '{other}'"))),
        }
    }
}

/// A member of a [`DiffeoKind`] family with amplitude `epsilon` (radians).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffeoField {
    kind: DiffeoKind,
    epsilon: f64,
}

impl DiffeoField {
    pub fn new(kind: DiffeoKind, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("amplitude {epsilon} is not finite")));
        }
        if kind == DiffeoKind::Smooth && epsilon.abs() >= 1.0 {
            return Err(Error::RejectedConfiguration(format!(
                "smooth deformation with |eps| = {} >= 1 folds the colatitude map",
                epsilon.abs()
            )));
        }
        Ok(Self { kind, epsilon })
    }

    pub fn kind(&self) -> DiffeoKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Image `(theta', phi')` of `(theta, phi)`.
    pub fn map(&self, theta: f64, phi: f64) -> (f64, f64) {
        let e = self.epsilon;
        match self.kind {
            DiffeoKind::Smooth => (theta + 0.5 * e * (2.0 * theta).sin(), phi + e * theta.sin().powi(2)),
            DiffeoKind::ZRotation => (theta, phi + e),
        }
    }

    /// Geodesic distance between a point at colatitude `theta` and its
    /// image; independent of longitude.
    pub fn displacement(&self, theta: f64) -> f64 {
        let (t2, p2) = self.map(theta, 0.0);
        geodesic(theta, 0.0, t2, p2)
    }

    /// Realized `sup_w d(w, zeta(w))`, sampled on 4097 colatitudes.
    pub fn norm_inf(&self) -> f64 {
        let n = 4096;
        (0..=n)
            .map(|i| self.displacement(PI * i as f64 / n as f64))
            .fold(0.0, f64::max)
    }

    /// Analytic upper bound on [`norm_inf`](Self::norm_inf).
    pub fn bound(&self) -> f64 {
        let e = self.epsilon.abs();
        match self.kind {
            DiffeoKind::Smooth => 1.5 * e,
            DiffeoKind::ZRotation => e.min(PI),
        }
    }

    /// Whether distinct rings of `thetas` stay distinct and ordered.
    pub fn preserves_rings(&self, thetas: &[f64]) -> bool {
        let mapped: Vec<f64> = thetas.iter().map(|&t| self.map(t, 0.0).0).collect();
        mapped.windows(2).all(|w| w[0] < w[1]) && mapped.iter().all(|t| (0.0..=PI).contains(t))
    }

    /// `g(w) = f(zeta(w))`: the band-limited `f` is evaluated exactly at the
    /// displaced MW sample points and `g` is re-projected at the band-limit
    /// of `f`, discarding the content the deformation pushes above it.
    pub fn deform(&self, f: &HarmonicCoefficients) -> Result<HarmonicCoefficients> {
        let grid = make_grid(f.bandlimit(), Scheme::Mw)?;
        if !self.preserves_rings(grid.thetas()) {
            return Err(Error::RejectedConfiguration(format!(
                "{} deformation with eps = {} is not injective on the sample grid",
                self.kind, self.epsilon
            )));
        }
        let (thetas, shifts): (Vec<f64>, Vec<f64>) = grid
            .thetas()
            .iter()
            .map(|&t| {
                let (t2, p2) = self.map(t, 0.0);
                (t2, p2)
            })
            .unzip();
        let samples = evaluate_rings(f, &thetas, grid.n_phi(), &shifts)?;
        let mut g = forward_sht(&SphericalSignal::new(grid, samples)?)?;
        g.set_real(f.is_real());
        Ok(g)
    }
}

fn geodesic(t1: f64, p1: f64, t2: f64, p2: f64) -> f64 {
    let v = |t: f64, p: f64| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
    let (a, b) = (v(t1, p1), v(t2, p2));
    let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
    2.0 * (0.5 * chord).min(1.0).asin()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoConfig {
    pub bandlimit: usize,
    pub alpha: f64,
    pub j0: usize,
    pub depth: usize,
    pub policy: PathPolicy,
    pub kind: DiffeoKind,
    pub epsilons: Vec<f64>,
    pub n_signals: usize,
    pub seed: u64,
    pub options: ScatteringOptions,
}

impl DiffeoConfig {
    /// `(64, 2, J0 = 2)`, descending depth 2, smooth field,
    /// `eps in {0, 0.05, 0.1, 0.2, 0.4}`, 3 signals.
    pub fn desk() -> Self {
        Self {
            bandlimit: 64,
            alpha: 2.0,
            j0: 2,
            depth: 2,
            policy: PathPolicy::Descending,
            kind: DiffeoKind::Smooth,
            epsilons: vec![0.0, 0.05, 0.1, 0.2, 0.4],
            n_signals: 3,
            seed: 0,
            options: ScatteringOptions {
                multires: true,
                oversample: 4,
            },
        }
    }

    pub fn full() -> Self {
        Self {
            n_signals: 20,
            ..Self::desk()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoRow {
    pub epsilon: f64,
    pub norm_inf: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffeoReport {
    pub config: DiffeoConfig,
    pub rows: Vec<DiffeoRow>,
}

impl DiffeoReport {
    pub fn to_csv(&self) -> CsvTable {
        let c = &self.config;
        let mut t = CsvTable::new(
            "diffeo-probe",
            &["epsilon", "norm_inf", "min_distance", "median_distance", "max_distance"],
        );
        t.meta("L", c.bandlimit)
            .meta("alpha", c.alpha)
            .meta("J0", c.j0)
            .meta("D", c.depth)
            .meta("policy", c.policy)
            .meta("field", c.kind)
            .meta("n_signals", c.n_signals)
            .meta("seed", c.seed)
            .meta("multires", c.options.multires)
            .meta("oversample", c.options.oversample)
            .meta("distance", "||S(f o zeta) - S(f)|| / ||S(f)||")
            .meta(
                "resampling",
                "approximate: exact evaluation of f at displaced MW samples, deformed signal re-projected at L",
            );
        for r in &self.rows {
            t.push_row(vec![
                num(r.epsilon),
                num(r.norm_inf),
                num(r.min),
                num(r.median),
                num(r.max),
            ]);
        }
        t
    }
}

/// Relative scattering distance between signals and their deformations
/// over an amplitude sweep.
pub fn diffeo_stability_probe(config: &DiffeoConfig) -> Result<DiffeoReport> {
    if config.n_signals == 0 || config.epsilons.is_empty() {
        return Err(Error::InvalidConfig(
            "need at least one signal and one amplitude".into(),
        ));
    }
    let fields: Vec<DiffeoField> = config
        .epsilons
        .iter()
        .map(|&e| DiffeoField::new(config.kind, e))
        .collect::<Result<_>>()?;
    let bank = build_filter_bank(&KernelConfig::new(config.bandlimit, config.alpha, config.j0)?)?;
    let paths = enumerate_paths(config.j0, bank.j_max(), config.depth as i64, config.policy)?;
    let per_signal: Vec<Vec<f64>> = (0..config.n_signals as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let f = random_bandlimited(config.bandlimit, config.seed + i, None)?;
            let sf = scattering_network(&f, &paths, &bank, config.options)?;
            let norm = sf.norm();
            fields
                .par_iter()
                .map(|z| {
                    let sg = scattering_network(&z.deform(&f)?, &paths, &bank, config.options)?;
                    Ok(scattering_distance(&sf, &sg)? / norm)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows = fields
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let mut d: Vec<f64> = per_signal.iter().map(|s| s[k]).collect();
            d.sort_by(f64::total_cmp);
            DiffeoRow {
                epsilon: z.epsilon(),
                norm_inf: z.norm_inf(),
                min: d[0],
                median: median(&d).unwrap_or(f64::NAN),
                max: d[d.len() - 1],
            }
        })
        .collect();
    Ok(DiffeoReport {
        config: config.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::{rotate, EulerAngles};

    #[test]
    fn smooth_field_injectivity() {
        assert!(DiffeoField::new(DiffeoKind::Smooth, 0.99).is_ok());
        assert!(matches!(
            DiffeoField::new(DiffeoKind::Smooth, 1.0),
            Err(Error::RejectedConfiguration(_))
        ));
        assert!(matches!(
            DiffeoField::new(DiffeoKind::Smooth, -1.5),
            Err(Error::RejectedConfiguration(_))
        ));
        assert!(DiffeoField::new(DiffeoKind::ZRotation, 3.0).is_ok());
        assert!(DiffeoField::new(DiffeoKind::Smooth, f64::NAN).is_err());
    }

    #[test]
    fn poles_are_fixed_and_norm_within_bound() {
        for e in [0.0, 0.1, 0.5, 0.9] {
            let z = DiffeoField::new(DiffeoKind::Smooth, e).unwrap();
            assert_eq!(z.map(0.0, 1.0).0, 0.0);
            assert!((z.map(PI, 1.0).0 - PI).abs() < 1e-15);
            assert!(z.norm_inf() <= z.bound() + 1e-15);
            assert!(z.preserves_rings(make_grid(32, Scheme::Mw).unwrap().thetas()));
        }
        let r = DiffeoField::new(DiffeoKind::ZRotation, 0.3).unwrap();
        assert!((r.norm_inf() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn identity_and_rotation_resampling() {
        let f = random_bandlimited(16, 2, None).unwrap();
        let id = DiffeoField::new(DiffeoKind::Smooth, 0.0).unwrap();
        assert!(id.deform(&f).unwrap().distance(&f) <= 1e-12 * f.norm());
        // phi' = phi + eps is the z-rotation by -eps, exact on band-limited input
        let z = DiffeoField::new(DiffeoKind::ZRotation, 0.7).unwrap();
        let want = rotate(&f, EulerAngles::new(-0.7, 0.0, 0.0));
        assert!(z.deform(&f).unwrap().distance(&want) <= 1e-12 * f.norm());
    }

    #[test]
    fn small_sweep_is_monotone() {
        let cfg = DiffeoConfig {
            bandlimit: 16,
            j0: 1,
            n_signals: 2,
            epsilons: vec![0.0, 0.1, 0.3],
            options: ScatteringOptions::default(),
            ..DiffeoConfig::desk()
        };
        let r = diffeo_stability_probe(&cfg).unwrap();
        assert!(r.rows[0].max <= 1e-9);
        assert!(r.rows.windows(2).all(|w| w[0].median <= w[1].median));
        let t = r.to_csv();
        assert!(t.meta_value("resampling").unwrap().starts_with("approximate"));
    }

    #[test]
    fn rejected_amplitude_fails_the_sweep() {
        let cfg = DiffeoConfig {
            bandlimit: 16,
            j0: 1,
            epsilons: vec![0.0, 1.2],
            ..DiffeoConfig::desk()
        };
        assert!(matches!(
            diffeo_stability_probe(&cfg),
            Err(Error::RejectedConfiguration(_))
        ));
    }
}
