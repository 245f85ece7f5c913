use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use super::path::{Path, PathPolicy, PathSet};
use crate::error::{Error, Result};
use crate::sht::{forward_sht_truncated, inverse_sht, make_grid, HarmonicCoefficients, Scheme};
use crate::wavelets::{axisym_convolve, FilterBank};

/// Evaluation settings shared by every propagator in a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScatteringOptions {
    /// Store each `|f * psi_j|` at its minimal band-limit `L_j`.
    pub multires: bool,
    /// Integer factor by which the modulus grid band-limit exceeds the
    /// stored band-limit.
    pub oversample: usize,
}

impl Default for ScatteringOptions {
    fn default() -> Self {
        Self {
            multires: true,
            oversample: 1,
        }
    }
}

impl ScatteringOptions {
    pub fn full_resolution() -> Self {
        Self {
            multires: false,
            oversample: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.oversample == 0 {
            return Err(Error::InvalidConfig("oversampling factor must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parameters recorded alongside scattering outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub bandlimit: usize,
    pub alpha: f64,
    pub j0: usize,
    pub depth: usize,
    pub policy: PathPolicy,
    pub multires: bool,
    pub l0: usize,
}

/// One channel `S[p] f` per path, each band-limited at `L0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringCoefficients {
    pub entries: BTreeMap<Path, HarmonicCoefficients>,
    pub provenance: Provenance,
}

impl ScatteringCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `sum_{p : |p| = d} ||S[p] f||^2` for `d = 0..=D`.
    pub fn energy_by_depth(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.provenance.depth + 1];
        for (p, c) in &self.entries {
            out[p.depth()] += c.norm_sqr();
        }
        out
    }
}

/// Scattering propagator `U[j] f = |f * psi_j|`.
///
/// The convolution is stored at `min(L_j, L_f)` in multi-resolution mode
/// (at `L_f` otherwise); the modulus is taken on an MW grid whose
/// band-limit is `oversample` times that and projected back.
pub fn propagate(
    f: &HarmonicCoefficients,
    j: usize,
    bank: &FilterBank,
    opts: ScatteringOptions,
) -> Result<HarmonicCoefficients> {
    opts.validate()?;
    if !bank.contains_scale(j) {
        return Err(Error::InvalidScale {
            scale: j,
            j0: bank.j0(),
            j_max: bank.j_max(),
        });
    }
    if f.bandlimit() > bank.bandlimit() {
        return Err(Error::Dimension(format!(
            "signal band-limit {} exceeds bank band-limit {}",
            f.bandlimit(),
            bank.bandlimit()
        )));
    }
    let out_bl = if opts.multires {
        bank.wavelet_bandlimit(j).min(f.bandlimit())
    } else {
        f.bandlimit()
    };
    let w = axisym_convolve(f, bank.psi(j), Some(out_bl));
    if w.values().iter().all(|c| c.norm_sqr() == 0.0) {
        return Ok(HarmonicCoefficients::zeros(out_bl, true));
    }
    let grid = make_grid(out_bl * opts.oversample, Scheme::Mw)?;
    let modulus = inverse_sht(&w, &grid)?.modulus();
    let mut out = forward_sht_truncated(&modulus, out_bl)?;
    out.set_real(true);
    Ok(out)
}

/// `S[p] f = U[p] f * Phi`, band-limited at `L0`.
pub fn scatter_path(
    f: &HarmonicCoefficients,
    path: &Path,
    bank: &FilterBank,
    opts: ScatteringOptions,
) -> Result<HarmonicCoefficients> {
    let mut u = f.clone();
    for &j in path.scales() {
        u = propagate(&u, j, bank, opts)?;
    }
    Ok(project_scaling(&u, bank))
}

fn project_scaling(u: &HarmonicCoefficients, bank: &FilterBank) -> HarmonicCoefficients {
    let l0 = bank.scaling_bandlimit();
    axisym_convolve(u, bank.phi(), Some(l0)).with_bandlimit(l0)
}

/// Evaluates every path of `paths`, computing each shared prefix once.
/// Prefixes of equal depth are propagated in parallel.
pub fn scattering_network(
    f: &HarmonicCoefficients,
    paths: &PathSet,
    bank: &FilterBank,
    opts: ScatteringOptions,
) -> Result<ScatteringCoefficients> {
    opts.validate()?;
    if f.bandlimit() != bank.bandlimit() {
        return Err(Error::Incompatible(format!(
            "signal band-limit {} differs from bank band-limit {}",
            f.bandlimit(),
            bank.bandlimit()
        )));
    }
    for p in paths.paths() {
        if let Some(&j) = p.scales().iter().find(|j| !bank.contains_scale(**j)) {
            return Err(Error::Incompatible(format!(
                "path {p} uses scale {j} outside the bank range {}..={}",
                bank.j0(),
                bank.j_max()
            )));
        }
    }

    // every prefix needed, grouped by depth
    let mut levels: Vec<BTreeSet<Path>> = vec![BTreeSet::new(); paths.max_depth() + 1];
    for p in paths.paths() {
        for (d, level) in levels.iter_mut().enumerate().take(p.depth() + 1) {
            level.insert(Path::new(&p.scales()[..d]));
        }
    }

    let mut propagated: HashMap<Path, HarmonicCoefficients> = HashMap::new();
    propagated.insert(Path::empty(), f.clone());
    for level in levels.iter().skip(1) {
        let computed: Vec<(Path, HarmonicCoefficients)> = level
            .par_iter()
            .map(|p| {
                let parent = p.parent().expect("non-empty prefix");
                let j = *p.scales().last().expect("non-empty prefix");
                propagate(&propagated[&parent], j, bank, opts).map(|u| (p.clone(), u))
            })
            .collect::<Result<_>>()?;
        propagated.extend(computed);
    }

    let entries = paths
        .paths()
        .par_iter()
        .map(|p| (p.clone(), project_scaling(&propagated[p], bank)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(ScatteringCoefficients {
        entries,
        provenance: Provenance {
            bandlimit: bank.bandlimit(),
            alpha: bank.alpha(),
            j0: bank.j0(),
            depth: paths.max_depth(),
            policy: paths.policy(),
            multires: opts.multires,
            l0: bank.scaling_bandlimit(),
        },
    })
}

/// `sqrt(sum_p ||a[p] - b[p]||^2)` over matching channels.
pub fn scattering_distance(a: &ScatteringCoefficients, b: &ScatteringCoefficients) -> Result<f64> {
    if a.provenance != b.provenance {
        return Err(Error::Incompatible("scattering provenances differ".into()));
    }
    if !a.entries.keys().eq(b.entries.keys()) {
        return Err(Error::Incompatible("scattering path sets differ".into()));
    }
    Ok(a.entries
        .values()
        .zip(b.entries.values())
        .map(|(x, y)| {
            let d = x.distance(y);
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::enumerate_paths;
    use crate::sht::random_bandlimited;
    use crate::wavelets::{build_filter_bank, KernelConfig};
    use num_complex::Complex64;

    fn bank(l: usize, j0: usize) -> FilterBank {
        build_filter_bank(&KernelConfig::new(l, 2.0, j0).unwrap()).unwrap()
    }

    #[test]
    fn propagate_zero_and_out_of_band() {
        let b = bank(32, 1);
        let z = propagate(&HarmonicCoefficients::zeros(32, true), 3, &b, Default::default()).unwrap();
        assert_eq!(z.norm(), 0.0);
        assert_eq!(z.bandlimit(), 16);

        // only l < 2^{j-1} = 4 populated; psi_3 vanishes there
        let f = random_bandlimited(32, 1, None)
            .unwrap()
            .with_bandlimit(4)
            .with_bandlimit(32);
        let u = propagate(&f, 3, &b, Default::default()).unwrap();
        assert_eq!(u.norm(), 0.0);

        assert!(matches!(
            propagate(&f, 9, &b, Default::default()),
            Err(Error::InvalidScale { scale: 9, .. })
        ));
        assert!(propagate(
            &f,
            3,
            &b,
            ScatteringOptions {
                multires: true,
                oversample: 0
            }
        )
        .is_err());
    }

    #[test]
    fn propagate_output_is_real() {
        let b = bank(32, 1);
        let f = random_bandlimited(32, 2, None).unwrap();
        let u = propagate(&f, 4, &b, Default::default()).unwrap();
        assert!(u.is_real());
        assert!(u.reality_residual() < 1e-12);
        let full = propagate(&f, 4, &b, ScatteringOptions::full_resolution()).unwrap();
        assert_eq!(full.bandlimit(), 32);
    }

    #[test]
    fn empty_path_on_constant() {
        let b = bank(16, 2);
        let mut f = HarmonicCoefficients::zeros(16, true);
        let c = 1.7;
        f.set(0, 0, Complex64::new(c * (4.0 * std::f64::consts::PI).sqrt(), 0.0));
        let s = scatter_path(&f, &Path::empty(), &b, Default::default()).unwrap();
        assert_eq!(s.bandlimit(), 4);
        let want = f.get(0, 0) * (4.0 * std::f64::consts::PI).sqrt() * b.phi()[0];
        assert!((s.get(0, 0) - want).norm() < 1e-14);
        assert!(s.values()[1..].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn two_step_path_is_compositional() {
        let b = bank(32, 1);
        let opts = ScatteringOptions::default();
        let f = random_bandlimited(32, 3, None).unwrap();
        let direct = scatter_path(&f, &Path::new([4, 3]), &b, opts).unwrap();
        let u = propagate(&f, 4, &b, opts).unwrap();
        let staged = scatter_path(&u, &Path::new([3]), &b, opts).unwrap();
        assert!(direct.distance(&staged) <= 1e-14 * direct.norm());
    }

    #[test]
    fn network_matches_naive_evaluation() {
        let b = bank(32, 1);
        let paths = enumerate_paths(b.j0(), b.j_max(), 2, PathPolicy::General).unwrap();
        let f = random_bandlimited(32, 5, None).unwrap();
        for opts in [ScatteringOptions::default(), ScatteringOptions::full_resolution()] {
            let net = scattering_network(&f, &paths, &b, opts).unwrap();
            assert_eq!(net.entries.len(), paths.len());
            for p in paths.paths() {
                let naive = scatter_path(&f, p, &b, opts).unwrap();
                let got = &net.entries[p];
                assert_eq!(got.bandlimit(), b.scaling_bandlimit());
                assert!(got.distance(&naive) <= 1e-12 * naive.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn depth_zero_network() {
        let b = bank(16, 1);
        let paths = enumerate_paths(b.j0(), b.j_max(), 0, PathPolicy::Descending).unwrap();
        let f = random_bandlimited(16, 5, None).unwrap();
        let net = scattering_network(&f, &paths, &b, Default::default()).unwrap();
        assert_eq!(net.entries.len(), 1);
        let want = scatter_path(&f, &Path::empty(), &b, Default::default()).unwrap();
        assert_eq!(net.entries[&Path::empty()], want);
    }

    #[test]
    fn incompatible_inputs() {
        let b = bank(16, 1);
        let paths = enumerate_paths(0, b.j_max(), 1, PathPolicy::General).unwrap();
        let f = random_bandlimited(16, 5, None).unwrap();
        assert!(matches!(
            scattering_network(&f, &paths, &b, Default::default()),
            Err(Error::Incompatible(_))
        ));
        let g = random_bandlimited(8, 5, None).unwrap();
        let ok_paths = enumerate_paths(1, b.j_max(), 1, PathPolicy::General).unwrap();
        assert!(scattering_network(&g, &ok_paths, &b, Default::default()).is_err());
    }

    #[test]
    fn distance_properties() {
        let b = bank(16, 1);
        let paths = enumerate_paths(1, b.j_max(), 2, PathPolicy::Descending).unwrap();
        let opts = ScatteringOptions::default();
        let nets: Vec<_> = (0..3)
            .map(|s| scattering_network(&random_bandlimited(16, s, None).unwrap(), &paths, &b, opts).unwrap())
            .collect();
        assert_eq!(scattering_distance(&nets[0], &nets[0]).unwrap(), 0.0);
        let zero = scattering_network(&HarmonicCoefficients::zeros(16, true), &paths, &b, opts).unwrap();
        assert!((scattering_distance(&nets[1], &zero).unwrap() - nets[1].norm()).abs() < 1e-12);
        let ab = scattering_distance(&nets[0], &nets[1]).unwrap();
        let bc = scattering_distance(&nets[1], &nets[2]).unwrap();
        let ac = scattering_distance(&nets[0], &nets[2]).unwrap();
        assert!(ac <= ab + bc + 1e-12);

        let other = enumerate_paths(1, b.j_max(), 1, PathPolicy::Descending).unwrap();
        let short = scattering_network(&random_bandlimited(16, 0, None).unwrap(), &other, &b, opts).unwrap();
        assert!(scattering_distance(&nets[0], &short).is_err());
    }
}
