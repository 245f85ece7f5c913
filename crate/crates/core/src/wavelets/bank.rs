use std::f64::consts::PI;
use std::fmt::Write as _;

use super::kernel::{ceil_pow, Kernel, KernelConfig};
use crate::error::{Error, Result};

/// Axisymmetric harmonic kernels `(psi_j)_l0` for `J0 <= j <= J` and the
/// scaling kernel `Phi_l0`, each tabulated for `0 <= l < L`.
#[derive(Clone, Debug)]
pub struct FilterBank {
    config: KernelConfig,
    j_max: usize,
    psi: Vec<Vec<f64>>,
    phi: Vec<f64>,
}

/// Builds the scale-discretized bank for `config`.
pub fn build_filter_bank(config: &KernelConfig) -> Result<FilterBank> {
    config.validate()?;
    let kernel = Kernel::from_config(config)?;
    let alpha = config.alpha;
    let bl = config.bandlimit;
    let j_max = config.max_scale();
    let norm: Vec<f64> = (0..bl).map(|l| ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()).collect();
    let psi = (config.j0..=j_max)
        .map(|j| {
            let scale = alpha.powi(j as i32);
            (0..bl).map(|l| norm[l] * kernel.kappa(l as f64 / scale)).collect()
        })
        .collect();
    let scale0 = alpha.powi(config.j0 as i32);
    let phi = (0..bl).map(|l| norm[l] * kernel.k(l as f64 / scale0).sqrt()).collect();
    Ok(FilterBank {
        config: config.clone(),
        j_max,
        psi,
        phi,
    })
}

impl FilterBank {
    /// Assembles a bank from explicit kernels, e.g. to study corrupted
    /// tilings. `psi` holds one kernel per scale `J0..=J`.
    pub fn from_kernels(config: KernelConfig, psi: Vec<Vec<f64>>, phi: Vec<f64>) -> Result<Self> {
        config.validate()?;
        let j_max = config.max_scale();
        if psi.len() != j_max - config.j0 + 1 {
            return Err(Error::Incompatible(format!(
                "expected {} wavelet kernels, got {}",
                j_max - config.j0 + 1,
                psi.len()
            )));
        }
        let bl = config.bandlimit;
        if phi.len() != bl || psi.iter().any(|k| k.len() != bl) {
            return Err(Error::Dimension(format!("kernels must have length L = {bl}")));
        }
        Ok(Self {
            config,
            j_max,
            psi,
            phi,
        })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.config
    }

    pub fn bandlimit(&self) -> usize {
        self.config.bandlimit
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    pub fn j0(&self) -> usize {
        self.config.j0
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<usize> {
        self.config.j0..=self.j_max
    }

    pub fn contains_scale(&self, j: usize) -> bool {
        self.scales().contains(&j)
    }

    pub fn psi(&self, j: usize) -> &[f64] {
        &self.psi[j - self.config.j0]
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Storage band-limit `L_j = min(ceil(alpha^{j+1}), L)`.
    pub fn wavelet_bandlimit(&self, j: usize) -> usize {
        ceil_pow(self.config.alpha, j + 1).min(self.config.bandlimit)
    }

    /// Scaling band-limit `L0 = min(ceil(alpha^{J0}), L)`.
    pub fn scaling_bandlimit(&self) -> usize {
        ceil_pow(self.config.alpha, self.config.j0).min(self.config.bandlimit)
    }

    /// Per-degree tiling sum `(4pi/(2l+1)) [Phi_l^2 + sum_j psi_jl^2]`.
    pub fn tiling(&self) -> Vec<f64> {
        (0..self.bandlimit())
            .map(|l| {
                let w = 4.0 * PI / (2 * l + 1) as f64;
                let s: f64 = self.phi[l] * self.phi[l] + self.psi.iter().map(|k| k[l] * k[l]).sum::<f64>();
                w * s
            })
            .collect()
    }

    /// CSV with columns `l, Phi_l, psi_{J0,l}, ..., psi_{J,l}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,phi");
        for j in self.scales() {
            let _ = write!(out, ",psi_{j}");
        }
        out.push('\n');
        for l in 0..self.bandlimit() {
            let _ = write!(out, "{l},{:e}", self.phi[l]);
            for k in &self.psi {
                let _ = write!(out, ",{:e}", k[l]);
            }
            out.push('\n');
        }
        out
    }
}

/// Largest deviation of the tiling sum from unity over `0 <= l < L`.
pub fn check_admissibility(bank: &FilterBank) -> f64 {
    bank.tiling().into_iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
}
