//! Band-limited spherical harmonic analysis on sampling-theorem grids.
//!
//! Harmonic coefficients use the orthonormal basis `Y_lm` with the
//! Condon-Shortley phase and are stored flat at `l^2 + l + m`.

mod grid;
pub mod io;
pub(crate) mod legendre;
mod random;
mod rotation;
mod transform;
pub mod wigner;

pub use grid::{make_grid, SampleGrid, Scheme, SphericalSignal};
pub use random::{random_bandlimited, sample_uniform_rotation};
pub use rotation::{rotate, rotation_matrix};
pub use transform::{
    evaluate_rings, forward_sht, forward_sht_truncated, inverse_sht, power_spectrum, quadrature_norm_sqr,
};

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Flat harmonic index `l^2 + l + m`.
#[inline]
pub fn idx(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Complex harmonic coefficients of a signal band-limited at `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCoefficients {
    bandlimit: usize,
    values: Vec<Complex64>,
    real: bool,
}

impl HarmonicCoefficients {
    pub fn zeros(bandlimit: usize, real: bool) -> Self {
        Self {
            bandlimit,
            values: vec![Complex64::new(0.0, 0.0); bandlimit * bandlimit],
            real,
        }
    }

    pub fn from_values(bandlimit: usize, values: Vec<Complex64>, real: bool) -> Result<Self> {
        if values.len() != bandlimit * bandlimit {
            return Err(Error::Dimension(format!(
                "expected {} coefficients for L = {bandlimit}, got {}",
                bandlimit * bandlimit,
                values.len()
            )));
        }
        Ok(Self {
            bandlimit,
            values,
            real,
        })
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.values[idx(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: Complex64) {
        self.values[idx(l, m)] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Squared norm of the degree-`l` block.
    pub fn degree_norm_sqr(&self, l: usize) -> f64 {
        self.values[l * l..(l + 1) * (l + 1)].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Keeps degrees `l < bandlimit`, zero-padding when growing.
    pub fn with_bandlimit(&self, bandlimit: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); bandlimit * bandlimit];
        let n = values.len().min(self.values.len());
        values[..n].copy_from_slice(&self.values[..n]);
        Self {
            bandlimit,
            values,
            real: self.real,
        }
    }

    /// Euclidean distance between two coefficient sets; the shorter one is
    /// treated as zero-padded.
    pub fn distance(&self, other: &Self) -> f64 {
        let n = self.values.len().max(other.values.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|i| {
                let a = self.values.get(i).copied().unwrap_or(zero);
                let b = other.values.get(i).copied().unwrap_or(zero);
                (a - b).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Largest violation of `f_{l,-m} = (-1)^m conj(f_{lm})`.
    pub fn reality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 0..self.bandlimit {
            for m in 0..=l as i64 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let r = (self.get(l, -m) - self.get(l, m).conj() * sign).norm();
                worst = worst.max(r);
            }
        }
        worst
    }
}

/// Euler angles in the zyz convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// True when `alpha, gamma` lie in `[0, 2pi)` and `beta` in `[0, pi]`.
    pub fn in_canonical_range(&self) -> bool {
        let tau = std::f64::consts::TAU;
        (0.0..tau).contains(&self.alpha)
            && (0.0..tau).contains(&self.gamma)
            && (0.0..=std::f64::consts::PI).contains(&self.beta)
    }
}
