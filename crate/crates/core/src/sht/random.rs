use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{EulerAngles, HarmonicCoefficients};
use crate::error::{Error, Result};

/// Gaussian coefficients of a real field. For `m > 0` the real and
/// imaginary parts each have variance `spectrum[l] / 2`, so `E|f_lm|^2 =
/// spectrum[l]`; `m = 0` entries are real with variance `spectrum[l]`.
pub fn random_bandlimited(bandlimit: usize, seed: u64, spectrum: Option<&[f64]>) -> Result<HarmonicCoefficients> {
    if let Some(s) = spectrum {
        if s.len() < bandlimit {
            return Err(Error::InvalidSpectrum(format!(
                "spectrum has {} entries, need {bandlimit}",
                s.len()
            )));
        }
        if let Some((l, v)) = s.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
            return Err(Error::InvalidSpectrum(format!("C_{l} = {v} is negative")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = HarmonicCoefficients::zeros(bandlimit, true);
    for l in 0..bandlimit {
        let var = spectrum.map_or(1.0, |s| s[l]);
        let sd = var.sqrt();
        let half = (var / 2.0).sqrt();
        let g: f64 = rng.sample(StandardNormal);
        out.set(l, 0, Complex64::new(sd * g, 0.0));
        for m in 1..=l as i64 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(half * re, half * im);
            out.set(l, m, z);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            out.set(l, -m, z.conj() * sign);
        }
    }
    Ok(out)
}

/// Haar-uniform rotation on SO(3).
pub fn sample_uniform_rotation(seed: u64) -> EulerAngles {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = TAU * rng.random::<f64>();
    let u: f64 = rng.random_range(-1.0..=1.0);
    let gamma = TAU * rng.random::<f64>();
    EulerAngles::new(alpha, u.acos().clamp(0.0, PI), gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::power_spectrum;

    #[test]
    fn zero_spectrum_gives_zero() {
        let c = random_bandlimited(8, 1, Some(&[0.0; 8])).unwrap();
        assert_eq!(c.norm(), 0.0);
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            random_bandlimited(16, 42, None).unwrap(),
            random_bandlimited(16, 42, None).unwrap()
        );
        assert_ne!(
            random_bandlimited(16, 42, None).unwrap(),
            random_bandlimited(16, 43, None).unwrap()
        );
        assert_eq!(sample_uniform_rotation(3), sample_uniform_rotation(3));
    }

    #[test]
    fn reality_holds() {
        let c = random_bandlimited(20, 7, None).unwrap();
        assert!(c.is_real());
        assert!(c.reality_residual() <= 1e-12);
    }

    #[test]
    fn negative_spectrum_rejected() {
        let mut s = vec![1.0; 4];
        s[2] = -0.5;
        assert!(matches!(
            random_bandlimited(4, 0, Some(&s)),
            Err(Error::InvalidSpectrum(_))
        ));
        assert!(random_bandlimited(4, 0, Some(&[f64::NAN; 4])).is_err());
        assert!(random_bandlimited(4, 0, Some(&[1.0; 3])).is_err());
    }

    #[test]
    fn mean_power_is_unity() {
        let l = 64;
        let mut mean = vec![0.0; l];
        let draws = 100;
        for seed in 0..draws {
            let ps = power_spectrum(&random_bandlimited(l, seed, None).unwrap());
            for (a, b) in mean.iter_mut().zip(ps) {
                *a += b / draws as f64;
            }
        }
        for (ell, c) in mean.iter().enumerate().skip(1) {
            assert!((c - 1.0).abs() <= 0.2, "l = {ell}: {c}");
        }
    }

    #[test]
    fn rotation_samples_in_range_and_haar() {
        let n = 10_000;
        let mut mean_cos = 0.0;
        for seed in 0..n {
            let r = sample_uniform_rotation(seed);
            assert!(r.in_canonical_range());
            mean_cos += r.beta.cos() / n as f64;
        }
        assert!(mean_cos.abs() <= 0.05, "{mean_cos}");
    }
}
