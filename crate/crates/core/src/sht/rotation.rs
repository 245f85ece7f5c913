use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::wigner::HalfPiRecursion;
use super::{EulerAngles, HarmonicCoefficients};

/// Rotates a band-limited signal: `(R f)_lm = sum_n D^l_{mn}(rho) f_ln` with
/// `D^l_{mn} = exp(-i m alpha) d^l_{mn}(beta) exp(-i n gamma)`.
///
/// Each degree is applied as `Z(alpha + pi/2) D Z(beta) D^T Z(gamma - pi/2)`
/// with `D = d^l(pi/2)` and `Z` diagonal phases, costing `O(l^2)` per degree.
pub fn rotate(coeffs: &HarmonicCoefficients, rho: EulerAngles) -> HarmonicCoefficients {
    let bl = coeffs.bandlimit();
    let mut out = HarmonicCoefficients::zeros(bl, coeffs.is_real());
    let mut rec = HalfPiRecursion::new();
    for l in 0..bl {
        let delta = rec.next_matrix();
        let li = l as i64;
        let w = 2 * l + 1;
        let block = &coeffs.values()[l * l..l * l + w];
        let u: Vec<Complex64> = (-li..=li)
            .zip(block)
            .map(|(n, f)| f * phase(n, rho.gamma - FRAC_PI_2))
            .collect();
        // v_k = e^{-i k beta} sum_n D_{nk} u_n
        let mut v = vec![Complex64::new(0.0, 0.0); w];
        for (n, un) in (-li..=li).zip(&u) {
            for (vk, d) in v.iter_mut().zip(delta.row(n)) {
                *vk += un * *d;
            }
        }
        for (k, vk) in (-li..=li).zip(v.iter_mut()) {
            *vk *= phase(k, rho.beta);
        }
        let dst = &mut out.values_mut()[l * l..l * l + w];
        for (m, o) in (-li..=li).zip(dst.iter_mut()) {
            let acc: Complex64 = delta.row(m).iter().zip(&v).map(|(d, vk)| vk * *d).sum();
            *o = acc * phase(m, rho.alpha + FRAC_PI_2);
        }
    }
    out
}

#[inline]
fn phase(m: i64, angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, -(m as f64) * angle)
}

/// Cartesian matrix of the zyz rotation `Rz(alpha) Ry(beta) Rz(gamma)`.
pub fn rotation_matrix(rho: EulerAngles) -> [[f64; 3]; 3] {
    let rz = |a: f64| {
        let (s, c) = a.sin_cos();
        [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
    };
    let (sb, cb) = rho.beta.sin_cos();
    let ry = [[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]];
    matmul(&matmul(&rz(rho.alpha), &ry), &rz(rho.gamma))
}

pub(crate) fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::{random_bandlimited, sample_uniform_rotation};
    use std::f64::consts::PI;

    #[test]
    fn identity_rotation() {
        let f = random_bandlimited(12, 4, None).unwrap();
        let g = rotate(&f, EulerAngles::identity());
        assert!(g.distance(&f) <= 1e-12 * f.norm());
    }

    #[test]
    fn z_rotation_is_a_phase() {
        let f = random_bandlimited(10, 8, None).unwrap();
        let alpha = 0.83;
        let g = rotate(&f, EulerAngles::new(alpha, 0.0, 0.0));
        for l in 0..10 {
            for m in -(l as i64)..=l as i64 {
                let want = f.get(l, m) * Complex64::from_polar(1.0, -(m as f64) * alpha);
                assert!((g.get(l, m) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn per_degree_norm_preserved() {
        let f = random_bandlimited(24, 1, None).unwrap();
        for seed in 0..5 {
            let rho = sample_uniform_rotation(seed);
            let g = rotate(&f, rho);
            for l in 0..24 {
                let a = f.degree_norm_sqr(l).sqrt();
                let b = g.degree_norm_sqr(l).sqrt();
                assert!((a - b).abs() <= 1e-10 * a.max(1.0));
            }
        }
    }

    #[test]
    fn rotation_preserves_reality() {
        let f = random_bandlimited(16, 6, None).unwrap();
        let g = rotate(&f, EulerAngles::new(0.3, 1.2, 4.0));
        assert!(g.reality_residual() < 1e-12);
    }

    #[test]
    fn pi_rotation_about_y_flips_y10() {
        // Ry(pi) maps the north pole to the south pole: Y_10 -> -Y_10
        let mut f = HarmonicCoefficients::zeros(3, true);
        f.set(1, 0, Complex64::new(1.0, 0.0));
        let g = rotate(&f, EulerAngles::new(0.0, PI, 0.0));
        assert!((g.get(1, 0) + 1.0).norm() < 1e-12);
    }
}
