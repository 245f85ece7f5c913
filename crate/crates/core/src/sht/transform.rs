use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::{make_grid, sin_moment, SampleGrid, Scheme, SphericalSignal};
use super::legendre::{legendre_table, order_offset};
use super::wigner::HalfPiRecursion;
use super::{idx, HarmonicCoefficients};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Synthesises `coeffs` on `grid`. The grid band-limit may exceed the
/// coefficient band-limit (oversampled synthesis).
pub fn inverse_sht(coeffs: &HarmonicCoefficients, grid: &SampleGrid) -> Result<SphericalSignal> {
    grid.validate()?;
    if grid.bandlimit() < coeffs.bandlimit() {
        return Err(Error::Dimension(format!(
            "grid band-limit {} below coefficient band-limit {}",
            grid.bandlimit(),
            coeffs.bandlimit()
        )));
    }
    let shifts = vec![0.0; grid.n_theta()];
    let samples = evaluate_rings(coeffs, grid.thetas(), grid.n_phi(), &shifts)?;
    SphericalSignal::new(grid.clone(), samples)
}

/// Evaluates the band-limited sum at `f(theta_t, 2 pi p / n_phi + shift_t)`
/// for every ring `t` and `p < n_phi`, theta-major. Requires
/// `n_phi >= 2L - 1` so that no azimuthal frequency aliases.
pub fn evaluate_rings(
    coeffs: &HarmonicCoefficients,
    thetas: &[f64],
    n_phi: usize,
    shifts: &[f64],
) -> Result<Vec<Complex64>> {
    let bl = coeffs.bandlimit();
    if thetas.len() != shifts.len() {
        return Err(Error::Dimension("one shift per ring required".into()));
    }
    if bl > 0 && n_phi < 2 * bl - 1 {
        return Err(Error::Dimension(format!(
            "{n_phi} longitudes cannot resolve band-limit {bl}"
        )));
    }
    let fft = FftPlanner::new().plan_fft_inverse(n_phi);
    let real = coeffs.is_real();
    let rings: Vec<Vec<Complex64>> = thetas
        .par_iter()
        .zip(shifts.par_iter())
        .map(|(&theta, &shift)| synth_ring(coeffs, theta, shift, n_phi, fft.as_ref(), real))
        .collect();
    Ok(rings.concat())
}

fn synth_ring(
    coeffs: &HarmonicCoefficients,
    theta: f64,
    shift: f64,
    n_phi: usize,
    fft: &dyn Fft<f64>,
    real: bool,
) -> Vec<Complex64> {
    let bl = coeffs.bandlimit();
    let mut buf = vec![ZERO; n_phi];
    if bl > 0 {
        let table = legendre_table(theta, bl);
        for m in 0..bl {
            let base = order_offset(m, bl);
            let mut pos = ZERO;
            let mut neg = ZERO;
            for l in m..bl {
                let lam = table[base + l - m];
                pos += coeffs.get(l, m as i64) * lam;
                if m > 0 {
                    neg += coeffs.get(l, -(m as i64)) * lam;
                }
            }
            let mi = m as f64;
            buf[m] += pos * Complex64::from_polar(1.0, mi * shift);
            if m > 0 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                buf[n_phi - m] += neg * sign * Complex64::from_polar(1.0, -mi * shift);
            }
        }
    }
    fft.process(&mut buf);
    if real {
        for v in &mut buf {
            v.im = 0.0;
        }
    }
    buf
}

/// Exact analysis of a signal sampled on a supported grid; the result is
/// band-limited at the grid band-limit.
pub fn forward_sht(signal: &SphericalSignal) -> Result<HarmonicCoefficients> {
    forward_sht_truncated(signal, signal.grid().bandlimit())
}

/// Degrees `l < out_bandlimit` of [`forward_sht`], computed without the
/// discarded ones: `O(L_grid L_out^2)` instead of `O(L_grid^3)`.
pub fn forward_sht_truncated(signal: &SphericalSignal, out_bandlimit: usize) -> Result<HarmonicCoefficients> {
    let grid = signal.grid();
    grid.validate()?;
    let bl = grid.bandlimit();
    if out_bandlimit == 0 || out_bandlimit > bl {
        return Err(Error::Dimension(format!(
            "output band-limit {out_bandlimit} must lie in 1..={bl}"
        )));
    }
    let n = grid.n_phi();
    let fft = FftPlanner::new().plan_fft_forward(n);
    // per-ring azimuthal Fourier coefficients F_m(theta_t), m stored mod n
    let rings: Vec<Vec<Complex64>> = signal
        .samples()
        .par_chunks(n)
        .map(|ring| {
            let mut buf = ring.to_vec();
            fft.process(&mut buf);
            buf
        })
        .collect();
    let real = signal.samples().iter().all(|s| s.im == 0.0);
    let mut out = match grid.scheme() {
        Scheme::Mw => forward_mw(&rings, bl, out_bandlimit),
        Scheme::Gl => forward_gl(&rings, grid, out_bandlimit),
    };
    out.set_real(real);
    Ok(out)
}

fn forward_gl(rings: &[Vec<Complex64>], grid: &SampleGrid, bl: usize) -> HarmonicCoefficients {
    let n = grid.n_phi();
    let tables: Vec<Vec<f64>> = grid.thetas().par_iter().map(|&t| legendre_table(t, bl)).collect();
    let mut out = HarmonicCoefficients::zeros(bl, false);
    for (t, ring) in rings.iter().enumerate() {
        let w = grid.ring_weights()[t];
        let table = &tables[t];
        for m in 0..bl {
            let base = order_offset(m, bl);
            let fp = ring[m] * w;
            let fm = ring[(n - m) % n] * w;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for l in m..bl {
                let lam = table[base + l - m];
                out.values_mut()[idx(l, m as i64)] += fp * lam;
                if m > 0 {
                    out.values_mut()[idx(l, -(m as i64))] += fm * (lam * sign);
                }
            }
        }
    }
    out
}

/// MW analysis: each azimuthal Fourier ring series is extended across the
/// poles to a periodic function of theta on `2L - 1` equispaced points,
/// whose Fourier coefficients are then projected onto `d^l_{m0}` through
/// the `d^l(pi/2)` factorisation, with the `sin(theta)` weight integrated
/// analytically.
fn forward_mw(rings: &[Vec<Complex64>], bl: usize, out_bl: usize) -> HarmonicCoefficients {
    let n = 2 * bl - 1;
    let lmax = bl as i64 - 1;
    let omax = out_bl as i64 - 1;
    let inv_n = 1.0 / n as f64;
    let theta_fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(n);
    let dim = 2 * out_bl - 1; // k' in -omax..=omax

    // h[m][k'] = sum_k Ft[m][k] W(-(k + k')), rows over m in -omax..=omax
    let qmax = lmax + omax;
    let moments: Vec<Complex64> = (-qmax..=qmax).map(|q| sin_moment(-q)).collect();
    let h: Vec<Vec<Complex64>> = (-omax..=omax)
        .into_par_iter()
        .map(|m| {
            let mi = m.rem_euclid(n as i64) as usize;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mut ext = vec![ZERO; n];
            for t in 0..n {
                ext[t] = if t < bl {
                    rings[t][mi] * inv_n
                } else {
                    rings[n - 1 - t][mi] * (inv_n * sign)
                };
            }
            theta_fft.process(&mut ext);
            let ft: Vec<Complex64> = (-lmax..=lmax)
                .map(|k| {
                    let ki = k.rem_euclid(n as i64) as usize;
                    ext[ki] * Complex64::from_polar(inv_n, k as f64 * PI / n as f64)
                })
                .collect();
            let mut row = vec![ZERO; dim];
            for (kp_i, kp) in (-omax..=omax).enumerate() {
                let mut acc = ZERO;
                for (k_i, k) in (-lmax..=lmax).enumerate() {
                    let q = k + kp;
                    if q % 2 != 0 && q.abs() != 1 {
                        continue;
                    }
                    acc += ft[k_i] * moments[(q + qmax) as usize];
                }
                row[kp_i] = acc;
            }
            row
        })
        .collect();

    let mut out = HarmonicCoefficients::zeros(out_bl, false);
    let mut rec = HalfPiRecursion::new();
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    for l in 0..out_bl {
        let delta = rec.next_matrix();
        let li = l as i64;
        let norm = 2.0 * PI * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
        let row0 = delta.row(0);
        for m in -li..=li {
            let hrow = &h[(m + omax) as usize];
            let drow = delta.row(m);
            let mut acc = ZERO;
            for kp in -li..=li {
                let dd = drow[(kp + li) as usize] * row0[(kp + li) as usize];
                if dd != 0.0 {
                    acc += hrow[(kp + omax) as usize] * dd;
                }
            }
            // i^{-m}
            let phase = i_pow[m.rem_euclid(4) as usize];
            out.set(l, m, acc * phase * norm);
        }
    }
    out
}

/// Per-degree power `C_l = sum_m |f_lm|^2 / (2l + 1)`.
pub fn power_spectrum(coeffs: &HarmonicCoefficients) -> Vec<f64> {
    (0..coeffs.bandlimit())
        .map(|l| coeffs.degree_norm_sqr(l) / (2 * l + 1) as f64)
        .collect()
}

/// Quadrature estimate of `||f||^2` on an MW grid fine enough for `|f|^2`
/// to be band-limited at the grid band-limit.
pub fn quadrature_norm_sqr(coeffs: &HarmonicCoefficients, scheme: Scheme) -> Result<f64> {
    let bl = match scheme {
        Scheme::Mw => (2 * coeffs.bandlimit()).max(1),
        Scheme::Gl => coeffs.bandlimit().max(1),
    };
    let grid = make_grid(bl, scheme)?;
    Ok(inverse_sht(coeffs, &grid)?.quadrature_norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::random_bandlimited;

    fn relative_error(a: &HarmonicCoefficients, b: &HarmonicCoefficients) -> f64 {
        a.distance(b) / b.norm()
    }

    #[test]
    fn constant_and_zero_synthesis() {
        let grid = make_grid(8, Scheme::Mw).unwrap();
        let mut c = HarmonicCoefficients::zeros(8, true);
        c.set(0, 0, Complex64::new((4.0 * PI).sqrt(), 0.0));
        let s = inverse_sht(&c, &grid).unwrap();
        assert!(s.samples().iter().all(|v| (v - 1.0).norm() < 1e-13));

        let z = inverse_sht(&HarmonicCoefficients::zeros(8, true), &grid).unwrap();
        assert!(z.samples().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn y10_is_cos_theta() {
        let grid = make_grid(6, Scheme::Mw).unwrap();
        let mut c = HarmonicCoefficients::zeros(6, true);
        c.set(1, 0, Complex64::new(1.0, 0.0));
        let s = inverse_sht(&c, &grid).unwrap();
        let k = (3.0 / (4.0 * PI)).sqrt();
        for (t, &theta) in grid.thetas().iter().enumerate() {
            for p in 0..grid.n_phi() {
                assert!((s.get(t, p) - k * theta.cos()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn bandlimit_mismatch_rejected() {
        let grid = make_grid(4, Scheme::Mw).unwrap();
        let c = HarmonicCoefficients::zeros(8, true);
        assert!(matches!(inverse_sht(&c, &grid), Err(Error::Dimension(_))));
    }

    #[test]
    fn forward_of_constant() {
        for scheme in [Scheme::Mw, Scheme::Gl] {
            let grid = make_grid(10, scheme).unwrap();
            let s = SphericalSignal::from_fn(grid, |_, _| Complex64::new(2.5, 0.0));
            let c = forward_sht(&s).unwrap();
            assert!((c.get(0, 0) - 2.5 * (4.0 * PI).sqrt()).norm() < 1e-10);
            for (i, v) in c.values().iter().enumerate().skip(1) {
                assert!(v.norm() <= 1e-10, "{scheme:?} index {i}: {v}");
            }
            assert!(c.is_real());
        }
    }

    #[test]
    fn forward_of_sampled_y21() {
        // Y_21 = -sqrt(15/8pi) sin cos e^{i phi}
        for scheme in [Scheme::Mw, Scheme::Gl] {
            let grid = make_grid(7, scheme).unwrap();
            let k = -(15.0 / (8.0 * PI)).sqrt();
            let s = SphericalSignal::from_fn(grid, |t, p| Complex64::from_polar(k * t.sin() * t.cos(), p));
            let c = forward_sht(&s).unwrap();
            for l in 0..7 {
                for m in -(l as i64)..=l as i64 {
                    let want = if (l, m) == (2, 1) { 1.0 } else { 0.0 };
                    assert!((c.get(l, m) - want).norm() <= 1e-10, "{scheme:?} ({l},{m})");
                }
            }
        }
    }

    #[test]
    fn roundtrip_both_schemes() {
        for scheme in [Scheme::Mw, Scheme::Gl] {
            for l in [1, 2, 3, 8, 17, 32] {
                let c = random_bandlimited(l, 11 + l as u64, None).unwrap();
                let grid = make_grid(l, scheme).unwrap();
                let back = forward_sht(&inverse_sht(&c, &grid).unwrap()).unwrap();
                let err = relative_error(&back, &c);
                assert!(err <= 1e-9, "{scheme:?} L={l}: {err}");
            }
        }
    }

    #[test]
    fn complex_signal_roundtrip() {
        let l = 12;
        let a = random_bandlimited(l, 1, None).unwrap();
        let b = random_bandlimited(l, 2, None).unwrap();
        let vals: Vec<Complex64> = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| x + Complex64::i() * y)
            .collect();
        let c = HarmonicCoefficients::from_values(l, vals, false).unwrap();
        let grid = make_grid(l, Scheme::Mw).unwrap();
        let back = forward_sht(&inverse_sht(&c, &grid).unwrap()).unwrap();
        assert!(relative_error(&back, &c) < 1e-11);
        assert!(!back.is_real());
    }

    #[test]
    fn oversampled_grid_roundtrip() {
        let c = random_bandlimited(9, 5, None).unwrap();
        let grid = make_grid(20, Scheme::Mw).unwrap();
        let back = forward_sht(&inverse_sht(&c, &grid).unwrap()).unwrap();
        assert_eq!(back.bandlimit(), 20);
        assert!(back.with_bandlimit(9).distance(&c) / c.norm() < 1e-11);
        assert!(back.norm_sqr() - c.norm_sqr() < 1e-10);
    }

    #[test]
    fn truncated_forward_matches_full_forward() {
        for scheme in [Scheme::Mw, Scheme::Gl] {
            let grid = make_grid(24, scheme).unwrap();
            // a non-band-limited signal exercises every discarded degree
            let sig = SphericalSignal::from_fn(grid, |t, p| Complex64::new((t.cos() * 3.0 + p.sin()).abs(), 0.0));
            let full = forward_sht(&sig).unwrap();
            for out in [1, 7, 24] {
                let tr = forward_sht_truncated(&sig, out).unwrap();
                assert_eq!(tr.bandlimit(), out);
                assert!(tr.distance(&full.with_bandlimit(out)) <= 1e-12 * full.norm());
            }
            assert!(forward_sht_truncated(&sig, 0).is_err());
            assert!(forward_sht_truncated(&sig, 25).is_err());
        }
    }

    #[test]
    fn power_spectrum_examples() {
        let mut c = HarmonicCoefficients::zeros(5, true);
        c.set(3, 0, Complex64::new(1.0, 0.0));
        let ps = power_spectrum(&c);
        for (l, v) in ps.iter().enumerate() {
            let want = if l == 3 { 1.0 / 7.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-15);
        }
        assert!(power_spectrum(&HarmonicCoefficients::zeros(5, true))
            .iter()
            .all(|&v| v == 0.0));

        let r = random_bandlimited(16, 3, None).unwrap();
        let parseval: f64 = power_spectrum(&r)
            .iter()
            .enumerate()
            .map(|(l, c)| (2 * l + 1) as f64 * c)
            .sum();
        assert!((parseval - r.norm_sqr()).abs() <= 1e-12 * r.norm_sqr());
    }

    #[test]
    fn quadrature_norm_matches_parseval() {
        for scheme in [Scheme::Mw, Scheme::Gl] {
            let c = random_bandlimited(16, 9, None).unwrap();
            let q = quadrature_norm_sqr(&c, scheme).unwrap();
            assert!((q - c.norm_sqr()).abs() <= 1e-8 * c.norm_sqr(), "{scheme:?}");
        }
    }
}
