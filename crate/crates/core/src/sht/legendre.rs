//! Orthonormalised associated Legendre functions
//! `lambda_lm(theta) = Y_lm(theta, 0)`, Condon-Shortley phase included.

use std::f64::consts::PI;

/// Threshold above which the running recursion is rescaled.
const RESCALE_ABOVE: f64 = 1e150;

/// Values `lambda_lm(theta)` for `0 <= m <= l < bandlimit`, packed by order:
/// entries for order `m` start at [`order_offset`] and run over `l = m..L`.
pub(crate) fn legendre_table(theta: f64, bandlimit: usize) -> Vec<f64> {
    let mut out = vec![0.0; bandlimit * (bandlimit + 1) / 2];
    let x = theta.cos();
    let sin = theta.sin().abs();
    let log_sin = sin.ln();
    // log |lambda_mm| accumulated over m
    let mut log_mm = -(4.0 * PI).ln() / 2.0;
    for m in 0..bandlimit {
        if m > 0 {
            log_mm += 0.5 * ((2 * m + 1) as f64 / (2 * m) as f64).ln();
        }
        let base = order_offset(m, bandlimit);
        let log_start = log_mm + m as f64 * log_sin;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        if m > 0 && sin == 0.0 {
            continue;
        }
        // run the recursion on rescaled values; `scale` is the log of the
        // factor multiplying the stored mantissas
        let mut scale = log_start;
        let mut prev = 0.0;
        let mut cur = sign;
        out[base] = emit(cur, scale);
        for l in (m + 1)..bandlimit {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = if l == m + 1 {
                0.0
            } else {
                (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt()
            };
            let next = a * (x * cur - b * prev);
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_ABOVE {
                prev /= RESCALE_ABOVE;
                cur /= RESCALE_ABOVE;
                scale += RESCALE_ABOVE.ln();
            }
            out[base + (l - m)] = emit(cur, scale);
        }
    }
    out
}

#[inline]
fn emit(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        0.0
    } else {
        mantissa * log_scale.exp()
    }
}

/// Offset of order `m` in a [`legendre_table`].
#[inline]
pub(crate) fn order_offset(m: usize, bandlimit: usize) -> usize {
    // sum_{k<m} (L - k)
    m * bandlimit - m * m.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Direct formula through the Rodrigues-type explicit sum.
    fn reference(l: usize, m: usize, theta: f64) -> f64 {
        let x = theta.cos();
        // P_l^m(x) with Condon-Shortley phase via explicit sum
        let mut p = 0.0;
        for k in 0..=((l - m) / 2) {
            let num = factorial(2 * l - 2 * k);
            let den = factorial(k) * factorial(l - k) * factorial(l - m - 2 * k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            p += sign * num / den * x.powi((l - m - 2 * k) as i32);
        }
        p /= 2f64.powi(l as i32);
        p *= (1.0 - x * x).powf(m as f64 / 2.0);
        if m % 2 == 1 {
            p = -p;
        }
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - m) / factorial(l + m)).sqrt();
        norm * p
    }

    #[test]
    fn offsets_are_contiguous() {
        let l = 7;
        let mut expect = 0;
        for m in 0..l {
            assert_eq!(order_offset(m, l), expect);
            expect += l - m;
        }
        assert_eq!(expect, l * (l + 1) / 2);
    }

    #[test]
    fn matches_explicit_formula() {
        let bl = 12;
        for &theta in &[0.1, 0.7, 1.5, 2.9, PI] {
            let table = legendre_table(theta, bl);
            for m in 0..bl {
                for l in m..bl {
                    let got = table[order_offset(m, bl) + l - m];
                    let want = reference(l, m, theta);
                    assert!((got - want).abs() < 1e-11, "l={l} m={m} theta={theta}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn stays_finite_at_high_degree() {
        let bl = 1024;
        let table = legendre_table(0.01, bl);
        assert!(table.iter().all(|v| v.is_finite()));
        // lambda_l0(theta) ~ sqrt((2l+1)/4pi) P_l(cos theta); bounded by that norm
        for (l, v) in table.iter().enumerate().take(bl) {
            assert!(v.abs() <= ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() + 1e-9);
        }
    }
}
