//! Generating functions of the scale-discretized wavelet tiling.

use crate::error::{Error, Result};

/// Default number of trapezoid nodes for the `k_alpha` integral.
pub const DEFAULT_QUADRATURE_NODES: usize = 5000;

/// Parameters `(L, alpha, J0)` of a filter bank.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelConfig {
    pub alpha: f64,
    pub j0: usize,
    pub bandlimit: usize,
    pub quadrature_nodes: usize,
}

impl KernelConfig {
    pub fn new(bandlimit: usize, alpha: f64, j0: usize) -> Result<Self> {
        let cfg = Self {
            alpha,
            j0,
            bandlimit,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets `J0 = ceil(log_alpha L0)` from a requested scaling band-limit.
    pub fn from_scaling_bandlimit(bandlimit: usize, alpha: f64, l0: usize) -> Result<Self> {
        if l0 == 0 {
            return Err(Error::InvalidConfig("L0 must be positive".into()));
        }
        check_alpha(alpha)?;
        Self::new(bandlimit, alpha, ceil_log(l0 as f64, alpha))
    }

    pub fn with_quadrature_nodes(mut self, nodes: usize) -> Result<Self> {
        self.quadrature_nodes = nodes;
        self.validate()?;
        Ok(self)
    }

    /// Maximum scale `J = ceil(log_alpha L)`.
    pub fn max_scale(&self) -> usize {
        ceil_log(self.bandlimit as f64, self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.bandlimit == 0 {
            return Err(Error::InvalidBandlimit(0));
        }
        if self.quadrature_nodes < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 quadrature nodes, got {}",
                self.quadrature_nodes
            )));
        }
        let j_max = self.max_scale();
        if self.j0 >= j_max {
            return Err(Error::InvalidScaleRange { j0: self.j0, j_max });
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(Error::InvalidConfig(format!("alpha = {alpha} must exceed 1")));
    }
    Ok(())
}

/// Smallest integer `j` with `alpha^j >= x`, tolerant to round-off in the
/// powers.
pub(crate) fn ceil_log(x: f64, alpha: f64) -> usize {
    let mut j = 0;
    let mut p = 1.0;
    while p < x * (1.0 - 1e-12) {
        p *= alpha;
        j += 1;
    }
    j
}

/// `ceil(alpha^e)` with near-integers snapped.
pub(crate) fn ceil_pow(alpha: f64, e: usize) -> usize {
    let p = alpha.powi(e as i32);
    let r = p.round();
    if (p - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        p.ceil() as usize
    }
}

/// `s(t) = exp(-1 / (1 - t^2))` on `(-1, 1)`, zero elsewhere.
pub fn schwartz_s(t: f64) -> f64 {
    if t > -1.0 && t < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// `s` rescaled onto `[1/alpha, 1]`.
pub fn schwartz_s_alpha(t: f64, alpha: f64) -> f64 {
    schwartz_s(2.0 * alpha / (alpha - 1.0) * (t - 1.0 / alpha) - 1.0)
}

/// Tabulated `k_alpha`: cumulative trapezoid integral of `s_alpha^2(t)/t`
/// on a uniform grid over `[1/alpha, 1]`.
#[derive(Clone, Debug)]
pub struct Kernel {
    alpha: f64,
    lo: f64,
    step: f64,
    /// `tail[i] = int_{node_i}^1 s_alpha^2(t)/t dt`
    tail: Vec<f64>,
}

impl Kernel {
    pub fn new(alpha: f64, nodes: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if nodes < 2 {
            return Err(Error::InvalidConfig("need at least 2 quadrature nodes".into()));
        }
        let lo = 1.0 / alpha;
        let step = (1.0 - lo) / (nodes - 1) as f64;
        let f: Vec<f64> = (0..nodes)
            .map(|i| {
                let t = lo + step * i as f64;
                integrand(t, alpha)
            })
            .collect();
        let mut tail = vec![0.0; nodes];
        for i in (0..nodes - 1).rev() {
            tail[i] = tail[i + 1] + 0.5 * step * (f[i] + f[i + 1]);
        }
        Ok(Self { alpha, lo, step, tail })
    }

    pub fn from_config(cfg: &KernelConfig) -> Result<Self> {
        Self::new(cfg.alpha, cfg.quadrature_nodes)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `k_alpha(t)`: 1 below `1/alpha`, 0 above 1, nonincreasing between.
    pub fn k(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        let pos = (t - self.lo) / self.step;
        let i = (pos.floor() as usize).min(self.tail.len() - 2);
        let right = self.lo + self.step * (i + 1) as f64;
        let partial = 0.5 * (right - t) * (integrand(t, self.alpha) + integrand(right, self.alpha));
        ((self.tail[i + 1] + partial) / self.tail[0]).clamp(0.0, 1.0)
    }

    /// `kappa_alpha(t) = sqrt(k(t/alpha) - k(t))`, supported on
    /// `[1/alpha, alpha]`.
    pub fn kappa(&self, t: f64) -> f64 {
        let d = self.k(t / self.alpha) - self.k(t);
        if d <= 0.0 {
            0.0
        } else {
            d.sqrt()
        }
    }
}

#[inline]
fn integrand(t: f64, alpha: f64) -> f64 {
    let s = schwartz_s_alpha(t, alpha);
    s * s / t
}

/// `k_alpha(t)` for `config`; builds the quadrature table on each call.
pub fn k_alpha(t: f64, config: &KernelConfig) -> Result<f64> {
    Ok(Kernel::from_config(config)?.k(t))
}

/// `kappa_alpha(t)` for `config`; builds the quadrature table on each call.
pub fn kappa_alpha(t: f64, config: &KernelConfig) -> Result<f64> {
    Ok(Kernel::from_config(config)?.kappa(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent composite Simpson rule on `n` intervals.
    fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + h * i as f64);
        }
        acc * h / 3.0
    }

    #[test]
    fn schwartz_values() {
        assert!((schwartz_s(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((schwartz_s(0.0) - 0.367879).abs() < 1e-6);
        assert_eq!(schwartz_s(1.0), 0.0);
        assert_eq!(schwartz_s(-1.0), 0.0);
        assert_eq!(schwartz_s(2.0), 0.0);
    }

    #[test]
    fn k_alpha_limits() {
        let cfg = KernelConfig::new(64, 2.0, 0).unwrap();
        assert_eq!(k_alpha(0.4, &cfg).unwrap(), 1.0);
        assert_eq!(k_alpha(1.5, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn k_alpha_matches_fine_reference() {
        // reference: 10^6-interval Simpson quadrature, independent of the table
        let alpha = 2.0;
        let f = |t: f64| {
            let s = schwartz_s(2.0 * alpha / (alpha - 1.0) * (t - 1.0 / alpha) - 1.0);
            s * s / t
        };
        let total = simpson(0.5, 1.0, 1_000_000, f);
        let cfg = KernelConfig::new(64, alpha, 0).unwrap();
        let kernel = Kernel::from_config(&cfg).unwrap();
        // 1e-8 at the centre of the transition, looser near its edges where
        // the integrand derivative is largest
        for &(t, tol) in &[(0.75, 1e-8), (0.55, 5e-8), (0.6123, 5e-8), (0.9, 5e-8), (0.99, 5e-8)] {
            let want = simpson(t, 1.0, 1_000_000, f) / total;
            let got = kernel.k(t);
            assert!((got - want).abs() <= tol, "t = {t}: {got} vs {want}");
            assert!(got > 0.0 && got < 1.0);
        }
    }

    #[test]
    fn kappa_support_and_peak() {
        for alpha in [2.0, 3.0, 1.5] {
            let kernel = Kernel::new(alpha, DEFAULT_QUADRATURE_NODES).unwrap();
            assert_eq!(kernel.kappa(1.0 / alpha), 0.0);
            assert!((kernel.kappa(1.0) - 1.0).abs() < 1e-15);
            assert_eq!(kernel.kappa(alpha), 0.0);
            assert_eq!(kernel.kappa(0.1 / alpha), 0.0);
            assert_eq!(kernel.kappa(alpha * 1.01), 0.0);
        }
    }

    #[test]
    fn k_is_monotone() {
        let kernel = Kernel::new(2.0, DEFAULT_QUADRATURE_NODES).unwrap();
        let mut prev = 1.0;
        for i in 0..=20_000 {
            let t = 0.4 + 0.7 * i as f64 / 20_000.0;
            let v = kernel.k(t);
            assert!(v <= prev, "t = {t}");
            prev = v;
        }
    }

    #[test]
    fn kappa_has_single_interior_maximum() {
        for alpha in [2.0, 3.0] {
            let kernel = Kernel::new(alpha, DEFAULT_QUADRATURE_NODES).unwrap();
            let n = 10_000;
            let vals: Vec<f64> = (0..n)
                .map(|i| kernel.kappa(1.0 / alpha + (alpha - 1.0 / alpha) * i as f64 / (n - 1) as f64))
                .collect();
            assert!(vals.iter().all(|&v| v >= 0.0));
            let peak = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            assert!(peak > 0 && peak < n - 1);
            assert!(vals[..=peak].windows(2).all(|w| w[0] <= w[1]));
            assert!(vals[peak..].windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn config_scale_bounds() {
        assert_eq!(KernelConfig::new(128, 2.0, 2).unwrap().max_scale(), 7);
        let c = KernelConfig::from_scaling_bandlimit(256, 2.0, 32).unwrap();
        assert_eq!((c.j0, c.max_scale()), (5, 8));
        assert_eq!(KernelConfig::new(64, 3.0, 0).unwrap().max_scale(), 4);
        assert!(matches!(
            KernelConfig::new(16, 2.0, 4),
            Err(Error::InvalidScaleRange { j0: 4, j_max: 4 })
        ));
        assert!(KernelConfig::new(16, 1.0, 0).is_err());
        assert!(KernelConfig::new(16, f64::NAN, 0).is_err());
        assert!(KernelConfig::new(0, 2.0, 0).is_err());
    }

    #[test]
    fn ceil_helpers() {
        assert_eq!(ceil_log(128.0, 2.0), 7);
        assert_eq!(ceil_log(129.0, 2.0), 8);
        assert_eq!(ceil_log(1.0, 2.0), 0);
        assert_eq!(ceil_log(81.0, 3.0), 4);
        assert_eq!(ceil_pow(3.0, 5), 243);
        assert_eq!(ceil_pow(1.5, 3), 4);
    }
}
