use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sampling scheme of a [`SampleGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Equiangular McEwen-Wiaux sampling, `L x (2L - 1)` samples.
    Mw,
    /// Gauss-Legendre nodes in `cos(theta)`, `L x (2L - 1)` samples.
    Gl,
}

impl Scheme {
    pub fn code(self) -> u8 {
        match self {
            Scheme::Mw => 0,
            Scheme::Gl => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(Scheme::Mw),
            1 => Ok(Scheme::Gl),
            other => Err(Error::Grid(format!("unknown scheme code {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mw => "mw",
            Scheme::Gl => "gl",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mw" => Ok(Scheme::Mw),
            "gl" => Ok(Scheme::Gl),
            other => Err(Error::Grid(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Sample positions for a band-limit `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid {
    bandlimit: usize,
    scheme: Scheme,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    /// Per-ring quadrature weight applied to each sample of that ring.
    weights: Vec<f64>,
}

/// Builds the sampling grid for band-limit `bandlimit`.
pub fn make_grid(bandlimit: usize, scheme: Scheme) -> Result<SampleGrid> {
    if bandlimit == 0 {
        return Err(Error::InvalidBandlimit(0));
    }
    let n_phi = 2 * bandlimit - 1;
    let phis = (0..n_phi).map(|p| 2.0 * PI * p as f64 / n_phi as f64).collect();
    let (thetas, ring_weights) = match scheme {
        Scheme::Mw => {
            let thetas: Vec<f64> = (0..bandlimit).map(|t| PI * (2 * t + 1) as f64 / n_phi as f64).collect();
            (thetas, mw_ring_weights(bandlimit))
        }
        Scheme::Gl => {
            let (nodes, w) = gauss_legendre(bandlimit);
            // nodes ascend in x, so reverse to get ascending theta
            let thetas = nodes.iter().rev().map(|x| x.acos()).collect();
            (thetas, w.into_iter().rev().collect())
        }
    };
    let dphi = 2.0 * PI / n_phi as f64;
    Ok(SampleGrid {
        bandlimit,
        scheme,
        thetas,
        phis,
        weights: ring_weights.into_iter().map(|w| w * dphi).collect(),
    })
}

impl SampleGrid {
    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn len(&self) -> usize {
        self.thetas.len() * self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weights, one per ring, including the longitude spacing.
    /// Integration is exact for integrands band-limited at the grid's `L`.
    pub fn ring_weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let l = self.bandlimit;
        if l == 0 || self.thetas.len() != l || self.phis.len() != 2 * l - 1 {
            return Err(Error::Grid(format!(
                "grid shape {} x {} does not match L = {l}",
                self.thetas.len(),
                self.phis.len()
            )));
        }
        Ok(())
    }
}

/// Ring weights `q_t` with `int f = 2pi sum_t q_t mean_phi f(theta_t, .)`,
/// exact for band-limited `f`. Obtained by extending each ring across the
/// pole to a periodic sequence in theta and integrating its Fourier series
/// against `sin(theta)` analytically.
fn mw_ring_weights(bandlimit: usize) -> Vec<f64> {
    let n = 2 * bandlimit - 1;
    let ext: Vec<f64> = (0..n)
        .map(|t| {
            let theta = PI * (2 * t + 1) as f64 / n as f64;
            let mut acc = 0.0;
            for k in -(bandlimit as i64 - 1)..=(bandlimit as i64 - 1) {
                let e = Complex64::from_polar(1.0, k as f64 * theta);
                acc += (e * sin_moment(-k)).re;
            }
            acc / n as f64
        })
        .collect();
    (0..bandlimit)
        .map(|t| {
            let mirror = n - 1 - t;
            if mirror == t {
                ext[t]
            } else {
                ext[t] + ext[mirror]
            }
        })
        .collect()
}

/// `int_0^pi exp(i q theta) sin(theta) d theta`.
pub(crate) fn sin_moment(q: i64) -> Complex64 {
    match q {
        1 => Complex64::new(0.0, PI / 2.0),
        -1 => Complex64::new(0.0, -PI / 2.0),
        q if q % 2 == 0 => Complex64::new(2.0 / (1.0 - (q * q) as f64), 0.0),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Samples of a signal on a [`SampleGrid`], theta-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalSignal {
    grid: SampleGrid,
    samples: Vec<Complex64>,
}

impl SphericalSignal {
    pub fn new(grid: SampleGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "grid has {} points, got {} samples",
                grid.len(),
                samples.len()
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: SampleGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut samples = Vec::with_capacity(grid.len());
        for &theta in grid.thetas() {
            for &phi in grid.phis() {
                samples.push(f(theta, phi));
            }
        }
        Self { grid, samples }
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn get(&self, t: usize, p: usize) -> Complex64 {
        self.samples[t * self.grid.n_phi() + p]
    }

    /// True when every sample has a negligible imaginary part.
    pub fn is_real(&self, tol: f64) -> bool {
        self.samples.iter().all(|s| s.im.abs() <= tol)
    }

    /// Pointwise modulus.
    pub fn modulus(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|s| Complex64::new(s.norm(), 0.0)).collect(),
        }
    }

    /// Quadrature estimate of the integral of the samples over the sphere.
    pub fn integrate(&self) -> Complex64 {
        let n_phi = self.grid.n_phi();
        self.samples
            .chunks(n_phi)
            .zip(self.grid.ring_weights())
            .map(|(ring, w)| ring.iter().sum::<Complex64>() * *w)
            .sum()
    }

    /// Quadrature estimate of `||f||^2`. Exact on Gauss-Legendre grids for
    /// signals band-limited at the grid's `L`; on MW grids it is exact only
    /// when the grid band-limit is at least `2L - 1`.
    pub fn quadrature_norm_sqr(&self) -> f64 {
        let n_phi = self.grid.n_phi();
        self.samples
            .chunks(n_phi)
            .zip(self.grid.ring_weights())
            .map(|(ring, w)| ring.iter().map(|s| s.norm_sqr()).sum::<f64>() * *w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mw_small_grids() {
        let g = make_grid(1, Scheme::Mw).unwrap();
        assert_eq!(g.thetas(), &[PI]);
        assert_eq!(g.phis(), &[0.0]);

        let g = make_grid(2, Scheme::Mw).unwrap();
        assert!((g.thetas()[0] - PI / 3.0).abs() < 1e-15);
        assert!((g.thetas()[1] - PI).abs() < 1e-15);
        let want = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (a, b) in g.phis().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }

        assert_eq!(make_grid(64, Scheme::Mw).unwrap().len(), 8128);
    }

    #[test]
    fn zero_bandlimit_rejected() {
        assert!(matches!(make_grid(0, Scheme::Mw), Err(Error::InvalidBandlimit(0))));
        assert!(make_grid(0, Scheme::Gl).is_err());
    }

    #[test]
    fn ranges_hold() {
        for scheme in [Scheme::Mw, Scheme::Gl] {
            for l in [1, 2, 5, 16, 33] {
                let g = make_grid(l, scheme).unwrap();
                assert!(g.thetas().iter().all(|&t| t > 0.0 && t <= PI));
                assert!(g.phis().iter().all(|&p| (0.0..2.0 * PI).contains(&p)));
                assert!(g.thetas().windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn ring_weights_integrate_constants() {
        for scheme in [Scheme::Mw, Scheme::Gl] {
            for l in [1, 2, 7, 32] {
                let g = make_grid(l, scheme).unwrap();
                let s = SphericalSignal::from_fn(g, |_, _| Complex64::new(1.0, 0.0));
                assert!((s.integrate().re - 4.0 * PI).abs() < 1e-12, "{scheme:?} {l}");
            }
        }
    }

    #[test]
    fn mw_weights_integrate_cos_powers() {
        // int cos^k = 4pi/(k+1) for even k, 0 for odd; exact while k < L
        let l = 9;
        let g = make_grid(l, Scheme::Mw).unwrap();
        for k in 0..l as i32 {
            let s = SphericalSignal::from_fn(g.clone(), |t, _| Complex64::new(t.cos().powi(k), 0.0));
            let want = if k % 2 == 0 { 4.0 * PI / (k + 1) as f64 } else { 0.0 };
            assert!((s.integrate().re - want).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(6);
        for k in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
            assert!((q - want).abs() < 1e-14, "k = {k}");
        }
    }
}
