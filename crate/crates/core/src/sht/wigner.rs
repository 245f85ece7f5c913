//! Wigner small-d matrices.
//!
//! `d^l(pi/2)` is generated degree by degree with the Trapani-Navaza
//! recursion; `d^l(beta)` at arbitrary angles follows from the factorisation
//! `d_{mn}(beta) = i^{n-m} sum_k D_{mk} D_{nk} exp(-i k beta)` with
//! `D = d^l(pi/2)`.

use num_complex::Complex64;

/// Dense `(2l+1) x (2l+1)` real matrix indexed by `m, n` in `-l..=l`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerMatrix {
    degree: usize,
    values: Vec<f64>,
}

impl WignerMatrix {
    fn zeros(degree: usize) -> Self {
        let n = 2 * degree + 1;
        Self {
            degree,
            values: vec![0.0; n * n],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn get(&self, m: i64, n: i64) -> f64 {
        let l = self.degree as i64;
        let w = 2 * l + 1;
        self.values[((m + l) * w + (n + l)) as usize]
    }

    #[inline]
    fn set(&mut self, m: i64, n: i64, v: f64) {
        let l = self.degree as i64;
        let w = 2 * l + 1;
        self.values[((m + l) * w + (n + l)) as usize] = v;
    }

    /// Row `m` as a contiguous slice over `n = -l..=l`.
    #[inline]
    pub fn row(&self, m: i64) -> &[f64] {
        let l = self.degree as i64;
        let w = (2 * l + 1) as usize;
        let start = (m + l) as usize * w;
        &self.values[start..start + w]
    }
}

/// Iterator over `d^l(pi/2)` for `l = 0, 1, 2, ...`.
///
/// Only the quadrant `m, n >= 0` is recursed; the rest follows from
/// `D_{m,-n} = (-1)^{l+m} D_{mn}` and `D_{-m,n} = (-1)^{l+n} D_{mn}`.
#[derive(Clone, Debug)]
pub struct HalfPiRecursion {
    next_degree: usize,
    /// Row `m = l` of the previous degree, entries `n = 0..=l`.
    edge: Vec<f64>,
    /// Scratch quadrant, row-major `(l+1) x (l+1)`.
    quad: Vec<f64>,
}

impl Default for HalfPiRecursion {
    fn default() -> Self {
        Self::new()
    }
}

impl HalfPiRecursion {
    pub fn new() -> Self {
        Self {
            next_degree: 0,
            edge: Vec::new(),
            quad: Vec::new(),
        }
    }

    /// Advances one degree and returns the full matrix.
    pub fn next_matrix(&mut self) -> WignerMatrix {
        let l = self.next_degree;
        self.advance_quadrant();
        let mut out = WignerMatrix::zeros(l);
        let li = l as i64;
        let w = l + 1;
        for m in 0..=li {
            for n in 0..=li {
                let v = self.quad[m as usize * w + n as usize];
                out.set(m, n, v);
                let sign_n = if (li + m) % 2 == 0 { 1.0 } else { -1.0 };
                out.set(m, -n, sign_n * v);
                let sign_m = if (li + n) % 2 == 0 { 1.0 } else { -1.0 };
                out.set(-m, n, sign_m * v);
                let sign_mn = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
                out.set(-m, -n, sign_mn * v);
            }
        }
        out
    }

    fn advance_quadrant(&mut self) {
        let l = self.next_degree;
        self.next_degree += 1;
        let w = l + 1;
        self.quad.clear();
        self.quad.resize(w * w, 0.0);
        if l == 0 {
            self.quad[0] = 1.0;
            self.edge = vec![1.0];
            return;
        }
        let lf = l as f64;
        // row m = l from the previous degree's row m = l - 1
        let mut row = vec![0.0; w];
        row[0] = -((2.0 * lf - 1.0) / (2.0 * lf)).sqrt() * self.edge[0];
        for (n, r) in row.iter_mut().enumerate().take(l + 1).skip(1) {
            let nf = n as f64;
            *r = (lf * (2.0 * lf - 1.0) / (2.0 * (lf + nf) * (lf + nf - 1.0))).sqrt() * self.edge[n - 1];
        }
        self.quad[l * w..l * w + w].copy_from_slice(&row);
        // descend in m for each column n
        for (n, &start) in row.iter().enumerate().take(l + 1) {
            let nf = n as f64;
            let mut above = 0.0; // D_{m+1, n}
            let mut cur = start; // D_{m, n}
            for m in (1..=l).rev() {
                let mf = m as f64;
                let a = 2.0 * nf / ((lf - mf + 1.0) * (lf + mf)).sqrt();
                let b = ((lf - mf) * (lf + mf + 1.0) / ((lf - mf + 1.0) * (lf + mf))).sqrt();
                let below = a * cur - b * above;
                self.quad[(m - 1) * w + n] = below;
                above = cur;
                cur = below;
            }
        }
        self.edge = row;
    }
}

/// `d^l(pi/2)` for a single degree.
pub fn half_pi_matrix(degree: usize) -> WignerMatrix {
    let mut rec = HalfPiRecursion::new();
    let mut out = rec.next_matrix();
    for _ in 0..degree {
        out = rec.next_matrix();
    }
    out
}

/// `d^l(beta)` assembled from `d^l(pi/2)`.
pub fn wigner_d_from_half_pi(half_pi: &WignerMatrix, beta: f64) -> WignerMatrix {
    let l = half_pi.degree() as i64;
    let mut out = WignerMatrix::zeros(l as usize);
    let phases: Vec<Complex64> = (-l..=l)
        .map(|k| Complex64::from_polar(1.0, -(k as f64) * beta))
        .collect();
    for m in -l..=l {
        for n in -l..=l {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -l..=l {
                acc += phases[(k + l) as usize] * (half_pi.get(m, k) * half_pi.get(n, k));
            }
            // i^{n-m}
            let p = (n - m).rem_euclid(4);
            let v = match p {
                0 => acc.re,
                1 => -acc.im,
                2 => -acc.re,
                _ => acc.im,
            };
            out.set(m, n, v);
        }
    }
    out
}

/// `d^l(beta)` for a single degree.
pub fn wigner_d(degree: usize, beta: f64) -> WignerMatrix {
    wigner_d_from_half_pi(&half_pi_matrix(degree), beta)
}
