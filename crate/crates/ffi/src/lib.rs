//! C ABI over `s2scat`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`-style
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`S2scatStatus`]; on failure a message is kept per thread and
//! can be read with [`s2scat_last_error_message`]. Complex arrays are
//! interleaved `(re, im)` doubles in the flat `l^2 + l + m` order.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use s2scat::scattering::io::save_scat;
use s2scat::scattering::{
    enumerate_paths, scattering_distance, scattering_network, Path, PathPolicy, ScatteringCoefficients,
    ScatteringOptions,
};
use s2scat::sht::{
    forward_sht, inverse_sht, make_grid, random_bandlimited, rotate, EulerAngles, HarmonicCoefficients, Scheme,
    SphericalSignal,
};
use s2scat::wavelets::{build_filter_bank, check_admissibility, FilterBank, KernelConfig};
use s2scat::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S2scatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    InvalidConfig = 4,
    Incompatible = 5,
    Format = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S2scatScheme {
    Mw = 0,
    Gl = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum S2scatPolicy {
    General = 0,
    Descending = 1,
    AdjacentDescending = 2,
}

/// Band-limited harmonic coefficients.
pub struct S2scatCoefficients {
    inner: HarmonicCoefficients,
}

/// Axisymmetric wavelet filter bank.
pub struct S2scatFilterBank {
    inner: FilterBank,
}

/// Scattering channels in lexicographic path order.
pub struct S2scatScattering {
    inner: ScatteringCoefficients,
    paths: Vec<Path>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(S2scatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidBandlimit(_)
            | Error::InvalidSpectrum(_)
            | Error::InvalidScale { .. }
            | Error::InvalidDepth(_)
            | Error::Usage(_) => S2scatStatus::InvalidArgument,
            Error::Dimension(_) | Error::Grid(_) => S2scatStatus::Dimension,
            Error::InvalidConfig(_)
            | Error::InvalidScaleRange { .. }
            | Error::RejectedConfiguration(_)
            | Error::Validation(_) => S2scatStatus::InvalidConfig,
            Error::Incompatible(_) => S2scatStatus::Incompatible,
            Error::Format(_) => S2scatStatus::Format,
            Error::Io(_) => S2scatStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(S2scatStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> S2scatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => S2scatStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            S2scatStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn complex_slice(data: *const f64, n_complex: usize) -> Result<Vec<Complex64>, Failure> {
    if n_complex == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(null("value buffer"));
    }
    let raw = std::slice::from_raw_parts(data, 2 * n_complex);
    Ok(raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

unsafe fn write_complex(values: &[Complex64], out: *mut f64, capacity: usize) -> Result<(), Failure> {
    if capacity < values.len() {
        return Err(Failure(
            S2scatStatus::BufferTooSmall,
            format!("buffer holds {capacity} complex values, need {}", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output buffer"));
    }
    let dst = std::slice::from_raw_parts_mut(out, 2 * values.len());
    for (d, v) in dst.chunks_exact_mut(2).zip(values) {
        d[0] = v.re;
        d[1] = v.im;
    }
    Ok(())
}

fn scheme(s: S2scatScheme) -> Scheme {
    match s {
        S2scatScheme::Mw => Scheme::Mw,
        S2scatScheme::Gl => Scheme::Gl,
    }
}

fn policy(p: S2scatPolicy) -> PathPolicy {
    match p {
        S2scatPolicy::General => PathPolicy::General,
        S2scatPolicy::Descending => PathPolicy::Descending,
        S2scatPolicy::AdjacentDescending => PathPolicy::AdjacentDescending,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn s2scat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn s2scat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of coefficients `L^2` at band-limit `L`.
#[no_mangle]
pub extern "C" fn s2scat_coefficient_count(bandlimit: usize) -> usize {
    bandlimit * bandlimit
}

/// Rings and longitudes of the sampling grid at band-limit `L`.
#[no_mangle]
pub unsafe extern "C" fn s2scat_grid_shape(
    bandlimit: usize,
    grid_scheme: S2scatScheme,
    n_theta: *mut usize,
    n_phi: *mut usize,
) -> S2scatStatus {
    guard(|| {
        let g = make_grid(bandlimit, scheme(grid_scheme))?;
        if n_theta.is_null() || n_phi.is_null() {
            return Err(null("grid shape output"));
        }
        *n_theta = g.n_theta();
        *n_phi = g.n_phi();
        Ok(())
    })
}

/// Gaussian coefficients of a real field with unit flat spectrum.
#[no_mangle]
pub unsafe extern "C" fn s2scat_coefficients_random(
    bandlimit: usize,
    seed: u64,
    out: *mut *mut S2scatCoefficients,
) -> S2scatStatus {
    guard(|| {
        let inner = random_bandlimited(bandlimit, seed, None)?;
        put(out, S2scatCoefficients { inner })
    })
}

/// Coefficients from `L^2` interleaved complex values; `real` declares a
/// real field.
#[no_mangle]
pub unsafe extern "C" fn s2scat_coefficients_from_values(
    bandlimit: usize,
    values: *const f64,
    n_values: usize,
    real: bool,
    out: *mut *mut S2scatCoefficients,
) -> S2scatStatus {
    guard(|| {
        let v = complex_slice(values, n_values)?;
        let inner = HarmonicCoefficients::from_values(bandlimit, v, real)?;
        put(out, S2scatCoefficients { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn s2scat_coefficients_bandlimit(c: *const S2scatCoefficients) -> usize {
    c.as_ref().map_or(0, |c| c.inner.bandlimit())
}

/// Copies the `L^2` values into `out` (room for `capacity` complex values).
#[no_mangle]
pub unsafe extern "C" fn s2scat_coefficients_values(
    c: *const S2scatCoefficients,
    out: *mut f64,
    capacity: usize,
) -> S2scatStatus {
    guard(|| write_complex(deref(c, "coefficients")?.inner.values(), out, capacity))
}

/// `R(alpha, beta, gamma) f` in the zyz convention.
#[no_mangle]
pub unsafe extern "C" fn s2scat_coefficients_rotate(
    c: *const S2scatCoefficients,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut S2scatCoefficients,
) -> S2scatStatus {
    guard(|| {
        let f = &deref(c, "coefficients")?.inner;
        put(
            out,
            S2scatCoefficients {
                inner: rotate(f, EulerAngles::new(alpha, beta, gamma)),
            },
        )
    })
}

/// Samples on the grid at band-limit `grid_bandlimit >= L`, theta-major.
#[no_mangle]
pub unsafe extern "C" fn s2scat_inverse_sht(
    c: *const S2scatCoefficients,
    grid_scheme: S2scatScheme,
    grid_bandlimit: usize,
    out: *mut f64,
    capacity: usize,
) -> S2scatStatus {
    guard(|| {
        let f = &deref(c, "coefficients")?.inner;
        let grid = make_grid(grid_bandlimit, scheme(grid_scheme))?;
        let s = inverse_sht(f, &grid)?;
        write_complex(s.samples(), out, capacity)
    })
}

/// Exact analysis of `n_samples` theta-major samples on the grid at
/// band-limit `L`.
#[no_mangle]
pub unsafe extern "C" fn s2scat_forward_sht(
    samples: *const f64,
    n_samples: usize,
    bandlimit: usize,
    grid_scheme: S2scatScheme,
    out: *mut *mut S2scatCoefficients,
) -> S2scatStatus {
    guard(|| {
        let grid = make_grid(bandlimit, scheme(grid_scheme))?;
        let v = complex_slice(samples, n_samples)?;
        let inner = forward_sht(&SphericalSignal::new(grid, v)?)?;
        put(out, S2scatCoefficients { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn s2scat_coefficients_free(c: *mut S2scatCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Filter bank for `(L, alpha, J0)`.
#[no_mangle]
pub unsafe extern "C" fn s2scat_filter_bank_new(
    bandlimit: usize,
    alpha: f64,
    j0: usize,
    out: *mut *mut S2scatFilterBank,
) -> S2scatStatus {
    guard(|| {
        let inner = build_filter_bank(&KernelConfig::new(bandlimit, alpha, j0)?)?;
        put(out, S2scatFilterBank { inner })
    })
}

/// Writes `J0`, `J` and `L0` of the bank; any output may be null.
#[no_mangle]
pub unsafe extern "C" fn s2scat_filter_bank_scales(
    b: *const S2scatFilterBank,
    j0: *mut usize,
    j_max: *mut usize,
    l0: *mut usize,
) -> S2scatStatus {
    guard(|| {
        let b = &deref(b, "filter bank")?.inner;
        if let Some(p) = j0.as_mut() {
            *p = b.j0();
        }
        if let Some(p) = j_max.as_mut() {
            *p = b.j_max();
        }
        if let Some(p) = l0.as_mut() {
            *p = b.scaling_bandlimit();
        }
        Ok(())
    })
}

/// Largest deviation of the tiling sum from one.
#[no_mangle]
pub unsafe extern "C" fn s2scat_filter_bank_admissibility(
    b: *const S2scatFilterBank,
    residual: *mut f64,
) -> S2scatStatus {
    guard(|| {
        let b = &deref(b, "filter bank")?.inner;
        *residual.as_mut().ok_or_else(|| null("residual"))? = check_admissibility(b);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn s2scat_filter_bank_free(b: *mut S2scatFilterBank) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Scattering network of depth `depth` over the bank's scales.
#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_new(
    c: *const S2scatCoefficients,
    b: *const S2scatFilterBank,
    depth: i64,
    path_policy: S2scatPolicy,
    multires: bool,
    oversample: usize,
    out: *mut *mut S2scatScattering,
) -> S2scatStatus {
    guard(|| {
        let f = &deref(c, "coefficients")?.inner;
        let bank = &deref(b, "filter bank")?.inner;
        let paths = enumerate_paths(bank.j0(), bank.j_max(), depth, policy(path_policy))?;
        let inner = scattering_network(f, &paths, bank, ScatteringOptions { multires, oversample })?;
        let paths = inner.entries.keys().cloned().collect();
        put(out, S2scatScattering { inner, paths })
    })
}

#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_channel_count(s: *const S2scatScattering) -> usize {
    s.as_ref().map_or(0, |s| s.paths.len())
}

/// Band-limit `L0` shared by every channel.
#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_channel_bandlimit(s: *const S2scatScattering) -> usize {
    s.as_ref().map_or(0, |s| s.inner.provenance.l0)
}

/// Depth of channel `index`; writes up to `capacity` scales into `scales`.
#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_channel_path(
    s: *const S2scatScattering,
    index: usize,
    depth: *mut usize,
    scales: *mut usize,
    capacity: usize,
) -> S2scatStatus {
    guard(|| {
        let s = deref(s, "scattering")?;
        let p = s.paths.get(index).ok_or_else(|| {
            Failure(
                S2scatStatus::InvalidArgument,
                format!("channel {index} out of range ({} channels)", s.paths.len()),
            )
        })?;
        *depth.as_mut().ok_or_else(|| null("depth"))? = p.depth();
        if p.depth() > 0 {
            if capacity < p.depth() {
                return Err(Failure(
                    S2scatStatus::BufferTooSmall,
                    format!("path {p} has {} scales, buffer holds {capacity}", p.depth()),
                ));
            }
            if scales.is_null() {
                return Err(null("scale buffer"));
            }
            std::slice::from_raw_parts_mut(scales, p.depth()).copy_from_slice(p.scales());
        }
        Ok(())
    })
}

/// Copies the `L0^2` coefficients of channel `index`.
#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_channel_values(
    s: *const S2scatScattering,
    index: usize,
    out: *mut f64,
    capacity: usize,
) -> S2scatStatus {
    guard(|| {
        let s = deref(s, "scattering")?;
        let p = s
            .paths
            .get(index)
            .ok_or_else(|| Failure(S2scatStatus::InvalidArgument, format!("channel {index} out of range")))?;
        write_complex(s.inner.entries[p].values(), out, capacity)
    })
}

/// Euclidean distance over all channels.
#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_distance(
    a: *const S2scatScattering,
    b: *const S2scatScattering,
    distance: *mut f64,
) -> S2scatStatus {
    guard(|| {
        let d = scattering_distance(&deref(a, "scattering")?.inner, &deref(b, "scattering")?.inner)?;
        *distance.as_mut().ok_or_else(|| null("distance"))? = d;
        Ok(())
    })
}

/// Writes a `.scat` file to the NUL-terminated UTF-8 `path`.
#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_save(s: *const S2scatScattering, path: *const c_char) -> S2scatStatus {
    guard(|| {
        let s = deref(s, "scattering")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let p = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(S2scatStatus::InvalidArgument, "path is not UTF-8".into()))?;
        Ok(save_scat(p, &s.inner)?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn s2scat_scattering_free(s: *mut S2scatScattering) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
