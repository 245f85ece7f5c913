//! Axisymmetric scale-discretized wavelets on the sphere: kernel
//! construction, analysis, synthesis and admissibility checks.

mod bank;
mod kernel;
mod transform;

pub use bank::{build_filter_bank, check_admissibility, FilterBank};
pub(crate) use kernel::ceil_pow;
pub use kernel::{k_alpha, kappa_alpha, schwartz_s, schwartz_s_alpha, Kernel, KernelConfig, DEFAULT_QUADRATURE_NODES};
pub use transform::{analyze, axisym_convolve, synthesize, zero_coefficients, WaveletCoefficients};
