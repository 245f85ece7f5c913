//! Scattering propagators, path enumeration and scattering networks.

pub mod io;
mod network;
mod path;

pub use network::{
    propagate, scatter_path, scattering_distance, scattering_network, Provenance, ScatteringCoefficients,
    ScatteringOptions,
};
pub use path::{enumerate_paths, Path, PathPolicy, PathSet};
