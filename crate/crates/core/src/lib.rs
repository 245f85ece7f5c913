pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod scattering;
pub mod sht;
pub mod wavelets;

pub use error::{Error, Result};
