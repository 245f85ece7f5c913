//! Desk-scale experiments: equivariance, spectral mixing, invariance and
//! deformation stability sweeps. Every experiment is a pure function of its
//! config and seeds and emits a [`CsvTable`].

mod diffeo;
mod equivariance;
mod fields;
mod invariance;
mod mixing;
mod output;

pub use diffeo::{diffeo_stability_probe, DiffeoConfig, DiffeoField, DiffeoKind, DiffeoReport, DiffeoRow};
pub use equivariance::{equivariance_experiment, DepthRow, EquivarianceConfig, EquivarianceReport};
pub use fields::{gaussian_field, load_spectrum, parse_spectrum};
pub use invariance::{invariance_vs_scale, InvarianceConfig, InvarianceReport, InvarianceRow};
pub use mixing::{power_mixing_experiment, spectral_centroid, PowerMixingConfig, PowerMixingReport};
pub use output::{config_hash, CsvTable, LIBRARY_VERSION};

/// Median of a sample; the mean of the two central values for even sizes.
/// `None` when empty. Sorting first makes the result independent of input
/// order.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::median;

    #[test]
    fn median_cases() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0]), Some(3.0));
        assert_eq!(median(&[4.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
