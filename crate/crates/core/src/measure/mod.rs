//! Stationary statistics of the 1d game on `{0, 1}`.
//!
//! Two routes to the stationary law are provided: empirical histograms of
//! long trajectories and the iterated pushforward of a binned measure.
//! Moments follow from an exact recursion, and the average entanglement
//! entropy is available from simulation, from a density by quadrature, and
//! from truncated moment series that bracket it.

mod density;
mod entropy;
mod mc;
mod moments;

pub use density::{
    bin_index, closed_form_density, histogram_density, iterate_density, stationary_density,
    ClosedFormWeight, DensityGrid, Stationary, W_CRITICAL,
};
pub use entropy::{
    entropy_from_density, entropy_series_approximation, entropy_truncation, EntropyBounds,
};
pub use mc::{
    average_entropy_mc, mc_moments, mc_variance, sample_density, ChainSpec, Estimate, McOptions,
};
pub use moments::{
    gaussian_approximation, moment_table, small_x_exponent, spin_reconstruct,
    weight_for_exponent, GaussianApprox, MomentTable, SpinRepresentation,
};

/// `1 - 1/φ` with `φ` the golden ratio.
pub const W_GOLDEN: f64 = 0.381_966_011_250_105_2;
