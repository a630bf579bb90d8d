//! Block entropies, mutual information and conditional mutual information.

pub mod brute;
pub mod info;
pub mod support;

pub use brute::{brute_force_density, brute_force_entropy, explicit_isometry, two_region_density, BRUTE_FORCE_CAP};
pub use info::{qcmi, qmi, EntropyCache, RegionSpec};
pub use support::{
    projected_density, purification_spectrum, region_entropy, spectrum_report, support_decomposition, von_neumann,
    EntropyReport, SupportProjection, DEFAULT_THRESHOLD,
};
