//! Uniform matrix product states: Kraus sets, transfer matrices, fixed points.

pub mod instances;
pub mod kraus;
pub mod state;
pub mod transfer;

pub use instances::{analytic_family, benchmark_kraus, benchmark_mutual_information, AnalyticFamily};
pub use kraus::{build_case, build_case1, build_case2, build_case3, CaseTag, KrausSet, CANONICAL_TOL};
pub use state::IuMps;
pub use transfer::{fixed_point, spectral_gap, transfer_matrix, TransferMatrix, CLUSTER_TOL, DEFAULT_PERIPHERAL_TOL};
