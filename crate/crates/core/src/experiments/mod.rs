//! Decay scans, ensembles, gap statistics and the built-in benchmark.

pub mod benchmark;
pub mod ensemble;
pub mod gaps;
pub mod scan;

pub use benchmark::{benchmark_report, BenchmarkCheck, BenchmarkReport, Comparison};
pub use ensemble::{
    run_ensemble, run_ensemble_with, sample_instance, EnsembleConfig, EnsembleRun, EnsembleSummary, Histogram,
    InstanceFailure, InstanceOutcome, RateRecord, HISTOGRAM_BINS,
};
pub use gaps::{analytic_gaps, distinct_magnitudes, gap_statistics, second_family_slope, GapStatistics, SortedSample};
pub use scan::{extract_rate, normalized_log, scan_instance, shift_graph, CurvePoint, DecayCurve};
