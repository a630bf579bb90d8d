use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scan::{extract_rate, scan_instance, shift_graph, DecayCurve};
use crate::bounds::{jordan_constants, BoundConstants};
use crate::entropy::RegionSpec;
use crate::error::{Error, Result};
use crate::mps::{build_case, CaseTag, IuMps};
use crate::numerics::RandomStream;

/// Side length of the histogram grid.
pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_instances: usize,
    /// Case tags with relative weights.
    pub case_mix: Vec<(CaseTag, f64)>,
    pub region: RegionSpec,
    pub master_seed: u64,
    pub d_s: usize,
    pub d_m: usize,
    pub b_max_limit: usize,
    pub k: u32,
    pub burn_in: usize,
    pub threshold: f64,
    pub peripheral_tol: f64,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_instances: 500,
            case_mix: vec![(CaseTag::Case1, 1.0)],
            region: RegionSpec {
                len_a: 1,
                len_b: 2,
                len_c: 1,
            },
            master_seed: 0,
            d_s: 3,
            d_m: 4,
            b_max_limit: 40,
            k: 12,
            burn_in: 3,
            threshold: crate::entropy::DEFAULT_THRESHOLD,
            peripheral_tol: crate::mps::DEFAULT_PERIPHERAL_TOL,
            jobs: 0,
        }
    }
}

impl EnsembleConfig {
    /// Case of instance `i`: the mix is laid out over `[0, 1)` in order and
    /// instance `i` takes the case covering `(i + ½)/n`.
    pub fn case_for(&self, instance_id: usize) -> CaseTag {
        let total: f64 = self.case_mix.iter().map(|(_, w)| w.max(0.0)).sum();
        let pos = (instance_id as f64 + 0.5) / self.n_instances.max(1) as f64 * total;
        let mut acc = 0.0;
        for (tag, w) in &self.case_mix {
            acc += w.max(0.0);
            if pos < acc {
                return *tag;
            }
        }
        self.case_mix.last().map_or(CaseTag::Case1, |(t, _)| *t)
    }
}

/// Counts over `H_{i,j} = (−(2i+1), −(2i−1)) × [2j, 2j+2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts[i][j]`.
    pub counts: Vec<Vec<u64>>,
    pub out_of_range: u64,
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            counts: vec![vec![0; HISTOGRAM_BINS]; HISTOGRAM_BINS],
            out_of_range: 0,
        }
    }
}

impl Histogram {
    pub fn bin(x: f64, y: f64) -> Option<(usize, usize)> {
        let i = (-x / 2.0).round();
        let j = (y / 2.0).floor();
        let in_x = (x + 2.0 * i).abs() < 1.0;
        let limit = HISTOGRAM_BINS as f64;
        (in_x && (0.0..limit).contains(&i) && (0.0..limit).contains(&j)).then_some((i as usize, j as usize))
    }

    pub fn add(&mut self, x: f64, y: f64) {
        match Self::bin(x, y) {
            Some((i, j)) => self.counts[i][j] += 1,
            None => self.out_of_range += 1,
        }
    }

    pub fn binned(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRecord {
    pub instance_id: u64,
    pub case_tag: CaseTag,
    pub nu_gap: f64,
    pub b_max: usize,
    /// `None` when the curve is too short for the regression window.
    pub rate: Option<f64>,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFailure {
    pub instance_id: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n_instances: usize,
    pub records: Vec<RateRecord>,
    pub failures: Vec<InstanceFailure>,
    /// Instances whose curve was too short for a rate.
    pub rate_skips: usize,
    pub histogram: Histogram,
    pub total_shifted_points: u64,
    pub cdf_all: Vec<f64>,
    /// Rates of instances with `b_max` equal to the scan limit.
    pub cdf_full: Vec<f64>,
}

impl EnsembleSummary {
    pub fn rates(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.rate).collect()
    }
}

/// Everything computed for one instance.
#[derive(Debug, Clone)]
pub struct InstanceOutcome {
    pub instance_id: u64,
    pub curve: DecayCurve,
    pub rate: Option<f64>,
    pub constants: std::result::Result<BoundConstants, Error>,
}

#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub summary: EnsembleSummary,
    pub outcomes: Vec<std::result::Result<InstanceOutcome, InstanceFailure>>,
}

/// Sampled instance `id`, drawn from stream `id` of the master seed.
pub fn sample_instance(config: &EnsembleConfig, id: usize) -> Result<IuMps> {
    let mut stream = RandomStream::new(config.master_seed, id as u64);
    let kraus = build_case(config.case_for(id), config.d_s, config.d_m, &mut stream)?;
    IuMps::new(kraus, config.peripheral_tol)
}

fn analyze(config: &EnsembleConfig, id: usize, mps: Result<IuMps>) -> Result<InstanceOutcome> {
    let mps = mps?;
    let mut curve = scan_instance(&mps, config.region, config.b_max_limit, config.k, config.threshold)?;
    curve.instance_id = id as u64;
    let rate = extract_rate(&curve, config.burn_in).ok();
    Ok(InstanceOutcome {
        instance_id: id as u64,
        curve,
        rate,
        constants: jordan_constants(&mps),
    })
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleRun> {
    run_ensemble_with(config, |id| sample_instance(config, id))
}

/// Ensemble over instances produced by `build`, evaluated in parallel and
/// aggregated in instance order.
pub fn run_ensemble_with<F>(config: &EnsembleConfig, build: F) -> Result<EnsembleRun>
where
    F: Fn(usize) -> Result<IuMps> + Sync,
{
    if config.n_instances == 0 {
        return Err(Error::InvalidArgument("ensemble needs at least one instance".into()));
    }
    if config.case_mix.is_empty() || config.case_mix.iter().all(|(_, w)| *w <= 0.0) {
        return Err(Error::InvalidArgument("case mix has no positive weight".into()));
    }
    let work = || -> Vec<_> {
        (0..config.n_instances)
            .into_par_iter()
            .map(|id| {
                analyze(config, id, build(id)).map_err(|e| InstanceFailure {
                    instance_id: id as u64,
                    error: e.to_string(),
                })
            })
            .collect()
    };
    let outcomes = if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(work)
    } else {
        work()
    };
    let summary = summarize(config, &outcomes);
    Ok(EnsembleRun { summary, outcomes })
}

fn summarize(
    config: &EnsembleConfig,
    outcomes: &[std::result::Result<InstanceOutcome, InstanceFailure>],
) -> EnsembleSummary {
    let mut histogram = Histogram::default();
    let mut total_shifted_points = 0u64;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                for (x, y) in shift_graph(&o.curve) {
                    histogram.add(x, y);
                    total_shifted_points += 1;
                }
                records.push(RateRecord {
                    instance_id: o.instance_id,
                    case_tag: o.curve.case_tag,
                    nu_gap: o.curve.nu_gap,
                    b_max: o.curve.b_max,
                    rate: o.rate,
                    n_points: o.curve.points.len(),
                });
            }
            Err(f) => failures.push(f.clone()),
        }
    }
    let mut cdf_all: Vec<f64> = records.iter().filter_map(|r| r.rate).collect();
    let mut cdf_full: Vec<f64> = records
        .iter()
        .filter(|r| r.b_max == config.b_max_limit)
        .filter_map(|r| r.rate)
        .collect();
    cdf_all.sort_by(f64::total_cmp);
    cdf_full.sort_by(f64::total_cmp);
    EnsembleSummary {
        n_instances: config.n_instances,
        rate_skips: records.iter().filter(|r| r.rate.is_none()).count(),
        records,
        failures,
        histogram,
        total_shifted_points,
        cdf_all,
        cdf_full,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{benchmark_kraus, DEFAULT_PERIPHERAL_TOL};

    #[test]
    fn histogram_bins() {
        assert_eq!(Histogram::bin(0.0, 0.0), Some((0, 0)));
        assert_eq!(Histogram::bin(-2.0, 1.99), Some((1, 0)));
        assert_eq!(Histogram::bin(-38.0, 39.9), Some((19, 19)));
        assert_eq!(Histogram::bin(-40.0, 1.0), None);
        assert_eq!(Histogram::bin(-2.0, 40.0), None);
        assert_eq!(Histogram::bin(-2.0, -0.5), None);
        assert_eq!(Histogram::bin(-1.0, 0.5), None);
    }

    #[test]
    fn case_mix_layout() {
        let config = EnsembleConfig {
            n_instances: 4,
            case_mix: vec![(CaseTag::Case1, 1.0), (CaseTag::Case3, 1.0)],
            ..EnsembleConfig::default()
        };
        let tags: Vec<_> = (0..4).map(|i| config.case_for(i)).collect();
        assert_eq!(tags, [CaseTag::Case1, CaseTag::Case1, CaseTag::Case3, CaseTag::Case3]);
    }

    #[test]
    fn singleton_with_injected_instance() {
        let config = EnsembleConfig {
            n_instances: 1,
            jobs: 1,
            ..EnsembleConfig::default()
        };
        let run = run_ensemble_with(&config, |_| IuMps::new(benchmark_kraus(), DEFAULT_PERIPHERAL_TOL)).unwrap();
        let o = run.outcomes[0].as_ref().unwrap();
        assert_eq!(run.summary.records[0].b_max, o.curve.b_max);
        assert_eq!(run.summary.total_shifted_points, o.curve.points.len() as u64);
        assert_eq!(
            run.summary.histogram.binned() + run.summary.histogram.out_of_range,
            run.summary.total_shifted_points
        );
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let base = EnsembleConfig {
            n_instances: 6,
            master_seed: 42,
            b_max_limit: 16,
            ..EnsembleConfig::default()
        };
        let a = run_ensemble(&EnsembleConfig {
            jobs: 1,
            ..base.clone()
        })
        .unwrap();
        let b = run_ensemble(&EnsembleConfig { jobs: 3, ..base }).unwrap();
        let ja = serde_json::to_string(&a.summary).unwrap();
        let jb = serde_json::to_string(&b.summary).unwrap();
        assert_eq!(ja, jb);
        assert!(a.summary.cdf_all.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let config = EnsembleConfig {
            n_instances: 3,
            b_max_limit: 8,
            ..EnsembleConfig::default()
        };
        let run = run_ensemble_with(&config, |id| {
            if id == 1 {
                Err(Error::NoFixedPoint)
            } else {
                sample_instance(&config, id)
            }
        })
        .unwrap();
        assert_eq!(run.summary.failures.len(), 1);
        assert_eq!(run.summary.failures[0].instance_id, 1);
        assert_eq!(run.summary.records.len(), 2);
    }
}
