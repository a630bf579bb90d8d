use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mps::{analytic_family, build_case1, transfer_matrix, AnalyticFamily, CLUSTER_TOL, DEFAULT_PERIPHERAL_TOL};
use crate::numerics::RandomStream;

/// A sorted sample with its extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedSample {
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl SortedSample {
    fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let min = values.first().copied().unwrap_or(f64::NAN);
        let max = values.last().copied().unwrap_or(f64::NAN);
        Self { values, min, max }
    }
}

/// Spectral differences of Haar-sampled transfer matrices, with eigenvalues
/// taken positionally in spectral order (repeats included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStatistics {
    pub n: usize,
    pub master_seed: u64,
    /// `|1 − |ν₁||`.
    pub unit_defect: SortedSample,
    /// `||ν₁| − |ν₂||`.
    pub first_gap: SortedSample,
    /// `||ν₂| − |ν₃||`.
    pub second_gap: SortedSample,
}

/// Case-1 samples with `d_s = 3`, `d_M = 4`; sample `i` uses stream `i`.
pub fn gap_statistics(n: usize, master_seed: u64) -> Result<GapStatistics> {
    if n == 0 {
        return Err(Error::InvalidArgument("gap statistics need n ≥ 1".into()));
    }
    let triples: Vec<[f64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let kraus = build_case1(3, 4, &mut RandomStream::new(master_seed, i as u64))?;
            let t = transfer_matrix(&kraus, DEFAULT_PERIPHERAL_TOL)?;
            let m: Vec<f64> = t.spectrum.values.iter().take(3).map(|v| v.norm()).collect();
            Ok([(1.0 - m[0]).abs(), (m[0] - m[1]).abs(), (m[1] - m[2]).abs()])
        })
        .collect::<Result<_>>()?;
    Ok(GapStatistics {
        n,
        master_seed,
        unit_defect: SortedSample::new(triples.iter().map(|t| t[0]).collect()),
        first_gap: SortedSample::new(triples.iter().map(|t| t[1]).collect()),
        second_gap: SortedSample::new(triples.iter().map(|t| t[2]).collect()),
    })
}

/// Distinct eigenvalue magnitudes of the family's transfer matrix, descending,
/// merged at [`CLUSTER_TOL`].
pub fn distinct_magnitudes(which: AnalyticFamily, beta: f64) -> Result<Vec<f64>> {
    let kraus = analytic_family(which, beta)?;
    let t = transfer_matrix(&kraus, DEFAULT_PERIPHERAL_TOL)?;
    let mut out: Vec<f64> = Vec::new();
    for v in &t.spectrum.values {
        let m = v.norm();
        if out.last().is_none_or(|&last| last - m > CLUSTER_TOL) {
            out.push(m);
        }
    }
    Ok(out)
}

/// `(|ν₁| − |ν₂|, |ν₂| − |ν₃|)` over distinct magnitudes, `ν₁` being the
/// unit eigenvalue.
pub fn analytic_gaps(which: AnalyticFamily, beta: f64) -> Result<(f64, f64)> {
    let m = distinct_magnitudes(which, beta)?;
    if m.len() < 3 {
        return Err(Error::DegenerateSpectrum);
    }
    Ok((m[0] - m[1], m[1] - m[2]))
}

/// First-order coefficient of `|ν₂| − |ν₃|` in β for the second family.
pub fn second_family_slope() -> f64 {
    (6f64.sqrt() - 2.0) / 3f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_samples_have_unit_leading_eigenvalue() {
        let stats = gap_statistics(50, 3).unwrap();
        assert!(stats.unit_defect.max <= 1e-12, "{}", stats.unit_defect.max);
        assert!(stats.first_gap.min > 0.0);
        assert!(stats.first_gap.values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(stats, gap_statistics(50, 3).unwrap());
    }

    #[test]
    fn first_family_magnitudes() {
        let beta = 0.1;
        let m = distinct_magnitudes(AnalyticFamily::First, beta).unwrap();
        assert_eq!(m.len(), 3);
        assert!((m[1] - (1.0 - beta)).abs() < 1e-12);
        assert!((m[0] - m[2] - 2.0 * beta).abs() < 1e-12);
    }

    #[test]
    fn second_family_linear_coefficient() {
        for beta in [1e-3, 1e-4] {
            let (_, g) = analytic_gaps(AnalyticFamily::Second, beta).unwrap();
            assert!((g - second_family_slope() * beta).abs() <= 10.0 * beta * beta, "{g:e}");
        }
    }
}
