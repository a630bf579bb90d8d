use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::brute::two_region_density;
use super::support::{region_entropy, spectrum_report};
use crate::error::{Error, Result};
use crate::mps::IuMps;

/// Lengths of the regions `A`, `B`, `C`, left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub len_a: usize,
    pub len_b: usize,
    pub len_c: usize,
}

impl RegionSpec {
    pub fn new(len_a: usize, len_b: usize, len_c: usize) -> Result<Self> {
        if len_a + len_b + len_c == 0 {
            return Err(Error::InvalidRegion("regions are all empty".into()));
        }
        Ok(Self { len_a, len_b, len_c })
    }

    pub fn with_b(self, len_b: usize) -> Self {
        Self { len_b, ..self }
    }

    fn require_outer(&self) -> Result<()> {
        if self.len_a == 0 || self.len_c == 0 {
            return Err(Error::InvalidRegion("A and C need at least one site".into()));
        }
        Ok(())
    }
}

/// Block entropies memoized by length. By translation invariance the entropy
/// of a contiguous block depends on its length only.
pub struct EntropyCache<'a> {
    mps: &'a IuMps,
    threshold: f64,
    cache: HashMap<usize, f64>,
}

impl<'a> EntropyCache<'a> {
    pub fn new(mps: &'a IuMps, threshold: f64) -> Self {
        Self {
            mps,
            threshold,
            cache: HashMap::new(),
        }
    }

    pub fn entropy(&mut self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        if let Some(&s) = self.cache.get(&n) {
            return Ok(s);
        }
        let s = region_entropy(self.mps, n, self.threshold)?.entropy;
        self.cache.insert(n, s);
        Ok(s)
    }

    /// `S(AB) + S(BC) − S(ABC) − S(B)`.
    pub fn qcmi(&mut self, region: RegionSpec) -> Result<f64> {
        region.require_outer()?;
        if region.len_b == 0 {
            return Err(Error::InvalidRegion("conditional information needs |B| ≥ 1".into()));
        }
        let RegionSpec { len_a, len_b, len_c } = region;
        Ok(self.entropy(len_a + len_b)? + self.entropy(len_b + len_c)?
            - self.entropy(len_a + len_b + len_c)?
            - self.entropy(len_b)?)
    }

    /// `S(A) + S(C) − S(AC)`.
    pub fn qmi(&mut self, region: RegionSpec) -> Result<f64> {
        region.require_outer()?;
        let rho = two_region_density(self.mps, region.len_a, region.len_b, region.len_c)?;
        let s_ac = spectrum_report(&rho, region.len_a + region.len_c)?.entropy;
        Ok(self.entropy(region.len_a)? + self.entropy(region.len_c)? - s_ac)
    }
}

pub fn qcmi(mps: &IuMps, region: RegionSpec, threshold: f64) -> Result<f64> {
    EntropyCache::new(mps, threshold).qcmi(region)
}

pub fn qmi(mps: &IuMps, region: RegionSpec, threshold: f64) -> Result<f64> {
    EntropyCache::new(mps, threshold).qmi(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::brute::brute_force_density;
    use crate::entropy::support::DEFAULT_THRESHOLD;
    use crate::mps::{
        benchmark_kraus, benchmark_mutual_information, build_case1, CaseTag, KrausSet, DEFAULT_PERIPHERAL_TOL,
    };
    use crate::numerics::{ComplexMatrix, RandomStream};

    fn benchmark() -> IuMps {
        IuMps::new(benchmark_kraus(), DEFAULT_PERIPHERAL_TOL).unwrap()
    }

    /// Partial traces of an explicit 4-site density over sites, by brute force.
    fn reduce(rho: &ComplexMatrix, d: usize, sites: usize, keep: &[usize]) -> ComplexMatrix {
        let dim_keep = d.pow(keep.len() as u32);
        let total = d.pow(sites as u32);
        let digit = |idx: usize, site: usize| (idx / d.pow((sites - 1 - site) as u32)) % d;
        let key = |idx: usize| keep.iter().fold(0, |acc, &s| acc * d + digit(idx, s));
        let rest = |idx: usize| {
            (0..sites)
                .filter(|s| !keep.contains(s))
                .fold(0, |acc, s| acc * d + digit(idx, s))
        };
        let mut out = ComplexMatrix::zeros(dim_keep, dim_keep);
        for i in 0..total {
            for j in 0..total {
                if rest(i) == rest(j) {
                    out[(key(i), key(j))] += rho[(i, j)];
                }
            }
        }
        out
    }

    #[test]
    fn benchmark_qcmi_matches_explicit_partial_traces() {
        let mps = benchmark();
        let rho = brute_force_density(&mps, 4).unwrap();
        let s = |keep: &[usize]| spectrum_report(&reduce(&rho, 3, 4, keep), keep.len()).unwrap().entropy;
        let oracle = s(&[0, 1, 2]) + s(&[1, 2, 3]) - s(&[0, 1, 2, 3]) - s(&[1, 2]);
        let got = qcmi(&mps, RegionSpec::new(1, 2, 1).unwrap(), DEFAULT_THRESHOLD).unwrap();
        assert!((got - oracle).abs() < 1e-9, "{got} vs {oracle}");
        // The explicit partial trace also validates the two-region state.
        let ac_oracle = s(&[0, 3]);
        let ac = two_region_density(&mps, 1, 2, 1).unwrap();
        let ac_got = spectrum_report(&ac, 2).unwrap().entropy;
        assert!((ac_got - ac_oracle).abs() < 1e-12);
    }

    #[test]
    fn product_state_information_vanishes() {
        let k = KrausSet::new(vec![ComplexMatrix::identity(1)], CaseTag::Explicit).unwrap();
        let mps = IuMps::new(k, DEFAULT_PERIPHERAL_TOL).unwrap();
        let r = RegionSpec::new(1, 3, 1).unwrap();
        assert!(qcmi(&mps, r, DEFAULT_THRESHOLD).unwrap().abs() < 1e-12);
        assert!(qmi(&mps, r.with_b(30), DEFAULT_THRESHOLD).unwrap().abs() < 1e-12);
    }

    #[test]
    fn benchmark_mutual_information_limit() {
        let mps = benchmark();
        let got = qmi(&mps, RegionSpec::new(1, 26, 1).unwrap(), DEFAULT_THRESHOLD).unwrap();
        assert!((got - benchmark_mutual_information()).abs() < 1e-12, "{got:e}");
    }

    #[test]
    fn strong_subadditivity_on_random_instances() {
        for idx in 0..5 {
            let k = build_case1(3, 4, &mut RandomStream::new(17, idx)).unwrap();
            let mps = IuMps::new(k, DEFAULT_PERIPHERAL_TOL).unwrap();
            let mut cache = EntropyCache::new(&mps, DEFAULT_THRESHOLD);
            for b in 1..12 {
                assert!(cache.qcmi(RegionSpec::new(1, b, 1).unwrap()).unwrap() >= -1e-9);
            }
        }
    }

    #[test]
    fn region_validation() {
        let mps = benchmark();
        assert!(RegionSpec::new(0, 0, 0).is_err());
        assert!(qcmi(&mps, RegionSpec::new(1, 0, 1).unwrap(), DEFAULT_THRESHOLD).is_err());
        assert!(qmi(&mps, RegionSpec::new(0, 2, 1).unwrap(), DEFAULT_THRESHOLD).is_err());
    }
}
