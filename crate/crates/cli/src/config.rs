use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use iumps_core::entropy::{RegionSpec, DEFAULT_THRESHOLD};
use iumps_core::experiments::EnsembleConfig;
use iumps_core::mps::{benchmark_kraus, build_case, CaseTag, IuMps, KrausSet, DEFAULT_PERIPHERAL_TOL};
use iumps_core::numerics::RandomStream;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Ensemble size when none is configured.
pub const DEFAULT_ENSEMBLE_N: usize = 500;
/// Sample count for `gapstats` when none is configured.
pub const DEFAULT_GAPSTATS_N: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseArg {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    /// The closed-form benchmark instance.
    #[serde(rename = "bench")]
    Bench,
}

impl CaseArg {
    pub fn tag(self) -> CaseTag {
        match self {
            CaseArg::One => CaseTag::Case1,
            CaseArg::Two => CaseTag::Case2,
            CaseArg::Three => CaseTag::Case3,
            CaseArg::Bench => CaseTag::Explicit,
        }
    }
}

impl FromStr for CaseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" => Ok(CaseArg::One),
            "2" => Ok(CaseArg::Two),
            "3" => Ok(CaseArg::Three),
            "bench" => Ok(CaseArg::Bench),
            other => Err(format!("unknown case '{other}', expected 1, 2, 3 or bench")),
        }
    }
}

impl fmt::Display for CaseArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseArg::One => "1",
            CaseArg::Two => "2",
            CaseArg::Three => "3",
            CaseArg::Bench => "bench",
        })
    }
}

/// Flat run configuration. Missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub d_s: usize,
    #[serde(rename = "d_M")]
    pub d_m: usize,
    pub len_a: usize,
    pub len_c: usize,
    pub b_max_limit: usize,
    pub k: u32,
    /// `None` picks a per-command default.
    pub n_instances: Option<usize>,
    pub case_tag: CaseArg,
    pub master_seed: u64,
    pub threshold: f64,
    pub peripheral_tol: f64,
    pub burn_in: usize,
    pub output_dir: PathBuf,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    /// Explicit Kraus set in JSON; overrides `case_tag`.
    pub kraus_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d_s: 3,
            d_m: 4,
            len_a: 1,
            len_c: 1,
            b_max_limit: 40,
            k: 12,
            n_instances: None,
            case_tag: CaseArg::One,
            master_seed: 0,
            threshold: DEFAULT_THRESHOLD,
            peripheral_tol: DEFAULT_PERIPHERAL_TOL,
            burn_in: 3,
            output_dir: PathBuf::from("out"),
            jobs: 0,
            kraus_path: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.b_max_limit < 2 || !self.b_max_limit.is_multiple_of(2) {
            return Err(CliError::Config(format!(
                "b_max_limit must be even and at least 2, got {}",
                self.b_max_limit
            )));
        }
        if self.k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if self.len_a == 0 || self.len_a != self.len_c {
            return Err(CliError::Config("len_a and len_c must be equal and positive".into()));
        }
        if self.n_instances == Some(0) {
            return Err(CliError::Config("n_instances must be at least 1".into()));
        }
        Ok(())
    }

    pub fn is_explicit(&self) -> bool {
        self.kraus_path.is_some() || self.case_tag == CaseArg::Bench
    }

    /// Instance count for commands that default to a single instance.
    /// Explicit instances are deterministic, so only one is ever evaluated.
    pub fn single_count(&self) -> usize {
        if self.is_explicit() {
            1
        } else {
            self.n_instances.unwrap_or(1)
        }
    }

    pub fn region(&self) -> RegionSpec {
        RegionSpec {
            len_a: self.len_a,
            len_b: 2,
            len_c: self.len_c,
        }
    }

    pub fn load_kraus(&self) -> Result<Option<KrausSet>, CliError> {
        let Some(path) = &self.kraus_path else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(Some(KrausSet::from_json(&text)?))
    }

    /// Instance `id`: an explicit set if configured, otherwise a sample from
    /// stream `id` of the master seed.
    pub fn kraus_for(&self, id: usize, explicit: Option<&KrausSet>) -> iumps_core::Result<KrausSet> {
        if let Some(k) = explicit {
            return Ok(k.clone());
        }
        match self.case_tag {
            CaseArg::Bench => Ok(benchmark_kraus()),
            case => build_case(
                case.tag(),
                self.d_s,
                self.d_m,
                &mut RandomStream::new(self.master_seed, id as u64),
            ),
        }
    }

    pub fn instance(&self, id: usize, explicit: Option<&KrausSet>) -> iumps_core::Result<IuMps> {
        IuMps::new(self.kraus_for(id, explicit)?, self.peripheral_tol)
    }

    pub fn ensemble(&self) -> EnsembleConfig {
        let tag = if self.is_explicit() {
            CaseTag::Explicit
        } else {
            self.case_tag.tag()
        };
        EnsembleConfig {
            n_instances: self.n_instances.unwrap_or(DEFAULT_ENSEMBLE_N),
            case_mix: vec![(tag, 1.0)],
            region: self.region(),
            master_seed: self.master_seed,
            d_s: self.d_s,
            d_m: self.d_m,
            b_max_limit: self.b_max_limit,
            k: self.k,
            burn_in: self.burn_in,
            threshold: self.threshold,
            peripheral_tol: self.peripheral_tol,
            jobs: self.jobs,
        }
    }
}
