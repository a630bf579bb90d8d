use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, RandomStream, C64, ZERO};

/// Max-norm tolerance on `Σ_s M^s† M^s − I`.
pub const CANONICAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Case1,
    Case2,
    Case3,
    Explicit,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::Case1 => "Case1",
            CaseTag::Case2 => "Case2",
            CaseTag::Case3 => "Case3",
            CaseTag::Explicit => "Explicit",
        }
    }
}

/// The generating matrices `{M^s}` of a uniform MPS, in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "KrausJson", try_from = "KrausJson")]
pub struct KrausSet {
    d_s: usize,
    d_m: usize,
    matrices: Vec<ComplexMatrix>,
    case_tag: CaseTag,
}

impl KrausSet {
    /// Validates shapes and canonical form.
    pub fn new(matrices: Vec<ComplexMatrix>, case_tag: CaseTag) -> Result<Self> {
        let d_s = matrices.len();
        if d_s == 0 {
            return Err(Error::InvalidDimension("empty Kraus set".into()));
        }
        let d_m = matrices[0].rows();
        if d_m == 0 {
            return Err(Error::InvalidDimension("bond dimension 0".into()));
        }
        if let Some(bad) = matrices.iter().find(|m| m.rows() != d_m || m.cols() != d_m) {
            return Err(Error::InvalidDimension(format!(
                "Kraus matrix is {}x{}, expected {d_m}x{d_m}",
                bad.rows(),
                bad.cols()
            )));
        }
        let set = Self {
            d_s,
            d_m,
            matrices,
            case_tag,
        };
        let deviation = set.canonical_defect();
        if !(deviation <= CANONICAL_TOL) {
            return Err(Error::NotCanonical { deviation });
        }
        Ok(set)
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_m(&self) -> usize {
        self.d_m
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    /// `‖Σ_s M^s† M^s − I‖_max`.
    pub fn canonical_defect(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.d_m, self.d_m);
        for m in &self.matrices {
            acc = &acc + &(&m.adjoint() * m);
        }
        (&acc - &ComplexMatrix::identity(self.d_m)).max_abs()
    }

    /// The channel `X ↦ Σ_s M^s X M^s†`.
    pub fn apply_channel(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.d_m, self.d_m);
        for m in &self.matrices {
            acc = &acc + &(&(m * x) * &m.adjoint());
        }
        acc
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct KrausJson {
    d_s: usize,
    #[serde(rename = "d_M")]
    d_m: usize,
    case_tag: CaseTag,
    matrices: Vec<Vec<[f64; 2]>>,
}

impl From<KrausSet> for KrausJson {
    fn from(k: KrausSet) -> Self {
        KrausJson {
            d_s: k.d_s,
            d_m: k.d_m,
            case_tag: k.case_tag,
            matrices: k
                .matrices
                .iter()
                .map(|m| m.as_slice().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<KrausJson> for KrausSet {
    type Error = Error;

    fn try_from(j: KrausJson) -> Result<Self> {
        if j.matrices.len() != j.d_s {
            return Err(Error::InvalidDimension(format!(
                "d_s = {} but {} matrices given",
                j.d_s,
                j.matrices.len()
            )));
        }
        let matrices = j
            .matrices
            .into_iter()
            .map(|entries| {
                let data = entries.into_iter().map(|[re, im]| C64::new(re, im)).collect();
                ComplexMatrix::from_vec(j.d_m, j.d_m, data)
            })
            .collect::<Result<Vec<_>>>()?;
        KrausSet::new(matrices, j.case_tag)
    }
}

/// `M^s` with `(M^s)_{ij} = Σ_{s',j'} U^{ss'}_{ij'} Ψ^{s'}_{j'j}` for a Haar
/// unitary `U` on `C^{d_s} ⊗ C^{d_M}` and `Ψ = (1/√d_s)(1,…,1)ᵀ ⊗ I`.
fn case1_matrices(d_s: usize, d_m: usize, stream: &mut RandomStream) -> Result<Vec<ComplexMatrix>> {
    if d_s == 0 || d_m == 0 {
        return Err(Error::InvalidDimension("d_s and d_M must be at least 1".into()));
    }
    let u = stream.haar_unitary(d_s * d_m)?;
    let w = 1.0 / (d_s as f64).sqrt();
    Ok((0..d_s)
        .map(|s| {
            ComplexMatrix::from_fn(d_m, d_m, |i, j| {
                (0..d_s).map(|sp| u[(s * d_m + i, sp * d_m + j)]).sum::<C64>() * w
            })
        })
        .collect())
}

pub fn build_case1(d_s: usize, d_m: usize, stream: &mut RandomStream) -> Result<KrausSet> {
    KrausSet::new(case1_matrices(d_s, d_m, stream)?, CaseTag::Case1)
}

fn half_dim(d_m: usize) -> Result<usize> {
    if d_m == 0 || !d_m.is_multiple_of(2) {
        return Err(Error::InvalidDimension(format!("d_M must be even, got {d_m}")));
    }
    Ok(d_m / 2)
}

/// Embed `a` and `b` as the blocks of a `2h×2h` matrix. `diagonal` places
/// them as `diag(a, b)`, otherwise as `[[0, a], [b, 0]]`.
fn blocks(a: &ComplexMatrix, b: &ComplexMatrix, diagonal: bool) -> ComplexMatrix {
    let h = a.rows();
    ComplexMatrix::from_fn(2 * h, 2 * h, |i, j| {
        let (bi, bj) = (i / h, j / h);
        let (ii, jj) = (i % h, j % h);
        match (diagonal, bi, bj) {
            (true, 0, 0) => a[(ii, jj)],
            (true, 1, 1) => b[(ii, jj)],
            (false, 0, 1) => a[(ii, jj)],
            (false, 1, 0) => b[(ii, jj)],
            _ => ZERO,
        }
    })
}

/// Block-diagonal `M^s = diag(M₁^s, M₂^s)` from two independent Case-1 draws.
pub fn build_case2(d_s: usize, d_m: usize, stream: &mut RandomStream) -> Result<KrausSet> {
    let h = half_dim(d_m)?;
    let m1 = case1_matrices(d_s, h, stream)?;
    let m2 = case1_matrices(d_s, h, stream)?;
    let matrices = m1.iter().zip(&m2).map(|(a, b)| blocks(a, b, true)).collect();
    KrausSet::new(matrices, CaseTag::Case2)
}

/// Anti-diagonal `M^s = [[0, M₁^s], [M₂^s, 0]]` from two independent Case-1 draws.
pub fn build_case3(d_s: usize, d_m: usize, stream: &mut RandomStream) -> Result<KrausSet> {
    let h = half_dim(d_m)?;
    let m1 = case1_matrices(d_s, h, stream)?;
    let m2 = case1_matrices(d_s, h, stream)?;
    let matrices = m1.iter().zip(&m2).map(|(a, b)| blocks(a, b, false)).collect();
    KrausSet::new(matrices, CaseTag::Case3)
}

pub fn build_case(case: CaseTag, d_s: usize, d_m: usize, stream: &mut RandomStream) -> Result<KrausSet> {
    match case {
        CaseTag::Case1 => build_case1(d_s, d_m, stream),
        CaseTag::Case2 => build_case2(d_s, d_m, stream),
        CaseTag::Case3 => build_case3(d_s, d_m, stream),
        CaseTag::Explicit => Err(Error::InvalidArgument(
            "explicit Kraus sets are loaded, not sampled".into(),
        )),
    }
}
