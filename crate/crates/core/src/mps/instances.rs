//! Explicit Kraus sets with closed-form properties.

use std::f64::consts::FRAC_1_SQRT_2;

use super::kraus::{CaseTag, KrausSet};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// `17 ln 2 / 16 − 9 ln 3 / 8 + 5 ln 5 / 16`, the large-separation mutual
/// information of [`benchmark_kraus`] with single-site outer regions.
pub fn benchmark_mutual_information() -> f64 {
    17.0 * 2f64.ln() / 16.0 - 9.0 * 3f64.ln() / 8.0 + 5.0 * 5f64.ln() / 16.0
}

fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let h = a.rows();
    let mut m = ComplexMatrix::zeros(2 * h, 2 * h);
    for i in 0..h {
        for j in 0..h {
            m[(i, j)] = a[(i, j)];
            m[(h + i, h + j)] = b[(i, j)];
        }
    }
    m
}

/// Block-diagonal benchmark state with `d_s = 3`, `d_M = 4` and fixed point `I/4`.
///
/// The first block is `{[[0,−r],[0,0]], diag(−r, r), [[0,0],[r,0]]}` with
/// `r = 1/√2`; the second block uses the same three matrices cyclically
/// relabelled (`s → s+2 mod 3`), so the two blocks have different
/// single-site marginals.
pub fn benchmark_kraus() -> KrausSet {
    let r = FRAC_1_SQRT_2;
    let m1 = [
        ComplexMatrix::from_real_rows(&[&[0.0, -r], &[0.0, 0.0]]),
        ComplexMatrix::from_real_diagonal(&[-r, r]),
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[r, 0.0]]),
    ];
    let m2 = [m1[2].clone(), m1[0].clone(), m1[1].clone()];
    let matrices = m1.iter().zip(&m2).map(|(a, b)| block_diag(a, b)).collect();
    KrausSet::new(matrices, CaseTag::Explicit).expect("benchmark Kraus set is canonical")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticFamily {
    First,
    Second,
}

/// `|x⟩⟨y| ⊗ I₂` on `C² ⊗ C²`, with `|+⟩ = e₀`, `|−⟩ = e₁`.
fn outer_kron_id(x: usize, y: usize, scale: f64) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(2, 2);
    a[(x, y)] = crate::numerics::C64::new(scale, 0.0);
    a.kron(&ComplexMatrix::identity(2))
}

/// One-parameter channel families on `C⁴ ≅ C² ⊗ C²` with `d_s = 3`. Physical
/// index order is `(1, 0, −1)`.
pub fn analytic_family(which: AnalyticFamily, beta: f64) -> Result<KrausSet> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument(format!("beta must lie in [0, 1], got {beta}")));
    }
    const PLUS: usize = 0;
    const MINUS: usize = 1;
    let matrices = match which {
        AnalyticFamily::First => vec![
            outer_kron_id(MINUS, PLUS, beta.sqrt()),
            ComplexMatrix::identity(4).scale_real((1.0 - beta).sqrt()),
            outer_kron_id(PLUS, MINUS, -beta.sqrt()),
        ],
        AnalyticFamily::Second => {
            let a = (1.0 - beta) * (2.0f64 / 3.0).sqrt() + beta * 3f64.sqrt() / 2.0;
            let b = (1.0 - beta) / 3f64.sqrt() + beta / 2.0;
            // The interpolated pair is not exactly unit-norm for 0 < β < 1.
            let norm = (a * a + b * b).sqrt();
            let (a, b) = (a / norm, b / norm);
            let middle = &outer_kron_id(PLUS, PLUS, -b) + &outer_kron_id(MINUS, MINUS, b);
            vec![outer_kron_id(MINUS, PLUS, a), middle, outer_kron_id(PLUS, MINUS, -a)]
        }
    };
    KrausSet::new(matrices, CaseTag::Explicit)
}
