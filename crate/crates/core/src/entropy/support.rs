//! Entropies of contiguous blocks through the support of the reduced density.
//!
//! With `X_{s,(a,b)} = (M_s)_{ab}` the block density is `ρₙ = X (I ⊗ σ) X†`.
//! The Gram matrix `G̃ = X†X` is a reshuffle of `G = Eⁿ`; writing
//! `G̃ = W Σ W†`, the nonzero spectrum of `ρₙ` is that of
//! `Σ^{1/2} W† (I ⊗ σ) W Σ^{1/2}`, a matrix of size at most `d_M²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mps::{IuMps, TransferMatrix};
use crate::numerics::{eig_hermitian, mat_power, ComplexMatrix, ZERO};

/// Default relative cut on `G̃` eigenvalues.
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Accepted `‖G̃ − G̃†‖_F / ‖G̃‖_F` before Hermitizing.
pub const GRAM_HERMITIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SupportProjection {
    /// Unitary eigenvector matrix of `G̃`.
    pub w: ComplexMatrix,
    /// Eigenvalues of `G̃`, descending.
    pub sigma_diag: Vec<f64>,
    /// Eigenvalues above `threshold · sigma_diag[0]`.
    pub support_dim: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub region_len: usize,
    /// Clipped spectrum, descending, one entry per support dimension.
    pub eigenvalues: Vec<f64>,
    /// Nats.
    pub entropy: f64,
    /// Total magnitude of negative eigenvalues set to zero.
    pub clipped_weight: f64,
}

/// `G̃[(a,b),(a',b')] = G[(a',a),(b',b)]` for `G = Eⁿ`.
pub fn gram_from_power(g: &ComplexMatrix, d_m: usize) -> ComplexMatrix {
    let n = d_m * d_m;
    ComplexMatrix::from_fn(n, n, |row, col| {
        let (a, b) = (row / d_m, row % d_m);
        let (ap, bp) = (col / d_m, col % d_m);
        g[(ap * d_m + a, bp * d_m + b)]
    })
}

pub fn support_decomposition(transfer: &TransferMatrix, n: usize, threshold: f64) -> Result<SupportProjection> {
    if n == 0 {
        return Err(Error::InvalidRegion("block length must be at least 1".into()));
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let d_m = transfer.d_m();
    let g = mat_power(&transfer.e, n as u64);
    let gram = gram_from_power(&g, d_m);
    let deviation = gram.hermiticity_defect();
    if deviation > GRAM_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = eig_hermitian(&gram.hermitian_part())?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let support_dim = if top > 0.0 {
        eig.values.iter().take_while(|&&v| v > threshold * top).count()
    } else {
        0
    };
    Ok(SupportProjection {
        w: eig.vectors,
        sigma_diag: eig.values,
        support_dim,
        threshold,
    })
}

/// `Σ^{1/2} W† (I ⊗ σ) W Σ^{1/2}` on the retained columns.
pub fn projected_density(sp: &SupportProjection, sigma: &ComplexMatrix) -> ComplexMatrix {
    let d_m = sigma.rows();
    let k = sp.support_dim;
    let cols: Vec<usize> = (0..k).collect();
    let wk = sp.w.select_columns(&cols);
    let id_sigma = ComplexMatrix::identity(d_m).kron(sigma);
    let core = &(&wk.adjoint() * &id_sigma) * &wk;
    let root: Vec<f64> = sp.sigma_diag[..k].iter().map(|v| v.max(0.0).sqrt()).collect();
    ComplexMatrix::from_fn(k, k, |i, j| core[(i, j)] * root[i] * root[j]).hermitian_part()
}

/// `−Σ λ ln λ` with `0 ln 0 = 0`.
pub fn von_neumann(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum()
}

/// Clipped spectrum, clipped weight and entropy of a Hermitian density matrix.
pub fn spectrum_report(rho: &ComplexMatrix, region_len: usize) -> Result<EntropyReport> {
    if rho.rows() == 0 {
        return Ok(EntropyReport {
            region_len,
            eigenvalues: vec![],
            entropy: 0.0,
            clipped_weight: 0.0,
        });
    }
    let eig = eig_hermitian(&rho.hermitian_part())?;
    let clipped_weight = eig.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let eigenvalues: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    Ok(EntropyReport {
        region_len,
        entropy: von_neumann(&eigenvalues),
        eigenvalues,
        clipped_weight,
    })
}

pub fn region_entropy(mps: &IuMps, n: usize, threshold: f64) -> Result<EntropyReport> {
    let sp = support_decomposition(&mps.transfer, n, threshold)?;
    let rho = projected_density(&sp, &mps.sigma);
    spectrum_report(&rho, n)
}

/// `√σ` for a Hermitian PSD `σ`.
pub(crate) fn psd_sqrt(sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(sigma)?;
    let n = sigma.rows();
    let v = &eig.vectors;
    let roots: Vec<f64> = eig.values.iter().map(|x| x.max(0.0).sqrt()).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|t| v[(i, t)] * roots[t] * v[(j, t)].conj()).sum()
    }))
}

/// Nonzero spectrum of `ρₙ` from the complementary side of the purification:
/// the eigenvalues of `(ℰⁿ ⊗ id)(|√σ⟩⟨√σ|)`, descending and clipped at 0.
pub fn purification_spectrum(mps: &IuMps, n: usize) -> Result<Vec<f64>> {
    let d = mps.d_m();
    let g = mat_power(&mps.transfer.e, n as u64);
    let root = psd_sqrt(&mps.sigma)?;
    // Y[(a,c),(a',c')] = Σ_{b,b'} G[(a,a'),(b,b')] √σ_{bc} conj(√σ_{b'c'})
    let mut y = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for ap in 0..d {
            for c in 0..d {
                for cp in 0..d {
                    let mut acc = ZERO;
                    for b in 0..d {
                        for bp in 0..d {
                            acc += g[(a * d + ap, b * d + bp)] * root[(b, c)] * root[(bp, cp)].conj();
                        }
                    }
                    y[(a * d + c, ap * d + cp)] = acc;
                }
            }
        }
    }
    Ok(spectrum_report(&y, n)?.eigenvalues)
}
