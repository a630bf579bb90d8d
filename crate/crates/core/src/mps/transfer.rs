use super::kraus::KrausSet;
use crate::error::{Error, Result};
use crate::numerics::{eig_general, eig_hermitian, inverse, ComplexMatrix, EigenDecomposition, C64, ONE, ZERO};

/// Default width of the peripheral band `|ν| > 1 − tol`.
pub const DEFAULT_PERIPHERAL_TOL: f64 = 1e-8;

/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Fraction of the fixed-point weight that clipping may remove.
pub const MAX_CLIPPED_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub e: ComplexMatrix,
    pub spectrum: EigenDecomposition,
    pub peripheral_indices: Vec<usize>,
    /// `None` when every eigenvalue is peripheral.
    pub nu_gap: Option<f64>,
    pub peripheral_tol: f64,
}

impl TransferMatrix {
    pub fn d_m(&self) -> usize {
        // e is d_M² × d_M²; exact for the small dimensions used here.
        (self.e.rows() as f64).sqrt().round() as usize
    }

    pub fn is_peripheral(&self, idx: usize) -> bool {
        self.peripheral_indices.contains(&idx)
    }

    /// Number of eigenvalues with `|ν − 1| ≤ 1e-8`.
    pub fn unit_multiplicity(&self) -> usize {
        self.spectrum
            .values
            .iter()
            .filter(|v| (*v - ONE).norm() <= CLUSTER_TOL)
            .count()
    }
}

/// `E = Σ_s M^s ⊗ conj(M^s)` with its spectrum and peripheral classification.
pub fn transfer_matrix(kraus: &KrausSet, peripheral_tol: f64) -> Result<TransferMatrix> {
    if !(peripheral_tol > 0.0 && peripheral_tol < 0.1) {
        return Err(Error::InvalidArgument(format!(
            "peripheral_tol must lie in (0, 0.1), got {peripheral_tol}"
        )));
    }
    let dim = kraus.d_m() * kraus.d_m();
    let mut e = ComplexMatrix::zeros(dim, dim);
    for m in kraus.matrices() {
        e = &e + &m.kron(&m.conj());
    }
    let spectrum = eig_general(&e)?;
    let mut peripheral_indices = Vec::new();
    let mut nu_gap: Option<f64> = None;
    for (i, v) in spectrum.values.iter().enumerate() {
        let mag = v.norm();
        if mag > 1.0 - peripheral_tol {
            peripheral_indices.push(i);
        } else {
            nu_gap = Some(nu_gap.map_or(mag, |g| g.max(mag)));
        }
    }
    Ok(TransferMatrix {
        e,
        spectrum,
        peripheral_indices,
        nu_gap,
        peripheral_tol,
    })
}

pub fn spectral_gap(transfer: &TransferMatrix) -> Result<f64> {
    transfer.nu_gap.ok_or(Error::DegenerateSpectrum)
}

/// Orthonormal basis (columns) of the `k`-dimensional numerical kernel of `a`,
/// from the smallest eigenvalues of `a† a`.
pub(crate) fn kernel_basis(a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let gram = (&a.adjoint() * a).hermitian_part();
    let eig = eig_hermitian(&gram)?;
    let n = eig.values.len();
    let cols: Vec<usize> = (n - k..n).collect();
    Ok(eig.vectors.select_columns(&cols))
}

/// Spectral projector onto the eigenvalue-`nu` eigenspace, assuming it is
/// semisimple with multiplicity `k`: `R (L† R)⁻¹ L†`.
pub(crate) fn eigen_projector(e: &ComplexMatrix, nu: C64, k: usize) -> Result<ComplexMatrix> {
    let n = e.rows();
    let shifted = ComplexMatrix::from_fn(n, n, |i, j| e[(i, j)] - if i == j { nu } else { ZERO });
    let r = kernel_basis(&shifted, k)?;
    let l = kernel_basis(&shifted.adjoint(), k)?;
    let core = inverse(&(&l.adjoint() * &r))?;
    Ok(&(&r * &core) * &l.adjoint())
}

/// The fixed point reached from the maximally mixed state: the spectral
/// projector onto eigenvalue 1 applied to `vec(I/d_M)`, then Hermitized,
/// clipped to PSD and normalized to unit trace.
pub fn fixed_point(transfer: &TransferMatrix) -> Result<ComplexMatrix> {
    let k = transfer.unit_multiplicity();
    if k == 0 {
        return Err(Error::NoFixedPoint);
    }
    let d = transfer.d_m();
    let projector = eigen_projector(&transfer.e, ONE, k)?;
    let start = ComplexMatrix::identity(d).scale_real(1.0 / d as f64).vectorize();
    let raw = ComplexMatrix::devectorize(&projector.mat_vec(&start), d)?.hermitian_part();
    positivize(&raw)
}

/// Clip negative eigenvalues and renormalize to trace 1.
fn positivize(sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(sigma)?;
    let total: f64 = eig.values.iter().map(|v| v.abs()).sum();
    if total == 0.0 {
        return Err(Error::NoFixedPoint);
    }
    let negative: f64 = eig.values.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    let clipped = negative / total;
    if clipped > MAX_CLIPPED_WEIGHT {
        return Err(Error::NotPositive { clipped });
    }
    let kept: Vec<f64> = eig.values.iter().map(|v| v.max(0.0)).collect();
    let trace: f64 = kept.iter().sum();
    let n = kept.len();
    let v = &eig.vectors;
    let out = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|t| v[(i, t)] * (kept[t] / trace) * v[(j, t)].conj()).sum()
    });
    Ok(out.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::kraus::{build_case1, build_case2, build_case3, CaseTag};
    use crate::numerics::RandomStream;

    fn channel_defect(k: &KrausSet, sigma: &ComplexMatrix) -> f64 {
        (&k.apply_channel(sigma) - sigma).max_abs()
    }

    #[test]
    fn identity_channel_has_no_gap() {
        let k = KrausSet::new(vec![ComplexMatrix::identity(2)], CaseTag::Explicit).unwrap();
        let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
        assert_eq!(t.peripheral_indices.len(), 4);
        assert_eq!(spectral_gap(&t), Err(Error::DegenerateSpectrum));
    }

    #[test]
    fn left_fixed_point_is_identity() {
        let k = build_case1(3, 4, &mut RandomStream::new(4, 4)).unwrap();
        let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
        let one = ComplexMatrix::identity(4).vectorize();
        let row: Vec<C64> = (0..16)
            .map(|j| (0..16).map(|i| one[i].conj() * t.e[(i, j)]).sum())
            .collect();
        let defect = row
            .iter()
            .zip(&one)
            .map(|(a, b)| (a - b.conj()).norm())
            .fold(0.0, f64::max);
        assert!(defect <= 1e-10);
    }

    #[test]
    fn case1_fixed_point() {
        for idx in 0..20 {
            let k = build_case1(3, 4, &mut RandomStream::new(99, idx)).unwrap();
            let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
            let sigma = fixed_point(&t).unwrap();
            assert!((sigma.trace() - ONE).norm() < 1e-12);
            assert!(channel_defect(&k, &sigma) <= 1e-9);
            let gap = spectral_gap(&t).unwrap();
            assert!(gap > 0.0 && gap < 1.0);
        }
    }

    #[test]
    fn unitary_channel_fixed_point_is_maximally_mixed() {
        let u = RandomStream::new(2, 0).haar_unitary(2).unwrap();
        let k = KrausSet::new(vec![u], CaseTag::Explicit).unwrap();
        let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
        let sigma = fixed_point(&t).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((&sigma - &half).max_abs() < 1e-10);
    }

    #[test]
    fn case2_has_two_fixed_points_and_block_diagonal_sigma() {
        let k = build_case2(3, 4, &mut RandomStream::new(5, 1)).unwrap();
        let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
        assert!(t.unit_multiplicity() >= 2);
        let sigma = fixed_point(&t).unwrap();
        assert!(channel_defect(&k, &sigma) <= 1e-9);
        for i in 0..4 {
            for j in 0..4 {
                if (i < 2) != (j < 2) {
                    assert!(sigma[(i, j)].norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn case3_period_two_signature() {
        let k = build_case3(3, 4, &mut RandomStream::new(5, 2)).unwrap();
        let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
        let minus_one = t.spectrum.values.iter().any(|v| (v + ONE).norm() <= 1e-8);
        assert!(minus_one || t.unit_multiplicity() >= 2);
        for (i, v) in t.spectrum.values.iter().enumerate() {
            if (v + ONE).norm() <= 1e-8 {
                assert!(t.is_peripheral(i));
            }
        }
        let sigma = fixed_point(&t).unwrap();
        assert!(channel_defect(&k, &sigma) <= 1e-9);
        assert!(spectral_gap(&t).unwrap() < 1.0);
    }

    #[test]
    fn gap_of_diagonal_spectrum_channel() {
        // Amplitude damping: E has eigenvalues 1, p (populations) and √p, √p
        // (coherences), so the gap is √p = 0.6.
        let p: f64 = 0.36;
        let m0 = ComplexMatrix::from_real_diagonal(&[1.0, p.sqrt()]);
        let m1 = ComplexMatrix::from_real_rows(&[&[0.0, (1.0 - p).sqrt()], &[0.0, 0.0]]);
        let k = KrausSet::new(vec![m0, m1], CaseTag::Explicit).unwrap();
        let t = transfer_matrix(&k, DEFAULT_PERIPHERAL_TOL).unwrap();
        assert!((spectral_gap(&t).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let k = build_case1(2, 2, &mut RandomStream::new(0, 0)).unwrap();
        assert!(transfer_matrix(&k, 0.5).is_err());
    }
}
