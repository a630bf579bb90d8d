use super::kraus::KrausSet;
use super::transfer::{fixed_point, spectral_gap, transfer_matrix, TransferMatrix};
use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, ComplexMatrix, ONE};

/// Max-norm tolerance on `ℰ(σ) − σ`.
pub const FIXED_POINT_TOL: f64 = 1e-9;

/// A uniform MPS: Kraus set, transfer matrix and fixed-point density `σ`.
#[derive(Debug, Clone)]
pub struct IuMps {
    pub kraus: KrausSet,
    pub sigma: ComplexMatrix,
    pub transfer: TransferMatrix,
}

impl IuMps {
    pub fn new(kraus: KrausSet, peripheral_tol: f64) -> Result<Self> {
        let transfer = transfer_matrix(&kraus, peripheral_tol)?;
        let sigma = fixed_point(&transfer)?;
        Ok(Self { kraus, sigma, transfer })
    }

    /// Use a caller-supplied `σ`, checked for trace, Hermiticity and invariance.
    pub fn with_sigma(kraus: KrausSet, sigma: ComplexMatrix, peripheral_tol: f64) -> Result<Self> {
        if sigma.rows() != kraus.d_m() || !sigma.is_square() {
            return Err(Error::InvalidDimension("σ must be d_M × d_M".into()));
        }
        let defect = sigma.hermiticity_defect();
        if defect > 1e-12 {
            return Err(Error::NotHermitian { deviation: defect });
        }
        if (sigma.trace() - ONE).norm() > 1e-12 {
            return Err(Error::InvalidArgument("σ must have unit trace".into()));
        }
        let invariance = (&kraus.apply_channel(&sigma) - &sigma).max_abs();
        if invariance > FIXED_POINT_TOL {
            return Err(Error::NoFixedPoint);
        }
        let transfer = transfer_matrix(&kraus, peripheral_tol)?;
        Ok(Self { kraus, sigma, transfer })
    }

    pub fn d_s(&self) -> usize {
        self.kraus.d_s()
    }

    pub fn d_m(&self) -> usize {
        self.kraus.d_m()
    }

    pub fn nu_gap(&self) -> Result<f64> {
        spectral_gap(&self.transfer)
    }

    /// Smallest eigenvalue of `σ`.
    pub fn sigma_min(&self) -> Result<f64> {
        let eig = eig_hermitian(&self.sigma)?;
        Ok(eig.values.last().copied().unwrap_or(0.0))
    }
}
