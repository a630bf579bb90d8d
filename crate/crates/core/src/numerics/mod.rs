//! Dense complex linear algebra and seeded sampling.

pub mod dense;
pub mod eigen;
pub mod hermitian;
pub mod matrix;
pub mod random;

pub use dense::{householder_qr, inverse, mat_power, spectral_norm};
pub use eigen::{eig_general, spectral_order, EigenDecomposition};
pub use hermitian::{eig_hermitian, HermitianEigenDecomposition};
pub use matrix::{vec_norm, ComplexMatrix, C64, ONE, ZERO};
pub use random::{haar_unitary, RandomStream};
