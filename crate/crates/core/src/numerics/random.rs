//! Reproducible random streams and Haar-distributed unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::dense::householder_qr;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// A ChaCha20 stream keyed by `master_seed` and selected by `stream_index`.
///
/// Streams with different indices are disjoint keystreams of the same key, so
/// ensemble instance `i` always sees the same draws regardless of the order in
/// which instances are evaluated.
#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian with `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }

    /// Ginibre matrix with i.i.d. standard complex Gaussian entries.
    pub fn ginibre(&mut self, dim: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, dim, |_, _| self.complex_normal())
    }

    /// Haar-random unitary: QR of a Ginibre matrix with the phases of
    /// `diag(R)` moved into `Q`.
    pub fn haar_unitary(&mut self, dim: usize) -> Result<ComplexMatrix> {
        if dim == 0 {
            return Err(Error::InvalidDimension("Haar unitary of dimension 0".into()));
        }
        let z = self.ginibre(dim);
        let (mut q, r) = householder_qr(&z);
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        Ok(q)
    }
}

/// Haar-random unitary drawn from `stream`.
pub fn haar_unitary(dim: usize, stream: &mut RandomStream) -> Result<ComplexMatrix> {
    stream.haar_unitary(dim)
}
