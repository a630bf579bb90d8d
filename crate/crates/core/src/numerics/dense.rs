//! Small dense kernels: Householder QR, inversion, powers and norms.

use super::hermitian::eig_hermitian;
use super::matrix::{vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Householder QR factorization `a = q · r` of a square matrix.
pub fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    assert!(a.is_square(), "householder_qr expects a square matrix");
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let x: Vec<C64> = (k..n).map(|i| r[(i, k)]).collect();
        let Some(v) = householder_vector(&x) else {
            continue;
        };
        // r[k.., k..] -= 2 v (v† r[k.., k..])
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * r[(k + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                r[(k + t, j)] -= vt * dot * 2.0;
            }
        }
        // q[:, k..] -= 2 (q[:, k..] v) v†
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| q[(i, k + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                q[(i, k + t)] -= dot * vt.conj() * 2.0;
            }
        }
        for i in k + 1..n {
            r[(i, k)] = ZERO;
        }
    }
    (q, r)
}

/// Unit vector `v` such that `(I − 2vv†) x` is a multiple of `e₁`; `None` when `x = 0`.
pub(crate) fn householder_vector(x: &[C64]) -> Option<Vec<C64>> {
    let norm = vec_norm(x);
    if norm == 0.0 {
        return None;
    }
    let phase = if x[0].norm() == 0.0 { ONE } else { x[0] / x[0].norm() };
    let alpha = -phase * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vn = vec_norm(&v);
    if vn == 0.0 {
        return None;
    }
    for z in &mut v {
        *z /= vn;
    }
    Some(v)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::InvalidDimension("inverse of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[(x, col)].norm().total_cmp(&m[(y, col)].norm()))
            .unwrap_or(col);
        if m[(pivot, col)].norm() <= f64::EPSILON * scale * n as f64 {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                let (p, c) = (m[(pivot, j)], m[(col, j)]);
                m[(pivot, j)] = c;
                m[(col, j)] = p;
                let (p, c) = (inv[(pivot, j)], inv[(col, j)]);
                inv[(pivot, j)] = c;
                inv[(col, j)] = p;
            }
        }
        let d = m[(col, col)].inv();
        for j in 0..n {
            m[(col, j)] *= d;
            inv[(col, j)] *= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let mc = m[(col, j)];
                let ic = inv[(col, j)];
                m[(i, j)] -= f * mc;
                inv[(i, j)] -= f * ic;
            }
        }
    }
    Ok(inv)
}

/// `aⁿ` by binary exponentiation; `a⁰ = I`.
pub fn mat_power(a: &ComplexMatrix, n: u64) -> ComplexMatrix {
    assert!(a.is_square(), "mat_power expects a square matrix");
    let mut result = ComplexMatrix::identity(a.rows());
    let mut base = a.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Operator 2-norm, `sqrt(λ_max(a† a))`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = (&a.adjoint() * a).hermitian_part();
    let eig = eig_hermitian(&gram)?;
    Ok(eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> ComplexMatrix {
        // Deterministic, well-conditioned test matrix.
        ComplexMatrix::from_fn(n, n, |i, j| {
            let t = (seed as f64 + 1.0) * (i as f64 * 1.3 + j as f64 * 0.7 + 0.1);
            C64::new(t.sin(), (t * 1.7).cos()) + if i == j { C64::new(n as f64, 0.0) } else { ZERO }
        })
    }

    #[test]
    fn qr_reconstructs_and_is_unitary() {
        let a = sample(7, 3);
        let (q, r) = householder_qr(&a);
        assert!((&(&q * &r) - &a).max_abs() < 1e-12);
        assert!((&(&q.adjoint() * &q) - &ComplexMatrix::identity(7)).max_abs() < 1e-13);
        for i in 0..7 {
            for j in 0..i {
                assert_eq!(r[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = sample(9, 5);
        let inv = inverse(&a).unwrap();
        assert!((&(&a * &inv) - &ComplexMatrix::identity(9)).max_abs() < 1e-12);
    }

    #[test]
    fn inverse_rejects_singular() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(inverse(&a), Err(Error::Singular));
    }

    #[test]
    fn power_zero_is_identity() {
        let a = sample(16, 1);
        assert_eq!(mat_power(&a, 0), ComplexMatrix::identity(16));
    }

    #[test]
    fn power_of_scalar_diagonal() {
        let a = ComplexMatrix::from_real_diagonal(&[0.5]);
        let p = mat_power(&a, 3);
        assert!((p[(0, 0)] - C64::new(0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = ComplexMatrix::from_real_diagonal(&[0.5, -3.0, 2.0]);
        assert!((spectral_norm(&a).unwrap() - 3.0).abs() < 1e-13);
    }
}
