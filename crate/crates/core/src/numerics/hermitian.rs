//! Hermitian eigensolver: unitary reduction to real symmetric tridiagonal form
//! followed by the implicit QL iteration.

use super::dense::householder_vector;
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Accepted `‖a − a†‖_F / ‖a‖_F` on input.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct HermitianEigenDecomposition {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigenDecomposition {
    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj()).sum()
        })
    }
}

pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigenDecomposition> {
    if !a.is_square() {
        return Err(Error::InvalidDimension("eig_hermitian needs a square matrix".into()));
    }
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEigenDecomposition {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let (diag, offdiag, q) = tridiagonalize(&a.hermitian_part());

    // Phase-rotate the complex subdiagonal to |e_k| so the problem becomes real.
    let mut phases = vec![ONE; n];
    let mut sub = vec![0.0; n];
    for k in 0..n - 1 {
        let e = offdiag[k];
        let mag = e.norm();
        sub[k + 1] = mag;
        phases[k + 1] = if mag > 0.0 { phases[k] * (e / mag) } else { phases[k] };
    }
    let mut d = diag;
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    tql2(&mut d, &mut sub, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].total_cmp(&d[x]));

    // vectors = Q · diag(phases) · Z
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            let mut acc = ZERO;
            for t in 0..n {
                acc += q[(i, t)] * phases[t] * z[t][k];
            }
            vectors[(i, col)] = acc;
        }
    }
    let values = order.iter().map(|&k| d[k]).collect();
    Ok(HermitianEigenDecomposition { values, vectors })
}

/// Returns `(diag, subdiag, q)` with `a = q · T · q†`; `subdiag[k] = T[k+1, k]`.
fn tridiagonalize(a: &ComplexMatrix) -> (Vec<f64>, Vec<C64>, ComplexMatrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let Some(v) = householder_vector(&x) else {
            continue;
        };
        let off = k + 1;
        let len = n - off;
        // p = A v on the trailing block, then rank-2 update A -= 2(v w† + w v†).
        let p: Vec<C64> = (0..len)
            .map(|i| (0..len).map(|j| m[(off + i, off + j)] * v[j]).sum())
            .collect();
        let kappa: C64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        for i in 0..len {
            for j in 0..len {
                m[(off + i, off + j)] -= (v[i] * w[j].conj() + w[i] * v[j].conj()) * 2.0;
            }
        }
        // Column k and row k.
        let dot: C64 = v.iter().zip(&x).map(|(vi, xi)| vi.conj() * xi).sum();
        for i in 0..len {
            let val = x[i] - v[i] * dot * 2.0;
            m[(off + i, k)] = val;
            m[(k, off + i)] = val.conj();
        }
        for i in 0..n {
            let dot: C64 = (0..len).map(|t| q[(i, off + t)] * v[t]).sum();
            for t in 0..len {
                q[(i, off + t)] -= dot * v[t].conj() * 2.0;
            }
        }
    }
    let diag = (0..n).map(|i| m[(i, i)].re).collect();
    let sub = (0..n.saturating_sub(1)).map(|k| m[(k + 1, k)]).collect();
    (diag, sub, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` holds the
/// element coupling rows `i−1` and `i` (`e[0]` ignored); `z` accumulates the
/// eigenvectors as columns.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let max_iter = 60 * n.max(1);
    let mut iterations = 0usize;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::NonConvergence { iterations });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
