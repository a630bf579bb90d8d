//! Eigen-decomposition of general complex matrices.
//!
//! Pipeline: diagonal balancing, Householder reduction to upper Hessenberg
//! form, single-shift complex QR iteration (Wilkinson shifts, Givens
//! rotations) to a Schur form `T`, then back-substitution on `T` for the
//! eigenvectors.

use std::cmp::Ordering;

use super::dense::householder_vector;
use super::matrix::{vec_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Largest dimension handled by [`eig_general`].
pub const MAX_DIM: usize = 64;

/// QR sweeps allowed per unit of dimension.
pub const ITERATIONS_PER_DIM: usize = 100;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues by descending modulus, ties by descending real then imaginary part.
    pub values: Vec<C64>,
    /// Unit-norm right eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
    /// `max_i ‖A vᵢ − νᵢ vᵢ‖₂`.
    pub residual: f64,
}

/// Resolution below which eigenvalue keys count as tied when ordering.
pub const ORDER_RESOLUTION: f64 = 1e-12;

fn order_key(x: f64) -> f64 {
    // `+ 0.0` folds −0.0 into 0.0, which `total_cmp` would otherwise split.
    (x / ORDER_RESOLUTION).round() + 0.0
}

/// Total order used for spectra throughout the crate: descending modulus,
/// then real part, then imaginary part, each compared on a 1e-12 grid so that
/// roundoff does not decide ties.
pub fn spectral_order(a: &C64, b: &C64) -> Ordering {
    order_key(b.norm())
        .total_cmp(&order_key(a.norm()))
        .then_with(|| order_key(b.re).total_cmp(&order_key(a.re)))
        .then_with(|| order_key(b.im).total_cmp(&order_key(a.im)))
}

pub fn eig_general(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::InvalidDimension("eig_general needs a square matrix".into()));
    }
    let n = a.rows();
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidDimension(format!(
            "eig_general supports 1..={MAX_DIM}, got {n}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }

    let (balanced, scaling) = balance(a);
    let (mut h, mut z) = hessenberg(&balanced);
    schur_qr(&mut h, &mut z)?;
    let t = h;

    let mut pairs: Vec<(C64, Vec<C64>)> = Vec::with_capacity(n);
    let t_norm = t.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let x = triangular_eigenvector(&t, k, t_norm);
        let mut v = z.mat_vec(&x);
        for (vi, s) in v.iter_mut().zip(&scaling) {
            *vi *= s;
        }
        normalize_with_phase(&mut v);
        pairs.push((t[(k, k)], v));
    }
    pairs.sort_by(|x, y| spectral_order(&x.0, &y.0));

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    for (j, (nu, v)) in pairs.into_iter().enumerate() {
        let av = a.mat_vec(&v);
        let r: Vec<C64> = av.iter().zip(&v).map(|(x, y)| x - nu * y).collect();
        residual = residual.max(vec_norm(&r));
        vectors.set_col(j, &v);
        values.push(nu);
    }
    Ok(EigenDecomposition {
        values,
        vectors,
        residual,
    })
}

/// Scale rows/columns by powers of two so that off-diagonal row and column
/// norms are comparable. Returns `D⁻¹ A D` and the diagonal of `D`.
fn balance(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let mut m = a.clone();
    let mut d = vec![1.0; n];
    let l1 = |z: C64| z.re.abs() + z.im.abs();
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += l1(m[(j, i)]);
                    r += l1(m[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (m, d)
}

/// Householder reduction `a = z h z†` with `h` upper Hessenberg.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut z = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let off = k + 1;
        let x: Vec<C64> = (off..n).map(|i| h[(i, k)]).collect();
        let Some(v) = householder_vector(&x) else {
            continue;
        };
        for j in k..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * h[(off + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                h[(off + t, j)] -= vt * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| h[(i, off + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                h[(i, off + t)] -= dot * vt.conj() * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| z[(i, off + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                z[(i, off + t)] -= dot * vt.conj() * 2.0;
            }
        }
        for i in off + 1..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, z)
}

/// Givens rotation `G = [[c̄, s̄], [−s, c]]` with `G·[x; y] = [r; 0]`.
#[derive(Clone, Copy)]
struct Givens {
    c: C64,
    s: C64,
}

impl Givens {
    fn new(x: C64, y: C64) -> Self {
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        if r == 0.0 {
            Givens { c: ONE, s: ZERO }
        } else {
            Givens { c: x / r, s: y / r }
        }
    }

    /// Rows `p`, `p+1` of `m` for columns in `cols`: `m ← G m`.
    fn apply_left(&self, m: &mut ComplexMatrix, p: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = m[(p, j)];
            let b = m[(p + 1, j)];
            m[(p, j)] = self.c.conj() * a + self.s.conj() * b;
            m[(p + 1, j)] = -self.s * a + self.c * b;
        }
    }

    /// Columns `p`, `p+1` of `m` for rows in `rows`: `m ← m G†`.
    fn apply_right(&self, m: &mut ComplexMatrix, p: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let a = m[(i, p)];
            let b = m[(i, p + 1)];
            m[(i, p)] = a * self.c + b * self.s;
            m[(i, p + 1)] = -a * self.s.conj() + b * self.c.conj();
        }
    }
}

/// Shifted QR iteration on Hessenberg `h`, accumulating into `z`. On return
/// `h` is upper triangular (complex Schur form).
fn schur_qr(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<()> {
    let n = h.rows();
    let cap = ITERATIONS_PER_DIM * n;
    let eps = f64::EPSILON;
    let norm = h.max_abs().max(f64::MIN_POSITIVE);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let mut rotations: Vec<Givens> = Vec::with_capacity(n);

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == 0.0 {
                s = norm;
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::NonConvergence { iterations: total });
        }

        let mu = if since_deflation.is_multiple_of(10) {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        rotations.clear();
        for k in lo..hi {
            let g = Givens::new(h[(k, k)], h[(k + 1, k)]);
            g.apply_left(h, k, k..n);
            h[(k + 1, k)] = ZERO;
            rotations.push(g);
        }
        for (idx, g) in rotations.iter().enumerate() {
            let k = lo + idx;
            g.apply_right(h, k, 0..(k + 2).min(hi + 1));
            g.apply_right(z, k, 0..n);
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    // Clear the strictly lower part left behind by roundoff.
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

/// Solve `(T − t_kk) x = 0` with `x_k = 1`, `x_j = 0` for `j > k`.
fn triangular_eigenvector(t: &ComplexMatrix, k: usize, t_norm: f64) -> Vec<C64> {
    let n = t.rows();
    let lambda = t[(k, k)];
    let smin = (f64::EPSILON * t_norm).max(f64::MIN_POSITIVE * 1e3);
    let mut x = vec![ZERO; n];
    x[k] = ONE;
    for j in (0..k).rev() {
        let mut s = ZERO;
        for m in j + 1..=k {
            s += t[(j, m)] * x[m];
        }
        let mut denom = t[(j, j)] - lambda;
        if denom.norm() < smin {
            denom = C64::new(smin, 0.0);
        }
        x[j] = -s / denom;
        let big = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if big > 1e150 {
            for v in x.iter_mut() {
                *v /= big;
            }
        }
    }
    x
}

/// Unit Euclidean norm, largest-modulus component real and positive.
fn normalize_with_phase(v: &mut [C64]) {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dense::inverse;
    use crate::numerics::random::RandomStream;

    fn reconstruction_error(a: &ComplexMatrix, eig: &EigenDecomposition) -> f64 {
        let v = &eig.vectors;
        let vinv = inverse(v).unwrap();
        let n = a.rows();
        let d = ComplexMatrix::from_fn(n, n, |i, j| if i == j { eig.values[i] } else { ZERO });
        (&(&(v * &d) * &vinv) - a).frobenius_norm() / a.frobenius_norm()
    }

    #[test]
    fn identity_4() {
        let eig = eig_general(&ComplexMatrix::identity(4)).unwrap();
        assert!(eig.values.iter().all(|v| (v - ONE).norm() == 0.0));
        assert_eq!(eig.residual, 0.0);
    }

    #[test]
    fn diagonal_order() {
        let a = ComplexMatrix::from_real_diagonal(&[0.25, 1.0, 0.0, 0.5]);
        let eig = eig_general(&a).unwrap();
        let want = [1.0, 0.5, 0.25, 0.0];
        for (v, w) in eig.values.iter().zip(want) {
            assert!((v - C64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tie_break_by_real_then_imaginary() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i != j {
                ZERO
            } else {
                [
                    C64::new(0.0, 1.0),
                    C64::new(-1.0, 0.0),
                    C64::new(0.0, -1.0),
                    C64::new(1.0, 0.0),
                ][i]
            }
        });
        let eig = eig_general(&a).unwrap();
        let want = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
            C64::new(-1.0, 0.0),
        ];
        for (v, w) in eig.values.iter().zip(want) {
            assert!((v - w).norm() < 1e-15, "{v} vs {w}");
        }
    }

    #[test]
    fn random_matrices_reconstruct() {
        for seed in 0..30 {
            let mut s = RandomStream::new(seed, 11);
            let a = s.ginibre(16);
            let eig = eig_general(&a).unwrap();
            assert!(
                eig.residual <= 1e-11 * a.frobenius_norm(),
                "residual {:e}",
                eig.residual
            );
            assert!(reconstruction_error(&a, &eig) <= 1e-9);
            for j in 0..16 {
                assert!((vec_norm(&eig.vectors.col(j)) - 1.0).abs() < 1e-13);
            }
            assert!(eig
                .values
                .windows(2)
                .all(|w| spectral_order(&w[0], &w[1]) != Ordering::Greater));
        }
    }

    #[test]
    fn badly_scaled_matrix() {
        let mut a = RandomStream::new(5, 5).ginibre(8);
        for i in 0..8 {
            for j in 0..8 {
                a[(i, j)] *= 10f64.powi(i as i32 - j as i32);
            }
        }
        let eig = eig_general(&a).unwrap();
        assert!(reconstruction_error(&a, &eig) <= 1e-9);
    }

    #[test]
    fn companion_of_known_roots() {
        // Roots 0.9, -0.5, 0.3i, -0.3i of x⁴ + a3 x³ + … + a0.
        let roots = [
            C64::new(0.9, 0.0),
            C64::new(-0.5, 0.0),
            C64::new(0.0, 0.3),
            C64::new(0.0, -0.3),
        ];
        let mut coeffs = vec![ONE];
        for r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] += *c;
                next[i + 1] -= c * r;
            }
            coeffs = next;
        }
        let n = 4;
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -coeffs[j + 1]
            } else if i == j + 1 {
                ONE
            } else {
                ZERO
            }
        });
        let eig = eig_general(&a).unwrap();
        let want = [roots[0], roots[1], roots[2], roots[3]];
        for (v, w) in eig.values.iter().zip(want) {
            assert!((v - w).norm() < 1e-12, "{v} vs {w}");
        }
    }

    #[test]
    fn rejects_oversized_and_rectangular() {
        assert!(eig_general(&ComplexMatrix::zeros(2, 3)).is_err());
        assert!(eig_general(&ComplexMatrix::identity(65)).is_err());
    }
}
