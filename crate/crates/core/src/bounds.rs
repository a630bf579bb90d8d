//! Constants of the exponential QCMI bound and the conditions on `|B|` under
//! which it applies.

use std::f64::consts::{E, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mps::transfer::{kernel_basis, CLUSTER_TOL};
use crate::mps::IuMps;
use crate::numerics::{inverse, spectral_norm, ComplexMatrix, C64, ZERO};

/// A cluster of multiplicity `m` is accepted as semisimple when the `m`
/// smallest singular values of `E − ν̄ I` are at most this.
pub const SEMISIMPLE_TOL: f64 = 1e-7;

/// Largest `|B|` tried by [`sufficient_b`].
pub const SUFFICIENT_B_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConstants {
    /// `K`: largest Jordan block size minus one at magnitude `ν_gap`.
    pub k_jordan: u32,
    pub nu_gap: f64,
    pub sigma_min: f64,
    pub d_m: usize,
    pub c1: f64,
    pub c2: f64,
    /// Alternative prefactor; `None` when it overflows.
    pub c3: Option<f64>,
    /// `‖S‖₂ ‖S⁻¹‖₂` for the eigenvector matrix `S`.
    pub cond_s: f64,
    /// `Q = 16 d_M³ c₂² / σ_min³`.
    pub big_q: f64,
    /// `q = 2 ln(1/ν_gap)`.
    pub rate_q: f64,
    /// `D = Σ (K_ν + 1)` over distinct eigenvalues.
    pub d_cap: usize,
    /// `Δ`: smallest distance between distinct eigenvalues.
    pub delta_spec: f64,
}

struct Cluster {
    center: C64,
    members: Vec<usize>,
}

/// Group eigenvalues lying within [`CLUSTER_TOL`] of a cluster's first member.
fn cluster(values: &[C64]) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match clusters
            .iter_mut()
            .find(|c| (values[c.members[0]] - v).norm() <= CLUSTER_TOL)
        {
            Some(c) => c.members.push(i),
            None => clusters.push(Cluster {
                center: *v,
                members: vec![i],
            }),
        }
    }
    for c in &mut clusters {
        let sum: C64 = c.members.iter().map(|&i| values[i]).sum();
        c.center = sum / c.members.len() as f64;
    }
    clusters
}

/// Constants for a diagonalizable transfer matrix (`K = 0`).
///
/// Repeated eigenvalues are accepted when their eigenspace has full
/// dimension; the matching columns of `S` are then an orthonormal basis of
/// that eigenspace. Otherwise a nontrivial Jordan block is suspected and
/// [`Error::NearDegenerate`] is returned.
pub fn jordan_constants(mps: &IuMps) -> Result<BoundConstants> {
    let transfer = &mps.transfer;
    let nu_gap = mps.nu_gap()?;
    let sigma_min = mps.sigma_min()?;
    let d_m = mps.d_m();
    let e = &transfer.e;
    let n = e.rows();
    let values = &transfer.spectrum.values;
    let clusters = cluster(values);

    let mut s = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    for c in &clusters {
        let m = c.members.len();
        if m == 1 {
            s.set_col(col, &transfer.spectrum.vectors.col(c.members[0]));
            col += 1;
            continue;
        }
        let shifted = ComplexMatrix::from_fn(n, n, |i, j| e[(i, j)] - if i == j { c.center } else { ZERO });
        let gram = (&shifted.adjoint() * &shifted).hermitian_part();
        let sv = crate::numerics::eig_hermitian(&gram)?;
        let smallest = sv.values[n - m].max(0.0).sqrt();
        if smallest > SEMISIMPLE_TOL {
            return Err(Error::NearDegenerate);
        }
        let basis = kernel_basis(&shifted, m)?;
        for j in 0..m {
            s.set_col(col, &basis.col(j));
            col += 1;
        }
    }
    let s_inv = inverse(&s).map_err(|_| Error::NearDegenerate)?;
    let cond_s = (spectral_norm(&s)? * spectral_norm(&s_inv)?).max(1.0);

    let k_jordan = 0u32;
    let c1 = 1.0 / cond_s;
    // (K+1)(e/K)^K with (e/K)^K := 1 at K = 0.
    let c2 = cond_s;
    let d_cap = clusters.len();
    let mut delta_spec = 2.0f64;
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            delta_spec = delta_spec.min((a.center - b.center).norm());
        }
    }
    let c3 = c3_value(nu_gap, d_cap, k_jordan, delta_spec);
    let big_q = 16.0 * (d_m as f64).powi(3) * c2 * c2 / sigma_min.powi(3);
    let rate_q = 2.0 * (1.0 / nu_gap).ln();
    Ok(BoundConstants {
        k_jordan,
        nu_gap,
        sigma_min,
        d_m,
        c1,
        c2,
        c3,
        cond_s,
        big_q,
        rate_q,
        d_cap,
        delta_spec,
    })
}

/// `16e²√D(D+1) / (√2 (1−ν)^{3/2}) · (1−ν²)^{K+1} · (2/Δ)^{D−K−1}`.
fn c3_value(nu_gap: f64, d_cap: usize, k: u32, delta: f64) -> Option<f64> {
    let d = d_cap as f64;
    let exponent = d_cap as i64 - k as i64 - 1;
    let ln_c3 = (16.0 * E * E * d.sqrt() * (d + 1.0) / SQRT_2).ln() - 1.5 * (1.0 - nu_gap).ln()
        + (k as f64 + 1.0) * (1.0 - nu_gap * nu_gap).ln()
        + exponent as f64 * (2.0 / delta).ln();
    let c3 = ln_c3.exp();
    c3.is_finite().then_some(c3)
}

/// `Q · exp(−q(|B| − K) + 2K ln|B|)`.
pub fn decay_bound(c: &BoundConstants, b_len: usize) -> f64 {
    let b = b_len as f64;
    let k = c.k_jordan as f64;
    let log_b = if c.k_jordan == 0 { 0.0 } else { 2.0 * k * b.ln() };
    c.big_q * (-c.rate_q * (b - k) + log_b).exp()
}

/// Least even `|B|` meeting the sufficient conditions for the bound:
/// `|B| > 2K`, `|B|^K ν_gap^{|B|−K} ≤ σ_min^{5/2} / (6√2 c₂ d_M^{3/2}) ·
/// min{1, (243/4) σ_min²}` and `|B| ≥ 2 ln d_M / ln d_s`. With `K = 0` the
/// dominance conditions over the remaining eigenvalues hold trivially.
pub fn sufficient_b(c: &BoundConstants, d_s: usize) -> Result<usize> {
    if c.k_jordan > 0 {
        return Err(Error::Unsupported("sufficient |B| for K > 0".into()));
    }
    if d_s < 2 {
        return Err(Error::InvalidArgument("sufficient |B| needs d_s ≥ 2".into()));
    }
    let k = c.k_jordan as f64;
    let rhs = c.sigma_min.powf(2.5) / (6.0 * SQRT_2 * c.c2 * (c.d_m as f64).powf(1.5))
        * (243.0 / 4.0 * c.sigma_min * c.sigma_min).min(1.0);
    let ln_rhs = rhs.ln();
    let size_floor = 2.0 * (c.d_m as f64).ln() / (d_s as f64).ln();
    for b_len in (2..=SUFFICIENT_B_LIMIT).step_by(2) {
        let b = b_len as f64;
        if b <= 2.0 * k || b < size_floor {
            continue;
        }
        let lhs = (b - k) * c.nu_gap.ln() + if c.k_jordan == 0 { 0.0 } else { k * b.ln() };
        if lhs <= ln_rhs {
            return Ok(b_len);
        }
    }
    Err(Error::ScanRangeExceeded {
        limit: SUFFICIENT_B_LIMIT,
    })
}

/// Entropy error `d_M² δλ ln(1/λ_min)` from eigenvalue errors `δλ` with
/// smallest retained eigenvalue `λ_min ∈ (0, 1]`.
pub fn qcmi_error_estimate(d_m: usize, lambda_min: f64, delta_lambda: f64) -> f64 {
    (d_m * d_m) as f64 * delta_lambda * (1.0 / lambda_min).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{build_case1, CaseTag, KrausSet, DEFAULT_PERIPHERAL_TOL};
    use crate::numerics::RandomStream;

    fn constants(nu_gap: f64, sigma_min: f64, c2: f64, d_m: usize) -> BoundConstants {
        BoundConstants {
            k_jordan: 0,
            nu_gap,
            sigma_min,
            d_m,
            c1: 1.0 / c2,
            c2,
            c3: None,
            cond_s: c2,
            big_q: 1.0,
            rate_q: 2.0 * (1.0 / nu_gap).ln(),
            d_cap: 1,
            delta_spec: 2.0,
        }
    }

    #[test]
    fn bound_arithmetic() {
        let mut c = constants(0.5, 0.25, 1.0, 4);
        c.rate_q = 4f64.ln();
        assert!((decay_bound(&c, 2) - 1.0 / 16.0).abs() < 1e-16);
        for b in 1..20 {
            let ratio = decay_bound(&c, 2 * b).ln() - decay_bound(&c, b).ln();
            assert!((ratio + c.rate_q * b as f64).abs() < 1e-12);
            assert!(decay_bound(&c, b + 1) < decay_bound(&c, b));
        }
    }

    #[test]
    fn sufficient_b_direct_scan() {
        let c = constants(0.5, 0.25, 1.0, 4);
        // Oracle: 0.5^b ≤ 4.6035e-4 first holds at b = 12 (b = 11 is odd).
        let rhs: f64 = 0.25f64.powf(2.5) / (6.0 * 2f64.sqrt() * 8.0);
        assert!(0.5f64.powi(10) > rhs && 0.5f64.powi(12) <= rhs);
        assert_eq!(sufficient_b(&c, 3).unwrap(), 12);
        assert_eq!(sufficient_b(&c, 3).unwrap(), sufficient_b(&c, 3).unwrap());
    }

    #[test]
    fn sufficient_b_size_floor_dominates() {
        let c = constants(1e-300, 1.0 - 1e-12, 1.0, 4);
        assert_eq!(sufficient_b(&c, 3).unwrap(), 4);
        let c = constants(1e-300, 1.0 - 1e-12, 1.0, 2);
        assert_eq!(sufficient_b(&c, 4).unwrap(), 2);
    }

    #[test]
    fn sufficient_b_rejects_jordan_blocks() {
        let mut c = constants(0.5, 0.25, 1.0, 4);
        c.k_jordan = 1;
        assert!(matches!(sufficient_b(&c, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn error_estimate_examples() {
        let v = qcmi_error_estimate(4, 1e-14, 1e-14);
        assert!((v - 16.0 * 1e-14 * 14.0 * 10f64.ln()).abs() < 1e-25);
        assert!(v > 1e-12 && v < 1e-11);
        assert_eq!(qcmi_error_estimate(4, 0.3, 0.0), 0.0);
        assert_eq!(qcmi_error_estimate(4, 1.0, 1e-14), 0.0);
    }

    #[test]
    fn normal_channel_has_unit_condition_number() {
        // Dephasing channel: E = diag(1, 2p−1, 2p−1, 1) is normal.
        let p: f64 = 0.8;
        let m0 = ComplexMatrix::identity(2).scale_real(p.sqrt());
        let m1 = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).scale_real((1.0 - p).sqrt());
        let k = KrausSet::new(vec![m0, m1], CaseTag::Explicit).unwrap();
        let mps = IuMps::new(k, DEFAULT_PERIPHERAL_TOL).unwrap();
        let c = jordan_constants(&mps).unwrap();
        assert!((c.cond_s - 1.0).abs() < 1e-12);
        assert!((c.c1 - 1.0).abs() < 1e-12 && (c.c2 - 1.0).abs() < 1e-12);
        assert_eq!(c.d_cap, 2);
        assert!((c.nu_gap - 0.6).abs() < 1e-12);
    }

    #[test]
    fn case1_constants_are_reproducible() {
        let build = || {
            let k = build_case1(3, 4, &mut RandomStream::new(21, 3)).unwrap();
            jordan_constants(&IuMps::new(k, DEFAULT_PERIPHERAL_TOL).unwrap()).unwrap()
        };
        let (a, b) = (build(), build());
        assert_eq!(a.k_jordan, 0);
        assert!(a.c1 <= 1.0 && a.c2 >= 1.0);
        assert!(((a.c2 - b.c2) / a.c2).abs() <= 1e-6);
        assert!((a.rate_q - 2.0 * (1.0 / a.nu_gap).ln()).abs() == 0.0);
        let q = 16.0 * 64.0 * a.c2 * a.c2 / a.sigma_min.powi(3);
        assert!(((a.big_q - q) / q).abs() < 1e-15);
        // The rate improves on ln(1/ν_gap)/2 by a factor of four.
        assert!((a.rate_q / (0.5 * (1.0 / a.nu_gap).ln()) - 4.0).abs() < 1e-12);
    }
}
