//! Self-checks against the closed-form benchmark instance and the analytic
//! channel families.

use std::fmt;

use serde::Serialize;

use super::gaps::{analytic_gaps, distinct_magnitudes, gap_statistics, second_family_slope};
use super::scan::{extract_rate, scan_instance};
use crate::entropy::{two_region_density, EntropyCache, RegionSpec, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::mps::{benchmark_kraus, AnalyticFamily, IuMps, DEFAULT_PERIPHERAL_TOL};
use crate::numerics::ComplexMatrix;

/// Separation at which `ρ_A` and `ρ_C` are compared.
pub const MARGINAL_B: usize = 26;
/// `ρ_AC` approaches its limit like `2^{-|B|}`, so it is compared further out.
pub const PAIR_B: usize = 40;
pub const QMI_TOL: f64 = 1e-12;
pub const DENSITY_TOL: f64 = 1e-10;
pub const MIN_RATE: f64 = 0.95;
/// Number of trailing even `|B|` over which `ln QCMI` must decrease.
pub const MONOTONE_WINDOW: usize = 10;
const GAP_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Comparison {
    /// `|actual − expected| ≤ tolerance`.
    Within,
    /// `actual ≥ expected`.
    AtLeast,
    /// `actual ≤ expected`.
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkCheck {
    pub quantity: String,
    pub comparison: Comparison,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl BenchmarkCheck {
    fn new(quantity: impl Into<String>, comparison: Comparison, expected: f64, actual: f64, tolerance: f64) -> Self {
        let passed = match comparison {
            Comparison::Within => (actual - expected).abs() <= tolerance,
            Comparison::AtLeast => actual >= expected,
            Comparison::AtMost => actual <= expected,
        };
        Self {
            quantity: quantity.into(),
            comparison,
            expected,
            actual,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub reference_qmi: f64,
    pub nu_gap: f64,
    /// `(|B|, QMI)` for `|B| = 2, …, 26`.
    pub qmi: Vec<(usize, f64)>,
    /// `(|B|, QCMI)` along the stopped scan.
    pub qcmi: Vec<(usize, f64)>,
    /// Least-squares slope of `ln QCMI` over the trailing window, next to
    /// the asymptotic `−2 ln(1/ν_gap)`.
    pub log_slope: f64,
    pub predicted_log_slope: f64,
    pub checks: Vec<BenchmarkCheck>,
    pub notes: Vec<String>,
}

impl BenchmarkReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&BenchmarkCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn verify(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(c) => Err(Error::BenchmarkFailed {
                quantity: c.quantity.clone(),
                expected: c.expected,
                actual: c.actual,
                tolerance: c.tolerance,
            }),
        }
    }
}

impl fmt::Display for BenchmarkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "reference QMI  {:.16e}", self.reference_qmi)?;
        if let Some((b, q)) = self.qmi.last() {
            writeln!(f, "measured QMI({b}) {q:.16e}")?;
        }
        writeln!(f, "nu_gap         {:.16e}", self.nu_gap)?;
        writeln!(
            f,
            "ln QCMI slope  {:.6} (asymptotic {:.6})",
            self.log_slope, self.predicted_log_slope
        )?;
        for c in &self.checks {
            let rel = match c.comparison {
                Comparison::Within => format!("expected {:.6e} ± {:.1e}", c.expected, c.tolerance),
                Comparison::AtLeast => format!("expected ≥ {:.6e}", c.expected),
                Comparison::AtMost => format!("expected ≤ {:.6e}", c.expected),
            };
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status}  {}: {:.6e} ({rel})", c.quantity, c.actual)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

fn partial_trace_c(rho: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |a, ap| (0..d).map(|c| rho[(a * d + c, ap * d + c)]).sum())
}

fn partial_trace_a(rho: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |c, cp| (0..d).map(|a| rho[(a * d + c, a * d + cp)]).sum())
}

/// Closed-form limit of `ρ_AC` for the benchmark instance.
pub fn benchmark_pair_limit() -> ComplexMatrix {
    let p = ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 1.0]);
    let q = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 2.0]);
    (&p.kron(&p) + &q.kron(&q)).scale_real(1.0 / 32.0)
}

/// Closed-form single-site marginal of the benchmark instance.
pub fn benchmark_marginal() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[2.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0])
}

/// Run every benchmark check. `reference_qmi` is the expected large-`|B|`
/// mutual information; tests pass a perturbed value as a negative control.
pub fn benchmark_report(reference_qmi: f64) -> Result<BenchmarkReport> {
    let kraus = benchmark_kraus();
    let canonical = kraus.canonical_defect();
    let mps = IuMps::new(kraus, DEFAULT_PERIPHERAL_TOL)?;
    let nu_gap = mps.nu_gap()?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();

    checks.push(BenchmarkCheck::new(
        "canonical form defect",
        Comparison::AtMost,
        1e-12,
        canonical,
        0.0,
    ));
    let quarter = ComplexMatrix::identity(4).scale_real(0.25);
    checks.push(BenchmarkCheck::new(
        "fixed point vs I/4",
        Comparison::AtMost,
        1e-12,
        (&mps.sigma - &quarter).max_abs(),
        0.0,
    ));
    notes.push("the quoted fixed-point vector (1/2,1/2,1/2,1/2) has trace 2; σ is normalized to trace 1".into());

    let region = RegionSpec::new(1, 2, 1)?;
    let mut cache = EntropyCache::new(&mps, DEFAULT_THRESHOLD);
    let mut qmi = Vec::new();
    for b in 2..=MARGINAL_B {
        qmi.push((b, cache.qmi(region.with_b(b))?));
    }
    let qmi_last = qmi.last().map_or(f64::NAN, |p| p.1);
    checks.push(BenchmarkCheck::new(
        format!("QMI at |B| = {MARGINAL_B}"),
        Comparison::Within,
        reference_qmi,
        qmi_last,
        QMI_TOL,
    ));

    let rho = two_region_density(&mps, 1, MARGINAL_B, 1)?;
    let marginal = benchmark_marginal();
    checks.push(BenchmarkCheck::new(
        format!("rho_A at |B| = {MARGINAL_B}"),
        Comparison::AtMost,
        DENSITY_TOL,
        (&partial_trace_c(&rho, 3) - &marginal).max_abs(),
        0.0,
    ));
    checks.push(BenchmarkCheck::new(
        format!("rho_C at |B| = {MARGINAL_B}"),
        Comparison::AtMost,
        DENSITY_TOL,
        (&partial_trace_a(&rho, 3) - &marginal).max_abs(),
        0.0,
    ));
    let pair = two_region_density(&mps, 1, PAIR_B, 1)?;
    checks.push(BenchmarkCheck::new(
        format!("rho_AC at |B| = {PAIR_B}"),
        Comparison::AtMost,
        DENSITY_TOL,
        (&pair - &benchmark_pair_limit()).max_abs(),
        0.0,
    ));

    let curve = scan_instance(&mps, region, 40, 12, DEFAULT_THRESHOLD)?;
    let qcmi: Vec<(usize, f64)> = curve.points.iter().map(|p| (p.b_len, p.qcmi)).collect();
    let tail = &qcmi[qcmi.len().saturating_sub(MONOTONE_WINDOW)..];
    let rises = tail.windows(2).filter(|w| !(w[1].1.ln() < w[0].1.ln())).count();
    checks.push(BenchmarkCheck::new(
        format!("non-decreasing ln QCMI steps over last {} |B|", tail.len()),
        Comparison::AtMost,
        0.0,
        rises as f64,
        0.0,
    ));
    let log_slope = ols_slope(tail.iter().map(|&(b, q)| (b as f64, q.ln())));
    let rate = extract_rate(&curve, 3)?;
    checks.push(BenchmarkCheck::new(
        "normalized decay rate",
        Comparison::AtLeast,
        MIN_RATE,
        rate,
        0.0,
    ));

    for beta in [0.1, 0.01] {
        let m = distinct_magnitudes(AnalyticFamily::First, beta)?;
        let smallest = m.last().copied().unwrap_or(f64::NAN);
        checks.push(BenchmarkCheck::new(
            format!("first family 1 - |nu_min| at beta = {beta}"),
            Comparison::Within,
            2.0 * beta,
            1.0 - smallest,
            1e-10,
        ));
    }
    for beta in [1e-3, 1e-4] {
        let (_, g) = analytic_gaps(AnalyticFamily::Second, beta)?;
        checks.push(BenchmarkCheck::new(
            format!("second family |nu2| - |nu3| at beta = {beta:e}"),
            Comparison::Within,
            second_family_slope() * beta,
            g,
            10.0 * beta * beta,
        ));
    }
    let stats = gap_statistics(GAP_SAMPLES, 0)?;
    checks.push(BenchmarkCheck::new(
        format!("max |1 - |nu1|| over {GAP_SAMPLES} Haar samples"),
        Comparison::AtMost,
        1e-12,
        stats.unit_defect.max,
        0.0,
    ));

    Ok(BenchmarkReport {
        reference_qmi,
        nu_gap,
        qmi,
        qcmi,
        log_slope,
        predicted_log_slope: -2.0 * (1.0 / nu_gap).ln(),
        checks,
        notes,
    })
}

fn ols_slope(points: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = points.collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
