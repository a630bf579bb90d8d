use serde::{Deserialize, Serialize};

use crate::entropy::{EntropyCache, RegionSpec};
use crate::error::{Error, Result};
use crate::mps::{CaseTag, IuMps};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub b_len: usize,
    pub qcmi: f64,
    pub qmi: f64,
    /// `ln(qcmi) / (2 ln(1/ν_gap))`.
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub instance_id: u64,
    pub case_tag: CaseTag,
    pub nu_gap: f64,
    pub points: Vec<CurvePoint>,
    /// Last retained `|B|`.
    pub b_max: usize,
    /// `(|B|, QCMI)` of the evaluation that ended the scan, if the stopping
    /// rule rather than the limit ended it.
    pub stop: Option<(usize, f64)>,
}

impl DecayCurve {
    /// Smallest QCMI evaluated, including the one that ended the scan.
    pub fn min_computed_qcmi(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.qcmi)
            .chain(self.stop.map(|(_, q)| q))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `ln(qcmi) / (2 ln(1/ν_gap))`.
pub fn normalized_log(qcmi: f64, nu_gap: f64) -> f64 {
    qcmi.ln() / (2.0 * (1.0 / nu_gap).ln())
}

/// Evaluate QCMI and QMI for `|B| = 2, 4, …` until QCMI first drops to
/// `10⁻ᵏ` or below, or `b_max_limit` is reached.
pub fn scan_instance(
    mps: &IuMps,
    region: RegionSpec,
    b_max_limit: usize,
    k: u32,
    threshold: f64,
) -> Result<DecayCurve> {
    if region.len_a == 0 || region.len_a != region.len_c {
        return Err(Error::InvalidRegion("scans need |A| = |C| ≥ 1".into()));
    }
    if b_max_limit < 2 || !b_max_limit.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "b_max_limit must be even and at least 2, got {b_max_limit}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let nu_gap = mps.nu_gap()?;
    let cutoff = 10f64.powi(-(k as i32));
    let mut cache = EntropyCache::new(mps, threshold);
    let mut points = Vec::new();
    let mut stop = None;
    for b_len in (2..=b_max_limit).step_by(2) {
        let r = region.with_b(b_len);
        let qcmi = cache.qcmi(r)?;
        if !(qcmi > cutoff) {
            stop = Some((b_len, qcmi));
            break;
        }
        let qmi = cache.qmi(r)?;
        points.push(CurvePoint {
            b_len,
            qcmi,
            qmi,
            f: normalized_log(qcmi, nu_gap),
        });
    }
    let Some(last) = points.last() else {
        return Err(Error::EmptyCurve { k });
    };
    Ok(DecayCurve {
        instance_id: 0,
        case_tag: mps.kraus.case_tag(),
        nu_gap,
        b_max: last.b_len,
        points,
        stop,
    })
}

/// `(|B| − |B_max|, f(|B|) − f(|B_max|))` for every point.
pub fn shift_graph(curve: &DecayCurve) -> Vec<(f64, f64)> {
    let Some(last) = curve.points.last() else {
        return Vec::new();
    };
    curve
        .points
        .iter()
        .map(|p| (p.b_len as f64 - last.b_len as f64, p.f - last.f))
        .collect()
}

/// Negated least-squares slope of `f` against `|B|` over points from index
/// `burn_in` on.
pub fn extract_rate(curve: &DecayCurve, burn_in: usize) -> Result<f64> {
    let needed = burn_in + 2;
    if curve.points.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            found: curve.points.len(),
        });
    }
    let pts = &curve.points[burn_in..];
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.b_len as f64).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.f).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in pts {
        let dx = p.b_len as f64 - mx;
        sxy += dx * (p.f - my);
        sxx += dx * dx;
    }
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::DEFAULT_THRESHOLD;
    use crate::mps::{benchmark_kraus, DEFAULT_PERIPHERAL_TOL};

    fn synthetic(nu_gap: f64, qcmi: impl Fn(f64) -> f64) -> DecayCurve {
        let points = (1..=20)
            .map(|i| {
                let b = 2 * i;
                let q = qcmi(b as f64);
                CurvePoint {
                    b_len: b,
                    qcmi: q,
                    qmi: 0.0,
                    f: normalized_log(q, nu_gap),
                }
            })
            .collect();
        DecayCurve {
            instance_id: 0,
            case_tag: CaseTag::Explicit,
            nu_gap,
            points,
            b_max: 40,
            stop: None,
        }
    }

    #[test]
    fn planted_rates() {
        let nu: f64 = 0.7;
        let full = synthetic(nu, |b| 3.0 * nu.powf(2.0 * b));
        assert!((extract_rate(&full, 3).unwrap() - 1.0).abs() < 1e-9);
        let half = synthetic(nu, |b| 3.0 * nu.powf(b));
        assert!((extract_rate(&half, 3).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn exact_exponential_shifts_onto_antidiagonal() {
        let nu: f64 = 0.6;
        let c = synthetic(nu, |b| nu.powf(2.0 * b));
        let g = shift_graph(&c);
        assert!(g.contains(&(0.0, 0.0)));
        for (x, y) in g {
            assert!((x + y).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_points() {
        let mut c = synthetic(0.5, |b| 0.5f64.powf(b));
        c.points.truncate(4);
        assert_eq!(extract_rate(&c, 3), Err(Error::TooFewPoints { needed: 5, found: 4 }));
    }

    #[test]
    fn benchmark_scan() {
        let mps = IuMps::new(benchmark_kraus(), DEFAULT_PERIPHERAL_TOL).unwrap();
        let region = RegionSpec::new(1, 2, 1).unwrap();
        let curve = scan_instance(&mps, region, 40, 12, DEFAULT_THRESHOLD).unwrap();
        assert!(curve.points.iter().all(|p| p.qcmi > 1e-12));
        assert!(curve.points.windows(2).all(|w| w[1].b_len == w[0].b_len + 2));
        assert_eq!(curve.points[0].b_len, 2);
        let again = scan_instance(&mps, region, 40, 12, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(curve, again);
        let short = scan_instance(&mps, region, 40, 1, DEFAULT_THRESHOLD);
        match short {
            Ok(c) => assert!(c.points.len() < curve.points.len()),
            Err(e) => assert_eq!(e, Error::EmptyCurve { k: 1 }),
        }
    }

    #[test]
    fn scan_validates_inputs() {
        let mps = IuMps::new(benchmark_kraus(), DEFAULT_PERIPHERAL_TOL).unwrap();
        let r = RegionSpec::new(1, 2, 1).unwrap();
        assert!(scan_instance(&mps, r, 39, 12, DEFAULT_THRESHOLD).is_err());
        assert!(scan_instance(&mps, r, 40, 0, DEFAULT_THRESHOLD).is_err());
        assert!(scan_instance(&mps, RegionSpec::new(1, 2, 2).unwrap(), 40, 12, DEFAULT_THRESHOLD).is_err());
    }
}
