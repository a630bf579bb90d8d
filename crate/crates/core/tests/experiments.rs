use iumps_core::experiments::{
    extract_rate, normalized_log, run_ensemble, shift_graph, CurvePoint, DecayCurve, EnsembleConfig, Histogram,
};
use iumps_core::mps::CaseTag;
use proptest::prelude::*;

fn curve(nu: f64, c: f64, rate: f64, len: usize) -> DecayCurve {
    let points: Vec<CurvePoint> = (1..=len)
        .map(|i| {
            let b = 2 * i;
            let q = c * nu.powf(2.0 * rate * b as f64);
            CurvePoint {
                b_len: b,
                qcmi: q,
                qmi: 0.0,
                f: normalized_log(q, nu),
            }
        })
        .collect();
    DecayCurve {
        instance_id: 0,
        case_tag: CaseTag::Explicit,
        nu_gap: nu,
        b_max: 2 * len,
        points,
        stop: None,
    }
}

proptest! {
    #[test]
    fn planted_rate_is_recovered(nu in 0.05f64..0.95, c in 0.01f64..10.0, rate in 0.1f64..2.0, len in 6usize..20) {
        let cv = curve(nu, c, rate, len);
        prop_assert!((extract_rate(&cv, 3).unwrap() - rate).abs() <= 1e-9);
        prop_assert!(shift_graph(&cv).contains(&(0.0, 0.0)));
    }

    #[test]
    fn histogram_conserves_points(pts in prop::collection::vec((-60.0f64..5.0, -5.0f64..60.0), 0..300)) {
        let mut h = Histogram::default();
        for &(x, y) in &pts {
            h.add(x, y);
        }
        prop_assert_eq!(h.binned() + h.out_of_range, pts.len() as u64);
    }
}

#[test]
fn ensemble_is_reproducible() {
    let config = EnsembleConfig {
        n_instances: 12,
        case_mix: vec![(CaseTag::Case1, 2.0), (CaseTag::Case2, 1.0), (CaseTag::Case3, 1.0)],
        master_seed: 11,
        ..EnsembleConfig::default()
    };
    let a = run_ensemble(&config).unwrap().summary;
    let b = run_ensemble(&config).unwrap().summary;
    assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    assert_eq!(a.histogram.binned() + a.histogram.out_of_range, a.total_shifted_points);
    assert!(a.cdf_all.windows(2).all(|w| w[0] <= w[1]));
    assert!(a.cdf_full.len() <= a.cdf_all.len());
}
