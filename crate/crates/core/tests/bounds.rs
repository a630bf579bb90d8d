use iumps_core::bounds::{decay_bound, jordan_constants, qcmi_error_estimate, sufficient_b};
use iumps_core::entropy::{RegionSpec, DEFAULT_THRESHOLD};
use iumps_core::experiments::scan_instance;
use iumps_core::mps::{build_case1, IuMps, DEFAULT_PERIPHERAL_TOL};
use iumps_core::numerics::RandomStream;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_decreases_and_dominates(seed in any::<u64>()) {
        let mps = IuMps::new(build_case1(3, 4, &mut RandomStream::new(seed, 0)).unwrap(), DEFAULT_PERIPHERAL_TOL).unwrap();
        let c = jordan_constants(&mps).unwrap();
        prop_assert_eq!(c.k_jordan, 0);
        // The rate is four times the commonly quoted ½ ln(1/ν_gap).
        prop_assert!((c.rate_q / (0.5 * (1.0 / c.nu_gap).ln()) - 4.0).abs() < 1e-12);
        for b in (2..60).step_by(2) {
            prop_assert!(decay_bound(&c, b + 2) < decay_bound(&c, b));
        }
        prop_assert!(sufficient_b(&c, 3).is_ok());
        // Every point retained by the scan, i.e. every QCMI above the 1e-12 noise floor.
        let curve = scan_instance(&mps, RegionSpec::new(1, 2, 1).unwrap(), 40, 12, DEFAULT_THRESHOLD).unwrap();
        for p in &curve.points {
            prop_assert!(p.qcmi <= decay_bound(&c, p.b_len), "|B| = {}: {:e}", p.b_len, p.qcmi);
        }
    }
}

#[test]
fn error_estimate_order() {
    let e = qcmi_error_estimate(4, 1e-14, 1e-14);
    assert!(e > 1e-13 && e < 1e-11, "{e:e}");
}
