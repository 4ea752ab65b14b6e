use euqoe_core::kinematics::*;
use proptest::prelude::*;

#[test]
fn worldline_examples() {
    let w = RindlerWorldline::new(2.0).unwrap();
    assert_eq!(rindler_position(&w, 0.0), (0.0, 0.5));
    let tau = 0.5f64.atanh() / 2.0;
    assert!((rindler_velocity(&w, tau) - 0.5).abs() < 1e-15);
    assert!(RindlerWorldline::new(0.0).is_err());
}

#[test]
fn stage_duration_examples() {
    assert_eq!(accel_stage_duration(1.0, 0.0).unwrap(), 0.0);
    // 2·artanh(1/2) = ln 3.
    assert!((accel_stage_duration(1.0, 0.5).unwrap() - 3f64.ln()).abs() < 1e-15);
    assert!((accel_stage_duration(1.0, 0.5).unwrap() - 1.0986123).abs() < 1e-7);
    assert!(accel_stage_duration(1.0, 1.0).is_err());
    assert!(accel_stage_duration(0.0, 0.5).is_err());
}

#[test]
fn ratio_examples() {
    assert_eq!(alpha_v(0.0).unwrap(), 1.0);
    assert!((alpha_v(0.6).unwrap() - 0.8).abs() < 1e-15);
    assert!((alpha_v(0.8).unwrap() - 0.6).abs() < 1e-15);
    assert!(alpha_v(1.0).is_err());
    assert_eq!(alpha_a(1.5, 1.5).unwrap(), 1.0);
    assert_eq!(alpha_a(0.0, 2.0).unwrap(), 0.0);
    assert_eq!(alpha_a(1.0, 2.0).unwrap(), 0.5);
    assert!(alpha_a(1.0, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hyperbola(a in 0.01..10.0f64, tau in -3.0..3.0f64) {
        let w = RindlerWorldline::new(a).unwrap();
        let (t, x) = rindler_position(&w, tau);
        let scale = x * x;
        prop_assert!(((x * x - t * t) - 1.0 / (a * a)).abs() <= 1e-12 * scale.max(1.0 / (a * a)));
    }

    #[test]
    fn equal_speed_durations(a1 in 0.01..10.0f64, a2 in 0.01..10.0f64, v in 0.0..0.99f64) {
        let d1 = a1 * accel_stage_duration(a1, v).unwrap();
        let d2 = a2 * accel_stage_duration(a2, v).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-12 * d1.max(1e-300));
        prop_assert!((alpha_a(a1, a2).unwrap() - d2 / a2 / (d1 / a1)).abs() < 1e-12);
    }

    #[test]
    fn alpha_v_monotone(v in 0.0..0.99f64, dv in 1e-6..0.009f64) {
        let (x, y) = (alpha_v(v).unwrap(), alpha_v(v + dv).unwrap());
        prop_assert!(y < x && x <= 1.0 && y > 0.0);
    }
}
