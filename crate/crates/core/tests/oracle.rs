use euqoe_core::algebra::{level_matrix, EntangledParity, InitialState};
use euqoe_core::engine::{CycleConfig, Dimension};
use euqoe_core::oracle::*;
use rand::{Rng, SeedableRng};

fn cycle(alpha: f64, a_h2: f64, tau_a: f64, parity: EntangledParity) -> CycleConfig {
    CycleConfig::entangled(1.0, 2.0, alpha, a_h2, tau_a, parity, Dimension::D1p1).unwrap()
}

#[test]
fn equal_accelerations_reference_point() {
    let cfg = OracleConfig::new(cycle(1.0, 1.0, 1.0, EntangledParity::Symmetric));
    let r = delta_rho_trace_numeric(&cfg, 1.0).unwrap();
    assert!(r.rel_deviation < 1e-4, "{r:?}");
    assert!(r.numeric_error < 1e-4 * r.numeric.abs());
    // Odd parts of the integrand cancel on the symmetric square.
    assert!(r.imag_residual < 1e-12, "{}", r.imag_residual);
}

#[test]
fn vanishing_window() {
    let mut cfg = OracleConfig::new(cycle(0.6, 1.0, 1e-6, EntangledParity::Symmetric));
    cfg.k_max = Some(200.0);
    let r = delta_rho_trace_numeric(&cfg, 1.0).unwrap();
    assert!(r.numeric.abs() < 1e-10, "{}", r.numeric);
}

#[test]
fn ratio_invariance_both_parities() {
    for parity in [EntangledParity::Symmetric, EntangledParity::Antisymmetric] {
        let cfg = OracleConfig::new(cycle(0.6, 1.5, 0.8, parity));
        let reports = delta_rho_traces_numeric(&cfg, &[0.0, 0.6, 1.0]).unwrap();
        let base = reports[0].numeric;
        for r in &reports {
            let ratio = r.numeric / (1.0 + r.alpha_prime);
            assert!(
                (ratio - base).abs() <= 1e-4 * base.abs(),
                "{ratio} vs {base}"
            );
            assert!(r.rel_deviation < 1e-4);
        }
    }
}

#[test]
fn inner_time_integrals_match_bracket() {
    let cfg = OracleConfig::new(cycle(0.6, 1.5, 1.2, EntangledParity::Symmetric));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for i in 0..12 {
        let k = if i < 4 {
            2.0 + rng.gen_range(-1e-3..1e-3)
        } else {
            rng.gen_range(0.0..10.0)
        };
        let (num, ana) = inner_time_integral_check(k, &cfg, rng.gen_range(0.0..1.0)).unwrap();
        assert!(
            (num - ana).abs() < 1e-8 * (1.0 + ana.abs()),
            "k={k}: {num} vs {ana}"
        );
    }
    for k in [2.0 - 1e-3, 2.0 + 1e-3] {
        let (num, ana) = inner_time_integral_check(k, &cfg, 1.0).unwrap();
        assert!((num - ana).abs() < 1e-6 * (1.0 + ana.abs()));
    }
}

#[test]
fn matrix_traces_on_reduced_grid() {
    let mut cfg = OracleConfig::new(cycle(0.6, 1.5, 0.5, EntangledParity::Symmetric));
    cfg.k_max = Some(20.0);
    let closed = delta_rho_trace_numeric(&cfg, 0.6).unwrap();
    cfg.source = TraceSource::Matrix;
    let matrix = delta_rho_trace_numeric(&cfg, 0.6).unwrap();
    assert!((closed.numeric - matrix.numeric).abs() <= 1e-10 * closed.numeric.abs());
}

#[test]
fn exact_ordering_is_hermitian() {
    for (alpha, p) in [(0.6, 0.0), (0.3, 0.4), (1.0, 0.0)] {
        let mut c = cycle(alpha, 1.5, 0.8, EntangledParity::Symmetric);
        c.initial = InitialState::entangled(p, EntangledParity::Symmetric).unwrap();
        let cfg = OracleConfig::new(c);
        for k in [0.3, 1.9, 4.0] {
            let m = delta_rho_matrix_at_k(&cfg, k, 40, DeltaRhoOrdering::Exact).unwrap();
            assert!(m.is_hermitian(1e-10), "alpha={alpha} k={k}");
            assert!(m.trace().norm() < 1e-12);
        }
    }
}

#[test]
fn grouped_ordering_breaks_hermiticity_off_equal_accelerations() {
    let cfg = OracleConfig::new(cycle(0.6, 1.5, 0.8, EntangledParity::Symmetric));
    let m = delta_rho_matrix_at_k(&cfg, 1.9, 40, DeltaRhoOrdering::Grouped).unwrap();
    assert!(!m.is_hermitian(1e-6));
    let cfg = OracleConfig::new(cycle(1.0, 1.5, 0.8, EntangledParity::Symmetric));
    let m = delta_rho_matrix_at_k(&cfg, 1.9, 40, DeltaRhoOrdering::Grouped).unwrap();
    assert!(m.is_hermitian(1e-10));
}

#[test]
fn exact_ordering_doubles_grouped_trace_at_equal_accelerations() {
    let cfg = OracleConfig::new(cycle(1.0, 1.5, 0.8, EntangledParity::Symmetric));
    for k in [0.3, 1.9, 4.0] {
        let m = delta_rho_matrix_at_k(&cfg, k, 40, DeltaRhoOrdering::Exact).unwrap();
        for ap in [0.0, 1.0] {
            let t = m.trace_product(&level_matrix(ap).unwrap()).re;
            let want = 2.0 * analytic_bracket(&cfg, k, ap).unwrap();
            assert!(
                (t - want).abs() < 1e-9 * (1.0 + want.abs()),
                "k={k} ap={ap}: {t} vs {want}"
            );
        }
    }
}
