use euqoe_core::algebra::*;
use euqoe_core::oracle::gamma_matrix_products;
use euqoe_core::Complex64 as C64;
use proptest::prelude::*;

fn e(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// Hand-written entries of the twelve second-order monopole products, in
/// the order of `gamma_matrix_products`.
#[allow(clippy::too_many_arguments)]
fn transcribed(
    i: usize,
    d1p: f64,
    d1pp: f64,
    d2p: f64,
    d2pp: f64,
    p: f64,
    b1: C64,
    b2: C64,
    w: f64,
) -> TwoQubitOperator {
    let q = 1.0 - p;
    let (bb1, bb2) = (C64::new(b1.norm_sqr(), 0.0), C64::new(b2.norm_sqr(), 0.0));
    let x = b1 * b2.conj();
    let y = b1.conj() * b2;
    let mut z = [[C64::new(0.0, 0.0); 4]; 4];
    match i {
        1 => {
            let a = w * (d1p - d1pp);
            z[0][0] = p * e(a);
            z[1][1] = q * bb1 * e(a);
            z[1][2] = q * x * e(a);
            z[2][1] = q * y * e(-a);
            z[2][2] = q * bb2 * e(-a);
        }
        2 => {
            let a = w * (d1p - d2pp);
            z[1][1] = q * y * e(a);
            z[1][2] = q * bb2 * e(a);
            z[2][1] = q * bb1 * e(-a);
            z[2][2] = q * x * e(-a);
            z[3][0] = p * e(-w * (d1p + d2pp));
        }
        3 => {
            let a = w * (d2p - d1pp);
            z[1][1] = q * y * e(-a);
            z[1][2] = q * bb2 * e(-a);
            z[2][1] = q * bb1 * e(a);
            z[2][2] = q * x * e(a);
            z[3][0] = p * e(-w * (d2p + d1pp));
        }
        4 => {
            let a = w * (d2p - d2pp);
            z[0][0] = p * e(a);
            z[1][1] = q * bb1 * e(-a);
            z[1][2] = q * x * e(-a);
            z[2][1] = q * y * e(a);
            z[2][2] = q * bb2 * e(a);
        }
        5 => {
            let a = w * (d1p - d1pp);
            z[0][0] = p * e(-a);
            z[1][1] = q * bb1 * e(-a);
            z[1][2] = q * x * e(a);
            z[2][1] = q * y * e(-a);
            z[2][2] = q * bb2 * e(a);
        }
        6 => {
            let a = w * (d1pp - d2p);
            z[0][3] = p * e(w * (d1pp + d2p));
            z[1][1] = q * x * e(-a);
            z[1][2] = q * bb1 * e(a);
            z[2][1] = q * bb2 * e(-a);
            z[2][2] = q * y * e(a);
        }
        7 => {
            let a = w * (d2pp - d1p);
            z[0][3] = p * e(w * (d2pp + d1p));
            z[1][1] = q * x * e(a);
            z[1][2] = q * bb1 * e(-a);
            z[2][1] = q * bb2 * e(a);
            z[2][2] = q * y * e(-a);
        }
        8 => {
            let a = w * (d2pp - d2p);
            z[0][0] = p * e(a);
            z[1][1] = q * bb1 * e(-a);
            z[1][2] = q * x * e(a);
            z[2][1] = q * y * e(-a);
            z[2][2] = q * bb2 * e(a);
        }
        9 => {
            let (a, s) = (w * (d1p - d1pp), w * (d1p + d1pp));
            z[0][0] = q * bb2 * e(a);
            z[0][3] = q * y * e(s);
            z[2][2] = p * e(-a);
            z[3][0] = q * x * e(-s);
            z[3][3] = q * bb1 * e(-a);
        }
        10 => {
            let (a, s) = (w * (d1p - d2pp), w * (d1p + d2pp));
            z[0][0] = q * y * e(a);
            z[0][3] = q * bb2 * e(s);
            z[2][1] = p * e(-a);
            z[3][0] = q * bb1 * e(-s);
            z[3][3] = q * x * e(-a);
        }
        11 => {
            let (a, s) = (w * (d2p - d1pp), w * (d2p + d1pp));
            z[0][0] = q * x * e(a);
            z[0][3] = q * bb1 * e(s);
            z[1][2] = p * e(-a);
            z[3][0] = q * bb2 * e(-s);
            z[3][3] = q * y * e(-a);
        }
        12 => {
            let (a, s) = (w * (d2p - d2pp), w * (d2p + d2pp));
            z[0][0] = q * bb1 * e(a);
            z[0][3] = q * x * e(s);
            z[1][1] = p * e(-a);
            z[3][0] = q * y * e(-s);
            z[3][3] = q * bb2 * e(-a);
        }
        _ => unreachable!(),
    }
    TwoQubitOperator { entries: z }
}

fn state_strategy() -> impl Strategy<Value = InitialState> {
    (
        0.0..=1.0f64,
        0.0..std::f64::consts::FRAC_PI_2,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(p, th, ph)| {
            InitialState::new(p, C64::new(th.cos(), 0.0), C64::from_polar(th.sin(), ph)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn products_match_transcription(
        t1 in -2.0..2.0f64, t2 in -2.0..2.0f64, tau_a in 0.05..2.0f64,
        alpha in 0.0..1.5f64, w in 0.1..3.0f64, state in state_strategy(),
    ) {
        let prods = gamma_matrix_products(t1, t2, tau_a, alpha, &state, w, 1.0);
        let (d1p, d1pp) = (t1 + tau_a, t2 + tau_a);
        let (d2p, d2pp) = (alpha * d1p, alpha * d1pp);
        for (i, m) in prods.iter().enumerate() {
            let t = transcribed(i + 1, d1p, d1pp, d2p, d2pp, state.p(), state.b1(), state.b2(), w);
            prop_assert!(m.max_abs_diff(&t) < 1e-12, "item {}", i + 1);
        }
    }

    #[test]
    fn closed_traces_match_matrix_algebra(
        t1 in -2.0..2.0f64, t2 in -2.0..2.0f64, tau_a in 0.05..2.0f64,
        alpha in 0.0..1.5f64, alpha_prime in 0.0..2.0f64, w in 0.1..3.0f64,
        mu in 0.2..2.0f64, state in state_strategy(),
    ) {
        let ctx = GammaContext { tau_a, alpha_a: alpha, alpha_prime, omega: w, mu, state };
        for which in GammaTerm::ALL {
            let closed = gamma_trace_closed(which, t1, t2, &ctx);
            let matrix = gamma_trace_matrix(which, t1, t2, &ctx).unwrap();
            prop_assert!((closed - matrix).norm() < 1e-12 * (1.0 + matrix.norm()), "{which:?}");
        }
    }

    #[test]
    fn monopoles_hermitian_and_square_to_mu2(dt in -10.0..10.0f64, w in 0.0..5.0f64, mu in 0.1..3.0f64) {
        let id = TwoQubitOperator::identity().scale(C64::new(mu * mu, 0.0));
        for m in [monopole_m1(dt, w, mu), monopole_m2(dt, w, mu)] {
            prop_assert!(m.is_hermitian(1e-12));
            prop_assert!((m * m).max_abs_diff(&id) < 1e-12);
        }
    }

    #[test]
    fn densities_are_physical(state in state_strategy()) {
        let rho = initial_density(&state);
        prop_assert!(rho.is_hermitian(1e-12));
        prop_assert!((rho.trace() - 1.0).norm() < 1e-12);
        let m = nalgebra::Matrix4::from_fn(|i, j| {
            let z = rho.get(i, j);
            nalgebra::Complex::new(z.re, z.im)
        });
        let eig = m.symmetric_eigenvalues();
        prop_assert!(eig.iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn parity_flip(t1 in -1.0..1.0f64, t2 in -1.0..1.0f64, alpha in 0.0..1.0f64, p in 0.0..1.0f64) {
        let mk = |par| GammaContext {
            tau_a: 1.0, alpha_a: alpha, alpha_prime: 0.7, omega: 1.3, mu: 1.0,
            state: InitialState::entangled(p, par).unwrap(),
        };
        let (s, a) = (mk(EntangledParity::Symmetric), mk(EntangledParity::Antisymmetric));
        for which in GammaTerm::ALL {
            let (x, y) = (gamma_trace_closed(which, t1, t2, &s), gamma_trace_closed(which, t1, t2, &a));
            match which {
                GammaTerm::G11 | GammaTerm::G22 => prop_assert!((x - y).norm() < 1e-14),
                _ => prop_assert!((x + y).norm() < 1e-14),
            }
        }
    }
}

#[test]
fn commutator_of_monopoles() {
    let (m1, m2) = (monopole_m1(0.0, 1.0, 1.0), monopole_m2(0.0, 1.0, 1.0));
    let brute = m1 * m2 - m2 * m1;
    assert!(m1.commutator(&m2).max_abs_diff(&brute) < 1e-15);
}

#[test]
fn first_product_at_p_one() {
    let s = InitialState::entangled(1.0, EntangledParity::Symmetric).unwrap();
    let (t1, t2, ta, w) = (0.4, -0.3, 0.8, 1.7);
    let m = &gamma_matrix_products(t1, t2, ta, 0.5, &s, w, 1.0)[0];
    let expect = e(w * ((t1 + ta) - (t2 + ta)));
    for i in 0..4 {
        for j in 0..4 {
            let want = if (i, j) == (0, 0) {
                expect
            } else {
                C64::new(0.0, 0.0)
            };
            assert!((m.get(i, j) - want).norm() < 1e-14);
        }
    }
}

#[test]
fn sandwich_product_corners() {
    let s = InitialState::entangled(0.0, EntangledParity::Symmetric).unwrap();
    let (t1, t2, ta, w) = (0.2, 0.9, 0.5, 1.1);
    let m = &gamma_matrix_products(t1, t2, ta, 0.7, &s, w, 1.0)[8];
    let (b1, b2) = s.parity().unwrap().amplitudes();
    let corner = b1.conj() * b2 * e(w * ((t1 + ta) + (t2 + ta)));
    assert!((m.get(0, 3) - corner).norm() < 1e-14);
    assert!((m.get(3, 0) - corner.conj()).norm() < 1e-14);
}
