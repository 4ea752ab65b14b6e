//! Two-qubit operator algebra on the product basis
//! `{|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩}` (indices 0..4 in that order).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{domain, ensure_finite, Result};

/// Absolute tolerance used by the Hermiticity, trace and normalization checks.
pub const ALGEBRA_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 4×4 complex matrix acting on the two-qubit space.
#[derive(Clone, Copy, PartialEq)]
pub struct TwoQubitOperator {
    pub entries: [[C64; 4]; 4],
}

impl fmt::Debug for TwoQubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TwoQubitOperator [")?;
        for row in &self.entries {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>+.6}{:>+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl TwoQubitOperator {
    pub const fn zero() -> Self {
        Self {
            entries: [[ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        Self::diag([1.0; 4])
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.entries[i][i] = C64::new(v, 0.0);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.entries[i][j] = self.entries[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.entries.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut t = ZERO;
        for i in 0..4 {
            for k in 0..4 {
                t += self.entries[i][k] * other.entries[k][i];
            }
        }
        t
    }
}

impl Add for TwoQubitOperator {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl Sub for TwoQubitOperator {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..4 {
            for j in 0..4 {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}

impl Neg for TwoQubitOperator {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl Mul for TwoQubitOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.entries[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    m.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        m
    }
}

/// Which of the two maximally entangled zero-energy states is prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntangledParity {
    /// `|s⟩ = (|e₁g₂⟩ + |g₁e₂⟩)/√2`
    Symmetric,
    /// `|a⟩ = (|e₁g₂⟩ − |g₁e₂⟩)/√2`
    Antisymmetric,
}

impl EntangledParity {
    /// `(b₁, b₂)` amplitudes of the state.
    pub fn amplitudes(self) -> (C64, C64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Self::Symmetric => (C64::new(h, 0.0), C64::new(h, 0.0)),
            Self::Antisymmetric => (C64::new(h, 0.0), C64::new(-h, 0.0)),
        }
    }

    /// `+1` for the symmetric state and `−1` for the antisymmetric one.
    pub fn sign(self) -> f64 {
        match self {
            Self::Symmetric => 1.0,
            Self::Antisymmetric => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Symmetric => Self::Antisymmetric,
            Self::Antisymmetric => Self::Symmetric,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Symmetric => "symmetric",
            Self::Antisymmetric => "antisymmetric",
        }
    }
}

impl fmt::Display for EntangledParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Initial state `ρ = p|e₁e₂⟩⟨e₁e₂| + q|χ⟩⟨χ|` with `|χ⟩ = b₁|e₁g₂⟩ + b₂|g₁e₂⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    p: f64,
    b1: C64,
    b2: C64,
}

impl InitialState {
    pub fn new(p: f64, b1: C64, b2: C64) -> Result<Self> {
        ensure_finite("p", p)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("p must lie in [0, 1], got {p}")));
        }
        if !(b1.re.is_finite() && b1.im.is_finite() && b2.re.is_finite() && b2.im.is_finite()) {
            return Err(domain("amplitudes must be finite"));
        }
        let norm = b1.norm_sqr() + b2.norm_sqr();
        if (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(domain(format!("|b1|^2 + |b2|^2 must be 1, got {norm}")));
        }
        Ok(Self { p, b1, b2 })
    }

    /// Mixture of `|e₁e₂⟩` with weight `p` and a maximally entangled state.
    pub fn entangled(p: f64, parity: EntangledParity) -> Result<Self> {
        let (b1, b2) = parity.amplitudes();
        Self::new(p, b1, b2)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn b1(&self) -> C64 {
        self.b1
    }

    pub fn b2(&self) -> C64 {
        self.b2
    }

    /// `b₁ b₂*`, the coherence that drives the cross-correlation channel.
    pub fn coherence(&self) -> C64 {
        self.b1 * self.b2.conj()
    }

    /// Coefficient `p + q(|b₁|² − |b₂|²)` of the observer's autocorrelation channel.
    pub fn auto_weight_1(&self) -> f64 {
        self.p + self.q() * (self.b1.norm_sqr() - self.b2.norm_sqr())
    }

    /// Coefficient `p + q(|b₂|² − |b₁|²)` of the second detector's autocorrelation channel.
    pub fn auto_weight_2(&self) -> f64 {
        self.p + self.q() * (self.b2.norm_sqr() - self.b1.norm_sqr())
    }

    /// Parity of the entangled component when it is one of `|s⟩`, `|a⟩`.
    pub fn parity(&self) -> Option<EntangledParity> {
        [EntangledParity::Symmetric, EntangledParity::Antisymmetric]
            .into_iter()
            .find(|par| {
                let (b1, b2) = par.amplitudes();
                (self.b1 - b1).norm() < ALGEBRA_TOL && (self.b2 - b2).norm() < ALGEBRA_TOL
            })
    }
}

/// The dimensionless free Hamiltonian `h_α = diag((1+α)/2, (1−α)/2, (α−1)/2, (−1−α)/2)`.
pub fn h_alpha(alpha: f64) -> Result<TwoQubitOperator> {
    ensure_finite("alpha", alpha)?;
    if alpha < 0.0 {
        return Err(domain(format!("alpha must be non-negative, got {alpha}")));
    }
    Ok(TwoQubitOperator::diag([
        (1.0 + alpha) / 2.0,
        (1.0 - alpha) / 2.0,
        (alpha - 1.0) / 2.0,
        (-1.0 - alpha) / 2.0,
    ]))
}

/// `2·h_α`, the level matrix with unit spacing per excitation. The closed-form
/// Γ traces are normalised against this matrix.
pub fn level_matrix(alpha: f64) -> Result<TwoQubitOperator> {
    Ok(h_alpha(alpha)?.scale(C64::new(2.0, 0.0)))
}

fn monopole(pairs: [(usize, usize); 2], delta_tau: f64, omega: f64, mu: f64) -> TwoQubitOperator {
    let e = C64::from_polar(mu, omega * delta_tau);
    let mut m = TwoQubitOperator::zero();
    for (i, j) in pairs {
        m.entries[i][j] = e;
        m.entries[j][i] = e.conj();
    }
    m
}

/// Interaction-picture monopole of the first detector, `μ(|e₁⟩⟨g₁|e^{iωΔτ} + h.c.)`.
pub fn monopole_m1(delta_tau: f64, omega: f64, mu: f64) -> TwoQubitOperator {
    monopole([(0, 2), (1, 3)], delta_tau, omega, mu)
}

/// Interaction-picture monopole of the second detector.
pub fn monopole_m2(delta_tau: f64, omega: f64, mu: f64) -> TwoQubitOperator {
    monopole([(0, 1), (2, 3)], delta_tau, omega, mu)
}

pub fn initial_density(state: &InitialState) -> TwoQubitOperator {
    let q = state.q();
    let mut r = TwoQubitOperator::zero();
    r.entries[0][0] = C64::new(state.p, 0.0);
    r.entries[1][1] = C64::new(q * state.b1.norm_sqr(), 0.0);
    r.entries[1][2] = state.b1 * state.b2.conj() * q;
    r.entries[2][1] = state.b1.conj() * state.b2 * q;
    r.entries[2][2] = C64::new(q * state.b2.norm_sqr(), 0.0);
    r
}

/// `Re Tr(ρ h_{α′})`, rejecting non-Hermitian input.
pub fn trace_rho_h(rho: &TwoQubitOperator, alpha_prime: f64) -> Result<f64> {
    if !rho.is_hermitian(ALGEBRA_TOL) {
        return Err(domain("operator is not Hermitian"));
    }
    let t = rho.trace_product(&h_alpha(alpha_prime)?);
    debug_assert!(t.im.abs() <= ALGEBRA_TOL);
    Ok(t.re)
}

/// The six second-order Γ operators, named by the detector pair of the
/// Wightman function they multiply and by their ordering variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GammaTerm {
    /// Γ¹₁₂, paired with `G₁₂(τ′, τ₂″)`.
    G12First,
    /// Γ²₁₂, paired with `G₁₂(τ″, τ₂′)`.
    G12Second,
    /// Γ¹₂₁, paired with `G₂₁(τ₂′, τ″)`.
    G21First,
    /// Γ²₂₁, paired with `G₂₁(τ₂″, τ′)`.
    G21Second,
    /// Γ₁₁, paired with `G₁₁(τ′, τ″)`.
    G11,
    /// Γ₂₂, paired with `G₂₂(τ₂′, τ₂″)`.
    G22,
}

impl GammaTerm {
    pub const ALL: [GammaTerm; 6] = [
        GammaTerm::G12First,
        GammaTerm::G12Second,
        GammaTerm::G21First,
        GammaTerm::G21Second,
        GammaTerm::G11,
        GammaTerm::G22,
    ];

    /// Number of detector-2 time arguments, each contributing a factor
    /// `dτ₂/dτ₁ = α` when the double integral is written over observer time.
    fn detector2_slots(self) -> i32 {
        match self {
            GammaTerm::G11 => 0,
            GammaTerm::G22 => 2,
            _ => 1,
        }
    }

    /// The Jacobian `α^{n₂}` that converts detector-2 time measures to observer time.
    pub fn time_weight(self, alpha_a: f64) -> f64 {
        alpha_a.powi(self.detector2_slots())
    }
}

/// Parameters shared by the closed-form Γ traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaContext {
    /// Half-duration of the interaction window, which starts at `−τ_a`.
    pub tau_a: f64,
    /// Proper-time ratio `τ₂/τ₁`.
    pub alpha_a: f64,
    /// Level ratio of the Hamiltonian the trace is taken against.
    pub alpha_prime: f64,
    pub omega: f64,
    pub mu: f64,
    pub state: InitialState,
}

impl GammaContext {
    fn offsets(&self, t1: f64, t2: f64) -> (f64, f64, f64, f64) {
        let d1p = t1 + self.tau_a;
        let d1pp = t2 + self.tau_a;
        (d1p, d1pp, self.alpha_a * d1p, self.alpha_a * d1pp)
    }
}

/// Closed-form `Tr(Γ·2h_{α′})` weighted by the observer-time Jacobian, as a
/// function of the observer times `τ′ = t1`, `τ″ = t2`. Detector 2 runs on
/// `τ₂ = α(τ + τ_a)` from the start of the window.
pub fn gamma_trace_closed(which: GammaTerm, t1: f64, t2: f64, ctx: &GammaContext) -> C64 {
    let s = &ctx.state;
    let (q, mu2, a, ap, w) = (
        s.q(),
        ctx.mu * ctx.mu,
        ctx.alpha_a,
        ctx.alpha_prime,
        ctx.omega,
    );
    let x = s.b1 * s.b2.conj();
    let y = x.conj();
    let (d1p, d1pp, d2p, d2pp) = ctx.offsets(t1, t2);
    let phi = w * (d1p - d2pp);
    let psi = w * (d2p - d1pp);
    let e = |t: f64| C64::from_polar(1.0, t);
    match which {
        GammaTerm::G12First => (y * e(phi) - x * e(-phi)) * (2.0 * q * mu2 * a),
        GammaTerm::G12Second => (y * e(-psi) - x * e(psi)) * (2.0 * q * mu2 * ap * a),
        GammaTerm::G21First => (x * e(psi) - y * e(-psi)) * (2.0 * q * mu2 * ap * a),
        GammaTerm::G21Second => (x * e(-phi) - y * e(phi)) * (2.0 * q * mu2 * a),
        GammaTerm::G11 => C64::new(4.0 * mu2 * (w * (t1 - t2)).cos() * s.auto_weight_1(), 0.0),
        GammaTerm::G22 => C64::new(
            4.0 * mu2 * ap * a * a * (w * a * (t1 - t2)).cos() * s.auto_weight_2(),
            0.0,
        ),
    }
}

/// The Γ operator itself, built from monopole products with the same offsets
/// as [`gamma_trace_closed`]. No Jacobian is applied.
pub fn gamma_operator(which: GammaTerm, t1: f64, t2: f64, ctx: &GammaContext) -> TwoQubitOperator {
    let (d1p, d1pp, d2p, d2pp) = ctx.offsets(t1, t2);
    let (w, mu) = (ctx.omega, ctx.mu);
    let r = initial_density(&ctx.state);
    let a1 = monopole_m1(d1p, w, mu);
    let b1 = monopole_m1(d1pp, w, mu);
    let a2 = monopole_m2(d2p, w, mu);
    let b2 = monopole_m2(d2pp, w, mu);
    match which {
        GammaTerm::G11 => a1 * b1 * r - a1 * r * b1 - b1 * r * a1 + r * b1 * a1,
        GammaTerm::G12First => a1 * b2 * r - b2 * r * a1,
        GammaTerm::G12Second => r * b1 * a2 - a2 * r * b1,
        GammaTerm::G21First => a2 * b1 * r - b1 * r * a2,
        GammaTerm::G21Second => r * b2 * a1 - a1 * r * b2,
        GammaTerm::G22 => a2 * b2 * r - a2 * r * b2 - b2 * r * a2 + r * b2 * a2,
    }
}

/// `α^{n₂}·Tr(Γ·2h_{α′})` evaluated by explicit matrix algebra.
pub fn gamma_trace_matrix(which: GammaTerm, t1: f64, t2: f64, ctx: &GammaContext) -> Result<C64> {
    let g = gamma_operator(which, t1, t2, ctx);
    let lm = level_matrix(ctx.alpha_prime)?;
    Ok(g.trace_product(&lm) * which.time_weight(ctx.alpha_a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(p: f64) -> InitialState {
        InitialState::entangled(p, EntangledParity::Symmetric).unwrap()
    }

    #[test]
    fn h_alpha_substitutions() {
        assert_eq!(
            h_alpha(1.0).unwrap(),
            TwoQubitOperator::diag([1.0, 0.0, 0.0, -1.0])
        );
        assert_eq!(
            h_alpha(0.0).unwrap(),
            TwoQubitOperator::diag([0.5, 0.5, -0.5, -0.5])
        );
        assert_eq!(
            h_alpha(2.0).unwrap(),
            TwoQubitOperator::diag([1.5, -0.5, 0.5, -1.5])
        );
        assert!(h_alpha(f64::NAN).is_err());
        assert!(h_alpha(-0.1).is_err());
    }

    #[test]
    fn monopole_slots() {
        let m1 = monopole_m1(0.0, 3.0, 1.0);
        let m2 = monopole_m2(0.0, 3.0, 1.0);
        for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            assert_eq!(m1.get(i, j), ONE);
            assert_eq!(m2.get(i, j), ZERO);
        }
        for (i, j) in [(0, 1), (2, 3), (1, 0), (3, 2)] {
            assert_eq!(m2.get(i, j), ONE);
        }
        let m = monopole_m1(0.5, 2.0, 1.0);
        assert!((m.get(0, 2) - C64::from_polar(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn density_examples() {
        assert_eq!(
            initial_density(&sym(1.0)),
            TwoQubitOperator::diag([1.0, 0.0, 0.0, 0.0])
        );
        let r = initial_density(&sym(0.0));
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((r.get(i, j) - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let s = InitialState::new(0.3, C64::new(0.6, 0.0), C64::new(0.8, 0.0)).unwrap();
        assert!((initial_density(&s).trace() - ONE).norm() < 1e-15);
        assert!(InitialState::new(0.3, C64::new(0.6, 0.0), C64::new(0.7, 0.0)).is_err());
        assert!(InitialState::new(1.2, ONE, ZERO).is_err());
    }

    #[test]
    fn trace_rho_h_examples() {
        let t = |p: f64, ap: f64| trace_rho_h(&initial_density(&sym(p)), ap).unwrap();
        assert!(t(0.0, 1.0).abs() < 1e-15);
        assert!((t(1.0, 0.7) - 0.85).abs() < 1e-15);
        assert!((t(0.5, 0.6) - 0.4).abs() < 1e-15);
        let mut bad = TwoQubitOperator::zero();
        bad.entries[0][1] = ONE;
        assert!(trace_rho_h(&bad, 0.5).is_err());
    }

    #[test]
    fn closed_traces_special_cases() {
        let ctx = GammaContext {
            tau_a: 0.7,
            alpha_a: 0.6,
            alpha_prime: 0.3,
            omega: 1.7,
            mu: 1.0,
            state: sym(0.0),
        };
        let (t1, t2) = (0.2, -0.4);
        assert_eq!(gamma_trace_closed(GammaTerm::G11, t1, t2, &ctx), ZERO);
        let g = gamma_trace_closed(GammaTerm::G12First, t1, t2, &ctx);
        let phi = ctx.omega * ((t1 + ctx.tau_a) - ctx.alpha_a * (t2 + ctx.tau_a));
        let expect = C64::new(0.0, 2.0 * ctx.alpha_a * phi.sin());
        assert!((g - expect).norm() < 1e-14);
    }

    #[test]
    fn parity_flip_negates_cross_traces() {
        let mk = |par| GammaContext {
            tau_a: 1.1,
            alpha_a: 0.4,
            alpha_prime: 0.8,
            omega: 2.3,
            mu: 0.7,
            state: InitialState::entangled(0.25, par).unwrap(),
        };
        let (s, a) = (
            mk(EntangledParity::Symmetric),
            mk(EntangledParity::Antisymmetric),
        );
        for which in GammaTerm::ALL {
            let (x, y) = (
                gamma_trace_closed(which, 0.3, -0.9, &s),
                gamma_trace_closed(which, 0.3, -0.9, &a),
            );
            match which {
                GammaTerm::G11 | GammaTerm::G22 => assert!((x - y).norm() < 1e-14),
                _ => assert!((x + y).norm() < 1e-14),
            }
        }
    }
}
