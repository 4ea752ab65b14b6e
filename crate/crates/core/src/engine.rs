//! Works, heats and efficiency of the entangled Otto cycle.
//!
//! Stage 1 and 3 are adiabatic (gap `ω₁ ↔ ω₂`, no coupling), stage 2 couples
//! the detectors to the field while they accelerate with ratio `α_aH`, and
//! stage 4 does the same with `α_aC`. The cyclic condition `δρ^C = −δρ^H` makes
//! every trace a functional of the heating-stage perturbation `δρ^H` alone:
//! `Tr(δρ^H h_{α′}) = (1+α′)·C + A₁ + α′·A₂`, where `C` is the cross-correlation
//! channel and `A₁`, `A₂` the two autocorrelation channels. For the maximally
//! entangled states with `p = 0` the autocorrelation channels vanish and
//! `C = ±2I₁`.
//!
//! Spectral integrals are reported per unit `μ²`. The cross channel carries an
//! overall factor `α_aH`; it is computed with that factor removed (the
//! "reduced" integral `J = I₁/α_aH`) so that `α_aH = 0` is evaluated exactly.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::algebra::{initial_density, trace_rho_h, EntangledParity, InitialState};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::kinematics::StagePlan;
use crate::quadrature::{
    integrate_interval, integrate_semi_infinite, integrate_vertical_ray, sinc_pair_reduced,
    sinc_square, IntegrandSpec, TailRule,
};
use crate::wightman::{
    g12_kernel_1p1, pair_kernel_1p1, DetectorPairKinematics, TransverseSpectrum,
};

/// Spacetime dimension of the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    D1p1,
    D1p3,
}

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::D1p1 => "1p1",
            Dimension::D1p3 => "1p3",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1p1" | "1+1" | "d1p1" => Ok(Dimension::D1p1),
            "1p3" | "1+3" | "d1p3" => Ok(Dimension::D1p3),
            other => Err(domain(format!(
                "unknown dimension '{other}', expected 1p1 or 1p3"
            ))),
        }
    }
}

/// Tolerances and cutoffs of the spectral integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    /// Relative tolerance of the 1+1D integrals.
    pub rel_tol: f64,
    /// Absolute tolerance, in units of `τ_a²`.
    pub abs_tol: f64,
    /// Relative tolerance of the 1+3D integrals.
    pub rel_tol_1p3: f64,
    /// Infrared cutoff of the 1+1D autocorrelation channels, as a fraction of
    /// the observer's acceleration (or of `a_H2` when the observer is inertial).
    pub k_min_factor: f64,
    pub max_doublings: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            rel_tol_1p3: 1e-5,
            k_min_factor: 1e-6,
            max_doublings: 40,
        }
    }
}

/// All physical parameters of one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub omega1: f64,
    pub omega2: f64,
    /// Acceleration ratio `a_H1/a_H2` of the heating stage.
    pub alpha_ah: f64,
    /// Acceleration of the second detector in the heating stage.
    pub a_h2: f64,
    /// Acceleration ratio of the cooling stage.
    pub alpha_ac: f64,
    /// Half-duration of the observer's heating interaction.
    pub tau_a: f64,
    pub initial: InitialState,
    pub dimension: Dimension,
    pub mu: f64,
    pub numerics: NumericOptions,
}

impl CycleConfig {
    /// Coupling switched on in stages 2 and 4 only.
    pub const INTERACTION_ON: [bool; 4] = [false, true, false, true];

    /// Config for a maximally entangled `p = 0` state with `α_aC` taken from
    /// the conservation condition.
    pub fn entangled(
        omega1: f64,
        omega2: f64,
        alpha_ah: f64,
        a_h2: f64,
        tau_a: f64,
        parity: EntangledParity,
        dimension: Dimension,
    ) -> Result<Self> {
        let alpha_ac = crate::protocol::alpha_ac_from(alpha_ah, omega1, omega2);
        let cfg = Self {
            omega1,
            omega2,
            alpha_ah,
            a_h2,
            alpha_ac,
            tau_a,
            initial: InitialState::entangled(0.0, parity)?,
            dimension,
            mu: 1.0,
            numerics: NumericOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("alpha_aH", self.alpha_ah),
            ("aH2", self.a_h2),
            ("alpha_aC", self.alpha_ac),
            ("tau_a", self.tau_a),
            ("mu", self.mu),
        ] {
            ensure_finite(name, v)?;
        }
        eta0(self.omega1, self.omega2)?;
        if self.alpha_ah < 0.0 {
            return Err(domain(format!(
                "alpha_aH must be non-negative, got {}",
                self.alpha_ah
            )));
        }
        if self.a_h2 <= 0.0 {
            return Err(domain(format!("aH2 must be positive, got {}", self.a_h2)));
        }
        if self.tau_a <= 0.0 {
            return Err(domain(format!(
                "tau_a must be positive, got {}",
                self.tau_a
            )));
        }
        let n = &self.numerics;
        if !(n.rel_tol > 0.0 && n.abs_tol > 0.0 && n.rel_tol_1p3 > 0.0 && n.k_min_factor > 0.0) {
            return Err(domain("tolerances must be positive"));
        }
        Ok(())
    }

    pub fn heating_pair(&self) -> Result<DetectorPairKinematics> {
        DetectorPairKinematics::from_a2(self.a_h2, self.alpha_ah)
    }

    pub fn a_h1(&self) -> f64 {
        self.alpha_ah * self.a_h2
    }

    /// Common speed reached at the end of the heating stage, `tanh(a_H1 τ_a)`.
    pub fn speed(&self) -> f64 {
        (self.a_h1() * self.tau_a).tanh()
    }

    /// Stage accelerations, with the second detector's cooling acceleration
    /// set equal to its heating one.
    pub fn plan(&self) -> Result<StagePlan> {
        StagePlan::from_ratios(
            self.speed(),
            self.alpha_ah,
            self.a_h2,
            self.alpha_ac.max(0.0),
            self.a_h2,
        )
    }
}

/// Single-qubit Otto efficiency `1 − ω₁/ω₂`.
pub fn eta0(omega1: f64, omega2: f64) -> Result<f64> {
    ensure_finite("omega1", omega1)?;
    ensure_finite("omega2", omega2)?;
    if !(0.0 < omega1 && omega1 < omega2) {
        return Err(domain(format!(
            "need 0 < omega1 < omega2, got {omega1}, {omega2}"
        )));
    }
    Ok(1.0 - omega1 / omega2)
}

/// A spectral integral and its accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegral {
    /// `I₁` per unit `μ²`.
    pub value: f64,
    /// `I₁/α_aH`, finite at `α_aH = 0`.
    pub reduced: f64,
    /// Absolute error estimate of `reduced`.
    pub reduced_error: f64,
    /// `∫(W⁺ − W⁻)[S(k+ω₂) − S(k−ω₂)]/α dk`, so that `reduced = 2cos θ·integral`.
    pub integral: f64,
    pub integral_error: f64,
    pub evaluations: usize,
}

impl SpectralIntegral {
    fn new(alpha: f64, theta: f64, integral: f64, integral_error: f64, evaluations: usize) -> Self {
        let pre = 2.0 * theta.cos();
        Self {
            value: alpha * pre * integral,
            reduced: pre * integral,
            reduced_error: pre.abs() * integral_error,
            integral,
            integral_error,
            evaluations,
        }
    }
}

fn check_stage(omega2: f64, tau_a: f64) -> Result<()> {
    ensure_finite("omega2", omega2)?;
    ensure_finite("tau_a", tau_a)?;
    if omega2 <= 0.0 || tau_a <= 0.0 {
        return Err(domain("omega2 and tau_a must be positive"));
    }
    Ok(())
}

/// `[S(k+ω) − S(k−ω)]/α` with `S(x) = sin(xτ)sin(αxτ)/x²`.
fn cross_bracket(k: f64, omega: f64, tau_a: f64, alpha: f64) -> f64 {
    sinc_pair_reduced(k + omega, tau_a, alpha) - sinc_pair_reduced(k - omega, tau_a, alpha)
}

/// Default spectral cutoff of the 1+1D integrals before the tail blocks.
pub fn default_k_max(a1: f64, a2: f64, omega2: f64, tau_a: f64) -> f64 {
    (50.0 * a1)
        .max(50.0 * omega2)
        .max(100.0 / tau_a)
        .max(10.0 * a2)
}

/// The 1+1D spectral integral
/// `I₁ = (μ²/π) cos(ω₂(α−1)τ_a) ∫₀^∞ dk sinh(πk(1+α)/2a₁)/(k√(sinh(πk/a₁) sinh(πkα/a₁)))·[S(k+ω₂) − S(k−ω₂)]`,
/// per unit `μ²`.
pub fn i1_1p1(
    kin: &DetectorPairKinematics,
    omega2: f64,
    tau_a: f64,
    opts: &NumericOptions,
) -> Result<SpectralIntegral> {
    check_stage(omega2, tau_a)?;
    let alpha = kin.alpha();
    let theta = omega2 * (alpha - 1.0) * tau_a;
    let f = move |k: f64| -> [f64; 1] {
        match g12_kernel_1p1(k, kin) {
            Ok(w) => [w.odd() * cross_bracket(k, omega2, tau_a, alpha)],
            Err(_) => [f64::NAN],
        }
    };
    let mut spec = IntegrandSpec::new(&f, default_k_max(kin.a1(), kin.a2(), omega2, tau_a));
    spec.breakpoints = vec![omega2];
    spec.max_panel = PI / ((1.0 + alpha) * tau_a);
    spec.sqrt_origin = alpha == 0.0;
    spec.tail = TailRule::Doubling {
        max_doublings: opts.max_doublings,
    };
    let r = integrate_semi_infinite(&spec, opts.rel_tol, opts.abs_tol * tau_a * tau_a)?;
    Ok(SpectralIntegral::new(
        alpha,
        theta,
        r.scalar(),
        r.abs_error_estimate,
        r.evaluations,
    ))
}

/// Diagnostics of a 1+3D evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum1p3Info {
    /// Upper end of the tabulated spectral weight.
    pub omega_max: f64,
    pub table_pieces: usize,
    /// Contribution of `ω_k > Ω` from the power-law continuation.
    pub tail: f64,
    /// Fitted exponent of the continuation.
    pub power: f64,
}

/// Default upper end of the tabulated 1+3D spectral weight.
pub fn default_omega_table(kin: &DetectorPairKinematics, omega2: f64, tau_a: f64) -> f64 {
    (20.0 * kin.a2()).max(20.0 * omega2).max(40.0 / tau_a)
}

/// The 1+3D spectral integral with the transverse-momentum integral reduced
/// to radial form, per unit `μ²`. Supported for `0 < α ≤ 1`.
pub fn i1_1p3(
    kin: &DetectorPairKinematics,
    omega2: f64,
    tau_a: f64,
    opts: &NumericOptions,
) -> Result<(SpectralIntegral, Spectrum1p3Info)> {
    let omega_max = default_omega_table(kin, omega2, tau_a);
    i1_1p3_with_table(kin, omega2, tau_a, omega_max, opts)
}

/// [`i1_1p3`] with an explicit table range `Ω`.
pub fn i1_1p3_with_table(
    kin: &DetectorPairKinematics,
    omega2: f64,
    tau_a: f64,
    omega_max: f64,
    opts: &NumericOptions,
) -> Result<(SpectralIntegral, Spectrum1p3Info)> {
    check_stage(omega2, tau_a)?;
    let alpha = kin.alpha();
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "1+3D integrals need 0 < alpha_aH <= 1, got {alpha}"
        )));
    }
    if omega_max <= 2.0 * omega2 {
        return Err(domain("the tabulated range must extend beyond 2·omega2"));
    }
    let rel = opts.rel_tol_1p3;
    let spectrum = TransverseSpectrum::build(kin.a1(), kin.a2(), omega_max, rel * 1e-2)?;
    let f = |k: f64| [spectrum.weights(k).odd() * cross_bracket(k, omega2, tau_a, alpha)];
    let panel = PI / ((1.0 + alpha) * tau_a);
    let body = integrate_interval(&f, 0.0, omega_max, &[omega2], panel, rel * 1e-3, 1e-300)?;
    // Beyond Ω the weight is continued as A·k^p and the path rotated to
    // k = Ω + iy, where the bracket S(x)/α = Re[−i e^{ixτ} sin(αxτ)/(αx²)]
    // decays.
    // −i e^{izτ} sin(αzτ)/α = −e^{i(1−α)zτ}·(e^{2iαzτ} − 1)/(2α), bounded in
    // the upper half-plane.
    let e = |z: C64| -> C64 {
        let w = C64::i() * z * tau_a;
        -(w * (1.0 - alpha)).exp() * expm1_c(w * (2.0 * alpha)) / (2.0 * alpha * z * z)
    };
    let g = |z: C64| spectrum.model(z) * (e(z + omega2) - e(z - omega2));
    let g_alt = |z: C64| spectrum.model_alt(z) * (e(z + omega2) - e(z - omega2));
    let (tail, tail_err) = integrate_vertical_ray(&g, omega_max, omega_max, rel * 1e-3, 1e-300)?;
    let (tail_alt, _) = integrate_vertical_ray(&g_alt, omega_max, omega_max, rel * 1e-3, 1e-300)?;
    let model_err = (tail.re - tail_alt.re).abs();
    let integral = body.scalar() + tail.re;
    let err = body.abs_error_estimate + tail_err + model_err + rel * 1e-2 * integral.abs();
    let info = Spectrum1p3Info {
        omega_max,
        table_pieces: spectrum.table_pieces(),
        tail: tail.re,
        power: spectrum.power_law().1,
    };
    let theta = omega2 * (alpha - 1.0) * tau_a;
    let evals = body.evaluations + spectrum.table_evaluations();
    Ok((
        SpectralIntegral::new(alpha, theta, integral, err, evals),
        info,
    ))
}

fn expm1_c(w: C64) -> C64 {
    if w.norm() < 1e-2 {
        w * (1.0 + w / 2.0 * (1.0 + w / 3.0 * (1.0 + w / 4.0 * (1.0 + w / 5.0))))
    } else {
        w.exp() - 1.0
    }
}

/// `I₁` of the heating stage of `config` in its configured dimension.
pub fn i1(config: &CycleConfig) -> Result<SpectralIntegral> {
    stage_i1(&config.heating_pair()?, config)
}

/// `Tr(δρ^H h_{α′}) = ±2(1+α′)I₁`, positive for the symmetric state.
pub fn trace_delta_rho_h(alpha_prime: f64, i1: f64, parity: EntangledParity) -> f64 {
    parity.sign() * 2.0 * (1.0 + alpha_prime) * i1
}

/// Channel decomposition `Tr(δρ h_{α′}) = (1+α′)·cross + auto1 + α′·auto2`,
/// per unit `μ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDecomposition {
    /// The stage's `I₁` integral.
    pub i1: SpectralIntegral,
    /// Physical cross channel (includes the factor `α`).
    pub cross: f64,
    /// Cross channel with the factor `α` removed.
    pub cross_reduced: f64,
    pub cross_reduced_error: f64,
    pub auto1: f64,
    pub auto2: f64,
    pub auto_error: f64,
    /// Relative change of the autocorrelation channels when the infrared
    /// cutoff is doubled.
    pub ir_sensitivity: f64,
    pub warnings: Vec<String>,
}

impl TraceDecomposition {
    pub fn trace(&self, alpha_prime: f64) -> f64 {
        (1.0 + alpha_prime) * self.cross + self.auto1 + alpha_prime * self.auto2
    }

    /// Trace with the cross channel's factor `α` removed; equals
    /// `trace/α` when the autocorrelation channels vanish.
    pub fn trace_reduced(&self, alpha_prime: f64) -> f64 {
        (1.0 + alpha_prime) * self.cross_reduced
    }

    pub fn trace_error(&self, alpha: f64, alpha_prime: f64) -> f64 {
        (1.0 + alpha_prime) * (alpha * self.cross_reduced_error + self.auto_error)
    }

    /// True when both autocorrelation channels vanish identically.
    pub fn cross_only(&self) -> bool {
        self.auto1 == 0.0 && self.auto2 == 0.0
    }
}

/// `b₁b₂* e^{iθ} + b₁*b₂ e^{−iθ}`, real for any amplitudes.
pub fn coherence_prefactor(state: &InitialState, theta: f64) -> f64 {
    2.0 * (state.coherence() * C64::from_polar(1.0, theta)).re
}

/// 1+1D autocorrelation integral `∫_{k_min}^∞ (W⁺+W⁻)(k)[s(k+ω) + s(ω−k)] dk`
/// for a detector of acceleration `a`, `s(x) = sin²(xτ)/x²`. Returns the
/// value, its error and the relative weight of `[k_min, 2k_min]`.
fn auto_channel_1p1(
    a: f64,
    omega: f64,
    tau_a: f64,
    k_min: f64,
    opts: &NumericOptions,
) -> Result<(f64, f64, f64)> {
    let f = move |k: f64| -> [f64; 1] {
        if k < k_min {
            return [0.0];
        }
        match pair_kernel_1p1(k, a, a) {
            Ok(w) => [w.even() * (sinc_square(k + omega, tau_a) + sinc_square(omega - k, tau_a))],
            Err(_) => [f64::NAN],
        }
    };
    let k_max = (50.0 * a).max(50.0 * omega).max(100.0 / tau_a);
    let mut breaks = vec![omega];
    let mut b = k_min;
    while b < k_max {
        breaks.push(b);
        b *= 4.0;
    }
    let mut spec = IntegrandSpec::new(&f, k_max);
    spec.breakpoints = breaks;
    spec.max_panel = PI / tau_a;
    spec.tail = TailRule::Doubling {
        max_doublings: opts.max_doublings,
    };
    let r = integrate_semi_infinite(&spec, opts.rel_tol, opts.abs_tol * tau_a * tau_a)?;
    let head = integrate_interval(
        &f,
        k_min,
        2.0 * k_min,
        &[],
        f64::INFINITY,
        opts.rel_tol,
        1e-300,
    )?;
    let sens = if r.scalar() != 0.0 {
        (head.scalar() / r.scalar()).abs()
    } else {
        0.0
    };
    Ok((r.scalar(), r.abs_error_estimate, sens))
}

/// `I₁` of a stage with the given detector pair, in the configured dimension.
pub fn stage_i1(kin: &DetectorPairKinematics, config: &CycleConfig) -> Result<SpectralIntegral> {
    match config.dimension {
        Dimension::D1p1 => i1_1p1(kin, config.omega2, config.tau_a, &config.numerics),
        Dimension::D1p3 => Ok(i1_1p3(kin, config.omega2, config.tau_a, &config.numerics)?.0),
    }
}

/// Full decomposition of `Tr(δρ h_{α′})` for the stage with acceleration
/// ratio `alpha`, for an arbitrary initial state.
pub fn trace_decomposition(config: &CycleConfig, alpha: f64) -> Result<TraceDecomposition> {
    config.validate()?;
    let kin = DetectorPairKinematics::from_a2(config.a_h2, alpha)?;
    let (omega, tau) = (config.omega2, config.tau_a);
    let opts = &config.numerics;
    let state = &config.initial;
    let mut warnings = Vec::new();
    let i1 = stage_i1(&kin, config)?;
    let scale = 4.0 * state.q() * coherence_prefactor(state, omega * (alpha - 1.0) * tau);
    let (c1, c2) = (state.auto_weight_1(), state.auto_weight_2());
    let (mut auto1, mut auto2, mut auto_err, mut sens) = (0.0, 0.0, 0.0, 0.0f64);
    if c1 != 0.0 || (c2 != 0.0 && alpha > 0.0) {
        if config.dimension == Dimension::D1p3 {
            return Err(domain(
                "the autocorrelation channels diverge in 1+3D with sharp switching; \
                 only states with p = 0 and |b1| = |b2| are supported",
            ));
        }
        let a1 = kin.a1();
        let k_min = opts.k_min_factor * if a1 > 0.0 { a1 } else { kin.a2() };
        if c1 != 0.0 {
            let (v, e, s) = auto_channel_1p1(a1, omega, tau, k_min, opts)?;
            auto1 = -4.0 * c1 * v;
            auto_err += 4.0 * c1.abs() * e;
            sens = sens.max(s);
        }
        if c2 != 0.0 && alpha > 0.0 {
            // G₂₂ mapped onto the observer's kernel by y = αk.
            let (v, e, s) = auto_channel_1p1(a1, alpha * omega, tau, k_min, opts)?;
            auto2 = -4.0 * alpha * alpha * c2 * v;
            auto_err += 4.0 * alpha * alpha * c2.abs() * e;
            sens = sens.max(s);
        }
        if sens > 0.1 {
            warnings.push(format!(
                "autocorrelation channel changes by {:.1}% when the infrared cutoff {k_min:e} is doubled",
                100.0 * sens
            ));
        }
    }
    let cross_reduced = scale * i1.integral;
    Ok(TraceDecomposition {
        i1,
        cross: alpha * cross_reduced,
        cross_reduced,
        cross_reduced_error: scale.abs() * i1.integral_error,
        auto1,
        auto2,
        auto_error: auto_err,
        ir_sensitivity: sens,
        warnings,
    })
}

/// `Tr(δρ^α h_{α′})` for an arbitrary initial state, per unit `μ²`.
pub fn trace_delta_rho_h_general(
    config: &CycleConfig,
    alpha: f64,
    alpha_prime: f64,
) -> Result<f64> {
    Ok(trace_decomposition(config, alpha)?.trace(alpha_prime))
}

/// The three traces the cycle needs, at `α_v = 1`, `α_aH` and `α_aC`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTraces {
    pub alpha_v: f64,
    pub alpha_ah: f64,
    pub alpha_ac: f64,
    pub v: f64,
    pub heat: f64,
    pub cool: f64,
    /// Propagated error of each trace.
    pub v_error: f64,
    pub heat_error: f64,
    pub cool_error: f64,
}

impl StageTraces {
    /// Traces `±2(1+α′)I₁` of a maximally entangled state.
    pub fn factorized(
        i1: f64,
        i1_error: f64,
        parity: EntangledParity,
        alpha_ah: f64,
        alpha_ac: f64,
    ) -> Self {
        let t = |a: f64| trace_delta_rho_h(a, i1, parity);
        let e = |a: f64| 2.0 * (1.0 + a) * i1_error;
        Self {
            alpha_v: 1.0,
            alpha_ah,
            alpha_ac,
            v: t(1.0),
            heat: t(alpha_ah),
            cool: t(alpha_ac),
            v_error: e(1.0),
            heat_error: e(alpha_ah),
            cool_error: e(alpha_ac),
        }
    }
}

pub fn work_stage1(config: &CycleConfig) -> Result<f64> {
    let rho = initial_density(&config.initial);
    Ok((config.omega2 - config.omega1) * trace_rho_h(&rho, 1.0)?)
}

pub fn work_stage3(config: &CycleConfig, trace_v: f64) -> Result<f64> {
    let rho = initial_density(&config.initial);
    Ok((config.omega1 - config.omega2) * (trace_rho_h(&rho, 1.0)? + trace_v))
}

pub fn work_total(config: &CycleConfig, trace_v: f64) -> f64 {
    (config.omega1 - config.omega2) * trace_v
}

pub fn heat_in(config: &CycleConfig, trace_h: f64) -> f64 {
    config.omega2 * trace_h
}

/// Heat of stage 4, using `δρ^C = −δρ^H`; negative for a working engine.
pub fn heat_out(config: &CycleConfig, trace_c: f64) -> f64 {
    -config.omega1 * trace_c
}

pub fn heat_total(config: &CycleConfig, trace_h: f64, trace_c: f64) -> f64 {
    heat_in(config, trace_h) + heat_out(config, trace_c)
}

/// `ω₂Tr(δρ h_{α_aH}) − ω₁Tr(δρ h_{α_aC}) − (ω₂−ω₁)Tr(δρ h_{α_v})`.
pub fn conservation_residual(config: &CycleConfig, traces: &StageTraces) -> f64 {
    config.omega2 * traces.heat
        - config.omega1 * traces.cool
        - (config.omega2 - config.omega1) * traces.v
}

/// `η_E = η₀·Tr(δρ h_{α_v})/Tr(δρ h_{α_aH})`.
pub fn efficiency(traces: &StageTraces, omega1: f64, omega2: f64) -> Result<f64> {
    let e0 = eta0(omega1, omega2)?;
    if !(traces.heat > 0.0) {
        return Err(Error::EngineInvalid(format!(
            "heat-in trace must be positive, got {:e}",
            traces.heat
        )));
    }
    Ok(e0 * traces.v / traces.heat)
}

/// `η_E = η₀·2/(1+α_aH)`.
pub fn efficiency_closed_form(omega1: f64, omega2: f64, alpha_ah: f64) -> Result<f64> {
    ensure_finite("alpha_aH", alpha_ah)?;
    if alpha_ah < 0.0 {
        return Err(domain("alpha_aH must be non-negative"));
    }
    Ok(eta0(omega1, omega2)? * 2.0 / (1.0 + alpha_ah))
}

/// Everything computed for one cycle. Energies are in units of `ω₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub w1: f64,
    pub w3: f64,
    pub w_total: f64,
    pub q2: f64,
    pub q4: f64,
    pub q_total: f64,
    pub conservation_residual: f64,
    pub eta_e: f64,
    pub eta_e_closed_form: f64,
    pub eta_0: f64,
    /// The heating stage's `I₁` per unit `μ²`.
    pub i1: SpectralIntegral,
    /// Physical traces, including `μ²`.
    pub traces: StageTraces,
    /// Traces the efficiency and the sign verdicts are computed from: the
    /// reduced traces when only the cross channel contributes, the physical
    /// ones otherwise.
    pub decisive: StageTraces,
    /// Parity that makes the heat-in trace positive, `None` inside the noise.
    pub preferred_parity: Option<EntangledParity>,
    /// Heat-in trace exceeds ten times its error.
    pub heat_positive: bool,
    pub warnings: Vec<String>,
}

/// Sign verdict with the noise threshold: `Some(true)` if `x > 10·err`.
pub fn significant_sign(x: f64, err: f64) -> Option<bool> {
    if x > 10.0 * err {
        Some(true)
    } else if x < -10.0 * err {
        Some(false)
    } else {
        None
    }
}

/// Parity whose heat-in trace is positive for the given `I₁`.
pub fn parity_for(i1: f64, err: f64) -> Option<EntangledParity> {
    match significant_sign(i1, err) {
        Some(true) => Some(EntangledParity::Symmetric),
        Some(false) => Some(EntangledParity::Antisymmetric),
        None => None,
    }
}

/// Evaluates the cycle described by `config`.
///
/// When the autocorrelation channels vanish the efficiency and the sign
/// verdicts use the reduced traces, which differ from the physical ones by
/// the positive factor `α_aH` and stay meaningful at `α_aH = 0`.
pub fn evaluate_cycle(config: &CycleConfig) -> Result<CycleReport> {
    config.validate()?;
    let d = trace_decomposition(config, config.alpha_ah)?;
    let mu2 = config.mu * config.mu;
    let (aah, aac) = (config.alpha_ah, config.alpha_ac);
    let mk = |t: &dyn Fn(f64) -> f64, e: &dyn Fn(f64) -> f64| StageTraces {
        alpha_v: 1.0,
        alpha_ah: aah,
        alpha_ac: aac,
        v: t(1.0),
        heat: t(aah),
        cool: t(aac),
        v_error: e(1.0),
        heat_error: e(aah),
        cool_error: e(aac),
    };
    let physical = mk(&|a| mu2 * d.trace(a), &|a| mu2 * d.trace_error(aah, a));
    let decisive = if d.cross_only() {
        mk(&|a| mu2 * d.trace_reduced(a), &|a| {
            mu2 * (1.0 + a) * d.cross_reduced_error
        })
    } else {
        physical
    };
    let e0 = eta0(config.omega1, config.omega2)?;
    let heat_positive = significant_sign(decisive.heat, decisive.heat_error) == Some(true);
    let eta_e = if decisive.heat != 0.0 {
        e0 * decisive.v / decisive.heat
    } else {
        f64::NAN
    };
    let u = config.omega1;
    let t = &physical;
    let q2 = heat_in(config, t.heat);
    let q4 = heat_out(config, t.cool);
    let mut i1 = d.i1;
    for x in [
        &mut i1.value,
        &mut i1.reduced,
        &mut i1.reduced_error,
        &mut i1.integral,
        &mut i1.integral_error,
    ] {
        *x *= mu2;
    }
    Ok(CycleReport {
        w1: work_stage1(config)? / u,
        w3: work_stage3(config, t.v)? / u,
        w_total: work_total(config, t.v) / u,
        q2: q2 / u,
        q4: q4 / u,
        q_total: (q2 + q4) / u,
        conservation_residual: conservation_residual(config, t) / u,
        eta_e,
        eta_e_closed_form: efficiency_closed_form(config.omega1, config.omega2, aah)?,
        eta_0: e0,
        preferred_parity: parity_for(i1.reduced, i1.reduced_error),
        i1,
        traces: physical,
        decisive,
        heat_positive,
        warnings: d.warnings,
    })
}
