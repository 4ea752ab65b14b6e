//! Brute-force reference values of `Tr(δρ h_{α′})` straight from the
//! second-order perturbation series.
//!
//! For each spectral point the double time integral over `[−τ_a, τ_a]²` of
//! the Γ traces times the Wightman spectral components is done numerically
//! with a tensor Gauss–Legendre rule, and the spectral variable is integrated
//! last on fixed Gauss–Kronrod panels. None of the analytic time integrals
//! of the engine is used.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::algebra::{
    gamma_operator, gamma_trace_closed, gamma_trace_matrix, initial_density, monopole_m1,
    monopole_m2, GammaContext, GammaTerm, InitialState, TwoQubitOperator,
};
use crate::engine::{
    coherence_prefactor, default_k_max, i1_1p3_with_table, trace_decomposition, CycleConfig,
    Dimension,
};
use crate::error::{domain, Error, Result};
use crate::quadrature::{
    gk21_panel, integrate_square_from, patched_sinc_pair, sinc_square, LegendreRule,
    QuadratureResult,
};
use crate::wightman::{
    pair_kernel_1p1, DetectorPairKinematics, ThermalWeights, TransverseSpectrum,
};
use crate::Complex64 as C64;

/// How the Γ traces inside the time integrals are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    /// Closed-form traces.
    Closed,
    /// Traces of Γ operators built by explicit 4×4 products (slow).
    Matrix,
}

/// Oracle settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub cycle: CycleConfig,
    /// Spectral cutoff; `None` selects [`oracle_k_max`].
    pub k_max: Option<f64>,
    /// Gauss–Legendre order per unit of accumulated phase: the time rule at
    /// spectral point `k` has `2·factor·max(1,α)(k+ω)τ_a + 20` nodes.
    pub time_order_factor: f64,
    /// Relative tolerance of the adaptive time integrals of
    /// [`inner_time_integral_check`].
    pub time_tol: f64,
    pub source: TraceSource,
}

impl OracleConfig {
    pub fn new(cycle: CycleConfig) -> Self {
        Self {
            cycle,
            k_max: None,
            time_order_factor: 0.75,
            time_tol: 1e-12,
            source: TraceSource::Closed,
        }
    }
}

/// Default oracle spectral cutoff.
pub fn oracle_k_max(cycle: &CycleConfig) -> f64 {
    let a1 = cycle.a_h1();
    default_k_max(a1, cycle.a_h2, cycle.omega2, cycle.tau_a)
}

/// Oracle value of one trace next to the engine's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceReport {
    pub alpha_prime: f64,
    pub numeric: f64,
    pub numeric_error: f64,
    pub analytic: f64,
    pub analytic_error: f64,
    /// `|numeric − analytic|/|analytic|`.
    pub rel_deviation: f64,
    /// Imaginary part of the numeric trace, zero up to rounding.
    pub imag_residual: f64,
    /// Spectral cutoff and the estimated size of the neglected tail.
    pub k_max: f64,
    pub tail_estimate: f64,
    /// Change of the integrand at `k_max` under the next Gauss–Legendre order.
    pub time_rule_change: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Channel {
    Cross,
    Auto1,
    Auto2,
}

/// Pairing of each Γ with its Wightman function: spectral phase
/// `e^{−ik(c₁τ′ + c₂τ″)}` and kernel.
fn pairing(which: GammaTerm, alpha: f64) -> (f64, f64, Channel) {
    match which {
        GammaTerm::G12First => (1.0, -alpha, Channel::Cross),
        GammaTerm::G12Second => (-alpha, 1.0, Channel::Cross),
        GammaTerm::G21First => (alpha, -1.0, Channel::Cross),
        GammaTerm::G21Second => (-1.0, alpha, Channel::Cross),
        GammaTerm::G11 => (1.0, -1.0, Channel::Auto1),
        GammaTerm::G22 => (alpha, -alpha, Channel::Auto2),
    }
}

enum Kernels {
    OneP1 { a1: f64, a2: f64 },
    OneP3 { cross: TransverseSpectrum },
}

impl Kernels {
    fn weights(&self, channel: Channel, k: f64) -> Result<ThermalWeights> {
        match (self, channel) {
            (Kernels::OneP1 { a1, a2 }, Channel::Cross) => pair_kernel_1p1(k, *a1, *a2),
            (Kernels::OneP1 { a1, .. }, Channel::Auto1) => pair_kernel_1p1(k, *a1, *a1),
            (Kernels::OneP1 { a2, .. }, Channel::Auto2) => pair_kernel_1p1(k, *a2, *a2),
            (Kernels::OneP3 { cross }, Channel::Cross) => Ok(cross.weights(k)),
            (Kernels::OneP3 { .. }, _) => {
                Err(domain("autocorrelation channels are not available in 1+3D"))
            }
        }
    }
}

/// Trace matrices `T(τᵢ, τⱼ)` of one Γ on a time grid, split as
/// `T₀ + α′·T₁`.
struct TermGrid {
    c: (f64, f64),
    channel: Channel,
    parts: [Option<Vec<C64>>; 2],
}

struct Level {
    rule: LegendreRule,
    terms: Vec<TermGrid>,
}

fn trace_at(
    which: GammaTerm,
    t1: f64,
    t2: f64,
    ctx: &GammaContext,
    source: TraceSource,
) -> Result<C64> {
    match source {
        TraceSource::Closed => Ok(gamma_trace_closed(which, t1, t2, ctx)),
        TraceSource::Matrix => gamma_trace_matrix(which, t1, t2, ctx),
    }
}

fn context(cycle: &CycleConfig, alpha_prime: f64) -> GammaContext {
    GammaContext {
        tau_a: cycle.tau_a,
        alpha_a: cycle.alpha_ah,
        alpha_prime,
        omega: cycle.omega2,
        mu: cycle.mu,
        state: cycle.initial,
    }
}

fn build_level(n: usize, cfg: &OracleConfig) -> Result<Level> {
    let cycle = &cfg.cycle;
    let rule = LegendreRule::new(n, -cycle.tau_a, cycle.tau_a);
    let (c0, c1) = (context(cycle, 0.0), context(cycle, 1.0));
    let mut terms = Vec::new();
    for which in GammaTerm::ALL {
        let rows: Vec<Result<(Vec<C64>, Vec<C64>)>> = rule
            .nodes
            .par_iter()
            .map(|&t1| {
                let mut a = Vec::with_capacity(n);
                let mut b = Vec::with_capacity(n);
                for &t2 in &rule.nodes {
                    let x0 = trace_at(which, t1, t2, &c0, cfg.source)?;
                    let x1 = trace_at(which, t1, t2, &c1, cfg.source)?;
                    a.push(x0);
                    b.push(x1 - x0);
                }
                Ok((a, b))
            })
            .collect();
        let mut a = Vec::with_capacity(n * n);
        let mut b = Vec::with_capacity(n * n);
        for r in rows {
            let (ra, rb) = r?;
            a.extend(ra);
            b.extend(rb);
        }
        let scale = cycle.mu * cycle.mu * 1e-14;
        let keep = |m: Vec<C64>| {
            if m.iter().any(|z| z.norm() > scale) {
                Some(m)
            } else {
                None
            }
        };
        let (c1, c2, channel) = pairing(which, cycle.alpha_ah);
        terms.push(TermGrid {
            c: (c1, c2),
            channel,
            parts: [keep(a), keep(b)],
        });
    }
    terms.retain(|t| t.parts.iter().any(Option::is_some));
    Ok(Level { rule, terms })
}

/// `[Re A, Re B, Im A, Im B]` with `−½Σ∫∫ T·G = A + α′B` at spectral point `k`.
fn integrand_at(level: &Level, kernels: &Kernels, k: f64) -> Result<[f64; 4]> {
    let n = level.rule.len();
    let mut acc = [C64::new(0.0, 0.0); 2];
    for term in &level.terms {
        let w = kernels.weights(term.channel, k)?;
        let phase = |c: f64| -> Vec<C64> {
            level
                .rule
                .nodes
                .iter()
                .zip(&level.rule.weights)
                .map(|(&t, &wt)| C64::from_polar(wt, -k * c * t))
                .collect()
        };
        let u = phase(term.c.0);
        let v = phase(term.c.1);
        for (slot, part) in term.parts.iter().enumerate() {
            let Some(m) = part else { continue };
            let (mut plus, mut minus) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for i in 0..n {
                let row = &m[i * n..(i + 1) * n];
                let (mut sp, mut sm) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                for (mij, vj) in row.iter().zip(&v) {
                    sp += mij * vj;
                    sm += mij * vj.conj();
                }
                plus += u[i] * sp;
                minus += u[i].conj() * sm;
            }
            acc[slot] += (plus * w.plus + minus * w.minus) * -0.5;
        }
    }
    Ok([acc[0].re, acc[1].re, acc[0].im, acc[1].im])
}

const LEVELS: [usize; 16] = [
    24, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768, 1024, 1536, 2048, 3072, 4096,
];

fn level_for(cfg: &OracleConfig, k: f64) -> Result<usize> {
    let c = &cfg.cycle;
    let need = 2.0 * cfg.time_order_factor * c.alpha_ah.max(1.0) * (k + c.omega2) * c.tau_a + 20.0;
    LEVELS
        .iter()
        .copied()
        .find(|&l| l as f64 >= need)
        .ok_or_else(|| {
            domain(format!(
                "time rule of order {need:.0} exceeds the largest supported order"
            ))
        })
}

fn next_level(n: usize) -> Option<usize> {
    LEVELS.iter().copied().find(|&l| l > n)
}

fn has_auto(state: &InitialState, alpha: f64) -> bool {
    state.auto_weight_1() != 0.0 || (alpha > 0.0 && state.auto_weight_2() != 0.0)
}

/// Spectral panels: geometric from the infrared cutoff when an
/// autocorrelation channel is active, then uniform up to `k_max`.
fn panels(cfg: &OracleConfig, k_max: f64) -> Vec<(f64, f64)> {
    let c = &cfg.cycle;
    let a1 = c.a_h1();
    let mut h = (PI / (2.0 * (1.0 + c.alpha_ah) * c.tau_a)).min(c.omega2 / 2.0);
    if a1 > 0.0 {
        h = h.min(a1);
    }
    let mut out = Vec::new();
    let mut lo = 0.0;
    if has_auto(&c.initial, c.alpha_ah) {
        let k_min = c.numerics.k_min_factor * if a1 > 0.0 { a1 } else { c.a_h2 };
        lo = k_min;
        while 2.0 * lo < h {
            out.push((lo, 2.0 * lo));
            lo *= 2.0;
        }
    }
    let m = ((k_max - lo) / h).ceil().max(1.0) as usize;
    let step = (k_max - lo) / m as f64;
    out.extend((0..m).map(|i| (lo + i as f64 * step, lo + (i + 1) as f64 * step)));
    out
}

fn kernels_for(cfg: &OracleConfig, k_max: f64) -> Result<Kernels> {
    let c = &cfg.cycle;
    let kin = c.heating_pair()?;
    match c.dimension {
        Dimension::D1p1 => Ok(Kernels::OneP1 {
            a1: kin.a1(),
            a2: kin.a2(),
        }),
        Dimension::D1p3 => {
            if has_auto(&c.initial, c.alpha_ah) {
                return Err(domain(
                    "1+3D oracle supports only states without autocorrelation channels",
                ));
            }
            if !(kin.a1() > 0.0) {
                return Err(domain("1+3D oracle needs alpha_aH > 0"));
            }
            let cross = TransverseSpectrum::build(
                kin.a1(),
                kin.a2(),
                k_max,
                c.numerics.rel_tol_1p3 * 1e-2,
            )?;
            Ok(Kernels::OneP3 { cross })
        }
    }
}

/// Engine value of the trace, truncated at `k_max` in 1+3D so that both
/// sides integrate the same spectral range.
fn analytic_traces(
    cfg: &OracleConfig,
    k_max: f64,
    alpha_primes: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let c = &cfg.cycle;
    let mu2 = c.mu * c.mu;
    match c.dimension {
        Dimension::D1p1 => {
            let d = trace_decomposition(c, c.alpha_ah)?;
            Ok(alpha_primes
                .iter()
                .map(|&a| (mu2 * d.trace(a), mu2 * d.trace_error(c.alpha_ah, a)))
                .collect())
        }
        Dimension::D1p3 => {
            let kin = c.heating_pair()?;
            let (r, info) = i1_1p3_with_table(&kin, c.omega2, c.tau_a, k_max, &c.numerics)?;
            let theta = c.omega2 * (c.alpha_ah - 1.0) * c.tau_a;
            let scale =
                4.0 * c.initial.q() * coherence_prefactor(&c.initial, theta) * c.alpha_ah * mu2;
            let body = r.integral - info.tail;
            Ok(alpha_primes
                .iter()
                .map(|&a| {
                    (
                        (1.0 + a) * scale * body,
                        (1.0 + a) * (scale * r.integral_error).abs(),
                    )
                })
                .collect())
        }
    }
}

/// Oracle traces at several `α′` from a single spectral pass.
pub fn delta_rho_traces_numeric(
    cfg: &OracleConfig,
    alpha_primes: &[f64],
) -> Result<Vec<TraceReport>> {
    let c = &cfg.cycle;
    c.validate()?;
    if !(cfg.time_order_factor > 0.0 && cfg.time_tol > 0.0) {
        return Err(domain("oracle tolerances must be positive"));
    }
    let k_max = cfg.k_max.unwrap_or_else(|| oracle_k_max(c));
    let kernels = kernels_for(cfg, k_max)?;
    let panels = panels(cfg, k_max);
    let mut orders: Vec<usize> = panels
        .iter()
        .map(|p| level_for(cfg, p.1))
        .collect::<Result<_>>()?;
    let top = *orders.iter().max().unwrap_or(&LEVELS[0]);
    let check_order = next_level(top).unwrap_or(top);
    orders.push(check_order);
    orders.sort_unstable();
    orders.dedup();
    let levels: BTreeMap<usize, Level> = orders
        .iter()
        .map(|&n| Ok((n, build_level(n, cfg)?)))
        .collect::<Result<_>>()?;
    let results: Vec<Result<QuadratureResult<4>>> = panels
        .par_iter()
        .map(|&(a, b)| {
            let level = &levels[&level_for(cfg, b)?];
            let failure = std::sync::Mutex::new(None);
            let f = |k: f64| match integrand_at(level, &kernels, k) {
                Ok(v) => v,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    [f64::NAN; 4]
                }
            };
            let r = gk21_panel(&f, a, b);
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            r
        })
        .collect();
    let mut sum = [0.0f64; 4];
    let mut err = 0.0;
    let mut evals = 0;
    let mut last_half = [0.0f64; 2];
    for (r, &(a, _)) in results.into_iter().zip(&panels) {
        let r = r?;
        for i in 0..4 {
            sum[i] += r.value[i];
        }
        if a >= k_max / 2.0 {
            last_half[0] += r.value[0];
            last_half[1] += r.value[1];
        }
        err += r.abs_error_estimate;
        evals += r.evaluations;
    }
    // Sensitivity to the time rule at the top of the spectral range.
    let fine = integrand_at(&levels[&check_order], &kernels, k_max)?;
    let coarse = integrand_at(&levels[&level_for(cfg, k_max)?], &kernels, k_max)?;
    let analytic = analytic_traces(cfg, k_max, alpha_primes)?;
    Ok(alpha_primes
        .iter()
        .zip(analytic)
        .map(|(&ap, (ana, ana_err))| {
            let numeric = sum[0] + ap * sum[1];
            let tail = (last_half[0] + ap * last_half[1]).abs() / 3.0;
            let change = ((fine[0] - coarse[0]) + ap * (fine[1] - coarse[1])).abs();
            TraceReport {
                alpha_prime: ap,
                numeric,
                numeric_error: (1.0 + ap) * err + tail,
                analytic: ana,
                analytic_error: ana_err,
                rel_deviation: if ana != 0.0 {
                    (numeric - ana).abs() / ana.abs()
                } else {
                    (numeric - ana).abs()
                },
                imag_residual: sum[2] + ap * sum[3],
                k_max,
                tail_estimate: tail,
                time_rule_change: change,
                evaluations: evals,
            }
        })
        .collect())
}

/// Oracle value of `Tr(δρ h_{α′})` next to the engine's.
pub fn delta_rho_trace_numeric(cfg: &OracleConfig, alpha_prime: f64) -> Result<TraceReport> {
    Ok(delta_rho_traces_numeric(cfg, &[alpha_prime])?[0])
}

/// Integrand of the spectral integral at `k` from the engine's analytic time
/// integrals.
pub fn analytic_bracket(cfg: &OracleConfig, k: f64, alpha_prime: f64) -> Result<f64> {
    let c = &cfg.cycle;
    let alpha = c.alpha_ah;
    let (w, tau) = (c.omega2, c.tau_a);
    let kernels = kernels_for(cfg, 2.0 * k.max(w) + 1.0)?;
    let s = &c.initial;
    let theta = w * (alpha - 1.0) * tau;
    let cross = kernels.weights(Channel::Cross, k)?;
    let bracket = patched_sinc_pair(k, -w, tau, alpha) - patched_sinc_pair(k, w, tau, alpha);
    let mut v =
        4.0 * s.q() * (1.0 + alpha_prime) * coherence_prefactor(s, theta) * cross.odd() * bracket;
    if s.auto_weight_1() != 0.0 {
        let w11 = kernels.weights(Channel::Auto1, k)?;
        v -= 4.0
            * s.auto_weight_1()
            * w11.even()
            * (sinc_square(k + w, tau) + sinc_square(w - k, tau));
    }
    if alpha > 0.0 && s.auto_weight_2() != 0.0 {
        let w22 = kernels.weights(Channel::Auto2, k)?;
        let b = sinc_square(alpha * (k + w), tau) + sinc_square(alpha * (w - k), tau);
        v -= 4.0 * alpha_prime * alpha * alpha * s.auto_weight_2() * w22.even() * b;
    }
    Ok(c.mu * c.mu * v)
}

/// Time integral at a single spectral point computed two ways: adaptive
/// tensor quadrature of the Γ traces against the Wightman components, and
/// the engine's analytic bracket.
pub fn inner_time_integral_check(
    k: f64,
    cfg: &OracleConfig,
    alpha_prime: f64,
) -> Result<(f64, f64)> {
    let c = &cfg.cycle;
    if !(k > 0.0) {
        return Err(domain("spectral point must be positive"));
    }
    let kernels = kernels_for(cfg, 2.0 * k.max(c.omega2) + 1.0)?;
    let ctx = context(c, alpha_prime);
    let mut weights = Vec::new();
    for which in GammaTerm::ALL {
        let (c1, c2, ch) = pairing(which, c.alpha_ah);
        weights.push((which, c1, c2, kernels.weights(ch, k)?));
    }
    let failure = std::sync::Mutex::new(None::<Error>);
    let f = |t1: f64, t2: f64| -> [f64; 2] {
        let mut z = C64::new(0.0, 0.0);
        for &(which, c1, c2, w) in &weights {
            let tr = match trace_at(which, t1, t2, &ctx, cfg.source) {
                Ok(v) => v,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    return [f64::NAN; 2];
                }
            };
            if tr.norm() == 0.0 {
                continue;
            }
            z += tr * w.component(k, c1 * t1 + c2 * t2);
        }
        z *= -0.5;
        [z.re, z.im]
    };
    let n0 = level_for(cfg, k).unwrap_or(LEVELS[LEVELS.len() - 1]);
    let r = integrate_square_from(&f, -c.tau_a, c.tau_a, cfg.time_tol, 1e-300, n0);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let numeric = r?.value[0];
    Ok((numeric, analytic_bracket(cfg, k, alpha_prime)?))
}

/// Operator ordering of the assembled `δρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaRhoOrdering {
    /// Each Γ multiplies a single Wightman function, as in the trace formulas.
    Grouped,
    /// Every monopole product is paired with the Wightman function of its own
    /// operator ordering.
    Exact,
}

/// The full `δρ` matrix at spectral point `k`, integrated over the time
/// square with a fixed Gauss–Legendre rule of order `n`.
pub fn delta_rho_matrix_at_k(
    cfg: &OracleConfig,
    k: f64,
    n: usize,
    ordering: DeltaRhoOrdering,
) -> Result<TwoQubitOperator> {
    let c = &cfg.cycle;
    let kernels = kernels_for(cfg, 2.0 * k.max(c.omega2) + 1.0)?;
    let rule = LegendreRule::new(n, -c.tau_a, c.tau_a);
    let ctx = context(c, 1.0);
    let alpha = c.alpha_ah;
    let mut total = TwoQubitOperator::zero();
    let w_cross = kernels.weights(Channel::Cross, k)?;
    let w_auto = [
        kernels.weights(Channel::Auto1, k)?,
        kernels.weights(Channel::Auto2, k)?,
    ];
    let rho = initial_density(&c.initial);
    for (&t1, &w1) in rule.nodes.iter().zip(&rule.weights) {
        for (&t2, &w2) in rule.nodes.iter().zip(&rule.weights) {
            let mut x = TwoQubitOperator::zero();
            match ordering {
                DeltaRhoOrdering::Grouped => {
                    for which in GammaTerm::ALL {
                        let (c1, c2, ch) = pairing(which, alpha);
                        let w = match ch {
                            Channel::Cross => w_cross,
                            Channel::Auto1 => w_auto[0],
                            Channel::Auto2 => w_auto[1],
                        };
                        let g = gamma_operator(which, t1, t2, &ctx)
                            .scale(C64::new(which.time_weight(alpha), 0.0));
                        x = x + g.scale(w.component(k, c1 * t1 + c2 * t2));
                    }
                }
                DeltaRhoOrdering::Exact => {
                    let (w, mu, ta) = (c.omega2, c.mu, c.tau_a);
                    let m = |det: usize, t: f64| match det {
                        1 => monopole_m1(t + ta, w, mu),
                        _ => monopole_m2(alpha * (t + ta), w, mu),
                    };
                    let time = |det: usize, t: f64| if det == 1 { t } else { alpha * t };
                    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                        let kern = match (i, j) {
                            (1, 1) => w_auto[0],
                            (2, 2) => w_auto[1],
                            _ => w_cross,
                        };
                        let (a, b) = (m(i, t1), m(j, t2));
                        let gij = kern.component(k, time(i, t1) - time(j, t2));
                        let gji = kern.component(k, time(j, t2) - time(i, t1));
                        let jac =
                            if i == 2 { alpha } else { 1.0 } * if j == 2 { alpha } else { 1.0 };
                        let term = (a * b * rho).scale(gij)
                            - (a * rho * b).scale(gji)
                            - (b * rho * a).scale(gij)
                            + (rho * b * a).scale(gji);
                        x = x + term.scale(C64::new(jac, 0.0));
                    }
                }
            }
            total = total + x.scale(C64::new(w1 * w2, 0.0));
        }
    }
    Ok(total.scale(C64::new(-0.5, 0.0)))
}

/// The twelve monopole products `M M ρ`, `ρ M M` and `M ρ M` at observer
/// times `τ′`, `τ″`, in the order
/// `M₁′M₁″ρ, M₁′M₂″ρ, M₂′M₁″ρ, M₂′M₂″ρ, ρM₁″M₁′, ρM₁″M₂′, ρM₂″M₁′, ρM₂″M₂′,
/// M₁′ρM₁″, M₁′ρM₂″, M₂′ρM₁″, M₂′ρM₂″`.
pub fn gamma_matrix_products(
    tau1p: f64,
    tau1pp: f64,
    tau_a: f64,
    alpha: f64,
    state: &InitialState,
    omega: f64,
    mu: f64,
) -> [TwoQubitOperator; 12] {
    let r = initial_density(state);
    let a1 = monopole_m1(tau1p + tau_a, omega, mu);
    let b1 = monopole_m1(tau1pp + tau_a, omega, mu);
    let a2 = monopole_m2(alpha * (tau1p + tau_a), omega, mu);
    let b2 = monopole_m2(alpha * (tau1pp + tau_a), omega, mu);
    [
        a1 * b1 * r,
        a1 * b2 * r,
        a2 * b1 * r,
        a2 * b2 * r,
        r * b1 * a1,
        r * b1 * a2,
        r * b2 * a1,
        r * b2 * a2,
        a1 * r * b1,
        a1 * r * b2,
        a2 * r * b1,
        a2 * r * b2,
    ]
}

/// Detector pair of the heating stage, re-exported for callers that build
/// kernels themselves.
pub fn heating_kinematics(cycle: &CycleConfig) -> Result<DetectorPairKinematics> {
    cycle.heating_pair()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::EntangledParity;

    fn cfg(alpha: f64) -> OracleConfig {
        let c = CycleConfig::entangled(
            1.0,
            2.0,
            alpha,
            1.0 / alpha.max(1e-9),
            1.0,
            EntangledParity::Symmetric,
            Dimension::D1p1,
        )
        .unwrap();
        OracleConfig::new(c)
    }

    #[test]
    fn product_one_at_p_one() {
        let s = InitialState::entangled(1.0, EntangledParity::Symmetric).unwrap();
        let p = gamma_matrix_products(0.3, -0.2, 0.5, 0.7, &s, 1.3, 1.0);
        let expect = C64::from_polar(1.0, 1.3 * ((0.3 + 0.5) - (-0.2 + 0.5)));
        assert!((p[0].get(0, 0) - expect).norm() < 1e-14);
        let nonzero = p[0]
            .entries
            .iter()
            .flatten()
            .filter(|z| z.norm() > 1e-14)
            .count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn inner_check_single_point() {
        let c = cfg(0.6);
        let (num, ana) = inner_time_integral_check(1.7, &c, 0.5).unwrap();
        assert!((num - ana).abs() < 1e-9 * (1.0 + ana.abs()), "{num} {ana}");
    }
}
