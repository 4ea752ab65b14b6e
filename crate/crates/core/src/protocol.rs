//! Construction and validation of complete engine protocols: the choice of
//! the cooling-stage ratio, the constraint chain on the acceleration ratios,
//! and the selection of the entangled state from the sign of `I₁`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::EntangledParity;
use crate::engine::{
    conservation_residual, efficiency, eta0, heat_in, parity_for, significant_sign, stage_i1,
    CycleConfig, Dimension, NumericOptions, SpectralIntegral, StageTraces,
};
use crate::error::{domain, Error, Result};
use crate::wightman::DetectorPairKinematics;

/// Cooling-stage ratio `α_aC = (α_aH ω₂ − ω₂ + ω₁)/ω₁` that makes the
/// conservation identity hold trace by trace. Values `≤ 0` signal an
/// infeasible `α_aH`.
pub fn alpha_ac_from(alpha_ah: f64, omega1: f64, omega2: f64) -> f64 {
    (alpha_ah * omega2 - omega2 + omega1) / omega1
}

/// `0 < η₀ < α_aH < 1`.
pub fn feasible_alpha_ah(alpha_ah: f64, omega1: f64, omega2: f64) -> bool {
    match eta0(omega1, omega2) {
        Ok(e0) => e0 < alpha_ah && alpha_ah < 1.0,
        Err(_) => false,
    }
}

/// `0 < α_aC < α_aH`.
pub fn check_alpha_chain(alpha_ah: f64, alpha_ac: f64) -> bool {
    0.0 < alpha_ac && alpha_ac < alpha_ah
}

/// Default `τ_a` scan window `[0.1/ω₂, 20/ω₂]`.
pub fn default_tau_range(omega2: f64) -> (f64, f64) {
    (0.1 / omega2, 20.0 / omega2)
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => return Vec::new(),
        1 => return vec![lo],
        _ => {}
    }
    let ratio = hi / lo;
    let mut g: Vec<f64> = (0..n)
        .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect();
    g[n - 1] = hi;
    g
}

/// One point of a `τ_a` scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub tau_a: f64,
    pub i1: std::result::Result<SpectralIntegral, Error>,
    /// Parity that makes the heat-in trace positive; `None` for failures and
    /// for `I₁` inside its noise band.
    pub parity: Option<EntangledParity>,
}

/// Evaluates `I₁` on a log-spaced `τ_a` grid. Points are computed in
/// parallel and returned in grid order; failures are recorded per point.
#[allow(clippy::too_many_arguments)]
pub fn scan_tau_a(
    omega1: f64,
    omega2: f64,
    alpha_ah: f64,
    a_h2: f64,
    tau_range: (f64, f64),
    n_grid: usize,
    dimension: Dimension,
    numerics: &NumericOptions,
) -> Result<Vec<ScanPoint>> {
    eta0(omega1, omega2)?;
    let (lo, hi) = tau_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(domain(format!("invalid tau_a range [{lo}, {hi}]")));
    }
    if n_grid < 2 {
        return Err(domain("a scan needs at least two grid points"));
    }
    let kin = DetectorPairKinematics::from_a2(a_h2, alpha_ah)?;
    let grid = log_grid(lo, hi, n_grid);
    Ok(grid
        .par_iter()
        .map(|&tau_a| {
            let cfg = stage_config(omega1, omega2, alpha_ah, a_h2, tau_a, dimension, numerics);
            let i1 = cfg.and_then(|c| stage_i1(&kin, &c));
            let parity = i1
                .as_ref()
                .ok()
                .and_then(|r| parity_for(r.reduced, r.reduced_error));
            ScanPoint { tau_a, i1, parity }
        })
        .collect())
}

fn stage_config(
    omega1: f64,
    omega2: f64,
    alpha_ah: f64,
    a_h2: f64,
    tau_a: f64,
    dimension: Dimension,
    numerics: &NumericOptions,
) -> Result<CycleConfig> {
    let mut cfg = CycleConfig::entangled(
        omega1,
        omega2,
        alpha_ah,
        a_h2,
        tau_a,
        EntangledParity::Symmetric,
        dimension,
    )?;
    cfg.numerics = *numerics;
    Ok(cfg)
}

/// The named checks of a protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolChecks {
    /// `0 < η₀ < α_aH < 1` and `0 < α_aC < α_aH`.
    pub constraint_chain: bool,
    pub positivity_v: bool,
    pub positivity_ah: bool,
    pub positivity_ac: bool,
    /// Conservation residual below `1e-12·|Q₂|`.
    pub conservation: bool,
    pub eta_below_one: bool,
}

impl ProtocolChecks {
    pub fn named(&self) -> BTreeMap<&'static str, bool> {
        BTreeMap::from([
            ("constraint_chain", self.constraint_chain),
            ("positivity_v", self.positivity_v),
            ("positivity_aH", self.positivity_ah),
            ("positivity_aC", self.positivity_ac),
            ("conservation", self.conservation),
            ("eta_below_one", self.eta_below_one),
        ])
    }

    pub fn all(&self) -> bool {
        self.named().values().all(|&b| b)
    }

    /// Names of the failing checks, in the fixed order of [`Self::named`].
    pub fn failing(&self) -> Vec<&'static str> {
        self.named()
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| n)
            .collect()
    }
}

/// A complete, checked engine protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRecord {
    pub omega1: f64,
    pub omega2: f64,
    pub alpha_ah: f64,
    pub alpha_ac: f64,
    pub a_h2: f64,
    pub tau_a: f64,
    pub dimension: Dimension,
    /// Chosen initial state; `None` when `I₁` is inside its noise band.
    pub parity: Option<EntangledParity>,
    pub i1: Option<SpectralIntegral>,
    pub eta_0: f64,
    pub eta_e: f64,
    pub traces: Option<StageTraces>,
    pub conservation_residual: f64,
    pub checks: ProtocolChecks,
    /// `I₁` could not be given a sign.
    pub degenerate: bool,
    /// Why the spectral integral is missing, if it is.
    pub failure: Option<String>,
}

impl ProtocolRecord {
    pub fn valid(&self) -> bool {
        self.checks.all()
    }
}

/// Builds the protocol for the given heating stage: `α_aC` from the
/// conservation condition, `I₁` at `τ_a`, the parity with positive heat-in
/// trace, the three traces and the efficiency.
pub fn build_protocol(
    omega1: f64,
    omega2: f64,
    alpha_ah: f64,
    a_h2: f64,
    tau_a: f64,
    dimension: Dimension,
    numerics: &NumericOptions,
) -> Result<ProtocolRecord> {
    let e0 = eta0(omega1, omega2)?;
    let alpha_ac = alpha_ac_from(alpha_ah, omega1, omega2);
    let chain =
        feasible_alpha_ah(alpha_ah, omega1, omega2) && check_alpha_chain(alpha_ah, alpha_ac);
    let kin = DetectorPairKinematics::from_a2(a_h2, alpha_ah)?;
    let mut cfg = CycleConfig::entangled(
        omega1,
        omega2,
        alpha_ah,
        a_h2,
        tau_a,
        EntangledParity::Symmetric,
        dimension,
    )?;
    cfg.numerics = *numerics;
    let mut record = ProtocolRecord {
        omega1,
        omega2,
        alpha_ah,
        alpha_ac,
        a_h2,
        tau_a,
        dimension,
        parity: None,
        i1: None,
        eta_0: e0,
        eta_e: f64::NAN,
        traces: None,
        conservation_residual: f64::NAN,
        checks: ProtocolChecks {
            constraint_chain: chain,
            positivity_v: false,
            positivity_ah: false,
            positivity_ac: false,
            conservation: false,
            eta_below_one: false,
        },
        degenerate: false,
        failure: None,
    };
    let i1 = match stage_i1(&kin, &cfg) {
        Ok(r) => r,
        // Numerical failures of a feasible protocol are errors; an
        // infeasible one is still reported with its failing checks.
        Err(e) if chain => return Err(e),
        Err(e) => {
            record.failure = Some(e.to_string());
            return Ok(record);
        }
    };
    record.i1 = Some(i1);
    let parity = parity_for(i1.reduced, i1.reduced_error);
    record.parity = parity;
    record.degenerate = parity.is_none();
    let par = parity.unwrap_or(EntangledParity::Symmetric);
    let traces = StageTraces::factorized(
        i1.value,
        alpha_ah * i1.reduced_error,
        par,
        alpha_ah,
        alpha_ac,
    );
    cfg.initial = crate::algebra::InitialState::entangled(0.0, par)?;
    let positive = |x: f64, e: f64| significant_sign(x, e) == Some(true);
    let residual = conservation_residual(&cfg, &traces);
    let q2 = heat_in(&cfg, traces.heat);
    record.checks.positivity_v = !record.degenerate && positive(traces.v, traces.v_error);
    record.checks.positivity_ah = !record.degenerate && positive(traces.heat, traces.heat_error);
    record.checks.positivity_ac = !record.degenerate && positive(traces.cool, traces.cool_error);
    record.checks.conservation = q2 != 0.0 && residual.abs() <= 1e-12 * q2.abs();
    if let Ok(eta) = efficiency(&traces, omega1, omega2) {
        record.eta_e = eta;
        record.checks.eta_below_one = eta < 1.0;
    }
    record.conservation_residual = residual;
    record.traces = Some(traces);
    Ok(record)
}
