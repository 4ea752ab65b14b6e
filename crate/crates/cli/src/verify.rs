//! Verification suites run by `euqoe verify`.

use std::fmt;
use std::time::Instant;

use euqoe_core::algebra::EntangledParity;
use euqoe_core::engine::{eta0, CycleConfig, Dimension};
use euqoe_core::oracle::{delta_rho_traces_numeric, oracle_k_max, OracleConfig};
use euqoe_core::protocol::{build_protocol, default_tau_range};
use euqoe_core::wightman::{bessel_k_imag, pair_kernel_1p1, pair_kernel_1p3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

pub const ORACLE_TOL_1P1: f64 = 1e-4;
pub const ORACLE_TOL_1P3: f64 = 1e-3;
pub const SYMMETRY_TOL: f64 = 1e-12;
pub const BESSEL_TOL: f64 = 1e-8;
pub const CONSERVATION_TOL: f64 = 1e-12;
const SEED: u64 = 0x5eed_e0e0;

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub note: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        writeln!(f, "suite {}: {verdict} ({:.1} s)", self.name, self.seconds)?;
        for c in &self.checks {
            let v = if c.passed() { "pass" } else { "FAIL" };
            write!(
                f,
                "  {}: max deviation {:.3e}, tolerance {:.0e}: {v}",
                c.name, c.deviation, c.tolerance
            )?;
            if !c.note.is_empty() {
                write!(f, " ({})", c.note)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Oracle points of the suite: `(α_aH, ω₂τ_a, a_H1/ω₂)`.
pub fn oracle_grid(dimension: Dimension) -> Vec<(f64, f64, f64)> {
    match dimension {
        Dimension::D1p1 => {
            let mut g = Vec::new();
            for alpha in [0.3, 0.6, 1.0] {
                for wt in [0.5, 1.0, 3.0] {
                    for ar in [0.5, 1.0, 2.0] {
                        g.push((alpha, wt, ar));
                    }
                }
            }
            g
        }
        Dimension::D1p3 => vec![(0.5, 1.0, 1.0), (0.8, 1.0, 1.0), (1.0, 1.0, 1.0)],
    }
}

/// Oracle traces at `α′ ∈ {0, 0.5, 1}` against the engine, and the ratio
/// `trace/(1+α′)` across them.
pub fn oracle_suite(cfg: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let base = &cfg.base;
    let dim = base.dimension;
    let tol = if dim == Dimension::D1p3 {
        ORACLE_TOL_1P3
    } else {
        ORACLE_TOL_1P1
    };
    let grid = oracle_grid(dim);
    let (mut dev, mut ratio_dev) = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for &(alpha, wt, ar) in &grid {
        let a1 = ar * base.omega2;
        let run = || -> euqoe_core::Result<(f64, f64)> {
            let mut c = CycleConfig::entangled(
                base.omega1,
                base.omega2,
                alpha,
                a1 / alpha,
                wt / base.omega2,
                EntangledParity::Symmetric,
                dim,
            )?;
            c.numerics = base.numerics();
            let mut o = OracleConfig::new(c);
            o.k_max = Some(oracle_k_max(&c) * cfg.oracle_grid);
            o.time_order_factor *= cfg.oracle_grid;
            let reports = delta_rho_traces_numeric(&o, &[0.0, 0.5, 1.0])?;
            let d = reports.iter().map(|r| r.rel_deviation).fold(0.0, f64::max);
            let first = reports[0].numeric;
            let r = reports
                .iter()
                .map(|r| (r.numeric / (1.0 + r.alpha_prime) - first).abs() / first.abs())
                .fold(0.0, f64::max);
            Ok((d, r))
        };
        match run() {
            Ok((d, r)) => {
                dev = dev.max(d);
                ratio_dev = ratio_dev.max(r);
            }
            Err(e) => {
                dev = f64::INFINITY;
                ratio_dev = f64::INFINITY;
                failures.push(format!(
                    "alpha_aH={alpha} omega2*tau_a={wt} aH1/omega2={ar}: {e}"
                ));
            }
        }
    }
    let mut note = format!("{} points, {dim}", grid.len());
    if cfg.oracle_grid != 1.0 {
        note.push_str(&format!(", oracle grid scaled by {}", cfg.oracle_grid));
    }
    if !failures.is_empty() {
        note.push_str(&format!("; failed: {}", failures.join("; ")));
    }
    SuiteReport {
        name: "oracle",
        checks: vec![
            Check {
                name: "trace vs engine".into(),
                deviation: dev,
                tolerance: tol,
                note: note.clone(),
            },
            Check {
                name: "trace/(1+alpha') ratio".into(),
                deviation: ratio_dev,
                tolerance: tol,
                note,
            },
        ],
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// `K₀(x)` from its ascending series (`x ≤ 5`) or the asymptotic expansion.
pub fn k0_reference(x: f64) -> f64 {
    if x <= 5.0 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let y = x * x / 4.0;
        let (mut term, mut i0, mut sum, mut h) = (1.0, 1.0, 0.0, 0.0);
        for k in 1..200 {
            term *= y / (k * k) as f64;
            h += 1.0 / k as f64;
            i0 += term;
            sum += h * term;
            if term < 1e-18 * i0 {
                break;
            }
        }
        -((x / 2.0).ln() + EULER_GAMMA) * i0 + sum
    } else {
        let (mut term, mut sum) = (1.0f64, 1.0);
        for k in 1..60 {
            let next = term * -((2 * k - 1) as f64).powi(2) / (k as f64 * 8.0 * x);
            if next.abs() > term.abs() {
                break;
            }
            term = next;
            sum += term;
        }
        (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * sum
    }
}

/// Exchange and rescaling identities of the two-point functions at 100
/// seeded samples, and `K_{i·0}` against the classical `K₀`.
pub fn wightman_suite(dimension: Dimension) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut exchange, mut rescale, mut transverse) = (0.0f64, 0.0f64, 0.0f64);
    let rel =
        |a: euqoe_core::Complex64, b: euqoe_core::Complex64| (a - b).norm() / a.norm().max(1e-300);
    for _ in 0..100 {
        let k = rng.gen_range(0.01..20.0);
        let a1 = rng.gen_range(0.1..5.0);
        let alpha = rng.gen_range(0.05..1.0);
        let (t1, t2) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a2 = a1 / alpha;
        let sample = || -> euqoe_core::Result<(f64, f64)> {
            let g12 = pair_kernel_1p1(k, a1, a2)?.component(k, t1 - alpha * t2);
            let g21 = pair_kernel_1p1(k, a2, a1)?.component(k, -alpha * t2 + t1);
            let kk = k / alpha;
            let g22 = pair_kernel_1p1(kk, a2, a2)?.component(kk, alpha * (t1 - t2)) / alpha;
            let g11 = pair_kernel_1p1(k, a1, a1)?.component(k, t1 - t2);
            Ok((rel(g12, g21), rel(g11, g22)))
        };
        match sample() {
            Ok((e, r)) => {
                exchange = exchange.max(e);
                rescale = rescale.max(r);
            }
            Err(_) => {
                exchange = f64::INFINITY;
                rescale = f64::INFINITY;
            }
        }
        if dimension == Dimension::D1p3 {
            let kp = rng.gen_range(0.0..5.0);
            transverse = transverse.max(
                match (
                    pair_kernel_1p3(k, kp, a1, a2),
                    pair_kernel_1p3(k, kp, a2, a1),
                ) {
                    (Ok(x), Ok(y)) => {
                        (x.plus - y.plus).abs().max((x.minus - y.minus).abs())
                            / x.plus.abs().max(1e-300)
                    }
                    _ => f64::INFINITY,
                },
            );
        }
    }
    let abscissae = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
    let bessel = abscissae
        .iter()
        .map(|&x| match bessel_k_imag(0.0, x) {
            Ok(v) => (v - k0_reference(x)).abs() / k0_reference(x),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check {
            name: "exchange symmetry".into(),
            deviation: exchange,
            tolerance: SYMMETRY_TOL,
            note: "100 samples".into(),
        },
        Check {
            name: "rescaling identity".into(),
            deviation: rescale,
            tolerance: SYMMETRY_TOL,
            note: "100 samples".into(),
        },
        Check {
            name: "K_0 reference".into(),
            deviation: bessel,
            tolerance: BESSEL_TOL,
            note: "6 abscissae".into(),
        },
    ];
    if dimension == Dimension::D1p3 {
        checks.push(Check {
            name: "1p3 kernel exchange".into(),
            deviation: transverse,
            tolerance: SYMMETRY_TOL,
            note: "100 samples".into(),
        });
    }
    SuiteReport {
        name: "wightman",
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// A seeded feasible protocol `(ω₁, ω₂, α_aH, a_H2, τ_a)`.
pub fn random_protocol(rng: &mut impl Rng) -> (f64, f64, f64, f64, f64) {
    let w1 = rng.gen_range(0.2..2.0);
    let w2 = w1 * (1.0 + rng.gen_range(0.1..2.0));
    let e0 = eta0(w1, w2).unwrap_or(0.5);
    let alpha = e0 + (1.0 - e0) * rng.gen_range(0.02..0.98);
    let a_h2 = rng.gen_range(0.3..3.0);
    let (lo, hi) = default_tau_range(w2);
    let tau = (lo.ln() + (hi.ln() - lo.ln()) * rng.gen_range(0.0..1.0)).exp();
    (w1, w2, alpha, a_h2, tau)
}

/// Conservation residual of 100 seeded feasible protocols, relative to the
/// heat intake. The spectral integrals are 1+1D; the identity is algebraic
/// in `I₁` and does not depend on the dimension.
pub fn conservation_suite(cfg: &RunConfig) -> SuiteReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let numerics = cfg.base.numerics();
    let (mut worst, mut degenerate, mut bad_eta) = (0.0f64, 0, 0);
    let mut failures = Vec::new();
    for _ in 0..100 {
        let (w1, w2, alpha, a_h2, tau) = random_protocol(&mut rng);
        match build_protocol(w1, w2, alpha, a_h2, tau, Dimension::D1p1, &numerics) {
            Ok(r) => {
                if r.degenerate {
                    degenerate += 1;
                    continue;
                }
                let q2 = w2 * r.traces.map(|t| t.heat).unwrap_or(f64::NAN);
                worst = worst.max((r.conservation_residual / q2).abs());
                if r.valid() && !(r.eta_0 < r.eta_e && r.eta_e < 1.0) {
                    bad_eta += 1;
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    if !failures.is_empty() || bad_eta > 0 || degenerate == 100 {
        worst = f64::INFINITY;
    }
    let mut note = format!("100 protocols, {degenerate} degenerate");
    if bad_eta > 0 {
        note.push_str(&format!(", {bad_eta} valid records outside (eta_0, 1)"));
    }
    if let Some(f) = failures.first() {
        note.push_str(&format!(", {} failed: {f}", failures.len()));
    }
    SuiteReport {
        name: "conservation",
        checks: vec![Check {
            name: "residual/|Q2|".into(),
            deviation: worst,
            tolerance: CONSERVATION_TOL,
            note,
        }],
        seconds: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k0_reference_values() {
        assert!((k0_reference(1.0) - 0.42102444).abs() < 5e-9);
        // Both branches agree where they meet.
        let x = 5.0;
        let series = k0_reference(x);
        let (mut term, mut sum) = (1.0f64, 1.0);
        for k in 1..8 {
            term *= -((2 * k - 1) as f64).powi(2) / (k as f64 * 8.0 * x);
            sum += term;
        }
        let asym = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * sum;
        assert!((series - asym).abs() < 1e-5 * series);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(oracle_grid(Dimension::D1p1).len(), 27);
        assert_eq!(oracle_grid(Dimension::D1p3).len(), 3);
    }

    #[test]
    fn wightman_suite_passes() {
        let r = wightman_suite(Dimension::D1p1);
        assert!(r.passed(), "{r}");
    }
}
