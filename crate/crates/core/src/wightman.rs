//! Spectral kernels of the Minkowski-vacuum Wightman functions pulled back to
//! two uniformly accelerated detectors sharing the same Rindler time slicing.
//!
//! Every correlator has the form
//! `G_jl(x, y) = ∫ dk [W⁺(k) e^{−ik(x−y)} + W⁻(k) e^{ik(x−y)}]`
//! with `W^± = w(k)·e^{±E(k)}`, `E = πk(1/a_j + 1/a_l)/2`. The kernels below
//! return the pair `(W⁺, W⁻)`; the oscillatory time factors are left to the
//! caller. `W⁺` is evaluated in a form that stays finite when `a_j → 0`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{domain, ensure_finite, Error, Result};
use crate::quadrature::{integrate_interval, ChebTable};

/// Accelerations of the two detectors. The pair is parameterised by the
/// second detector's acceleration `a₂` and the ratio `α = a₁/a₂`, so that the
/// unaccelerated observer `α = 0` is represented exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPairKinematics {
    a2: f64,
    alpha: f64,
}

impl DetectorPairKinematics {
    pub fn from_a2(a2: f64, alpha: f64) -> Result<Self> {
        ensure_finite("a2", a2)?;
        ensure_finite("alpha", alpha)?;
        if a2 <= 0.0 {
            return Err(domain(format!("a2 must be positive, got {a2}")));
        }
        if alpha < 0.0 {
            return Err(domain(format!("alpha must be non-negative, got {alpha}")));
        }
        Ok(Self { a2, alpha })
    }

    pub fn from_a1(a1: f64, alpha: f64) -> Result<Self> {
        ensure_finite("a1", a1)?;
        if a1 <= 0.0 || alpha <= 0.0 {
            return Err(domain("a1 and alpha must be positive when a2 is derived"));
        }
        Self::from_a2(a1 / alpha, alpha)
    }

    pub fn a1(&self) -> f64 {
        self.alpha * self.a2
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Thermal weights `W^± = w·e^{±E}` of one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalWeights {
    pub plus: f64,
    pub minus: f64,
    /// The exponent `E`.
    pub exponent: f64,
}

impl ThermalWeights {
    /// The non-oscillatory weight `w = W⁺e^{−E}`.
    pub fn weight(&self) -> f64 {
        self.plus * (-self.exponent).exp()
    }

    /// `W⁺ − W⁻ = 2w·sinh E`, the weight of the commutator channel.
    pub fn odd(&self) -> f64 {
        -self.plus * (-2.0 * self.exponent).exp_m1()
    }

    /// `W⁺ + W⁻ = 2w·cosh E`, the weight of the anticommutator channel.
    pub fn even(&self) -> f64 {
        self.plus + self.minus
    }

    /// Spectral component `W⁺e^{−ikΔ} + W⁻e^{ikΔ}` at time difference `Δ = x − y`.
    pub fn component(&self, k: f64, delta: f64) -> C64 {
        C64::from_polar(self.plus, -k * delta) + C64::from_polar(self.minus, k * delta)
    }
}

fn check_k(k: f64) -> Result<f64> {
    ensure_finite("k", k)?;
    if k <= 0.0 {
        return Err(domain(format!(
            "spectral variable must be positive, got {k}"
        )));
    }
    Ok(k)
}

/// `√(2/(1 − e^{−2X}))`, equal to `e^{X/2}/√sinh X`; `X = ∞` gives `√2`.
fn half_boost(x: f64) -> f64 {
    if x.is_infinite() {
        std::f64::consts::SQRT_2
    } else {
        (-2.0 / (-2.0 * x).exp_m1()).sqrt()
    }
}

fn pi_k_over(k: f64, a: f64) -> f64 {
    if a == 0.0 {
        f64::INFINITY
    } else {
        PI * k / a
    }
}

/// 1+1D weights for detectors with accelerations `a_j`, `a_l` (0 for an
/// inertial detector):
/// `w = 1/(4πk√(sinh(πk/a_j) sinh(πk/a_l)))`, `E = πk(1/a_j + 1/a_l)/2`.
pub fn pair_kernel_1p1(k: f64, a_j: f64, a_l: f64) -> Result<ThermalWeights> {
    check_k(k)?;
    if !(a_j >= 0.0 && a_l >= 0.0 && a_j.is_finite() && a_l.is_finite()) {
        return Err(domain("accelerations must be finite and non-negative"));
    }
    let (xj, xl) = (pi_k_over(k, a_j), pi_k_over(k, a_l));
    let plus = half_boost(xj) * half_boost(xl) / (4.0 * PI * k);
    let exponent = 0.5 * (xj + xl);
    Ok(ThermalWeights {
        plus,
        minus: plus * (-2.0 * exponent).exp(),
        exponent,
    })
}

/// Kernel of the cross correlator `G₁₂` in 1+1D.
pub fn g12_kernel_1p1(k: f64, kin: &DetectorPairKinematics) -> Result<ThermalWeights> {
    pair_kernel_1p1(k, kin.a1(), kin.a2())
}

/// Kernel of the observer's autocorrelation `G₁₁` in 1+1D.
pub fn g11_kernel_1p1(k: f64, a1: f64) -> Result<ThermalWeights> {
    ensure_finite("a1", a1)?;
    if a1 <= 0.0 {
        return Err(domain(format!("a1 must be positive, got {a1}")));
    }
    pair_kernel_1p1(k, a1, a1)
}

/// `sinh(πk(1+α)/2a₁)/√(sinh(πk/a₁)·sinh(πkα/a₁))`, the cross-channel weight
/// normalised so that it tends to 1 at large `k`.
pub fn cross_ratio_1p1(k: f64, kin: &DetectorPairKinematics) -> Result<f64> {
    Ok(2.0 * PI * k * g12_kernel_1p1(k, kin)?.odd())
}

/// Underflow budget for the Bessel integrands (`e^{−745}` is the smallest
/// subnormal double).
const UNDERFLOW_BUDGET: f64 = 745.0;

fn trapezoid_converged(f: &dyn Fn(f64) -> f64, upper: f64, what: &str) -> Result<(f64, f64)> {
    // f is even and analytic, so the trapezoid rule on [0, upper] with the
    // end point at 0 half-weighted converges geometrically.
    let mut n = 32usize;
    let mut h = upper / n as f64;
    let f0 = 0.5 * f(0.0);
    let (mut sum, mut abs_sum) = (f0, f0.abs());
    for j in 1..=n {
        let v = f(j as f64 * h);
        sum += v;
        abs_sum += v.abs();
    }
    let mut prev = sum * h;
    for _ in 0..16 {
        for j in 0..n {
            let v = f((2 * j + 1) as f64 * h / 2.0);
            sum += v;
            abs_sum += v.abs();
        }
        n *= 2;
        h /= 2.0;
        let cur = sum * h;
        let scale = abs_sum * h;
        if (cur - prev).abs() <= 1e-14 * scale {
            return Ok((cur, (cur - prev).abs()));
        }
        prev = cur;
    }
    Err(Error::Numeric {
        message: format!("{what}: trapezoid rule did not converge with {n} points"),
        partial: prev,
        error: f64::INFINITY,
    })
}

/// `K_{iν}(x) = ∫₀^∞ e^{−x cosh t} cos(νt) dt`, evaluated with the trapezoid
/// rule on `[0, t_max]`, `x·cosh(t_max)` at the underflow budget.
///
/// The representation is accurate in absolute terms; for `πν/2 ≫ 1` the value
/// is exponentially small compared to the integrand and
/// [`bessel_k_imag_scaled`] should be used instead.
pub fn bessel_k_imag(nu: f64, x: f64) -> Result<f64> {
    ensure_finite("nu", nu)?;
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(domain(format!("argument must be positive, got {x}")));
    }
    let t_max = (UNDERFLOW_BUDGET / x).max(1.0).acosh().max(1.0);
    let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cos();
    Ok(trapezoid_converged(&f, t_max, "bessel_k_imag")?.0)
}

/// Same representation evaluated on a grid with the given number of panels,
/// without convergence control. Used to test self-convergence.
pub fn bessel_k_imag_fixed(nu: f64, x: f64, panels: usize) -> f64 {
    let t_max = (UNDERFLOW_BUDGET / x).max(1.0).acosh().max(1.0);
    let h = t_max / panels as f64;
    let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cos();
    h * (0.5 * f(0.0) + (1..=panels).map(|j| f(j as f64 * h)).sum::<f64>())
}

/// `e^{πν/2}·K_{iν}(x)`, of order `ν^{−1/2}` for `x ≲ ν` and therefore free of
/// the exponential underflow of `K_{iν}` itself.
///
/// The integration path is shifted to `t = u + i(π/2 − ψ)`, on which the
/// integrand `e^{νψ}·e^{−x sin ψ cosh u}·cos(νu − x cos ψ sinh u)` no longer
/// cancels to `e^{−πν/2}`; `ψ = min(π/2, 6/ν)` bounds the prefactor by `e⁶`.
pub fn bessel_k_imag_scaled(nu: f64, x: f64) -> Result<f64> {
    ensure_finite("nu", nu)?;
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(domain(format!("argument must be positive, got {x}")));
    }
    let nu = nu.abs();
    let psi = if nu * PI / 2.0 <= 6.0 {
        PI / 2.0
    } else {
        6.0 / nu
    };
    let (c, s) = (psi.sin(), psi.cos());
    let pre = nu * psi;
    let u_max = (1.0 + (45.0 + pre) / (x * c)).acosh().max(1.0);
    let f = |u: f64| (pre - x * c * u.cosh()).exp() * (nu * u - x * s * u.sinh()).cos();
    Ok(trapezoid_converged(&f, u_max, "bessel_k_imag_scaled")?.0)
}

/// Transverse-momentum integrand of the 1+3D kernel at `(ω_k, |k_p|)`:
/// `(2/√(a_j a_l))·(2π)^{−4}·2π|k_p|·K_{iω/a_j}(|k_p|/a_j)·K_{iω/a_l}(|k_p|/a_l)`,
/// returned with the thermal factors `e^{±E}` applied.
pub fn pair_kernel_1p3(omega_k: f64, kp_mag: f64, a_j: f64, a_l: f64) -> Result<ThermalWeights> {
    check_k(omega_k)?;
    ensure_finite("kp", kp_mag)?;
    if kp_mag < 0.0 {
        return Err(domain("transverse momentum must be non-negative"));
    }
    if !(a_j > 0.0 && a_l > 0.0) {
        return Err(domain("1+3D kernels need positive accelerations"));
    }
    let exponent = 0.5 * PI * omega_k * (1.0 / a_j + 1.0 / a_l);
    if kp_mag == 0.0 {
        return Ok(ThermalWeights {
            plus: 0.0,
            minus: 0.0,
            exponent,
        });
    }
    let measure = 2.0 / (a_j * a_l).sqrt() / (2.0 * PI).powi(4) * 2.0 * PI * kp_mag;
    let kj = bessel_k_imag_scaled(omega_k / a_j, kp_mag / a_j)?;
    let kl = if a_j == a_l {
        kj
    } else {
        bessel_k_imag_scaled(omega_k / a_l, kp_mag / a_l)?
    };
    let plus = measure * kj * kl;
    Ok(ThermalWeights {
        plus,
        minus: plus * (-2.0 * exponent).exp(),
        exponent,
    })
}

/// Cross-correlator kernel of the 1+3D field at one `(ω_k, |k_p|)` point.
pub fn g_kernel_1p3(
    omega_k: f64,
    kp_mag: f64,
    kin: &DetectorPairKinematics,
) -> Result<ThermalWeights> {
    pair_kernel_1p3(omega_k, kp_mag, kin.a1(), kin.a2())
}

/// 1+3D weights integrated over the transverse plane, `∫d²k_p` of
/// [`pair_kernel_1p3`], at relative tolerance `rel_tol`.
pub fn transverse_weights(
    omega_k: f64,
    a_j: f64,
    a_l: f64,
    rel_tol: f64,
) -> Result<ThermalWeights> {
    check_k(omega_k)?;
    let inv = 1.0 / a_j + 1.0 / a_l;
    let exponent = 0.5 * PI * omega_k * inv;
    // Beyond the turning point |k_p| = ω_k the integrand decays like
    // e^{E − |k_p|(1/a_j + 1/a_l)}.
    let kp_max = (exponent + 45.0) / inv;
    let mut breaks = vec![omega_k.min(kp_max)];
    let a_min = a_j.min(a_l);
    let mut b = omega_k.min(a_min);
    while b > 1e-9 * a_min {
        b *= 0.25;
        breaks.push(b);
    }
    let f = |kp: f64| match pair_kernel_1p3(omega_k, kp, a_j, a_l) {
        Ok(w) => [w.plus],
        Err(_) => [f64::NAN],
    };
    let panel = (omega_k.max(a_min) / 8.0).max(1e-3);
    let r = integrate_interval(&f, 0.0, kp_max, &breaks, panel, rel_tol, 1e-300)?;
    let plus = r.value[0];
    if !plus.is_finite() {
        return Err(Error::Numeric {
            message: format!("transverse integral failed at omega = {omega_k}"),
            partial: plus,
            error: r.abs_error_estimate,
        });
    }
    Ok(ThermalWeights {
        plus,
        minus: plus * (-2.0 * exponent).exp(),
        exponent,
    })
}

/// `W⁺(ω)` of a 1+3D detector pair as a function of the spectral frequency:
/// tabulated on `[0, Ω]` and continued beyond `Ω` by the power law fitted to
/// the last octave of the table.
#[derive(Debug, Clone)]
pub struct TransverseSpectrum {
    a_j: f64,
    a_l: f64,
    table: ChebTable,
    omega_max: f64,
    power: f64,
    power_prev: f64,
    amplitude: f64,
}

impl TransverseSpectrum {
    pub fn build(a_j: f64, a_l: f64, omega_max: f64, rel_tol: f64) -> Result<Self> {
        if !(a_j > 0.0 && a_l > 0.0) {
            return Err(domain("1+3D kernels need positive accelerations"));
        }
        let inner = (rel_tol * 1e-2).max(1e-12);
        let f = |w: f64| -> Result<f64> {
            if w == 0.0 {
                // W⁺ is smooth at ω = 0; evaluate just beside it.
                return Ok(transverse_weights(1e-12 * a_j.min(a_l), a_j, a_l, inner)?.plus);
            }
            Ok(transverse_weights(w, a_j, a_l, inner)?.plus)
        };
        let table = ChebTable::build(&f, 0.0, omega_max, rel_tol, 1e-300)?;
        let at = |w: f64| table.eval(w).expect("inside table");
        let (w1, w2, w4) = (omega_max / 4.0, omega_max / 2.0, omega_max);
        let (v1, v2, v4) = (at(w1), at(w2), at(w4));
        let power = (v4 / v2).ln() / 2f64.ln();
        let power_prev = (v2 / v1).ln() / 2f64.ln();
        let amplitude = v4 / w4.powf(power);
        Ok(Self {
            a_j,
            a_l,
            table,
            omega_max,
            power,
            power_prev,
            amplitude,
        })
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// Exponent of the power-law continuation and the one fitted an octave lower.
    pub fn power_law(&self) -> (f64, f64, f64) {
        (self.amplitude, self.power, self.power_prev)
    }

    pub fn table_pieces(&self) -> usize {
        self.table.pieces()
    }

    pub fn table_evaluations(&self) -> usize {
        self.table.evaluations
    }

    fn exponent(&self, omega: f64) -> f64 {
        0.5 * PI * omega * (1.0 / self.a_j + 1.0 / self.a_l)
    }

    /// Weights at spectral frequency `omega` (tabulated or continued).
    pub fn weights(&self, omega: f64) -> ThermalWeights {
        let plus = match self.table.eval(omega) {
            Some(v) => v,
            None => self.amplitude * omega.powf(self.power),
        };
        let e = self.exponent(omega);
        ThermalWeights {
            plus,
            minus: plus * (-2.0 * e).exp(),
            exponent: e,
        }
    }

    /// Analytic continuation of the power-law model, `A·z^p`, for complex `z`.
    pub fn model(&self, z: C64) -> C64 {
        z.powf(self.power) * self.amplitude
    }

    /// The model with the exponent fitted one octave lower, used to bound the
    /// error of the continuation.
    pub fn model_alt(&self, z: C64) -> C64 {
        let amp = self.amplitude * self.omega_max.powf(self.power - self.power_prev);
        z.powf(self.power_prev) * amp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_direct_formula() {
        let kin = DetectorPairKinematics::from_a1(1.0, 1.0).unwrap();
        let w = g12_kernel_1p1(1.0, &kin).unwrap();
        let expect = 1.0 / (4.0 * PI * PI.sinh());
        assert!((w.weight() - expect).abs() < 1e-15);
        assert!((w.exponent - PI).abs() < 1e-15);
        let g = g11_kernel_1p1(1.0, 1.0).unwrap();
        assert!((g.plus - w.plus).abs() < 1e-16);
    }

    #[test]
    fn coth_contraction() {
        for k in [0.01, 0.3, 2.0, 9.0] {
            let g = g11_kernel_1p1(k, 1.3).unwrap();
            let coth = 1.0 / (PI * k / 1.3).tanh();
            assert!((2.0 * PI * k * g.even() - coth).abs() < 1e-12 * coth);
        }
    }

    #[test]
    fn unaccelerated_observer_limit() {
        let kin0 = DetectorPairKinematics::from_a2(2.0, 0.0).unwrap();
        let kin = DetectorPairKinematics::from_a2(2.0, 1e-9).unwrap();
        let (a, b) = (
            g12_kernel_1p1(0.7, &kin0).unwrap(),
            g12_kernel_1p1(0.7, &kin).unwrap(),
        );
        assert!((a.plus - b.plus).abs() < 1e-12 * a.plus);
        assert_eq!(a.minus, 0.0);
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_k_imag(0.0, 1.0).unwrap() - 0.421_024_438_240_708_3).abs() < 1e-14);
        let s = bessel_k_imag_scaled(10.0, 0.5).unwrap();
        assert!((s - 0.449_346_187_498_566).abs() < 1e-11);
        let s = bessel_k_imag_scaled(50.0, 49.0).unwrap();
        assert!((s - 0.476_103_152_116_645_2).abs() < 1e-11);
        for (nu, x) in [(0.5, 0.3), (2.0, 1.5), (3.5, 4.0)] {
            let plain = bessel_k_imag(nu, x).unwrap();
            let scaled = bessel_k_imag_scaled(nu, x).unwrap() * (-PI * nu / 2.0).exp();
            assert!((plain - scaled).abs() < 1e-13, "{nu} {x}");
        }
        assert!(bessel_k_imag(1.0, 0.0).is_err());
    }

    #[test]
    fn transverse_equal_accelerations_closed_form() {
        // ∫₀^∞ x K_{iν}(x)² dx = πν/(2 sinh πν).
        let a = 1.3;
        for w in [0.2, 1.0, 4.0] {
            let t = transverse_weights(w, a, a, 1e-11).unwrap();
            let nu = w / a;
            let expect = 2.0 / a / (2.0 * PI).powi(4) * 2.0 * PI * a * a * PI * nu
                / (-(-2.0 * PI * nu).exp_m1());
            assert!(
                (t.plus - expect).abs() < 1e-9 * expect,
                "{w}: {} vs {expect}",
                t.plus
            );
        }
    }
}
