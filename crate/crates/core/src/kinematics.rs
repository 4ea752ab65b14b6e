//! Uniformly accelerated worldlines and the proper-time ratios between the
//! two detectors. Units are natural (`ħ = c = 1`).

use crate::error::{domain, ensure_finite, Result};

/// Hyperbolic trajectory `X² − T² = 1/a²` with proper acceleration `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RindlerWorldline {
    a: f64,
}

impl RindlerWorldline {
    pub fn new(a: f64) -> Result<Self> {
        ensure_finite("acceleration", a)?;
        if a <= 0.0 {
            return Err(domain(format!(
                "proper acceleration must be positive, got {a}"
            )));
        }
        Ok(Self { a })
    }

    pub fn acceleration(&self) -> f64 {
        self.a
    }
}

/// Minkowski coordinates `(T, X)` at proper time `tau`.
pub fn rindler_position(w: &RindlerWorldline, tau: f64) -> (f64, f64) {
    let at = w.a * tau;
    (at.sinh() / w.a, at.cosh() / w.a)
}

/// Coordinate velocity `dX/dT = tanh(aτ)`.
pub fn rindler_velocity(w: &RindlerWorldline, tau: f64) -> f64 {
    (w.a * tau).tanh()
}

fn check_speed(v: f64) -> Result<f64> {
    ensure_finite("speed", v)?;
    if !(0.0..1.0).contains(&v) {
        return Err(domain(format!("speed must lie in [0, 1), got {v}")));
    }
    Ok(v)
}

/// Proper time needed to accelerate from rest to speed `v` and back again.
pub fn accel_stage_duration(a: f64, v: f64) -> Result<f64> {
    RindlerWorldline::new(a)?;
    Ok(2.0 * check_speed(v)?.atanh() / a)
}

/// Half-duration `τ_a = artanh(v)/a` of an accelerated stage.
pub fn tau_a_from_speed(a: f64, v: f64) -> Result<f64> {
    Ok(accel_stage_duration(a, v)? / 2.0)
}

/// Peak speed `tanh(a τ_a)` reached in a stage of half-duration `τ_a`.
pub fn speed_from_tau_a(a: f64, tau_a: f64) -> Result<f64> {
    RindlerWorldline::new(a)?;
    ensure_finite("tau_a", tau_a)?;
    if tau_a < 0.0 {
        return Err(domain(format!("tau_a must be non-negative, got {tau_a}")));
    }
    Ok((a * tau_a).tanh())
}

/// Time-dilation ratio `√(1 − v_rel²)` between detectors in relative motion.
pub fn alpha_v(v_rel: f64) -> Result<f64> {
    ensure_finite("relative speed", v_rel)?;
    if v_rel.abs() >= 1.0 {
        return Err(domain(format!(
            "relative speed must satisfy |v| < 1, got {v_rel}"
        )));
    }
    Ok((1.0 - v_rel * v_rel).sqrt())
}

/// Proper-time ratio `τ₂/τ₁ = a₁/a₂` of two detectors reaching the same speed.
pub fn alpha_a(a1: f64, a2: f64) -> Result<f64> {
    ensure_finite("a1", a1)?;
    ensure_finite("a2", a2)?;
    if a2 <= 0.0 {
        return Err(domain(format!("a2 must be positive, got {a2}")));
    }
    if a1 < 0.0 {
        return Err(domain(format!("a1 must be non-negative, got {a1}")));
    }
    Ok(a1 / a2)
}

/// Accelerations of both detectors in the heating and cooling stages, plus the
/// common speed reached at the end of each accelerated stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StagePlan {
    pub v: f64,
    pub a_h1: f64,
    pub a_h2: f64,
    pub a_c1: f64,
    pub a_c2: f64,
}

impl StagePlan {
    /// Validates the plan. `a_h1 = 0` (and `a_c1 = 0`) describe an observer
    /// that does not accelerate.
    pub fn new(v: f64, a_h1: f64, a_h2: f64, a_c1: f64, a_c2: f64) -> Result<Self> {
        check_speed(v)?;
        alpha_a(a_h1, a_h2)?;
        alpha_a(a_c1, a_c2)?;
        Ok(Self {
            v,
            a_h1,
            a_h2,
            a_c1,
            a_c2,
        })
    }

    /// Plan built from the ratios, with the second detector's accelerations given.
    pub fn from_ratios(v: f64, alpha_ah: f64, a_h2: f64, alpha_ac: f64, a_c2: f64) -> Result<Self> {
        Self::new(v, alpha_ah * a_h2, a_h2, alpha_ac * a_c2, a_c2)
    }

    pub fn alpha_ah(&self) -> f64 {
        self.a_h1 / self.a_h2
    }

    pub fn alpha_ac(&self) -> f64 {
        self.a_c1 / self.a_c2
    }

    /// Both detectors share the same velocity in the adiabatic stages.
    pub fn alpha_v(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn position_and_velocity() {
        let w = RindlerWorldline::new(2.0).unwrap();
        assert_eq!(rindler_position(&w, 0.0), (0.0, 0.5));
        let tau = 0.5f64.atanh() / 2.0;
        assert!((rindler_velocity(&w, tau) - 0.5).abs() < 1e-15);
        assert!(RindlerWorldline::new(0.0).is_err());
    }

    #[test]
    fn durations() {
        assert_eq!(accel_stage_duration(1.0, 0.0).unwrap(), 0.0);
        assert!((accel_stage_duration(1.0, 0.5).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(accel_stage_duration(1.0, 1.0).is_err());
        assert!(accel_stage_duration(-1.0, 0.5).is_err());
        let v = speed_from_tau_a(1.5, tau_a_from_speed(1.5, 0.3).unwrap()).unwrap();
        assert!((v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ratios() {
        assert_eq!(alpha_v(0.0).unwrap(), 1.0);
        assert!((alpha_v(0.6).unwrap() - 0.8).abs() < 1e-15);
        assert!((alpha_v(0.8).unwrap() - 0.6).abs() < 1e-15);
        assert!(alpha_v(1.0).is_err());
        assert_eq!(alpha_a(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(alpha_a(0.0, 2.0).unwrap(), 0.0);
        assert_eq!(alpha_a(1.0, 2.0).unwrap(), 0.5);
        assert!(alpha_a(1.0, 0.0).is_err());
    }

    #[test]
    fn plan_ratios() {
        let p = StagePlan::from_ratios(0.2, 0.8, 2.0, 0.6, 1.0).unwrap();
        assert!((p.alpha_ah() - 0.8).abs() < 1e-15);
        assert!((p.alpha_ac() - 0.6).abs() < 1e-15);
        assert_eq!(p.alpha_v(), 1.0);
        assert!(StagePlan::new(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }
}
