//! Numerical integration: globally adaptive Gauss–Kronrod (10/21) over finite
//! and semi-infinite intervals, tensor Gauss–Legendre rules over squares,
//! piecewise Chebyshev interpolation, and the removable-singularity sinc pairs
//! that appear in the spectral integrands.
//!
//! Integrands are vector valued (`[f64; N]`) so that several related integrals
//! can share one set of abscissae; the error control uses the largest
//! component.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<const N: usize = 1> {
    pub value: [f64; N],
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult<1> {
    pub fn scalar(&self) -> f64 {
        self.value[0]
    }
}

impl<const N: usize> QuadratureResult<N> {
    fn zero() -> Self {
        Self {
            value: [0.0; N],
            abs_error_estimate: 0.0,
            evaluations: 0,
        }
    }

    fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.value.iter_mut().zip(other.value) {
            *a += b;
        }
        self.abs_error_estimate += other.abs_error_estimate;
        self.evaluations += other.evaluations;
    }
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// An abscissa where the evaluator has a removable singularity, with the
/// analytic limit used if the evaluator returns a non-finite value nearby.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint<const N: usize> {
    pub x: f64,
    pub limit: [f64; N],
}

/// How the part of `[0, ∞)` beyond the initial cutoff is handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule {
    /// `|f(k)| ≤ coefficient·k^{−exponent}` beyond the cutoff (exponent > 1);
    /// the cutoff is extended until the bound on the remainder is below `abs_tol/10`.
    PowerBound { coefficient: f64, exponent: f64 },
    /// `|f(k)| ≤ coefficient·e^{−rate·k}` beyond the cutoff.
    ExponentialBound { coefficient: f64, rate: f64 },
    /// Integrate successive blocks `[K, 2K]` until a block is negligible
    /// twice in a row. The last block enters the error estimate.
    Doubling { max_doublings: usize },
    /// Stop at the cutoff; the remainder is the caller's responsibility.
    Truncate,
}

/// A one-dimensional integrand on `[0, ∞)` together with the metadata the
/// integrator needs.
pub struct IntegrandSpec<'a, const N: usize> {
    pub evaluator: &'a (dyn Fn(f64) -> [f64; N] + Sync),
    pub singular_points: Vec<SingularPoint<N>>,
    /// Additional panel boundaries where the integrand changes scale.
    pub breakpoints: Vec<f64>,
    /// Initial cutoff `K_max`.
    pub decay_scale: f64,
    /// Largest panel width (half an oscillation period of the integrand).
    pub max_panel: f64,
    /// The integrand behaves like `k^{−1/2}` at the origin; the first panel
    /// is integrated after the substitution `k = u²`.
    pub sqrt_origin: bool,
    pub tail: TailRule,
    /// Cap on the number of panels of one adaptive pass.
    pub max_subdivisions: usize,
}

impl<'a, const N: usize> IntegrandSpec<'a, N> {
    pub fn new(evaluator: &'a (dyn Fn(f64) -> [f64; N] + Sync), decay_scale: f64) -> Self {
        Self {
            evaluator,
            singular_points: Vec::new(),
            breakpoints: Vec::new(),
            decay_scale,
            max_panel: f64::INFINITY,
            sqrt_origin: false,
            tail: TailRule::Truncate,
            max_subdivisions: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    err: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

struct Guarded<'f, const N: usize> {
    f: &'f dyn Fn(f64) -> [f64; N],
    singular: &'f [SingularPoint<N>],
}

impl<const N: usize> Guarded<'_, N> {
    fn eval(&self, x: f64) -> Result<[f64; N]> {
        let v = (self.f)(x);
        if v.iter().all(|c| c.is_finite()) {
            return Ok(v);
        }
        for s in self.singular {
            if (x - s.x).abs() <= 1e-6 * s.x.abs().max(1.0) {
                return Ok(s.limit);
            }
        }
        Err(Error::Numeric {
            message: format!("integrand is not finite at {x}"),
            partial: f64::NAN,
            error: f64::INFINITY,
        })
    }
}

fn gk21<const N: usize>(g: &Guarded<'_, N>, a: f64, b: f64) -> Result<Panel<N>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g.eval(c)?;
    let mut resk = [0.0; N];
    let mut resg = [0.0; N];
    let mut resabs = [0.0; N];
    let mut fv1 = [[0.0; N]; 10];
    let mut fv2 = [[0.0; N]; 10];
    for i in 0..N {
        resk[i] = WGK[10] * fc[i];
        resabs[i] = (WGK[10] * fc[i]).abs();
    }
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = g.eval(c - dx)?;
        let f2 = g.eval(c + dx)?;
        for i in 0..N {
            resk[i] += WGK[j] * (f1[i] + f2[i]);
            resabs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                resg[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
        fv1[j] = f1;
        fv2[j] = f2;
    }
    let mut err = 0.0f64;
    let mut value = [0.0; N];
    for i in 0..N {
        let mean = resk[i] * 0.5;
        let mut resasc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fv1[j][i] - mean).abs() + (fv2[j][i] - mean).abs());
        }
        let resasc = resasc * h.abs();
        let resabs = resabs[i] * h.abs();
        let mut e = ((resk[i] - resg[i]) * h).abs();
        if resasc != 0.0 && e != 0.0 {
            e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * resabs);
        }
        err = err.max(e);
        value[i] = resk[i] * h;
    }
    Ok(Panel { a, b, value, err })
}

/// Globally adaptive integration over `[a, b]`, starting from the given
/// interior breakpoints and panel-width cap.
pub fn integrate_interval<const N: usize>(
    f: &dyn Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    max_panel: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult<N>> {
    integrate_guarded(
        &Guarded { f, singular: &[] },
        a,
        b,
        breakpoints,
        max_panel,
        rel_tol,
        abs_tol,
        200_000,
    )
}

#[allow(clippy::too_many_arguments)]
fn integrate_guarded<const N: usize>(
    g: &Guarded<'_, N>,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    max_panel: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult<N>> {
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(domain("tolerances must be positive"));
    }
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(domain(format!("invalid interval [{a}, {b}]")));
    }
    if b == a {
        return Ok(QuadratureResult::zero());
    }
    let mut cuts = vec![a];
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.push(b);
    if max_panel.is_finite() && max_panel > 0.0 && (b - a) / max_panel > max_subdivisions as f64 {
        return Err(Error::Numeric {
            message: format!(
                "[{a}, {b}] needs more than {max_subdivisions} panels of width {max_panel}"
            ),
            partial: f64::NAN,
            error: f64::INFINITY,
        });
    }
    for p in pts {
        let last = *cuts.last().unwrap();
        if p - last <= 1e-14 * p.abs().max(1.0) {
            continue;
        }
        let pieces = if max_panel.is_finite() && max_panel > 0.0 {
            ((p - last) / max_panel).ceil().max(1.0) as usize
        } else {
            1
        };
        for i in 1..pieces {
            cuts.push(last + (p - last) * i as f64 / pieces as f64);
        }
        cuts.push(p);
    }
    let mut heap = BinaryHeap::with_capacity(cuts.len() * 2);
    let mut total = [0.0; N];
    let mut err = 0.0;
    let mut evals = 0usize;
    for w in cuts.windows(2) {
        let p = gk21(g, w[0], w[1])?;
        evals += 21;
        for i in 0..N {
            total[i] += p.value[i];
        }
        err += p.err;
        heap.push(p);
    }
    let mut limit_hit = false;
    while err > abs_tol.max(rel_tol * norm(&total)) {
        if heap.len() >= max_subdivisions {
            limit_hit = true;
            break;
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            limit_hit = true;
            break;
        }
        let l = gk21(g, worst.a, mid)?;
        let r = gk21(g, mid, worst.b)?;
        evals += 42;
        for i in 0..N {
            total[i] += l.value[i] + r.value[i] - worst.value[i];
        }
        err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    // Resum in a fixed order so that the result does not depend on the
    // history of the heap.
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = [0.0; N];
    let mut err_sum = 0.0;
    for p in &panels {
        for i in 0..N {
            value[i] += p.value[i];
        }
        err_sum += p.err;
    }
    let result = QuadratureResult {
        value,
        abs_error_estimate: err_sum,
        evaluations: evals,
    };
    if limit_hit && err_sum > abs_tol.max(rel_tol * norm(&value)) {
        return Err(Error::Numeric {
            message: format!(
                "adaptive quadrature on [{a}, {b}] did not converge after {} panels",
                panels.len()
            ),
            partial: value[0],
            error: err_sum,
        });
    }
    Ok(result)
}

/// One Gauss–Kronrod (10/21) panel over `[a, b]` with its error estimate,
/// without subdivision.
pub fn gk21_panel<const N: usize>(
    f: &dyn Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
) -> Result<QuadratureResult<N>> {
    let p = gk21(&Guarded { f, singular: &[] }, a, b)?;
    Ok(QuadratureResult {
        value: p.value,
        abs_error_estimate: p.err,
        evaluations: 21,
    })
}

/// Integral over `[0, ∞)` of the integrand described by `spec`.
pub fn integrate_semi_infinite<const N: usize>(
    spec: &IntegrandSpec<'_, N>,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadratureResult<N>> {
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(domain("tolerances must be positive"));
    }
    if !(spec.decay_scale > 0.0 && spec.decay_scale.is_finite()) {
        return Err(domain("decay scale must be positive and finite"));
    }
    let f = spec.evaluator;
    let mut singular = spec.singular_points.clone();
    singular.sort_by(|a, b| a.x.total_cmp(&b.x));
    let g = Guarded {
        f: &|x| f(x),
        singular: &singular,
    };
    let k_max = match spec.tail {
        TailRule::PowerBound {
            coefficient,
            exponent,
        } => {
            if exponent <= 1.0 {
                return Err(domain("power tail bound needs exponent > 1"));
            }
            let target = abs_tol / 10.0;
            let k = (coefficient.abs() / ((exponent - 1.0) * target)).powf(1.0 / (exponent - 1.0));
            spec.decay_scale.max(k)
        }
        TailRule::ExponentialBound { coefficient, rate } => {
            if rate <= 0.0 {
                return Err(domain("exponential tail bound needs a positive rate"));
            }
            let target = abs_tol / 10.0;
            let k = (coefficient.abs() / (rate * target)).ln() / rate;
            spec.decay_scale.max(k)
        }
        TailRule::Doubling { .. } | TailRule::Truncate => spec.decay_scale,
    };
    let mut breaks: Vec<f64> = singular
        .iter()
        .map(|s| s.x)
        .chain(spec.breakpoints.iter().copied())
        .filter(|&x| x > 0.0)
        .collect();
    breaks.sort_by(f64::total_cmp);
    let mut total = QuadratureResult::<N>::zero();
    let mut start = 0.0;
    if spec.sqrt_origin {
        // First panel [0, b0] with k = u²: ∫ f(k) dk = ∫ 2u f(u²) du.
        let b0 = breaks.first().copied().unwrap_or(k_max).min(k_max).min(
            if spec.max_panel.is_finite() {
                spec.max_panel
            } else {
                k_max
            },
        );
        let h = |u: f64| {
            let k = u * u;
            let mut v = f(k);
            for c in v.iter_mut() {
                *c *= 2.0 * u;
            }
            v
        };
        let gh = Guarded {
            f: &h,
            singular: &[],
        };
        let r = integrate_guarded(
            &gh,
            0.0,
            b0.sqrt(),
            &[],
            f64::INFINITY,
            rel_tol,
            abs_tol,
            spec.max_subdivisions,
        )?;
        total.accumulate(&r);
        start = b0;
    }
    let main = integrate_guarded(
        &g,
        start,
        k_max,
        &breaks,
        spec.max_panel,
        rel_tol,
        abs_tol,
        spec.max_subdivisions,
    )?;
    total.accumulate(&main);
    if let TailRule::Doubling { max_doublings } = spec.tail {
        let mut lo = k_max;
        let mut quiet = 0;
        let mut converged = false;
        for _ in 0..max_doublings {
            let hi = 2.0 * lo;
            let tol_abs = abs_tol.max(rel_tol * norm(&total.value));
            let blk = integrate_guarded(
                &g,
                lo,
                hi,
                &[],
                spec.max_panel,
                rel_tol,
                tol_abs / 4.0,
                spec.max_subdivisions,
            )?;
            total.accumulate(&blk);
            let size = norm(&blk.value);
            lo = hi;
            if size <= abs_tol.max(rel_tol * norm(&total.value)) / 8.0 {
                quiet += 1;
                if quiet == 2 {
                    // Blocks shrink at least fourfold per doubling beyond the
                    // saturation scale, so the remainder is below the last block.
                    total.abs_error_estimate += size;
                    converged = true;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if !converged {
            return Err(Error::Numeric {
                message: format!("tail blocks did not become negligible up to k = {lo}"),
                partial: total.value[0],
                error: total.abs_error_estimate,
            });
        }
    }
    Ok(total)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = 2.0;
    }
    (x, w)
}

/// A tensor Gauss–Legendre rule on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct LegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LegendreRule {
    pub fn new(n: usize, lo: f64, hi: f64) -> Self {
        let (x, w) = gauss_legendre(n);
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        Self {
            nodes: x.iter().map(|t| c + h * t).collect(),
            weights: w.iter().map(|t| h * t).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Tensor-rule integral and the integral of the largest component
    /// modulus, used as the scale of the relative tolerance.
    fn square<const N: usize>(&self, f: &dyn Fn(f64, f64) -> [f64; N]) -> ([f64; N], f64) {
        let mut acc = [0.0; N];
        let mut mass = 0.0;
        for (x, wx) in self.nodes.iter().zip(&self.weights) {
            let mut row = [0.0; N];
            let mut row_mass = 0.0;
            for (y, wy) in self.nodes.iter().zip(&self.weights) {
                let v = f(*x, *y);
                for i in 0..N {
                    row[i] += wy * v[i];
                }
                row_mass += wy * norm(&v);
            }
            for i in 0..N {
                acc[i] += wx * row[i];
            }
            mass += wx * row_mass;
        }
        (acc, mass)
    }
}

/// Double integral over `[lo, hi]²`, refining the tensor Gauss–Legendre
/// order from `n_start` until two successive orders agree.
pub fn integrate_square_from<const N: usize>(
    f: &dyn Fn(f64, f64) -> [f64; N],
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    n_start: usize,
) -> Result<QuadratureResult<N>> {
    if !(lo < hi) {
        return Err(domain(format!("invalid square [{lo}, {hi}]")));
    }
    if !(rel_tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let mut n = n_start.max(4);
    let (mut prev, _) = LegendreRule::new(n, lo, hi).square(f);
    let mut evals = n * n;
    while n < 4096 {
        let m = n + n / 2 + 8;
        let (cur, mass) = LegendreRule::new(m, lo, hi).square(f);
        evals += m * m;
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = cur[i] - prev[i];
        }
        let d = norm(&diff);
        if d <= abs_tol.max(rel_tol * norm(&cur).max(1e-3 * mass)) {
            return Ok(QuadratureResult {
                value: cur,
                abs_error_estimate: d,
                evaluations: evals,
            });
        }
        prev = cur;
        n = m;
    }
    Err(Error::Numeric {
        message: "tensor rule did not converge".into(),
        partial: prev[0],
        error: f64::INFINITY,
    })
}

/// Double integral of a scalar function over `[lo, hi]²`.
pub fn integrate_square(
    f: &dyn Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<QuadratureResult<1>> {
    integrate_square_from(&|x, y| [f(x, y)], lo, hi, rel_tol, 1e-300, 8)
}

/// `sin(y)/y` with the removable point at 0.
pub fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 * (1.0 - y2 / 20.0)
    } else {
        y.sin() / y
    }
}

/// Switch radius of the sinc-pair patch around `k = ω`.
pub fn sinc_switch(omega: f64) -> f64 {
    1e-6 * omega.abs().max(1.0)
}

/// `sin(xτ)·sin(αxτ)/(αx²) = τ²·sinc(xτ)·sinc(αxτ)`, finite as `α → 0`.
pub fn sinc_pair_reduced(x: f64, tau_a: f64, alpha: f64) -> f64 {
    tau_a * tau_a * sinc(x * tau_a) * sinc(alpha * x * tau_a)
}

/// `sin((k−ω)τ)·sin(α(k−ω)τ)/(k−ω)²`, replaced by its second-order Taylor
/// series within `ε = 1e-6·max(1, ω)` of `k = ω`.
pub fn patched_sinc_pair(k: f64, omega: f64, tau_a: f64, alpha: f64) -> f64 {
    let x = k - omega;
    if x.abs() < sinc_switch(omega) {
        let t2 = tau_a * tau_a;
        alpha * t2 * (1.0 - (1.0 + alpha * alpha) * x * x * t2 / 6.0)
    } else {
        (x * tau_a).sin() * (alpha * x * tau_a).sin() / (x * x)
    }
}

/// `sin²(xτ)/x²` with its limit `τ²` at `x = 0`.
pub fn sinc_square(x: f64, tau_a: f64) -> f64 {
    let s = tau_a * sinc(x * tau_a);
    s * s
}

/// Piecewise Chebyshev interpolant of a smooth function on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ChebTable {
    pieces: Vec<ChebPiece>,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
struct ChebPiece {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

const CHEB_DEGREE: usize = 20;

fn cheb_fit(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<Vec<f64>> {
    let n = CHEB_DEGREE;
    let pi = std::f64::consts::PI;
    let vals: Vec<f64> = (0..=n)
        .map(|j| {
            let t = (pi * j as f64 / n as f64).cos();
            f(0.5 * (a + b) + 0.5 * (b - a) * t)
        })
        .collect::<Result<_>>()?;
    let mut c = vec![0.0; n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in vals.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            s += w * v * (pi * (j * k) as f64 / n as f64).cos();
        }
        let scale = if k == 0 || k == n {
            1.0 / n as f64
        } else {
            2.0 / n as f64
        };
        *ck = s * scale;
    }
    Ok(c)
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

impl ChebTable {
    /// Bisects `[lo, hi]` until the trailing Chebyshev coefficients of every
    /// piece fall below `max(abs_tol, rel_tol·scale)`, where `scale` is the
    /// largest leading coefficient met so far.
    pub fn build(
        f: &dyn Fn(f64) -> Result<f64>,
        lo: f64,
        hi: f64,
        rel_tol: f64,
        abs_tol: f64,
    ) -> Result<Self> {
        if !(lo < hi) {
            return Err(domain(format!("invalid table range [{lo}, {hi}]")));
        }
        let mut pieces = Vec::new();
        let mut stack = vec![(lo, hi, 0usize)];
        let mut evaluations = 0;
        let mut scale = 0.0f64;
        while let Some((a, b, depth)) = stack.pop() {
            let c = cheb_fit(f, a, b)?;
            evaluations += CHEB_DEGREE + 1;
            scale = scale.max(c[0].abs()).max(c[1].abs());
            let tail = c[CHEB_DEGREE - 2..].iter().map(|x| x.abs()).sum::<f64>();
            if tail <= abs_tol.max(rel_tol * scale) || depth >= 24 {
                if depth >= 24 {
                    return Err(Error::Numeric {
                        message: format!("Chebyshev table did not resolve [{a}, {b}]"),
                        partial: c[0],
                        error: tail,
                    });
                }
                pieces.push(ChebPiece { a, b, coeffs: c });
            } else {
                let m = 0.5 * (a + b);
                stack.push((m, b, depth + 1));
                stack.push((a, m, depth + 1));
            }
        }
        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        Ok(Self {
            pieces,
            evaluations,
        })
    }

    pub fn lo(&self) -> f64 {
        self.pieces[0].a
    }

    pub fn hi(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].b
    }

    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Interpolated value; `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        if x < self.lo() || x > self.hi() {
            return None;
        }
        let i = self
            .pieces
            .partition_point(|p| p.b < x)
            .min(self.pieces.len() - 1);
        let p = &self.pieces[i];
        let t = (2.0 * x - p.a - p.b) / (p.b - p.a);
        Some(clenshaw(&p.coeffs, t.clamp(-1.0, 1.0)))
    }
}

/// `∫ g(z) dz` along the vertical ray `z = x0 + iy`, `y ∈ [0, ∞)`, for an
/// integrand that decays at least like `|z|^{−2}` along the ray.
pub fn integrate_vertical_ray(
    g: &dyn Fn(C64) -> C64,
    x0: f64,
    scale: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(C64, f64)> {
    // y = scale·t/(1−t) maps [0, 1) onto [0, ∞).
    let h = |t: f64| {
        if t >= 1.0 {
            return [0.0, 0.0];
        }
        let y = scale * t / (1.0 - t);
        let jac = scale / ((1.0 - t) * (1.0 - t));
        let v = g(C64::new(x0, y)) * C64::new(0.0, jac);
        if v.re.is_finite() && v.im.is_finite() {
            [v.re, v.im]
        } else {
            [0.0, 0.0]
        }
    };
    let r = integrate_interval(
        &h,
        0.0,
        1.0,
        &[0.5, 0.9, 0.99],
        f64::INFINITY,
        rel_tol,
        abs_tol,
    )?;
    Ok((C64::new(r.value[0], r.value[1]), r.abs_error_estimate))
}
