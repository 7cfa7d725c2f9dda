//! Quadrature and ODE engines shared by every module.
//!
//! Integrals use globally adaptive panel subdivision with the embedded
//! Gauss–Kronrod 7/15 pair. Complex integrands are integrated component-wise
//! on shared panels, with the error contract expressed on the modulus.
//! Subdivision order is fixed (largest error first, ties broken by creation
//! order), so results are bit-for-bit reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values that can be integrated: closed under addition and real scaling, with a norm.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Dominant angular frequency of the integrand in its own variable.
    pub oscillation_hint: Option<f64>,
    /// Hard cap on the number of live panels.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 60,
            oscillation_hint: None,
            max_panels: 100_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn oscillating(mut self, omega: f64) -> Self {
        self.oscillation_hint = (omega.is_finite() && omega > 0.0).then_some(omega);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_depth < 10 {
            return Err(Error::InvalidParameter(format!(
                "max_depth must be at least 10, got {}",
                self.max_depth
            )));
        }
        Ok(())
    }
}

/// A converged (or best-effort) integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

// Gauss–Kronrod 7/15 nodes and weights (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    depth: u32,
    order: u64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

fn kronrod<T: Integrand, F: Fn(f64) -> T>(g: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = fc.norm() * WGK[7];
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron = kron + (f1 + f2) * WGK[j];
        abs_k += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let value = kron * half;
    let asc = asc * half.abs();
    let abs_k = abs_k * half.abs();
    let mut err = ((kron - gauss) * half).norm();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_k);
    }
    if !value.norm().is_finite() {
        err = f64::INFINITY;
    }
    (value, err)
}

/// Adaptive integral of `g` over `[a, b]` with diagnostics.
pub fn integrate_finite_detailed<T, F>(g: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}]"
        )));
    }
    let initial = match spec.oscillation_hint {
        Some(omega) => (((b - a) * omega / std::f64::consts::PI).ceil() as usize).clamp(1, spec.max_panels / 2),
        None => 1,
    };
    let mut heap = BinaryHeap::with_capacity(initial * 2);
    let mut order = 0u64;
    let mut total = T::zero();
    let mut total_err = 0.0;
    let width = (b - a) / initial as f64;
    for i in 0..initial {
        let lo = a + width * i as f64;
        let hi = if i + 1 == initial { b } else { a + width * (i + 1) as f64 };
        let (value, error) = kronrod(&g, lo, hi);
        total = total + value;
        total_err += error;
        heap.push(Panel { a: lo, b: hi, value, error, depth: 0, order });
        order += 1;
    }
    let mut evaluations = 15 * initial;
    // Panels that may no longer be split; they still contribute to the sum.
    let mut frozen: Vec<Panel<T>> = Vec::new();

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if worst.depth >= spec.max_depth
            || heap.len() + frozen.len() + 2 > spec.max_panels
            || mid <= worst.a
            || mid >= worst.b
        {
            if worst.error > tol || heap.is_empty() {
                return Err(Error::Convergence {
                    estimate: total.norm(),
                    error_bound: total_err,
                });
            }
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = kronrod(&g, worst.a, mid);
        let (v2, e2) = kronrod(&g, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        for (lo, hi, value, error) in [(worst.a, mid, v1, e1), (mid, worst.b, v2, e2)] {
            heap.push(Panel { a: lo, b: hi, value, error, depth: worst.depth + 1, order });
            order += 1;
        }
    }

    // Re-sum from the panels to shed accumulated cancellation in the running totals.
    let mut panels: Vec<_> = heap.into_vec();
    panels.append(&mut frozen);
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
    let error = panels.iter().map(|p| p.error).sum::<f64>();
    if !value.norm().is_finite() {
        return Err(Error::Convergence {
            estimate: value.norm(),
            error_bound: f64::INFINITY,
        });
    }
    let tol = spec.abs_tol.max(spec.rel_tol * value.norm());
    if error > tol * 1.0001 {
        return Err(Error::Convergence {
            estimate: value.norm(),
            error_bound: error,
        });
    }
    Ok(Quadrature { value, error, evaluations })
}

/// Adaptive integral of `g` over `[a, b]`.
pub fn integrate_finite<T, F>(g: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    integrate_finite_detailed(g, a, b, spec).map(|q| q.value)
}

/// Integral over the whole real line via
/// `∫ h(x) dx = ∫₀¹ [h(1/t - 1) + h(1 - 1/t)] t⁻² dt`.
///
/// The `t = 0` endpoint is never evaluated; Kronrod nodes are interior.
pub fn integrate_real_line<T, F>(g: F, spec: &QuadratureSpec) -> Result<T>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    integrate_real_line_detailed(g, spec).map(|q| q.value)
}

pub fn integrate_real_line_detailed<T, F>(g: F, spec: &QuadratureSpec) -> Result<Quadrature<T>>
where
    T: Integrand,
    F: Fn(f64) -> T,
{
    let mapped = |t: f64| {
        let x = 1.0 / t - 1.0;
        let w = 1.0 / (t * t);
        let s = g(x) + g(-x);
        if s.norm() == 0.0 {
            T::zero()
        } else {
            s * w
        }
    };
    let spec = QuadratureSpec {
        oscillation_hint: None,
        ..*spec
    };
    integrate_finite_detailed(mapped, 0.0, 1.0, &spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OdeMethod {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    Rk4Fixed { step: f64 },
    /// Dormand–Prince 5(4) with per-step error control.
    Rk45Adaptive { rel_tol: f64, abs_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    pub method: OdeMethod,
    pub t_start: f64,
    pub t_end: f64,
    /// Integration stops with [`Error::BlowUp`] once `|y|` exceeds this value.
    pub blowup_ceiling: f64,
    pub max_steps: usize,
}

impl OdeSpec {
    pub fn adaptive(t_start: f64, t_end: f64, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            method: OdeMethod::Rk45Adaptive { rel_tol, abs_tol },
            t_start,
            t_end,
            blowup_ceiling: 1e12,
            max_steps: 1_000_000,
        }
    }

    pub fn fixed(t_start: f64, t_end: f64, step: f64) -> Self {
        Self {
            method: OdeMethod::Rk4Fixed { step },
            t_start,
            t_end,
            blowup_ceiling: 1e12,
            max_steps: 10_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter("ODE time span must be finite".into()));
        }
        match self.method {
            OdeMethod::Rk4Fixed { step } if !(step > 0.0) => {
                Err(Error::InvalidParameter(format!("fixed step must be positive, got {step}")))
            }
            OdeMethod::Rk45Adaptive { rel_tol, abs_tol } if !(rel_tol > 0.0 && abs_tol > 0.0) => {
                Err(Error::InvalidParameter("adaptive tolerances must be positive".into()))
            }
            _ if !(self.blowup_ceiling > 0.0) => {
                Err(Error::InvalidParameter("blow-up ceiling must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dopri_step<F: Fn(f64, f64) -> f64>(rhs: &F, t: f64, y: f64, h: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    k[0] = rhs(t, y);
    for i in 1..7 {
        let yi = y + h * (0..i).map(|j| DP_A[i][j] * k[j]).sum::<f64>();
        k[i] = rhs(t + DP_C[i] * h, yi);
    }
    let y5 = y + h * (0..7).map(|i| DP_B5[i] * k[i]).sum::<f64>();
    let y4 = y + h * (0..7).map(|i| DP_B4[i] * k[i]).sum::<f64>();
    (y5, (y5 - y4).abs())
}

fn rk4_step<F: Fn(f64, f64) -> f64>(rhs: &F, t: f64, y: f64, h: f64) -> f64 {
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    let k4 = rhs(t + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Bracket for the singular time once the solution has left the ceiling.
///
/// Built from the last accepted state with `|y| <= sqrt(ceiling)`, where the
/// solution is still accurate. For `y ~ |t - t*|^(-a)` the distance to `t*`
/// is `a |y / y'|`, so the far end `t + 2 |y / y'|` covers every power-law
/// blow-up with exponent up to 2.
fn blowup_bracket(t: f64, y: f64, dydt: f64, direction: f64) -> (f64, f64) {
    let reach = if dydt != 0.0 && dydt.is_finite() { 2.0 * (y / dydt).abs() } else { 0.0 };
    let far = t + direction * reach;
    (t.min(far), t.max(far))
}

/// Integrates `dy/dt = rhs(t, y)` from `spec.t_start` to `spec.t_end`.
///
/// Returns `(t, y)` at each entry of `sample_times` (which must be monotone in
/// the direction of integration and inside the span); when `sample_times` is
/// empty every accepted step is returned. Steps are shortened to land exactly
/// on the sample times.
pub fn solve_ode<F>(rhs: F, y0: f64, spec: &OdeSpec, sample_times: &[f64]) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64, f64) -> f64,
{
    spec.validate()?;
    let span = spec.t_end - spec.t_start;
    let direction = if span >= 0.0 { 1.0 } else { -1.0 };
    for w in sample_times.windows(2) {
        if (w[1] - w[0]) * direction < 0.0 {
            return Err(Error::InvalidParameter(
                "sample times must be monotone in the integration direction".into(),
            ));
        }
    }
    let (lo, hi) = (spec.t_start.min(spec.t_end), spec.t_start.max(spec.t_end));
    if let Some(&bad) = sample_times.iter().find(|&&t| t < lo || t > hi) {
        return Err(Error::InvalidParameter(format!(
            "sample time {bad} outside the integration span [{lo}, {hi}]"
        )));
    }

    let record_all = sample_times.is_empty();
    let mut out = Vec::with_capacity(sample_times.len().max(16));
    let mut next = 0usize;
    let mut t = spec.t_start;
    let mut y = y0;
    while next < sample_times.len() && sample_times[next] == t {
        out.push((t, y));
        next += 1;
    }
    if record_all {
        out.push((t, y));
    }
    if span == 0.0 {
        return Ok(out);
    }

    let mut h = match spec.method {
        OdeMethod::Rk4Fixed { step } => step * direction,
        OdeMethod::Rk45Adaptive { .. } => {
            let d = rhs(t, y).abs();
            let scale = if d > 0.0 { (y.abs().max(1e-6) / d).min(span.abs()) } else { span.abs() };
            direction * (1e-3 * scale).max(1e-12 * span.abs())
        }
    };
    let mut steps = 0usize;
    let watch = spec.blowup_ceiling.sqrt();
    let mut anchor = (t, y);

    while (spec.t_end - t) * direction > 0.0 {
        steps += 1;
        if steps > spec.max_steps {
            return Err(Error::Convergence {
                estimate: y,
                error_bound: f64::INFINITY,
            });
        }
        let target = if next < sample_times.len() { sample_times[next] } else { spec.t_end };
        let base_h = h;
        let mut step = h;
        let mut hits_target = false;
        if (t + step - target) * direction >= 0.0 {
            step = target - t;
            hits_target = true;
        }

        let (y_new, accepted, h_next) = match spec.method {
            OdeMethod::Rk4Fixed { .. } => (rk4_step(&rhs, t, y, step), true, base_h),
            OdeMethod::Rk45Adaptive { rel_tol, abs_tol } => {
                let (y5, err) = dopri_step(&rhs, t, y, step);
                let scale = abs_tol + rel_tol * y.abs().max(y5.abs());
                let ratio = if y5.is_finite() { err / scale } else { f64::INFINITY };
                let factor = if ratio == 0.0 {
                    5.0
                } else if ratio.is_finite() {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    0.1
                };
                let proposed = step * factor;
                let h_next = if hits_target && ratio <= 1.0 && base_h.abs() > proposed.abs() {
                    base_h
                } else {
                    proposed
                };
                (y5, ratio <= 1.0, h_next)
            }
        };

        if !accepted {
            h = h_next;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                let (ta, ya) = anchor;
                return Err(Error::BlowUp {
                    bracket: blowup_bracket(ta, ya, rhs(ta, ya), direction),
                });
            }
            continue;
        }

        let t_new = if hits_target { target } else { t + step };
        if !y_new.is_finite() || y_new.abs() > spec.blowup_ceiling {
            let (ta, ya) = anchor;
            return Err(Error::BlowUp {
                bracket: blowup_bracket(ta, ya, rhs(ta, ya), direction),
            });
        }
        if y_new.abs() <= watch {
            anchor = (t_new, y_new);
        }
        t = t_new;
        y = y_new;
        h = h_next;
        if record_all {
            out.push((t, y));
        }
        while next < sample_times.len() && (sample_times[next] - t) * direction <= 0.0 {
            out.push((sample_times[next], y));
            next += 1;
        }
    }
    Ok(out)
}

/// Brent's method on a sign-changing bracket `[a, b]`, to absolute tolerance `tol` in `x`.
pub fn find_root<F>(g: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (g(a), g(b));
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::Calibration(format!("non-finite bracket values g({a}) = {fa}, g({b}) = {fb}")));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Calibration(format!("[{a}, {b}] does not bracket a root")));
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)), (q - 1.0) * (r - 1.0) * (s - 1.0))
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = g(b);
        if !fb.is_finite() {
            return Err(Error::Calibration(format!("objective is non-finite at {b}")));
        }
    }
    Err(Error::Calibration("root finder exceeded its iteration budget".into()))
}

/// Golden-section search for a minimum of `g` on `[a, b]`. The endpoints are
/// compared too, so a minimum on the boundary is returned exactly.
pub fn minimize_golden<F>(g: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = g(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}
