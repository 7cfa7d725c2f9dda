//! The theory on a truncated momentum interval `[-p0, p0]`.
//!
//! Physical states vanish at `±p0`. In the flattening variable the interval
//! becomes `[-q0, q0]` with `q0 = z(p0)` and the measure becomes `dz`, so the
//! maximally localized states are the lowest modes of a box:
//! `psi_n(p) = q0^(-1/2) exp(-i ξ z / hbar) sin(μ_n (z + q0))`, `μ_n = n π / (2 q0)`,
//! with `<x> = ξ` and `Δx = hbar μ_n`. Projecting onto the `n = 1` family
//! defines the quasi-position representation.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraKind, CompactSupport, DeformedAlgebra, HBAR};
use crate::error::{ensure_finite, Error, Result};
use crate::export::Table;
use crate::fulltheory::{collect_samples, fourier_trapezoid, uniform_grid, MomentumSamples, PositionSamples};
use crate::numerics::{integrate_finite, QuadratureSpec};
use crate::state::{MomentumState, Support};

pub type QuasiPositionSamples = PositionSamples;

/// Largest `|psi(±p0)|` accepted as vanishing at the cut-off.
pub const DOMAIN_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSpace {
    algebra: DeformedAlgebra,
    support: CompactSupport,
}

impl TruncatedSpace {
    pub fn new(algebra: DeformedAlgebra, p0: f64) -> Result<Self> {
        Ok(Self {
            algebra,
            support: CompactSupport::new(&algebra, p0)?,
        })
    }

    pub fn algebra(&self) -> DeformedAlgebra {
        self.algebra
    }
    pub fn p0(&self) -> f64 {
        self.support.p0
    }
    pub fn q0(&self) -> f64 {
        self.support.q0
    }

    /// Normalization `K = q0^(-1/2)` of the maximally localized states.
    pub fn k_const(&self) -> f64 {
        self.q0().sqrt().recip()
    }

    /// The `n = 1` kernel `K exp(-i ξ z / hbar) cos(π z / (2 q0))`, zero outside the interval.
    pub fn maxloc_kernel(&self, xi: f64, p: f64) -> Complex64 {
        if p.abs() >= self.p0() {
            return Complex64::new(0.0, 0.0);
        }
        let z = self.algebra.z_at(p);
        Complex64::from_polar(self.k_const() * (FRAC_PI_2 * z / self.q0()).cos(), -xi * z / HBAR)
    }

    /// Errors unless `|psi(±p0)| ≤ DOMAIN_TOLERANCE`.
    pub fn check_domain(&self, state: &MomentumState) -> Result<()> {
        let amp = state.amplitude_fn();
        let edge = amp(self.p0()).norm().max(amp(-self.p0()).norm());
        if edge > DOMAIN_TOLERANCE || !edge.is_finite() {
            return Err(Error::DomainViolation { amplitude: edge });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxLocState {
    pub space: TruncatedSpace,
    pub xi: f64,
    pub mode: u32,
}

impl MaxLocState {
    pub fn new(space: TruncatedSpace, xi: f64, mode: u32) -> Result<Self> {
        ensure_finite("xi", xi)?;
        if mode == 0 {
            return Err(Error::InvalidParameter("mode must be at least 1".into()));
        }
        Ok(Self { space, xi, mode })
    }

    /// `μ_n = n π / (2 q0)`.
    pub fn mu(&self) -> f64 {
        self.mode as f64 * PI / (2.0 * self.space.q0())
    }

    pub fn to_momentum_state(&self) -> MomentumState {
        let (alg, p0, q0) = (self.space.algebra, self.space.p0(), self.space.q0());
        let (c, mu, xi) = (self.space.k_const(), self.mu(), self.xi);
        let amp = move |p: f64| {
            if p.abs() >= p0 {
                return Complex64::new(0.0, 0.0);
            }
            let z = alg.z_at(p);
            Complex64::from_polar(c * (mu * (z + q0)).sin(), -xi * z / HBAR)
        };
        let deriv = move |p: f64| {
            if p.abs() > p0 {
                return Complex64::new(0.0, 0.0);
            }
            let z = alg.z_at(p);
            let s = (mu * (z + q0)).sin_cos();
            let inner = Complex64::new(mu * s.1, -xi / HBAR * s.0);
            Complex64::from_polar(c / alg.f_at(p), -xi * z / HBAR) * inner
        };
        MomentumState::analytic(alg, Support::Interval { p0 }, amp, deriv)
    }
}

/// Normalized maximally localized state of mode `n` centred at `ξ`.
pub fn max_loc_state(space: &TruncatedSpace, xi: f64, n: u32) -> Result<MomentumState> {
    Ok(MaxLocState::new(*space, xi, n)?.to_momentum_state())
}

/// `Δx` of mode `n`: `n π hbar / (2 q0)`; for the square-root algebra
/// `n sqrt(beta/2) π hbar / asinh(sqrt(2 beta) p0)`.
pub fn delta_x_min(space: &TruncatedSpace, n: u32) -> f64 {
    n as f64 * PI * HBAR / (2.0 * space.q0())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBounds {
    /// `(1/2) sqrt(5/2) hbar sqrt(beta)`, from the expanded commutator.
    pub lower_bound: f64,
    pub delta_x_min: f64,
}

impl SeriesBounds {
    /// Both values in units of `hbar sqrt(beta)`.
    pub fn in_length_units(&self, beta: f64) -> (f64, f64) {
        let l = HBAR * beta.sqrt();
        (self.lower_bound / l, self.delta_x_min / l)
    }
}

/// The bound from the series expansion of `f` and the exact minimum, at the
/// radius of convergence `p0 = 1 / sqrt(2 beta)`.
pub fn series_bounds(space: &TruncatedSpace) -> Result<SeriesBounds> {
    let alg = space.algebra;
    if alg.kind() != AlgebraKind::SqrtGup {
        return Err(Error::Precondition("series bounds apply to the square-root algebra".into()));
    }
    let radius = (2.0 * alg.beta()).sqrt().recip();
    if (space.p0() - radius).abs() > 1e-12 * radius {
        return Err(Error::Precondition(format!(
            "series bounds need p0 = 1/sqrt(2 beta) = {radius}, got {}",
            space.p0()
        )));
    }
    Ok(SeriesBounds {
        lower_bound: 0.5 * (2.5f64).sqrt() * HBAR * alg.beta().sqrt(),
        delta_x_min: delta_x_min(space, 1),
    })
}

fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

/// `<psi_ξ | psi_ξ'>` for `n = 1`. With `D = (ξ - ξ') / hbar` and `a = π / q0`
/// this is `sinc(D q0) a² / (a² - D²)`: real, one at `D = 0`, and one half at
/// the removable points `|D| = a`.
pub fn maxloc_overlap(space: &TruncatedSpace, xi: f64, xi_prime: f64) -> Complex64 {
    let q0 = space.q0();
    let a = PI / q0;
    let d = ((xi - xi_prime) / HBAR).abs();
    let value = if d < 0.5 * a {
        sinc(d * q0) * a * a / ((a - d) * (a + d))
    } else {
        // sin(d q0) = -sin(s q0) with s = d - a, which cancels the zero of a² - d²
        let s = d - a;
        a * a * sinc(s * q0) / (d * (2.0 * a + s))
    };
    Complex64::new(value, 0.0)
}

/// The overlap by direct quadrature of `conj(psi_ξ) psi_ξ'` under `dp / f`.
pub fn maxloc_overlap_quadrature(space: &TruncatedSpace, xi: f64, xi_prime: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let a = max_loc_state(space, xi, 1)?;
    let b = max_loc_state(space, xi_prime, 1)?;
    a.inner(&b, &spec.oscillating((xi - xi_prime).abs() / HBAR))
}

/// Overlap scan with columns `dxi,re_overlap,im_overlap,abs`.
pub fn overlap_table(space: &TruncatedSpace, separations: &[f64]) -> Table {
    let mut t = Table::new(["dxi", "re_overlap", "im_overlap", "abs"]);
    for &d in separations {
        let v = maxloc_overlap(space, d, 0.0);
        t.push(vec![d, v.re, v.im, v.norm()]);
    }
    t
}

/// `psi(ξ) = <psi_ξ | psi>`, integrated in `z` over `[-q0, q0]`.
pub fn gft_truncated(space: &TruncatedSpace, state: &MomentumState, xi_grid: &[f64], spec: &QuadratureSpec) -> Result<QuasiPositionSamples> {
    space.check_domain(state)?;
    let results = xi_grid
        .par_iter()
        .map(|&xi| quasi_position_value(space, state, xi, 0, spec).ok())
        .collect();
    collect_samples(xi_grid.to_vec(), results)
}

/// `d^m psi(ξ) / dξ^m`, by inserting `(i z / hbar)^m` under the integral.
fn quasi_position_value(space: &TruncatedSpace, state: &MomentumState, xi: f64, m: i32, spec: &QuadratureSpec) -> Result<Complex64> {
    let (alg, q0, k) = (space.algebra, space.q0(), space.k_const());
    let amp = state.amplitude_fn();
    let spec = spec.oscillating(xi.abs() / HBAR);
    integrate_finite(
        |z: f64| {
            let kernel = Complex64::from_polar(k * (FRAC_PI_2 * z / q0).cos(), xi * z / HBAR);
            kernel * Complex64::new(0.0, z / HBAR).powi(m) * amp(alg.p_of_z(z))
        },
        -q0,
        q0,
        &spec,
    )
}

/// Image of the momentum eigenstate `p~` (normalized to `f(p) δ(p - p~)`):
/// `K cos(π z(p~) / (2 q0)) exp(i ξ z(p~) / hbar)`.
pub fn delta_image(space: &TruncatedSpace, p_tilde: f64, xi: f64) -> Complex64 {
    space.maxloc_kernel(xi, p_tilde).conj()
}

/// Settings for [`gft_truncated_inverse`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseOptions {
    /// Reconstruction is restricted to `|q| ≤ q0 (1 - margin)`.
    pub margin: f64,
    /// Add the asymptotic contribution of `|ξ| > L`.
    pub tail_correction: bool,
    /// Warn when `|psi|` at the window ends exceeds this.
    pub tail_tolerance: f64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self {
            margin: 1e-3,
            tail_correction: true,
            tail_tolerance: 1e-3,
        }
    }
}

/// Powers of `1/ξ` in the asymptotic tail model; the endpoint zeros of a
/// physical state make the leading one `ξ^-2` or faster.
const TAIL_POWERS: [i32; 3] = [2, 3, 4];

/// Inverse quasi-position transform
/// `psi~(q) = sqrt(q0) / (2π hbar cos(π q / 2 q0)) ∫ psi(ξ) exp(-i ξ q / hbar) dξ`
/// from uniform samples on a window `[-L, L]`.
///
/// The window integral uses the trapezoidal rule. Beyond the window, `psi` is
/// modelled as `Σ_k (a_k e^{i q0 ξ} + b_k e^{-i q0 ξ}) / ξ^k` fitted on
/// `L/2 ≤ |ξ| ≤ L`, and the model is integrated to infinity in closed form.
pub fn gft_truncated_inverse(
    space: &TruncatedSpace,
    samples: &QuasiPositionSamples,
    q_grid: &[f64],
    options: &InverseOptions,
) -> Result<MomentumSamples> {
    let h = samples.uniform_step()?;
    if !samples.failed.is_empty() {
        return Err(Error::InvalidState(format!("{} quasi-position samples failed", samples.failed.len())));
    }
    let q0 = space.q0();
    let limit = q0 * (1.0 - options.margin);
    if let Some(&q) = q_grid.iter().find(|q| !(q.abs() <= limit)) {
        return Err(Error::EndpointSingularity { q, limit, q0 });
    }
    let n = samples.values.len();
    let tail_estimate = samples.values[0].norm().max(samples.values[n - 1].norm());
    let tails = if options.tail_correction {
        Some([fit_tail(samples, q0, 1.0)?, fit_tail(samples, q0, -1.0)?])
    } else {
        None
    };
    let values = q_grid
        .par_iter()
        .map(|&q| {
            let mut integral = fourier_trapezoid(samples, h, q / HBAR);
            if let Some(tails) = &tails {
                integral += tails.iter().map(|t| t.integral(q, q0)).sum::<Complex64>();
            }
            integral * (q0.sqrt() / (2.0 * PI * HBAR * (FRAC_PI_2 * q / q0).cos()))
        })
        .collect();
    Ok(MomentumSamples {
        p: q_grid.iter().map(|&q| space.algebra.p_of_z(q)).collect(),
        values,
        tail_estimate,
        truncation_warning: tail_estimate > options.tail_tolerance,
    })
}

/// Tail model on one side, in the outward coordinate `s = side · ξ ≥ L`.
struct TailFit {
    side: f64,
    start: f64,
    /// Coefficients of `e^{+i q0 s} / s^k` then `e^{-i q0 s} / s^k`, per power.
    coeffs: Vec<Complex64>,
}

fn fit_tail(samples: &QuasiPositionSamples, q0: f64, side: f64) -> Result<TailFit> {
    let start = samples
        .grid
        .first()
        .map(|a| a.abs())
        .unwrap_or(0.0)
        .min(samples.grid.last().map(|b| b.abs()).unwrap_or(0.0));
    if start <= 0.0 {
        return Err(Error::UnsupportedGrid("tail correction needs a window around ξ = 0".into()));
    }
    let rows: Vec<(f64, Complex64)> = samples
        .grid
        .iter()
        .zip(&samples.values)
        .map(|(&x, &v)| (side * x, v))
        .filter(|&(s, _)| s >= 0.5 * start && s <= start)
        .collect();
    let cols = 2 * TAIL_POWERS.len();
    if rows.len() < 2 * cols {
        return Err(Error::UnsupportedGrid("too few samples in the outer half of the window".into()));
    }
    // Columns scaled by start^k keep the system well conditioned.
    let a = DMatrix::from_fn(rows.len(), cols, |r, c| {
        let s = rows[r].0;
        let k = TAIL_POWERS[c / 2];
        let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar((start / s).powi(k), sign * q0 * s)
    });
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let x = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidState(format!("tail fit failed: {e}")))?;
    let coeffs = (0..cols).map(|c| x[c] * start.powi(TAIL_POWERS[c / 2])).collect();
    Ok(TailFit { side, start, coeffs })
}

impl TailFit {
    /// `∫_{|ξ| > L} model(ξ) exp(-i ξ q / hbar) dξ` on this side.
    fn integral(&self, q: f64, q0: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (c, coeff) in self.coeffs.iter().enumerate() {
            let k = TAIL_POWERS[c / 2];
            let carrier = if c % 2 == 0 { q0 } else { -q0 };
            total += coeff * oscillatory_tail(carrier - self.side * q / HBAR, self.start, k);
        }
        total
    }
}

/// `∫_L^∞ e^{i ω s} s^{-k} ds`, by rotating the contour onto
/// `s = L + i sgn(ω) t / |ω|` where the integrand decays like `e^{-t}`.
fn oscillatory_tail(omega: f64, l: f64, k: i32) -> Complex64 {
    if omega == 0.0 {
        return Complex64::new(l.powi(1 - k) / (k - 1) as f64, 0.0);
    }
    let w = omega.abs();
    let sg = omega.signum();
    let inner: Complex64 = integrate_finite(
        |t: f64| Complex64::new(l, sg * t / w).powi(-k) * (-t).exp(),
        0.0,
        40.0,
        &QuadratureSpec::with_tolerances(1e-15, 1e-12),
    )
    .unwrap_or_else(|e| match e {
        Error::Convergence { estimate, .. } => Complex64::new(estimate, 0.0),
        _ => Complex64::new(f64::NAN, f64::NAN),
    });
    Complex64::new(0.0, sg / w) * Complex64::from_polar(1.0, omega * l) * inner
}

/// Samples `psi(ξ)` of `state` on `[-l, l]` with step at most `step`, then inverts.
pub fn truncated_round_trip(
    space: &TruncatedSpace,
    state: &MomentumState,
    l: f64,
    step: f64,
    q_grid: &[f64],
    spec: &QuadratureSpec,
    options: &InverseOptions,
) -> Result<MomentumSamples> {
    let n = (2.0 * l / step).ceil() as usize + 1;
    let xi_grid = uniform_grid(-l, l, n);
    let samples = gft_truncated(space, state, &xi_grid, spec)?;
    if !samples.failed.is_empty() {
        return Err(Error::Convergence {
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
        });
    }
    gft_truncated_inverse(space, &samples, q_grid, options)
}

/// Actions of `p` and `x` on a physical state, as momentum-space states.
#[derive(Debug, Clone)]
pub struct QuasiPositionActions {
    pub p_action: MomentumState,
    pub x_action: MomentumState,
}

/// `p psi` (multiplication) and `x psi = i hbar f psi'`, both in momentum space.
pub fn quasi_position_operators(space: &TruncatedSpace, state: &MomentumState) -> Result<QuasiPositionActions> {
    space.check_domain(state)?;
    if !state.has_derivative() {
        state.derivative(0.0)?;
    }
    let alg = space.algebra;
    let (a1, a2) = (state.amplitude_fn(), state.clone());
    let support = state.support();
    let p_action = MomentumState::new(
        alg,
        support,
        std::sync::Arc::new(move |p| a1(p) * p),
        crate::state::Derivative::FiniteDifference,
    );
    let x_action = MomentumState::new(
        alg,
        support,
        std::sync::Arc::new(move |p| Complex64::new(0.0, HBAR * alg.f_at(p)) * a2.derivative(p).unwrap_or_default()),
        crate::state::Derivative::FiniteDifference,
    );
    Ok(QuasiPositionActions { p_action, x_action })
}

/// Result of summing the `sinh` series of `p` in the quasi-position representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: usize,
    pub converged: bool,
}

/// `(2 beta)^(-1/2) sinh(-i hbar sqrt(2 beta) d/dξ) psi(ξ)`, summed term by
/// term with `d^m psi / dξ^m` from quadrature, until a term drops below
/// `1e-14` of the running sum.
pub fn sinh_series_p_action(
    space: &TruncatedSpace,
    state: &MomentumState,
    xi: f64,
    max_terms: usize,
    spec: &QuadratureSpec,
) -> Result<SeriesValue> {
    if space.algebra.kind() != AlgebraKind::SqrtGup {
        return Err(Error::Precondition("the sinh form belongs to the square-root algebra".into()));
    }
    space.check_domain(state)?;
    let r = (2.0 * space.algebra.beta()).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut coefficient = Complex64::new(0.0, -HBAR * r);
    for n in 0..max_terms {
        let m = 2 * n as i32 + 1;
        if n > 0 {
            let step = Complex64::new(0.0, -HBAR * r).powi(2) / ((m - 1) as f64 * m as f64);
            coefficient *= step;
        }
        let term = coefficient * quasi_position_value(space, state, xi, m, spec)? / r;
        sum += term;
        if term.norm() <= 1e-14 * sum.norm().max(f64::MIN_POSITIVE) {
            return Ok(SeriesValue {
                value: sum,
                terms: n + 1,
                converged: true,
            });
        }
    }
    Ok(SeriesValue {
        value: sum,
        terms: max_terms,
        converged: false,
    })
}

/// The two iterated limits of `Δx_min` evaluated at finite proxies: inner
/// limits are taken exactly, outer ones at the proxy value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRoutes {
    /// `β → 0` first, giving `π hbar / (2 p0)`, then `p0` at its proxy.
    pub beta_first: f64,
    /// `p0 → ∞` first, giving zero for every `β > 0`, then `β` at its proxy.
    pub p0_first: f64,
}

pub fn iterated_limits(beta: f64, p0: f64) -> Result<LimitRoutes> {
    let standard = TruncatedSpace::new(DeformedAlgebra::standard(), p0)?;
    DeformedAlgebra::sqrt_gup(beta)?;
    // z(p0) diverges for every beta > 0, so Δx_min = π hbar / (2 z(p0)) → 0.
    Ok(LimitRoutes {
        beta_first: delta_x_min(&standard, 1),
        p0_first: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn space(beta: f64, p0: f64) -> TruncatedSpace {
        TruncatedSpace::new(DeformedAlgebra::sqrt_gup(beta).unwrap(), p0).unwrap()
    }

    #[test]
    fn maxloc_state_moments() {
        let spec = QuadratureSpec::default();
        let sp = space(0.5, 1.0);
        let s = max_loc_state(&sp, 0.0, 1).unwrap();
        assert_abs_diff_eq!(s.norm_squared(&spec).unwrap(), 1.0, epsilon = 1e-10);
        let dx = s.position_square(&spec).unwrap().sqrt();
        assert_relative_eq!(dx, 1.782_213_978_191_369, max_relative = 1e-8);
        assert_relative_eq!(dx, delta_x_min(&sp, 1), max_relative = 1e-10);
        let shifted = max_loc_state(&sp, 2.5, 1).unwrap();
        assert_abs_diff_eq!(shifted.position_mean(&spec).unwrap(), 2.5, epsilon = 1e-8);
    }

    #[test]
    fn mode_one_matches_cosine_form() {
        let sp = space(0.5, 2.0);
        let s = max_loc_state(&sp, 0.8, 1).unwrap();
        for p in [-1.9, -0.3, 0.0, 1.2] {
            assert_abs_diff_eq!((s.amplitude(p) - sp.maxloc_kernel(0.8, p)).norm(), 0.0, epsilon = 1e-14);
        }
        let k = ((2.0 * 0.5f64).sqrt() / (2.0 * 2f64.sqrt() * 0.5f64.sqrt()).asinh()).sqrt();
        assert_relative_eq!(sp.k_const(), k, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_vanishing() {
        let sp = space(1.0, 3.0);
        for n in 1..=4 {
            let s = max_loc_state(&sp, 1.0, n).unwrap();
            let amp = s.amplitude_fn();
            assert_eq!(amp(3.0).norm(), 0.0);
            assert_eq!(amp(-3.0).norm(), 0.0);
            assert!(amp(3.0 * (1.0 - 1e-12)).norm() < 1e-6);
        }
    }

    #[test]
    fn delta_x_min_limits() {
        let values: Vec<f64> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&p0| delta_x_min(&space(0.5, p0), 1)).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        let flat = TruncatedSpace::new(DeformedAlgebra::standard(), 1.0).unwrap();
        assert_relative_eq!(delta_x_min(&flat, 1), FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(delta_x_min(&space(1e-12, 1.0), 1), FRAC_PI_2, max_relative = 1e-9);
        assert!(delta_x_min(&space(0.5, 1.0), 2) > delta_x_min(&space(0.5, 1.0), 1));
    }

    #[test]
    fn series_bounds_values() {
        let beta = 0.5;
        let sp = space(beta, (2.0 * beta).sqrt().recip());
        let b = series_bounds(&sp).unwrap();
        let (lo, dx) = b.in_length_units(beta);
        assert_abs_diff_eq!(lo, 0.790569, epsilon = 1e-6);
        assert_abs_diff_eq!(dx, 2.520, epsilon = 1e-3);
        assert_relative_eq!(dx / lo, 2.0 * PI / (5f64.sqrt() * 1f64.asinh()), max_relative = 1e-12);
        assert!(matches!(series_bounds(&space(beta, 2.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn overlap_closed_form_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let sp = space(0.5, 5.0);
        let a = PI / sp.q0();
        for d in [0.5, 1.0, 2.0, 5.0, a, a + 1e-9, 0.3 * a] {
            let closed = maxloc_overlap(&sp, d, 0.0);
            let quad = maxloc_overlap_quadrature(&sp, d, 0.0, &spec).unwrap();
            assert_abs_diff_eq!((closed - quad).norm(), 0.0, epsilon = 1e-8);
        }
        assert_eq!(maxloc_overlap(&sp, 1.3, 1.3).re, 1.0);
        assert!(maxloc_overlap(&sp, 500.0, 0.0).norm() < 1e-3);
    }

    #[test]
    fn forward_transform_of_maxloc_is_overlap() {
        let sp = space(0.5, 5.0);
        let s = max_loc_state(&sp, 1.5, 1).unwrap();
        let xs = [-2.0, 0.0, 1.5, 4.0];
        let out = gft_truncated(&sp, &s, &xs, &QuadratureSpec::default()).unwrap();
        for (&xi, v) in xs.iter().zip(&out.values) {
            assert_abs_diff_eq!((v - maxloc_overlap(&sp, xi, 1.5)).norm(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn domain_violation_is_rejected() {
        let sp = space(0.5, 1.0);
        let bad = MomentumState::analytic(
            sp.algebra(),
            Support::Interval { p0: 1.0 },
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
        );
        assert!(matches!(
            gft_truncated(&sp, &bad, &[0.0], &QuadratureSpec::default()),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn tail_integral_matches_quadrature() {
        for (omega, k) in [(2.0, 2), (-0.7, 3), (5.0, 4)] {
            let l = 20.0;
            let rotated = oscillatory_tail(omega, l, k);
            let direct: Complex64 = integrate_finite(
                |s: f64| Complex64::from_polar(s.powi(-k), omega * s),
                l,
                4000.0,
                &QuadratureSpec::default().oscillating(omega.abs()),
            )
            .unwrap();
            // The cut at 4000 leaves O(4000^-k / ω) behind.
            assert_abs_diff_eq!((rotated - direct).norm(), 0.0, epsilon = 1e-6);
        }
        assert_relative_eq!(oscillatory_tail(0.0, 2.0, 3).re, 0.125);
    }

    #[test]
    fn inverse_rejects_band_edge() {
        let sp = space(0.5, 1.0);
        let samples = PositionSamples::from_fn(uniform_grid(-5.0, 5.0, 101), |_| Complex64::default()).unwrap();
        let err = gft_truncated_inverse(&sp, &samples, &[sp.q0()], &InverseOptions::default());
        assert!(matches!(err, Err(Error::EndpointSingularity { .. })));
    }

    #[test]
    fn limit_routes() {
        let r = iterated_limits(1e-4, 1e4).unwrap();
        assert_relative_eq!(r.beta_first, PI / 2e4, max_relative = 1e-14);
        assert_eq!(r.p0_first, 0.0);
    }
}
