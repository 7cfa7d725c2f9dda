//! Squeezed states saturating the generalized uncertainty relation on the
//! full momentum line, the position-uncertainty functional over `(Λ, η)`,
//! and a verifier for the generalized relation on arbitrary states.
//!
//! A squeezed state solves `[(x - ξ) + i hbar Λ (p - η)] Φ = 0`, giving
//! `Φ(p) = N exp[(hbar Λ η - i ξ) z(p) / hbar - Λ u(p)]` with `<p> = η`,
//! `<x> = ξ` and `Δx = hbar Λ Δp`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{DeformedAlgebra, HBAR};
use crate::error::{ensure_finite, Error, Result};
use crate::export::Table;
use crate::numerics::{integrate_real_line, minimize_golden, QuadratureSpec};
use crate::state::{Derivative, MomentumState, Support};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedState {
    algebra: DeformedAlgebra,
    lambda: f64,
    eta: f64,
    xi: f64,
}

impl SqueezedState {
    pub fn new(algebra: DeformedAlgebra, lambda: f64, eta: f64, xi: f64) -> Result<Self> {
        ensure_finite("lambda", lambda)?;
        ensure_finite("eta", eta)?;
        ensure_finite("xi", xi)?;
        if lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be strictly positive, got {lambda}")));
        }
        Ok(Self { algebra, lambda, eta, xi })
    }

    pub fn algebra(&self) -> DeformedAlgebra {
        self.algebra
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Unnormalized amplitude, scaled so its modulus peaks at 1 (at `p = η`).
    pub fn unnormalized(&self, p: f64) -> Complex64 {
        let alg = self.algebra;
        let z = alg.z_at(p);
        Complex64::from_polar(log_modulus(&alg, self.lambda, self.eta, p).exp(), -self.xi * z / HBAR)
    }

    /// `d/dp` of [`unnormalized`](Self::unnormalized).
    pub fn unnormalized_derivative(&self, p: f64) -> Complex64 {
        let f = self.algebra.f_at(p);
        let factor = Complex64::new(self.lambda * (self.eta - p), -self.xi / HBAR) / f;
        factor * self.unnormalized(p)
    }

    /// `N` such that `N · unnormalized` has unit norm.
    pub fn normalization(&self, spec: &QuadratureSpec) -> Result<f64> {
        let den = density_integral(&self.algebra, self.lambda, self.eta, |_| 1.0, spec)?;
        if !(den.is_finite() && den > 0.0) {
            return Err(Error::InvalidState(format!("squeezed-state norm² = {den}")));
        }
        Ok(1.0 / den.sqrt())
    }

    /// The normalized state with its analytic derivative.
    pub fn to_momentum_state(&self, spec: &QuadratureSpec) -> Result<MomentumState> {
        let n = self.normalization(spec)?;
        let (a, b) = (*self, *self);
        Ok(MomentumState::analytic(
            self.algebra,
            Support::RealLine,
            move |p| a.unnormalized(p) * n,
            move |p| b.unnormalized_derivative(p) * n,
        ))
    }
}

/// `Λ (η z(p) - u(p))` shifted by its maximum, which sits at `p = η`.
#[inline]
fn log_modulus(alg: &DeformedAlgebra, lambda: f64, eta: f64, p: f64) -> f64 {
    let peak = eta * alg.z_at(eta) - alg.u_at(eta);
    lambda * ((eta * alg.z_at(p) - alg.u_at(p)) - peak)
}

/// `∫ g(p) exp[-2Λ(u - η z)] / f dp` with the peak-shifted exponent.
fn density_integral<G: Fn(f64) -> f64>(
    alg: &DeformedAlgebra,
    lambda: f64,
    eta: f64,
    g: G,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let alg = *alg;
    integrate_real_line(
        move |p| g(p) * (2.0 * log_modulus(&alg, lambda, eta, p)).exp() * alg.weight_at(p),
        spec,
    )
}

/// The normalized amplitude `Φ(p)` at default quadrature settings.
pub fn squeezed_wavefunction(s: &SqueezedState, p: f64) -> Result<Complex64> {
    ensure_finite("p", p)?;
    Ok(s.unnormalized(p) * s.normalization(&QuadratureSpec::default())?)
}

/// Moments of a squeezed state obtained directly from its density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedMoments {
    pub delta_x: f64,
    pub delta_p: f64,
    pub mean_p: f64,
    pub exp_f: f64,
}

/// `Δx² = hbar² Λ² ∫(p² - η²) w / ∫ w` with `w = exp[-2Λ(u - η z)] / f`,
/// together with `Δp`, `<p>` and `<f>` of the same density.
pub fn delta_x_functional(algebra: &DeformedAlgebra, lambda: f64, eta: f64, spec: &QuadratureSpec) -> Result<SqueezedMoments> {
    SqueezedState::new(*algebra, lambda, eta, 0.0)?;
    let den = density_integral(algebra, lambda, eta, |_| 1.0, spec)?;
    let num = density_integral(algebra, lambda, eta, |p| p * p - eta * eta, spec)?;
    let mean_p = density_integral(algebra, lambda, eta, |p| p, spec)? / den;
    let alg = *algebra;
    let exp_f = density_integral(algebra, lambda, eta, |p| alg.f_at(p), spec)? / den;
    let var_p = num / den + eta * eta - mean_p * mean_p;
    Ok(SqueezedMoments {
        delta_x: HBAR * lambda * (num / den).max(0.0).sqrt(),
        delta_p: var_p.max(0.0).sqrt(),
        mean_p,
        exp_f,
    })
}

/// `Δx` alone (two quadratures instead of four).
pub fn delta_x_value(algebra: &DeformedAlgebra, lambda: f64, eta: f64, spec: &QuadratureSpec) -> Result<f64> {
    SqueezedState::new(*algebra, lambda, eta, 0.0)?;
    let den = density_integral(algebra, lambda, eta, |_| 1.0, spec)?;
    let num = density_integral(algebra, lambda, eta, |p| p * p - eta * eta, spec)?;
    Ok(HBAR * lambda * (num / den).max(0.0).sqrt())
}

/// A `(Λ, η)` grid: log-spaced in `Λ`, linear in `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub eta_min: f64,
    pub eta_max: f64,
    pub n_lambda: usize,
    pub n_eta: usize,
}

impl Default for SurfaceGrid {
    fn default() -> Self {
        Self {
            lambda_min: 0.01,
            lambda_max: 10.0,
            eta_min: -3.0,
            eta_max: 3.0,
            n_lambda: 31,
            n_eta: 31,
        }
    }
}

impl SurfaceGrid {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda_min, self.lambda_max, self.eta_min, self.eta_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.lambda_min <= 0.0 || self.lambda_max <= self.lambda_min || self.eta_max <= self.eta_min {
            return Err(Error::InvalidParameter(format!(
                "need 0 < lambda_min < lambda_max and eta_min < eta_max, got {self:?}"
            )));
        }
        if self.n_lambda < 2 || self.n_eta < 2 {
            return Err(Error::InvalidParameter("grid dimensions must be at least 2".into()));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        log_space(self.lambda_min, self.lambda_max, self.n_lambda)
    }

    pub fn etas(&self) -> Vec<f64> {
        let n = self.n_eta;
        (0..n)
            .map(|j| self.eta_min + (self.eta_max - self.eta_min) * j as f64 / (n - 1) as f64)
            .collect()
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub lambda: f64,
    pub eta: f64,
    /// `None` when the quadrature failed at this point.
    pub delta_x: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMinimum {
    pub lambda: f64,
    pub eta: f64,
    pub delta_x: f64,
    /// The minimum sits on `Λ = lambda_min`: `Δx` keeps falling as `Λ → 0`.
    pub at_lambda_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    pub grid: SurfaceGrid,
    /// Row-major in `Λ`, then `η`.
    pub points: Vec<SurfacePoint>,
    pub grid_minimum: SurfaceMinimum,
    pub refined: SurfaceMinimum,
    pub failures: usize,
}

impl Surface {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["lambda", "eta", "delta_x"]);
        for p in &self.points {
            t.push(vec![p.lambda, p.eta, p.delta_x.unwrap_or(f64::NAN)]);
        }
        t
    }
}

/// Tolerance on `ln Λ` and `η` for the coordinate-descent refinement.
pub const REFINE_TOL: f64 = 1e-6;

/// Tabulates `Δx(Λ, η)` and locates its minimum, refined by alternating
/// golden-section searches over `ln Λ` and `η` within one grid cell.
pub fn minimize_delta_x(algebra: &DeformedAlgebra, grid: &SurfaceGrid, spec: &QuadratureSpec) -> Result<Surface> {
    grid.validate()?;
    let lambdas = grid.lambdas();
    let etas = grid.etas();
    let nodes: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| etas.iter().map(move |&e| (l, e)))
        .collect();
    let points: Vec<SurfacePoint> = nodes
        .par_iter()
        .map(|&(lambda, eta)| SurfacePoint {
            lambda,
            eta,
            delta_x: delta_x_value(algebra, lambda, eta, spec).ok(),
        })
        .collect();
    let failures = points.iter().filter(|p| p.delta_x.is_none()).count();
    let best = points
        .iter()
        .filter_map(|p| p.delta_x.map(|d| (p, d)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::Convergence {
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
        })?;
    let is_boundary = |lambda: f64| (lambda.ln() - grid.lambda_min.ln()).abs() <= REFINE_TOL;
    let grid_minimum = SurfaceMinimum {
        lambda: best.0.lambda,
        eta: best.0.eta,
        delta_x: best.1,
        at_lambda_boundary: is_boundary(best.0.lambda),
    };

    let objective = |lambda: f64, eta: f64| delta_x_value(algebra, lambda, eta, spec).unwrap_or(f64::INFINITY);
    let log_step = (grid.lambda_max.ln() - grid.lambda_min.ln()) / (grid.n_lambda - 1) as f64;
    let eta_step = (grid.eta_max - grid.eta_min) / (grid.n_eta - 1) as f64;
    let (mut ll, mut eta, mut value) = (grid_minimum.lambda.ln(), grid_minimum.eta, grid_minimum.delta_x);
    for _ in 0..50 {
        let (e_lo, e_hi) = ((eta - eta_step).max(grid.eta_min), (eta + eta_step).min(grid.eta_max));
        let (new_eta, _) = minimize_golden(|e| objective(ll.exp(), e), e_lo, e_hi, REFINE_TOL);
        let (l_lo, l_hi) = (
            (ll - log_step).max(grid.lambda_min.ln()),
            (ll + log_step).min(grid.lambda_max.ln()),
        );
        let (new_ll, new_value) = minimize_golden(|l| objective(l.exp(), new_eta), l_lo, l_hi, REFINE_TOL);
        let moved = (new_ll - ll).abs().max((new_eta - eta).abs());
        if new_value <= value {
            ll = new_ll;
            eta = new_eta;
            value = new_value;
        }
        if moved < REFINE_TOL {
            break;
        }
    }
    let lambda = ll.exp();
    Ok(Surface {
        grid: *grid,
        points,
        grid_minimum,
        refined: SurfaceMinimum {
            lambda,
            eta,
            delta_x: value,
            at_lambda_boundary: is_boundary(lambda),
        },
        failures,
    })
}

/// Uncertainties of a state and the slack of `Δx Δp ≥ (hbar/2) <f>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub delta_x: f64,
    pub delta_p: f64,
    pub exp_f: f64,
    pub exp_x: f64,
    pub exp_p: f64,
    pub gup_slack: f64,
}

/// Evaluates the report by momentum-space quadrature, with `<x² >` taken as
/// the quadratic form `<x psi, x psi>`. Moments are divided by the computed
/// norm, so small normalization drift does not bias the slack.
pub fn verify_gup(state: &MomentumState, spec: &QuadratureSpec) -> Result<UncertaintyReport> {
    if !state.has_derivative() {
        return Err(Error::UnsupportedState(
            "state has no derivative; position moments need one".into(),
        ));
    }
    let norm = match state.norm_squared(spec) {
        Ok(n) if n.is_finite() && n > 0.0 => n,
        Ok(n) => return Err(Error::UnsupportedState(format!("state norm² = {n}"))),
        Err(Error::Convergence { .. }) => {
            return Err(Error::UnsupportedState("state is not normalizable".into()))
        }
        Err(e) => return Err(e),
    };
    let exp_p = state.momentum_moment(1, spec)? / norm;
    let exp_p2 = state.momentum_moment(2, spec)? / norm;
    let exp_f = state.expected_f(spec)? / norm;
    let exp_x = state.position_mean(spec)? / norm;
    let exp_x2 = state.position_square(spec)? / norm;
    let delta_x = (exp_x2 - exp_x * exp_x).max(0.0).sqrt();
    let delta_p = (exp_p2 - exp_p * exp_p).max(0.0).sqrt();
    Ok(UncertaintyReport {
        delta_x,
        delta_p,
        exp_f,
        exp_x,
        exp_p,
        gup_slack: delta_x * delta_p - 0.5 * HBAR * exp_f.abs(),
    })
}

/// Maximally localized state of the `f = 1 + beta p²` algebra centred at `ξ`:
/// `psi = sqrt(2 sqrt(beta) / π) (1 + beta p²)^(-1/2) exp(-i ξ atan(sqrt(beta) p) / (hbar sqrt(beta)))`,
/// normalized under `dp / f`. It has `Δx = hbar sqrt(beta)` exactly.
pub fn kmm_max_loc_state(beta: f64, xi: f64) -> Result<MomentumState> {
    let algebra = DeformedAlgebra::kmm(beta)?;
    ensure_finite("xi", xi)?;
    let c = (2.0 * beta.sqrt() / std::f64::consts::PI).sqrt();
    let amp = move |p: f64| {
        let f = 1.0 + beta * p * p;
        Complex64::from_polar(c / f.sqrt(), -xi * algebra.z_at(p) / HBAR)
    };
    let deriv = move |p: f64| {
        let f = 1.0 + beta * p * p;
        amp(p) * Complex64::new(-beta * p, -xi / HBAR) / f
    };
    Ok(MomentumState::analytic(algebra, Support::RealLine, amp, deriv))
}

/// Normalized Gaussian `exp(-(p - mean)² / (4 sigma²))` under the algebra's measure.
pub fn gaussian_state(algebra: DeformedAlgebra, mean: f64, sigma: f64, spec: &QuadratureSpec) -> Result<MomentumState> {
    ensure_finite("mean", mean)?;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let s2 = 4.0 * sigma * sigma;
    let amp = move |p: f64| Complex64::new((-(p - mean) * (p - mean) / s2).exp(), 0.0);
    let state = MomentumState::new(
        algebra,
        Support::RealLine,
        Arc::new(amp),
        Derivative::Analytic(Arc::new(move |p| amp(p) * (-2.0 * (p - mean) / s2))),
    );
    state.normalized(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn alg() -> DeformedAlgebra {
        DeformedAlgebra::sqrt_gup(0.5).unwrap()
    }

    #[test]
    fn modulus_is_even_at_zero_eta() {
        let s = SqueezedState::new(alg(), 1.0, 0.0, 0.7).unwrap();
        for p in [0.3, 1.0, 4.0] {
            assert_eq!(s.unnormalized(p).norm(), s.unnormalized(-p).norm());
        }
    }

    #[test]
    fn mean_momentum_equals_eta() {
        let spec = QuadratureSpec::default();
        let m = delta_x_functional(&alg(), 1.0, 0.0, &spec).unwrap();
        assert_abs_diff_eq!(m.mean_p, 0.0, epsilon = 1e-12);
        let m = delta_x_functional(&alg(), 1.0, 0.5, &spec).unwrap();
        assert_abs_diff_eq!(m.mean_p, 0.5, epsilon = 1e-6);
        let s = SqueezedState::new(alg(), 1.0, 0.5, 0.0).unwrap().to_momentum_state(&spec).unwrap();
        assert_abs_diff_eq!(s.momentum_moment(1, &spec).unwrap(), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn functional_ordering_in_lambda_and_eta() {
        let spec = QuadratureSpec::default();
        let dx = |l, e| delta_x_value(&alg(), l, e, &spec).unwrap();
        assert!(dx(0.01, 0.0) < dx(0.1, 0.0));
        assert!(dx(0.1, 0.0) < dx(1.0, 0.0));
        assert!(dx(1.0, 0.0) <= dx(1.0, 1.0));
        assert!(dx(1.0, 0.0) <= dx(1.0, -1.0));
    }

    #[test]
    fn saturation_identity() {
        let spec = QuadratureSpec::default();
        let m = delta_x_functional(&alg(), 1.0, 0.0, &spec).unwrap();
        assert_relative_eq!(m.delta_x, HBAR * m.delta_p, max_relative = 1e-6);
        assert_relative_eq!(1.0, m.exp_f / (2.0 * m.delta_p * m.delta_p), max_relative = 1e-6);
    }

    #[test]
    fn normalized_wavefunction_has_unit_norm() {
        let s = SqueezedState::new(alg(), 0.5, 0.3, 1.2).unwrap();
        let spec = QuadratureSpec::default();
        let st = s.to_momentum_state(&spec).unwrap();
        assert_abs_diff_eq!(st.norm_squared(&spec).unwrap(), 1.0, epsilon = 1e-9);
        let direct = squeezed_wavefunction(&s, 0.4).unwrap();
        assert_abs_diff_eq!((direct - st.amplitude(0.4)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        assert!(SqueezedState::new(alg(), 0.0, 0.0, 0.0).is_err());
        assert!(delta_x_functional(&alg(), -1.0, 0.0, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn squeezed_state_saturates_gup() {
        let spec = QuadratureSpec::default();
        let s = SqueezedState::new(alg(), 0.7, -0.4, 0.9).unwrap().to_momentum_state(&spec).unwrap();
        let r = verify_gup(&s, &spec).unwrap();
        assert_abs_diff_eq!(r.gup_slack, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.exp_x, 0.9, epsilon = 1e-8);
        assert_abs_diff_eq!(r.exp_p, -0.4, epsilon = 1e-6);
    }

    #[test]
    fn kmm_state_has_minimal_length() {
        let spec = QuadratureSpec::default();
        let r = verify_gup(&kmm_max_loc_state(1.0, 0.0).unwrap(), &spec).unwrap();
        assert_abs_diff_eq!(r.delta_x, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.delta_p, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r.exp_f, 2.0, epsilon = 1e-8);
        assert!(r.gup_slack >= -1e-7);
        let shifted = verify_gup(&kmm_max_loc_state(2.0, 1.5).unwrap(), &spec).unwrap();
        assert_abs_diff_eq!(shifted.exp_x, 1.5, epsilon = 1e-8);
        assert_abs_diff_eq!(shifted.delta_x, 2f64.sqrt(), epsilon = 1e-7);
    }

    #[test]
    fn standard_gaussian_is_minimum_uncertainty() {
        let spec = QuadratureSpec::default();
        let g = gaussian_state(DeformedAlgebra::standard(), 0.0, 0.8, &spec).unwrap();
        let r = verify_gup(&g, &spec).unwrap();
        assert_abs_diff_eq!(r.delta_x * r.delta_p, 0.5, epsilon = 1e-7);
    }

    #[test]
    fn standard_surface_reaches_lambda_boundary() {
        let grid = SurfaceGrid {
            lambda_min: 0.05,
            lambda_max: 5.0,
            eta_min: -1.0,
            eta_max: 1.0,
            n_lambda: 5,
            n_eta: 5,
        };
        let s = minimize_delta_x(&DeformedAlgebra::standard(), &grid, &QuadratureSpec::default()).unwrap();
        assert_eq!(s.points.len(), 25);
        assert!(s.refined.at_lambda_boundary);
        // Gaussian squeezed state: Δp² = 1/(2Λ), Δx = Λ Δp = sqrt(Λ/2)
        assert_relative_eq!(s.refined.delta_x, (0.05f64 / 2.0).sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn deformed_surface_minimum_on_eta_axis() {
        let grid = SurfaceGrid {
            lambda_min: 0.05,
            lambda_max: 5.0,
            eta_min: -1.0,
            eta_max: 1.5,
            n_lambda: 4,
            n_eta: 6,
        };
        let s = minimize_delta_x(&alg(), &grid, &QuadratureSpec::default()).unwrap();
        assert!(s.refined.at_lambda_boundary);
        assert!(s.refined.eta.abs() < 1e-3, "{:?}", s.refined);
        assert!(s.refined.delta_x <= s.grid_minimum.delta_x);
    }

    #[test]
    fn grid_validation() {
        let g = SurfaceGrid { n_lambda: 1, ..SurfaceGrid::default() };
        assert!(g.validate().is_err());
        let g = SurfaceGrid { lambda_min: 0.0, ..SurfaceGrid::default() };
        assert!(g.validate().is_err());
        let l = SurfaceGrid::default().lambdas();
        assert_eq!((l[0], l[30]), (0.01, 10.0));
    }
}
