//! Free Gaussian wave packets in ordinary quantum mechanics, the full
//! deformed theory and the truncated theory, with their spreading and
//! dispersion relations.
//!
//! Packets evolve under `H = p² / 2m`, which only attaches the phase
//! `exp(-i t p² / (2 m hbar))` in momentum space. Operator moments are taken
//! there with the analytic derivative of the evolved amplitude; position
//! densities are produced by the framework's transform for plotting.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{DeformedAlgebra, HBAR};
use crate::compacttheory::{gft_truncated, TruncatedSpace};
use crate::error::{ensure_finite, Error, Result};
use crate::export::Table;
use crate::fulltheory::{gft_full, uniform_grid, PositionSamples};
use crate::numerics::{find_root, QuadratureSpec};
use crate::state::{MomentumState, Support};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Framework {
    StandardQm,
    FullGup,
    CompactGup,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    pub framework: Framework,
    /// Ignored for [`Framework::StandardQm`].
    pub beta: f64,
    /// Momentum cut-off; required for [`Framework::CompactGup`].
    pub p0: Option<f64>,
    /// Gaussian centre. `None` calibrates it so that `<p> = target_mean_p`.
    pub center_param: Option<f64>,
    pub sigma_p: f64,
    pub mass: f64,
    pub target_mean_p: f64,
}

impl WavePacketSpec {
    /// The common defaults: `σ_p = 1`, `<p> = 1`, `m = 1`, `beta = 1`.
    pub fn new(framework: Framework) -> Self {
        Self {
            framework,
            beta: 1.0,
            p0: match framework {
                Framework::CompactGup => Some(5.0),
                _ => None,
            },
            center_param: None,
            sigma_p: 1.0,
            mass: 1.0,
            target_mean_p: 1.0,
        }
    }

    pub fn with_p0(mut self, p0: f64) -> Self {
        self.p0 = Some(p0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("target_mean_p", self.target_mean_p)?;
        if !(self.sigma_p.is_finite() && self.sigma_p > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma_p must be positive, got {}", self.sigma_p)));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        if self.framework != Framework::StandardQm && !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta)));
        }
        if self.framework == Framework::CompactGup {
            let p0 = self
                .p0
                .ok_or_else(|| Error::InvalidParameter("the compact framework needs p0".into()))?;
            if !(p0.is_finite() && p0 > 0.0) {
                return Err(Error::InvalidParameter(format!("p0 must be positive, got {p0}")));
            }
            if self.target_mean_p.abs() >= p0 {
                return Err(Error::InvalidParameter(format!(
                    "|<p>| = {} must lie inside the cut-off p0 = {p0}",
                    self.target_mean_p.abs()
                )));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> Result<DeformedAlgebra> {
        match self.framework {
            Framework::StandardQm => Ok(DeformedAlgebra::standard()),
            _ => DeformedAlgebra::sqrt_gup(self.beta),
        }
    }

    pub fn space(&self) -> Result<Option<TruncatedSpace>> {
        match self.framework {
            Framework::CompactGup => Ok(Some(TruncatedSpace::new(self.algebra()?, self.p0.unwrap_or(f64::NAN))?)),
            _ => Ok(None),
        }
    }

    /// Coefficient `c` of the Gaussian `exp(-c (p - centre)²)`.
    fn width_coefficient(&self) -> f64 {
        match self.framework {
            Framework::StandardQm => 1.0 / (2.0 * self.sigma_p),
            _ => self.beta / (2.0 * self.sigma_p),
        }
    }
}

/// A built packet at `t = 0`.
#[derive(Debug, Clone)]
pub struct Packet {
    pub spec: WavePacketSpec,
    /// The Gaussian centre actually used (`γ`, `ν` or `κ`).
    pub center: f64,
    pub state: MomentumState,
}

/// Unnormalized packet amplitude with the given centre. The truncated packet
/// carries one `cos(π z / (2 q0))` factor, which makes it vanish at `±p0`.
fn raw_packet(spec: &WavePacketSpec, center: f64) -> Result<MomentumState> {
    let alg = spec.algebra()?;
    let c = spec.width_coefficient();
    let gauss = move |p: f64| (-c * (p - center) * (p - center)).exp();
    let dgauss = move |p: f64| -2.0 * c * (p - center) * gauss(p);
    Ok(match spec.space()? {
        None => MomentumState::analytic(
            alg,
            Support::RealLine,
            move |p| Complex64::new(gauss(p), 0.0),
            move |p| Complex64::new(dgauss(p), 0.0),
        ),
        Some(space) => {
            let (p0, q0) = (space.p0(), space.q0());
            let w = FRAC_PI_2 / q0;
            MomentumState::analytic(
                alg,
                Support::Interval { p0 },
                move |p| {
                    if p.abs() >= p0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    Complex64::new(gauss(p) * (w * alg.z_at(p)).cos(), 0.0)
                },
                move |p| {
                    if p.abs() > p0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let (s, co) = (w * alg.z_at(p)).sin_cos();
                    Complex64::new(dgauss(p) * co - gauss(p) * s * w / alg.f_at(p), 0.0)
                },
            )
        }
    })
}

fn mean_p(state: &MomentumState, spec: &QuadratureSpec) -> Result<f64> {
    let norm = state.norm_squared(spec)?;
    Ok(state.momentum_moment(1, spec)? / norm)
}

/// Builds and normalizes the packet, solving for the centre when it is not given.
pub fn build_packet(spec: &WavePacketSpec, qspec: &QuadratureSpec) -> Result<Packet> {
    spec.validate()?;
    let center = match (spec.center_param, spec.framework) {
        (Some(c), _) => ensure_finite("center_param", c)?,
        (None, Framework::StandardQm) => spec.target_mean_p,
        (None, _) => calibrate_center(spec, qspec)?,
    };
    let state = raw_packet(spec, center)?.normalized(qspec)?;
    Ok(Packet {
        spec: *spec,
        center,
        state,
    })
}

fn calibrate_center(spec: &WavePacketSpec, qspec: &QuadratureSpec) -> Result<f64> {
    let target = spec.target_mean_p;
    let residual = |c: f64| -> f64 {
        raw_packet(spec, c)
            .and_then(|s| mean_p(&s, qspec))
            .map(|m| m - target)
            .unwrap_or(f64::NAN)
    };
    // <p> increases with the centre; widen a bracket around the target.
    let mut step = 1.0;
    let (mut lo, mut hi) = (target - step, target + step);
    let (mut r_lo, mut r_hi) = (residual(lo), residual(hi));
    for _ in 0..40 {
        if r_lo < 0.0 && r_hi > 0.0 {
            let tol = 1e-12 * (1.0 + target.abs());
            return find_root(residual, lo, hi, tol).map_err(|e| Error::Calibration(format!("{e}")));
        }
        if !(r_lo.is_finite() && r_hi.is_finite()) {
            break;
        }
        step *= 2.0;
        if r_lo >= 0.0 {
            lo -= step;
            r_lo = residual(lo);
        }
        if r_hi <= 0.0 {
            hi += step;
            r_hi = residual(hi);
        }
    }
    Err(Error::Calibration(format!(
        "no Gaussian centre gives <p> = {target} for {:?}",
        spec.framework
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadingReport {
    pub times: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub delta_x: Vec<f64>,
    /// `Δx(t) / Δx(0)`.
    pub delta_x_rel: Vec<f64>,
    /// `<p>` at each time; constant under free evolution.
    pub mean_p: Vec<f64>,
    /// `<f(p) p> / m`, the velocity of `<x>`.
    pub velocity: f64,
}

impl SpreadingReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "mean_x", "delta_x", "delta_x_rel", "mean_p"]);
        for i in 0..self.times.len() {
            t.push(vec![self.times[i], self.mean_x[i], self.delta_x[i], self.delta_x_rel[i], self.mean_p[i]]);
        }
        t
    }
}

/// `(<x>, Δx, <p>)` of a state, with `<x²>` from the quadratic form.
fn position_moments(state: &MomentumState, qspec: &QuadratureSpec) -> Result<(f64, f64, f64)> {
    let norm = state.norm_squared(qspec)?;
    let x = state.position_mean(qspec)? / norm;
    let x2 = state.position_square(qspec)? / norm;
    let p = state.momentum_moment(1, qspec)? / norm;
    Ok((x, (x2 - x * x).max(0.0).sqrt(), p))
}

/// Position mean and spread of the evolved packet at each time.
pub fn spreading_report(packet: &Packet, times: &[f64], qspec: &QuadratureSpec) -> Result<SpreadingReport> {
    let mass = packet.spec.mass;
    let alg = *packet.state.algebra();
    let velocity = packet
        .state
        .integrate_measure(|p| alg.f_at(p) * p * packet.state.amplitude(p).norm_sqr(), qspec)?
        / mass;
    let (_, dx0, _) = position_moments(&packet.state, qspec)?;
    let mut report = SpreadingReport {
        times: times.to_vec(),
        mean_x: Vec::with_capacity(times.len()),
        delta_x: Vec::with_capacity(times.len()),
        delta_x_rel: Vec::with_capacity(times.len()),
        mean_p: Vec::with_capacity(times.len()),
        velocity,
    };
    for &t in times {
        ensure_finite("t", t)?;
        let (x, dx, p) = position_moments(&packet.state.free_evolution(t, mass), qspec)?;
        report.mean_x.push(x);
        report.delta_x.push(dx);
        report.delta_x_rel.push(dx / dx0);
        report.mean_p.push(p);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: f64,
    /// Position (or quasi-position) amplitude on the frame's grid.
    pub samples: PositionSamples,
    /// Trapezoidal `∫ |psi|²` over the grid before any rescaling.
    pub grid_norm: f64,
}

impl Frame {
    /// Mean and spread of `|psi|²` on the grid. For the truncated theory these
    /// are quasi-position moments, not operator expectations.
    pub fn density_moments(&self) -> (f64, f64) {
        let h = self.samples.grid[1] - self.samples.grid[0];
        let rho: Vec<f64> = self.samples.values.iter().map(|v| v.norm_sqr()).collect();
        let m0: f64 = rho.iter().sum::<f64>() * h;
        let m1: f64 = self.samples.grid.iter().zip(&rho).map(|(x, r)| x * r).sum::<f64>() * h / m0;
        let m2: f64 = self.samples.grid.iter().zip(&rho).map(|(x, r)| x * x * r).sum::<f64>() * h / m0;
        (m1, (m2 - m1 * m1).max(0.0).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFrames {
    pub framework: Framework,
    pub frames: Vec<Frame>,
}

impl DensityFrames {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "x", "abs2"]);
        for f in &self.frames {
            for (&x, v) in f.samples.grid.iter().zip(&f.samples.values) {
                t.push(vec![f.t, x, v.norm_sqr()]);
            }
        }
        t
    }
}

/// Amplitudes `Ψ(x, t)` on a uniform grid for each time.
///
/// The grid is extended, at its own spacing, until it covers
/// `<x>(t) ± 8 Δx(t)`. Standard and full-theory frames are the exact
/// transforms and integrate to one; truncated-theory frames are
/// quasi-position amplitudes rescaled to unit grid norm.
pub fn evolve_and_project(packet: &Packet, times: &[f64], grid: &[f64], qspec: &QuadratureSpec) -> Result<DensityFrames> {
    if grid.len() < 3 {
        return Err(Error::UnsupportedGrid("need at least three grid points".into()));
    }
    let base = PositionSamples::new(grid.to_vec(), vec![Complex64::default(); grid.len()])?;
    let h = base.uniform_step()?;
    let report = spreading_report(packet, times, qspec)?;
    let space = packet.spec.space()?;
    let mut frames = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let lo = grid[0].min(report.mean_x[i] - 8.0 * report.delta_x[i]);
        let hi = grid[grid.len() - 1].max(report.mean_x[i] + 8.0 * report.delta_x[i]);
        let below = ((grid[0] - lo) / h).ceil() as usize;
        let above = ((hi - grid[grid.len() - 1]) / h).ceil() as usize;
        let start = grid[0] - below as f64 * h;
        let xs = uniform_grid(start, start + (grid.len() + below + above - 1) as f64 * h, grid.len() + below + above);
        let evolved = packet.state.free_evolution(t, packet.spec.mass);
        let mut samples = match &space {
            None => gft_full(&evolved, &xs, qspec)?,
            Some(space) => gft_truncated(space, &evolved, &xs, qspec)?,
        };
        let grid_norm = samples.norm_squared()?;
        if space.is_some() && grid_norm > 0.0 {
            let s = grid_norm.sqrt().recip();
            samples.values.iter_mut().for_each(|v| *v *= s);
        }
        frames.push(Frame { t, samples, grid_norm });
    }
    Ok(DensityFrames {
        framework: packet.spec.framework,
        frames,
    })
}

/// `ω(k)` of free plane waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRelation {
    pub framework: Framework,
    pub beta: f64,
    pub mass: f64,
    /// Cut-off for the truncated framework, bounding `|k| ≤ z(p0) / hbar`.
    pub p0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega: f64,
    pub group_velocity: f64,
    pub group_dispersion: f64,
}

impl DispersionRelation {
    pub fn k_max(&self) -> Result<Option<f64>> {
        match self.framework {
            Framework::CompactGup => {
                let p0 = self
                    .p0
                    .ok_or_else(|| Error::InvalidParameter("the compact framework needs p0".into()))?;
                Ok(Some(TruncatedSpace::new(DeformedAlgebra::sqrt_gup(self.beta)?, p0)?.q0() / HBAR))
            }
            _ => Ok(None),
        }
    }

    /// `ω, ω', ω''` at `k`. Standard: `hbar k² / 2m`. Deformed:
    /// `sinh²(sqrt(2 beta) hbar k) / (4 m hbar beta)`.
    pub fn evaluate(&self, k: f64) -> Result<DispersionPoint> {
        ensure_finite("k", k)?;
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        if let Some(k_max) = self.k_max()? {
            if k.abs() > k_max {
                return Err(Error::WavenumberBound { k, k_max });
            }
        }
        let m = self.mass;
        Ok(match self.framework {
            Framework::StandardQm => DispersionPoint {
                k,
                omega: HBAR * k * k / (2.0 * m),
                group_velocity: HBAR * k / m,
                group_dispersion: HBAR / m,
            },
            _ => {
                DeformedAlgebra::sqrt_gup(self.beta)?;
                let a = (2.0 * self.beta).sqrt() * HBAR;
                let scale = 4.0 * m * HBAR * self.beta;
                let s = (a * k).sinh();
                DispersionPoint {
                    k,
                    omega: s * s / scale,
                    group_velocity: a * (2.0 * a * k).sinh() / scale,
                    group_dispersion: 2.0 * a * a * (2.0 * a * k).cosh() / scale,
                }
            }
        })
    }

    /// Table with columns `k,omega,group_velocity,group_dispersion`.
    pub fn table(&self, ks: &[f64]) -> Result<Table> {
        let mut t = Table::new(["k", "omega", "group_velocity", "group_dispersion"]);
        for &k in ks {
            let d = self.evaluate(k)?;
            t.push(vec![d.k, d.omega, d.group_velocity, d.group_dispersion]);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn standard_packet_is_centred_exactly() {
        let q = QuadratureSpec::default();
        let p = build_packet(&WavePacketSpec::new(Framework::StandardQm), &q).unwrap();
        assert_eq!(p.center, 1.0);
        assert_abs_diff_eq!(p.state.momentum_moment(1, &q).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn full_packet_is_calibrated() {
        let q = QuadratureSpec::default();
        let p = build_packet(&WavePacketSpec::new(Framework::FullGup), &q).unwrap();
        assert_abs_diff_eq!(p.state.momentum_moment(1, &q).unwrap(), 1.0, epsilon = 1e-8);
        assert!(p.center > 1.0);
    }

    #[test]
    fn compact_packet_vanishes_at_cutoff() {
        let q = QuadratureSpec::default();
        let p = build_packet(&WavePacketSpec::new(Framework::CompactGup).with_p0(3.5), &q).unwrap();
        let amp = p.state.amplitude_fn();
        assert_eq!(amp(3.5).norm(), 0.0);
        assert_eq!(amp(-3.5).norm(), 0.0);
        assert_abs_diff_eq!(p.state.momentum_moment(1, &q).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn compact_target_outside_cutoff_is_rejected() {
        let mut s = WavePacketSpec::new(Framework::CompactGup).with_p0(1.0);
        s.target_mean_p = 1.0;
        assert!(build_packet(&s, &QuadratureSpec::default()).is_err());
        s.target_mean_p = 0.999;
        assert!(matches!(
            build_packet(&s, &QuadratureSpec::default()),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn standard_spreading_matches_closed_form() {
        let q = QuadratureSpec::default();
        let p = build_packet(&WavePacketSpec::new(Framework::StandardQm), &q).unwrap();
        let r = spreading_report(&p, &[0.0, 1.0, 3.0], &q).unwrap();
        // |psi|² ∝ exp(-(p-1)²): Δp² = 1/2, Δx0² = 1/2
        for (i, &t) in r.times.iter().enumerate() {
            assert_relative_eq!(r.delta_x[i].powi(2), 0.5 + 0.5 * t * t, max_relative = 1e-8);
            assert_abs_diff_eq!(r.mean_x[i], t, epsilon = 1e-9);
            assert_abs_diff_eq!(r.mean_p[i], 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn dispersion_values() {
        let d = DispersionRelation {
            framework: Framework::FullGup,
            beta: 0.5,
            mass: 1.0,
            p0: None,
        };
        assert_relative_eq!(d.evaluate(1.0).unwrap().omega, 1f64.sinh().powi(2) / 2.0, max_relative = 1e-14);
        let zero = d.evaluate(0.0).unwrap();
        assert_eq!((zero.omega, zero.group_velocity), (0.0, 0.0));
        assert_relative_eq!(zero.group_dispersion, 1.0, max_relative = 1e-14);
        let h = 1e-5;
        for k in [-3.0, -1.1, 0.4, 2.5] {
            let fd = (d.evaluate(k + h).unwrap().omega - d.evaluate(k - h).unwrap().omega) / (2.0 * h);
            assert_relative_eq!(d.evaluate(k).unwrap().group_velocity, fd, max_relative = 1e-6);
        }
        let c = DispersionRelation {
            framework: Framework::CompactGup,
            p0: Some(1.0),
            ..d
        };
        assert!(matches!(c.evaluate(2.0), Err(Error::WavenumberBound { .. })));
        assert!(c.evaluate(0.8).is_ok());
    }
}
