//! Momentum-space wavefunctions on the deformed Hilbert space
//! `L²(support, dp / f(p))`.
//!
//! Position acts as `x = i hbar f(p) d/dp`. Second moments of position are
//! taken through the quadratic form `<x psi, x psi> = hbar² ∫ f |psi'|² dp`,
//! which needs only first derivatives of the amplitude.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{DeformedAlgebra, HBAR};
use crate::error::{Error, Result};
use crate::numerics::{integrate_finite, integrate_real_line, Integrand, QuadratureSpec};

pub type Amplitude = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Where the wavefunction lives in momentum space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Support {
    RealLine,
    /// The truncated interval `[-p0, p0]`.
    Interval { p0: f64 },
}

/// How `d psi / dp` is obtained.
#[derive(Clone)]
pub enum Derivative {
    Analytic(Amplitude),
    /// Five-point differences in the flattening variable `z`.
    FiniteDifference,
    /// The state cannot be differentiated (tabulated data, for instance).
    Unavailable,
}

/// Step in `z` used by [`Derivative::FiniteDifference`].
pub const FD_STEP: f64 = 1e-4;

#[derive(Clone)]
pub struct MomentumState {
    algebra: DeformedAlgebra,
    support: Support,
    amplitude: Amplitude,
    derivative: Derivative,
}

impl fmt::Debug for MomentumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let derivative = match self.derivative {
            Derivative::Analytic(_) => "analytic",
            Derivative::FiniteDifference => "finite-difference",
            Derivative::Unavailable => "unavailable",
        };
        f.debug_struct("MomentumState")
            .field("algebra", &self.algebra)
            .field("support", &self.support)
            .field("derivative", &derivative)
            .finish()
    }
}

impl MomentumState {
    pub fn new(algebra: DeformedAlgebra, support: Support, amplitude: Amplitude, derivative: Derivative) -> Self {
        Self {
            algebra,
            support,
            amplitude,
            derivative,
        }
    }

    /// Builds a state from an amplitude and its analytic derivative.
    pub fn analytic<A, D>(algebra: DeformedAlgebra, support: Support, amplitude: A, derivative: D) -> Self
    where
        A: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(algebra, support, Arc::new(amplitude), Derivative::Analytic(Arc::new(derivative)))
    }

    pub fn algebra(&self) -> &DeformedAlgebra {
        &self.algebra
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn amplitude_fn(&self) -> Amplitude {
        self.amplitude.clone()
    }

    pub fn has_derivative(&self) -> bool {
        !matches!(self.derivative, Derivative::Unavailable)
    }

    /// `psi(p)`; zero outside a truncated support.
    #[inline]
    pub fn amplitude(&self, p: f64) -> Complex64 {
        match self.support {
            Support::Interval { p0 } if p.abs() > p0 => Complex64::new(0.0, 0.0),
            _ => (self.amplitude)(p),
        }
    }

    /// `d psi / dp`.
    pub fn derivative(&self, p: f64) -> Result<Complex64> {
        match &self.derivative {
            Derivative::Analytic(d) => Ok(d(p)),
            Derivative::FiniteDifference => Ok(self.finite_difference(p)),
            Derivative::Unavailable => Err(Error::UnsupportedState(
                "state carries no derivative; position moments are undefined".into(),
            )),
        }
    }

    fn finite_difference(&self, p: f64) -> Complex64 {
        let alg = self.algebra;
        let z = alg.z_at(p);
        let h = FD_STEP;
        let at = |k: f64| (self.amplitude)(alg.p_of_z(z + k * h));
        // Stay inside the support near a cut-off by switching to one-sided stencils.
        let (lo, hi) = match self.support {
            Support::Interval { p0 } => {
                let q0 = alg.z_at(p0);
                (z - 2.0 * h < -q0, z + 2.0 * h > q0)
            }
            Support::RealLine => (false, false),
        };
        let dpsi_dz = if hi && !lo {
            (at(-4.0) * 3.0 - at(-3.0) * 16.0 + at(-2.0) * 36.0 - at(-1.0) * 48.0 + at(0.0) * 25.0) / (12.0 * h)
        } else if lo && !hi {
            (at(0.0) * -25.0 + at(1.0) * 48.0 - at(2.0) * 36.0 + at(3.0) * 16.0 - at(4.0) * 3.0) / (12.0 * h)
        } else {
            (at(-2.0) - at(-1.0) * 8.0 + at(1.0) * 8.0 - at(2.0)) / (12.0 * h)
        };
        dpsi_dz / alg.f_at(p)
    }

    /// `∫ g(p) dp / f(p)` over the support.
    pub fn integrate_measure<T, G>(&self, g: G, spec: &QuadratureSpec) -> Result<T>
    where
        T: Integrand,
        G: Fn(f64) -> T,
    {
        let alg = self.algebra;
        let weighted = move |p: f64| g(p) * alg.weight_at(p);
        self.integrate_plain(weighted, spec)
    }

    /// `∫ g(p) dp` over the support.
    pub fn integrate_plain<T, G>(&self, g: G, spec: &QuadratureSpec) -> Result<T>
    where
        T: Integrand,
        G: Fn(f64) -> T,
    {
        match self.support {
            Support::RealLine => integrate_real_line(g, spec),
            Support::Interval { p0 } => integrate_finite(g, -p0, p0, spec),
        }
    }

    pub fn norm_squared(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.integrate_measure(|p| self.amplitude(p).norm_sqr(), spec)
    }

    /// Rescales the state to unit norm.
    pub fn normalized(self, spec: &QuadratureSpec) -> Result<Self> {
        let n2 = match self.norm_squared(spec) {
            Ok(n2) => n2,
            Err(Error::Convergence { .. }) => {
                return Err(Error::InvalidState("normalization integral does not converge".into()))
            }
            Err(e) => return Err(e),
        };
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::InvalidState(format!("norm² = {n2} is not positive and finite")));
        }
        Ok(self.scaled(Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }

    pub fn scaled(self, c: Complex64) -> Self {
        let amp = self.amplitude;
        let amplitude: Amplitude = Arc::new(move |p| c * amp(p));
        let derivative = match self.derivative {
            Derivative::Analytic(d) => Derivative::Analytic(Arc::new(move |p| c * d(p))),
            other => other,
        };
        Self {
            algebra: self.algebra,
            support: self.support,
            amplitude,
            derivative,
        }
    }

    /// `a self + b other`. Both states must share algebra and support.
    pub fn superpose(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.algebra != other.algebra || self.support != other.support {
            return Err(Error::InvalidParameter(
                "superposed states must share algebra and support".into(),
            ));
        }
        let (f1, f2) = (self.amplitude.clone(), other.amplitude.clone());
        let amplitude: Amplitude = Arc::new(move |p| a * f1(p) + b * f2(p));
        let derivative = match (&self.derivative, &other.derivative) {
            (Derivative::Analytic(d1), Derivative::Analytic(d2)) => {
                let (d1, d2) = (d1.clone(), d2.clone());
                Derivative::Analytic(Arc::new(move |p| a * d1(p) + b * d2(p)))
            }
            (Derivative::Unavailable, _) | (_, Derivative::Unavailable) => Derivative::Unavailable,
            _ => Derivative::FiniteDifference,
        };
        Ok(Self {
            algebra: self.algebra,
            support: self.support,
            amplitude,
            derivative,
        })
    }

    /// Free evolution under `H = p² / 2m`: multiplies by `exp(-i t p² / (2 m hbar))`.
    pub fn free_evolution(&self, t: f64, mass: f64) -> Self {
        let amp = self.amplitude.clone();
        let phase = move |p: f64| Complex64::from_polar(1.0, -t * p * p / (2.0 * mass * HBAR));
        let amplitude: Amplitude = Arc::new(move |p| amp(p) * phase(p));
        let derivative = match &self.derivative {
            Derivative::Analytic(d) => {
                let (d, amp) = (d.clone(), self.amplitude.clone());
                Derivative::Analytic(Arc::new(move |p| {
                    let chirp = Complex64::new(0.0, -t * p / (mass * HBAR));
                    (d(p) + chirp * amp(p)) * phase(p)
                }))
            }
            other => other.clone(),
        };
        Self {
            algebra: self.algebra,
            support: self.support,
            amplitude,
            derivative,
        }
    }

    /// `<self | other>` under the deformed measure.
    pub fn inner(&self, other: &Self, spec: &QuadratureSpec) -> Result<Complex64> {
        self.integrate_measure(|p| self.amplitude(p).conj() * other.amplitude(p), spec)
    }

    /// `<p^k>` for a normalized state.
    pub fn momentum_moment(&self, k: i32, spec: &QuadratureSpec) -> Result<f64> {
        self.integrate_measure(|p| p.powi(k) * self.amplitude(p).norm_sqr(), spec)
    }

    /// `<f(p)> = ∫ |psi|² dp`.
    pub fn expected_f(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.integrate_plain(|p| self.amplitude(p).norm_sqr(), spec)
    }

    /// `<x> = Re ∫ conj(psi) i hbar psi' dp`.
    pub fn position_mean(&self, spec: &QuadratureSpec) -> Result<f64> {
        if !self.has_derivative() {
            self.derivative(0.0)?;
        }
        self.integrate_plain(
            |p| {
                let d = self.derivative(p).unwrap_or_default();
                (self.amplitude(p).conj() * Complex64::new(0.0, HBAR) * d).re
            },
            spec,
        )
    }

    /// `<x† x> = hbar² ∫ f |psi'|² dp`.
    pub fn position_square(&self, spec: &QuadratureSpec) -> Result<f64> {
        if !self.has_derivative() {
            self.derivative(0.0)?;
        }
        let alg = self.algebra;
        self.integrate_plain(
            |p| HBAR * HBAR * alg.f_at(p) * self.derivative(p).unwrap_or_default().norm_sqr(),
            spec,
        )
    }

    /// Samples `psi` on a momentum grid.
    pub fn sample(&self, grid: &[f64]) -> Vec<Complex64> {
        grid.iter().map(|&p| self.amplitude(p)).collect()
    }
}
