//! Deformation functions of the commutator `[x, p] = i hbar f(p)` and the
//! momentum-space geometry they induce.
//!
//! Every quantity is expressed in natural units with `hbar = 1`. The
//! flattening coordinate `z(p) = ∫₀ᵖ dq / f(q)` maps the deformed measure
//! `dp / f(p)` onto the uniform measure `dz`; `u(p) = ∫₀ᵖ dq q / f(q)` enters
//! the squeezed states.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Reduced Planck constant. Fixed to one; unit conversion lives in [`PhysicalUnits`].
pub const HBAR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    /// `f ≡ 1`, the canonical commutator.
    Standard,
    /// `f(p) = sqrt(1 + 2 beta p²)`.
    SqrtGup,
    /// `f(p) = 1 + beta p²`.
    Kmm,
}

/// A deformed Heisenberg algebra: the deformation kind plus its parameter `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedAlgebra {
    kind: AlgebraKind,
    beta: f64,
}

impl DeformedAlgebra {
    pub fn new(kind: AlgebraKind, beta: f64) -> Result<Self> {
        match kind {
            AlgebraKind::Standard => Ok(Self { kind, beta: 0.0 }),
            _ if beta.is_finite() && beta > 0.0 => Ok(Self { kind, beta }),
            _ => Err(Error::InvalidParameter(format!(
                "beta must be finite and positive for {kind:?}, got {beta}"
            ))),
        }
    }

    pub fn standard() -> Self {
        Self {
            kind: AlgebraKind::Standard,
            beta: 0.0,
        }
    }

    pub fn sqrt_gup(beta: f64) -> Result<Self> {
        Self::new(AlgebraKind::SqrtGup, beta)
    }

    pub fn kmm(beta: f64) -> Result<Self> {
        Self::new(AlgebraKind::Kmm, beta)
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    /// Deformation parameter; zero for the standard algebra.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `sqrt(2 beta)`, the inverse momentum scale of the square-root deformation.
    fn root(&self) -> f64 {
        (2.0 * self.beta).sqrt()
    }

    /// Deformation function `f(p)`.
    pub fn f(&self, p: f64) -> Result<f64> {
        ensure_finite("p", p).map(|p| self.f_at(p))
    }

    /// `f(p)` without input validation, for use inside integrands.
    #[inline]
    pub fn f_at(&self, p: f64) -> f64 {
        match self.kind {
            AlgebraKind::Standard => 1.0,
            AlgebraKind::SqrtGup => (1.0 + 2.0 * self.beta * p * p).sqrt(),
            AlgebraKind::Kmm => 1.0 + self.beta * p * p,
        }
    }

    /// Derivative `f'(p)`.
    #[inline]
    pub fn df_at(&self, p: f64) -> f64 {
        match self.kind {
            AlgebraKind::Standard => 0.0,
            AlgebraKind::SqrtGup => 2.0 * self.beta * p / self.f_at(p),
            AlgebraKind::Kmm => 2.0 * self.beta * p,
        }
    }

    /// Flattening coordinate `z(p) = ∫₀ᵖ dq / f(q)`; odd and strictly increasing.
    pub fn z(&self, p: f64) -> Result<f64> {
        ensure_finite("p", p).map(|p| self.z_at(p))
    }

    #[inline]
    pub fn z_at(&self, p: f64) -> f64 {
        let a = p.abs();
        let magnitude = match self.kind {
            AlgebraKind::Standard => a,
            AlgebraKind::SqrtGup => {
                let r = self.root();
                (r * a).asinh() / r
            }
            AlgebraKind::Kmm => {
                let r = self.beta.sqrt();
                (r * a).atan() / r
            }
        };
        magnitude.copysign(p)
    }

    /// Inverse of [`z_at`](Self::z_at). For KMM the argument must satisfy `|z| < π / (2 sqrt(beta))`.
    #[inline]
    pub fn p_of_z(&self, z: f64) -> f64 {
        let a = z.abs();
        let magnitude = match self.kind {
            AlgebraKind::Standard => a,
            AlgebraKind::SqrtGup => {
                let r = self.root();
                (r * a).sinh() / r
            }
            AlgebraKind::Kmm => {
                let r = self.beta.sqrt();
                (r * a).tan() / r
            }
        };
        magnitude.copysign(z)
    }

    /// `u(p) = ∫₀ᵖ dq q / f(q)`; even and nonnegative.
    pub fn u(&self, p: f64) -> Result<f64> {
        ensure_finite("p", p).map(|p| self.u_at(p))
    }

    #[inline]
    pub fn u_at(&self, p: f64) -> f64 {
        let a = p.abs();
        match self.kind {
            AlgebraKind::Standard => 0.5 * a * a,
            AlgebraKind::SqrtGup => {
                // (sqrt(1 + x) - 1) / (2 beta) without cancellation for small x
                let x = 2.0 * self.beta * a * a;
                a * a / ((1.0 + x).sqrt() + 1.0)
            }
            AlgebraKind::Kmm => (self.beta * a * a).ln_1p() / (2.0 * self.beta),
        }
    }

    /// Weight of the deformed Lebesgue measure, `1 / f(p)`.
    pub fn measure_weight(&self, p: f64) -> Result<f64> {
        ensure_finite("p", p).map(|p| self.weight_at(p))
    }

    #[inline]
    pub fn weight_at(&self, p: f64) -> f64 {
        1.0 / self.f_at(p)
    }

    /// `sup z(p)` over the real line: `Some` only when the momentum space
    /// compactifies under `z` (the KMM case).
    pub fn z_bound(&self) -> Option<f64> {
        match self.kind {
            AlgebraKind::Kmm => Some(std::f64::consts::FRAC_PI_2 / self.beta.sqrt()),
            _ => None,
        }
    }
}

/// A symmetric momentum cut-off `[-p0, p0]` together with its image `[-q0, q0]` under `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactSupport {
    pub p0: f64,
    pub q0: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

impl CompactSupport {
    pub fn new(algebra: &DeformedAlgebra, p0: f64) -> Result<Self> {
        if !(p0.is_finite() && p0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "p0 must be finite and positive, got {p0}"
            )));
        }
        let q0 = algebra.z_at(p0);
        Ok(Self {
            p0,
            q0,
            alpha_minus: -q0,
            alpha_plus: q0,
        })
    }

    pub fn width(&self) -> f64 {
        self.alpha_plus - self.alpha_minus
    }
}

/// Conversion between natural units and the `beta`-scaled units used for plotting:
/// momentum in `1/sqrt(beta)`, length in `hbar sqrt(beta)`, time in `m hbar beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub hbar: f64,
    pub beta: f64,
    pub mass: f64,
}

impl PhysicalUnits {
    pub fn new(beta: f64, mass: f64) -> Self {
        Self {
            hbar: HBAR,
            beta,
            mass,
        }
    }

    pub fn momentum_unit(&self) -> f64 {
        1.0 / self.beta.sqrt()
    }

    pub fn length_unit(&self) -> f64 {
        self.hbar * self.beta.sqrt()
    }

    pub fn time_unit(&self) -> f64 {
        self.mass * self.hbar * self.beta
    }

    pub fn momentum(&self, p: f64) -> f64 {
        p / self.momentum_unit()
    }

    pub fn length(&self, x: f64) -> f64 {
        x / self.length_unit()
    }

    pub fn time(&self, t: f64) -> f64 {
        t / self.time_unit()
    }
}
