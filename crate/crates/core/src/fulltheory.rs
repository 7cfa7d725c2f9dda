//! Position representation of the non-truncated theory.
//!
//! In the flattening variable `z = z(p)` the deformed measure is `dz`, so the
//! generalized Fourier transform
//! `psi(x) = (2π hbar)^(-1/2) ∫ dp / f(p) exp(i x z(p) / hbar) psi~(p)`
//! is an ordinary Fourier transform in `z`. It is unitary from
//! `L²(R, dp/f)` onto `L²(R, dx)`, with inverse kernel `exp(-i x z / hbar)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{DeformedAlgebra, HBAR};
use crate::error::{Error, Result};
use crate::export::Table;
use crate::numerics::QuadratureSpec;
use crate::state::{MomentumState, Support};

/// Complex samples on a strictly increasing grid. Entries listed in `failed`
/// hold `NaN` because their quadrature did not converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionSamples {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub failed: Vec<usize>,
}

impl PositionSamples {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("grid must be finite and strictly increasing".into()));
        }
        Ok(Self {
            grid,
            values,
            failed: Vec::new(),
        })
    }

    /// Samples `g` on `grid`.
    pub fn from_fn<G: Fn(f64) -> Complex64 + Sync>(grid: Vec<f64>, g: G) -> Result<Self> {
        let values = grid.par_iter().map(|&x| g(x)).collect();
        Self::new(grid, values)
    }

    /// Spacing of a uniform grid with at least three points.
    pub fn uniform_step(&self) -> Result<f64> {
        let n = self.grid.len();
        if n < 3 {
            return Err(Error::UnsupportedGrid(format!("{n} points; a dense grid is required")));
        }
        let h = (self.grid[n - 1] - self.grid[0]) / (n - 1) as f64;
        let uniform = self
            .grid
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - (self.grid[0] + i as f64 * h)).abs() <= 1e-9 * h.max(x.abs()));
        if uniform {
            Ok(h)
        } else {
            Err(Error::UnsupportedGrid("grid is not uniform".into()))
        }
    }

    /// Trapezoidal `∫ |psi|²` over a uniform grid.
    pub fn norm_squared(&self) -> Result<f64> {
        let h = self.uniform_step()?;
        Ok(trapezoid(&self.values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), h))
    }

    /// Table with columns `{axis},re_psi,im_psi,abs2`.
    pub fn to_table(&self, axis: &str) -> Table {
        let mut t = Table::new([axis, "re_psi", "im_psi", "abs2"]);
        for (&x, v) in self.grid.iter().zip(&self.values) {
            t.push(vec![x, v.re, v.im, v.norm_sqr()]);
        }
        t
    }
}

/// Samples of a momentum-space amplitude produced by an inverse transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSamples {
    pub p: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Largest `|psi|` at the ends of the truncated position integral.
    pub tail_estimate: f64,
    /// Set when `tail_estimate` exceeds the caller's tolerance.
    pub truncation_warning: bool,
}

/// `n` equally spaced points covering `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn trapezoid<T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>>(v: &[T], h: f64) -> T {
    let n = v.len();
    let mut acc = (v[0] + v[n - 1]) * 0.5;
    for &x in &v[1..n - 1] {
        acc = acc + x;
    }
    acc * h
}

/// Modified plane wave `(2π hbar)^(-1/2) exp(i x z(p) / hbar)`: the image of
/// a momentum eigenstate normalized as `<p|p'> = f(p) δ(p - p')`.
pub fn plane_wave_kernel(algebra: &DeformedAlgebra, x: f64, p: f64) -> Complex64 {
    Complex64::from_polar((2.0 * std::f64::consts::PI * HBAR).sqrt().recip(), x * algebra.z_at(p) / HBAR)
}

/// Generalized Fourier transform evaluated on `x_grid`.
pub fn gft_full(state: &MomentumState, x_grid: &[f64], spec: &QuadratureSpec) -> Result<PositionSamples> {
    if state.support() != Support::RealLine {
        return Err(Error::Precondition("the full-theory transform needs a state on the real line".into()));
    }
    let alg = *state.algebra();
    let results: Vec<Option<Complex64>> = x_grid
        .par_iter()
        .map(|&x| {
            state
                .integrate_measure(|p| plane_wave_kernel(&alg, x, p) * state.amplitude(p), spec)
                .ok()
        })
        .collect();
    collect_samples(x_grid.to_vec(), results)
}

pub(crate) fn collect_samples(grid: Vec<f64>, results: Vec<Option<Complex64>>) -> Result<PositionSamples> {
    let failed = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.is_none().then_some(i))
        .collect();
    let values = results
        .into_iter()
        .map(|r| r.unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
        .collect();
    let mut s = PositionSamples::new(grid, values)?;
    s.failed = failed;
    Ok(s)
}

/// Default tolerance on `|psi|` at the ends of the position window.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Inverse transform `psi~(p) = (2π hbar)^(-1/2) ∫ psi(x) exp(-i x z(p) / hbar) dx`,
/// integrated by the trapezoidal rule over the uniform sample window.
pub fn gft_full_inverse(
    algebra: &DeformedAlgebra,
    samples: &PositionSamples,
    p_grid: &[f64],
    tail_tolerance: f64,
) -> Result<MomentumSamples> {
    let h = samples.uniform_step()?;
    let n = samples.values.len();
    let tail_estimate = samples.values[0].norm().max(samples.values[n - 1].norm());
    let pre = (2.0 * std::f64::consts::PI * HBAR).sqrt().recip();
    let values = p_grid
        .par_iter()
        .map(|&p| pre * fourier_trapezoid(samples, h, algebra.z_at(p) / HBAR))
        .collect();
    Ok(MomentumSamples {
        p: p_grid.to_vec(),
        values,
        tail_estimate,
        truncation_warning: tail_estimate > tail_tolerance,
    })
}

/// Trapezoidal `∫ psi(x) exp(-i ω x) dx` over uniform samples.
pub(crate) fn fourier_trapezoid(samples: &PositionSamples, h: f64, omega: f64) -> Complex64 {
    let terms: Vec<Complex64> = samples
        .grid
        .iter()
        .zip(&samples.values)
        .map(|(&x, &v)| v * Complex64::from_polar(1.0, -omega * x))
        .collect();
    trapezoid(&terms, h)
}

/// Relative spectral floor below which `psi~(z)` is treated as zero before
/// multiplication by the exponentially growing `p(z)`.
pub const SPECTRAL_FLOOR: f64 = 1e-13;

/// `(p psi)(x)` computed spectrally: transform to `z`, multiply by `p(z)`,
/// transform back. Equivalent to `(2beta)^(-1/2) sinh(-i hbar sqrt(2beta) d/dx) psi`.
pub fn apply_p_in_x_rep(algebra: &DeformedAlgebra, samples: &PositionSamples) -> Result<PositionSamples> {
    let h = samples.uniform_step()?;
    let n = samples.grid.len();
    let z_max = std::f64::consts::PI * HBAR / h;
    let z_grid = uniform_grid(-z_max, z_max, n);
    let dz = z_grid[1] - z_grid[0];
    let pre = (2.0 * std::f64::consts::PI * HBAR).sqrt().recip();
    let spectrum: Vec<Complex64> = z_grid
        .par_iter()
        .map(|&z| pre * fourier_trapezoid(samples, h, z / HBAR))
        .collect();
    let peak = spectrum.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let weighted: Vec<Complex64> = z_grid
        .iter()
        .zip(&spectrum)
        .map(|(&z, &v)| {
            if v.norm() <= SPECTRAL_FLOOR * peak {
                Complex64::new(0.0, 0.0)
            } else {
                v * algebra.p_of_z(z)
            }
        })
        .collect();
    let values = samples
        .grid
        .par_iter()
        .map(|&x| {
            let terms: Vec<Complex64> = z_grid
                .iter()
                .zip(&weighted)
                .map(|(&z, &v)| v * Complex64::from_polar(1.0, x * z / HBAR))
                .collect();
            pre * trapezoid(&terms, dz)
        })
        .collect();
    PositionSamples::new(samples.grid.clone(), values)
}

/// `<psi | A psi> / <psi | psi>` for position samples on a uniform grid.
pub fn sample_expectation(psi: &PositionSamples, a_psi: &PositionSamples) -> Result<Complex64> {
    let h = psi.uniform_step()?;
    let cross: Vec<Complex64> = psi.values.iter().zip(&a_psi.values).map(|(a, b)| a.conj() * b).collect();
    Ok(trapezoid(&cross, h) / psi.norm_squared()?)
}
