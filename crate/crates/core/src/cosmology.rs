//! Isotropic minisuperspace with the deformed Poisson bracket
//! `{v, p_v} = sqrt(1 + 2 beta p_v²)`.
//!
//! The volume momentum obeys `dp/dt = A p² sqrt(1 + 2 beta p²)` with
//! `A = 3 c χ / (4π²)`. On the branch `p < 0` the implicit solution
//! `sqrt(1 + 2 beta p²) / |p| = A t + k` gives
//! `|p(t)| = ((A t + k)² - 2 beta)^(-1/2)`, singular at
//! `t* = (sqrt(2 beta) - k) / A`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::export::Table;
use crate::numerics::{solve_ode, OdeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosmoParams {
    pub beta: f64,
    pub chi: f64,
    pub c: f64,
    /// Integration constant of the implicit solution.
    pub k: f64,
    pub p0_truncation: Option<f64>,
}

impl Default for CosmoParams {
    /// `beta = 1`, `k = sqrt 2` and `χ = 4π²/3` (so `A = 1`): the singularity sits at `t = 0`.
    fn default() -> Self {
        Self {
            beta: 1.0,
            chi: 4.0 * PI * PI / 3.0,
            c: 1.0,
            k: std::f64::consts::SQRT_2,
            p0_truncation: None,
        }
    }
}

impl CosmoParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("beta", self.beta), ("chi", self.chi), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        ensure_finite("k", self.k)?;
        if let Some(p0) = self.p0_truncation {
            if !(p0.is_finite() && p0 > 0.0) {
                return Err(Error::InvalidParameter(format!("p0 truncation must be positive, got {p0}")));
            }
        }
        Ok(())
    }

    /// `A = 3 c χ / (4π²)`.
    pub fn a_coefficient(&self) -> f64 {
        3.0 * self.c * self.chi / (4.0 * PI * PI)
    }

    /// `t* = (sqrt(2 beta) - k) / A`, where `|p_v|` diverges.
    pub fn singularity_time(&self) -> f64 {
        ((2.0 * self.beta).sqrt() - self.k) / self.a_coefficient()
    }

    /// `ρ* = 3χ / (4 beta)`.
    pub fn rho_star(&self) -> f64 {
        3.0 * self.chi / (4.0 * self.beta)
    }
}

pub fn pv_rhs(params: &CosmoParams, pv: f64) -> f64 {
    params.a_coefficient() * pv * pv * (1.0 + 2.0 * params.beta * pv * pv).sqrt()
}

/// The closed-form solution on the `p < 0` branch; defined for `t > t*`.
pub fn analytic_pv(params: &CosmoParams, t: f64) -> Result<f64> {
    let s = params.a_coefficient() * t + params.k;
    let d = s * s - 2.0 * params.beta;
    if t <= params.singularity_time() || d <= 0.0 {
        return Err(Error::Precondition(format!(
            "t = {t} is not past the singularity at t* = {}",
            params.singularity_time()
        )));
    }
    Ok(-d.sqrt().recip())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hubble {
    pub h: f64,
    /// `|p_v|` exceeded the cut-off and `h` was clamped to `H(p0)`.
    pub truncated: bool,
}

/// `H = (c χ / 4π²) |p_v| sqrt(1 + 2 beta p_v²)`, clamped at the cut-off when one is set.
pub fn hubble_of_pv(params: &CosmoParams, pv: f64) -> Hubble {
    let raw = |p: f64| params.c * params.chi / (4.0 * PI * PI) * p.abs() * (1.0 + 2.0 * params.beta * p * p).sqrt();
    match params.p0_truncation {
        Some(p0) if pv.abs() > p0 => Hubble {
            h: raw(p0),
            truncated: true,
        },
        _ => Hubble {
            h: raw(pv),
            truncated: false,
        },
    }
}

/// Energy density of the clock field on the constraint surface, `(3χ/2) p_v²`.
pub fn rho_phi(params: &CosmoParams, pv: f64) -> f64 {
    1.5 * params.chi * pv * pv
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Friedmann {
    pub h2: f64,
    pub rho_star: f64,
}

/// `H² = (c²/π⁴) (χ/24) ρ (1 + ρ/ρ*)`.
pub fn friedmann_check(params: &CosmoParams, rho: f64) -> Result<Friedmann> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    let rho_star = params.rho_star();
    let h2 = params.c * params.c / PI.powi(4) * params.chi / 24.0 * rho * (1.0 + rho / rho_star);
    Ok(Friedmann { h2, rho_star })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosmoTrajectory {
    pub times: Vec<f64>,
    /// Signed `p_v`, negative on the expanding branch.
    pub p_v: Vec<f64>,
    pub hubble: Vec<f64>,
    pub rho_phi: Vec<f64>,
    pub truncated: Vec<bool>,
}

impl CosmoTrajectory {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["t", "p_v", "H", "rho_phi"]);
        for i in 0..self.times.len() {
            t.push(vec![self.times[i], self.p_v[i], self.hubble[i], self.rho_phi[i]]);
        }
        t
    }
}

/// Relative and absolute tolerances of the trajectory integration.
pub const ODE_TOLERANCES: (f64, f64) = (1e-12, 1e-14);

/// Locates the singularity by integrating backwards from `t* + 1/A` until
/// the solution leaves the blow-up ceiling.
pub fn blowup_bracket(params: &CosmoParams) -> Result<(f64, f64)> {
    params.validate()?;
    let anchor = params.singularity_time() + 1.0 / params.a_coefficient();
    let y0 = analytic_pv(params, anchor)?;
    let spec = OdeSpec::adaptive(anchor, anchor - 10.0 / params.a_coefficient(), ODE_TOLERANCES.0, ODE_TOLERANCES.1);
    match solve_ode(|_, p| pv_rhs(params, p), y0, &spec, &[]) {
        Err(Error::BlowUp { bracket }) => Ok((bracket.0.min(bracket.1), bracket.0.max(bracket.1))),
        Err(e) => Err(e),
        Ok(_) => Err(Error::Precondition("no blow-up found before the anchor".into())),
    }
}

/// Integrates the momentum equation with RK45 across `times` (increasing),
/// seeded by the closed form at the first time.
pub fn solve_pv(params: &CosmoParams, times: &[f64]) -> Result<CosmoTrajectory> {
    params.validate()?;
    if times.is_empty() {
        return Err(Error::InvalidParameter("no sample times".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sample times must be finite and increasing".into()));
    }
    let t_first = times[0];
    if t_first <= params.singularity_time() {
        return Err(Error::Singularity {
            t: t_first,
            bracket: blowup_bracket(params)?,
        });
    }
    let y0 = analytic_pv(params, t_first)?;
    let t_last = times[times.len() - 1];
    let p_v: Vec<f64> = if times.len() == 1 {
        vec![y0]
    } else {
        let spec = OdeSpec::adaptive(t_first, t_last, ODE_TOLERANCES.0, ODE_TOLERANCES.1);
        let sol = solve_ode(|_, p| pv_rhs(params, p), y0, &spec, &times[1..])?;
        std::iter::once(y0).chain(sol.into_iter().map(|(_, y)| y)).collect()
    };
    let hub: Vec<Hubble> = p_v.iter().map(|&p| hubble_of_pv(params, p)).collect();
    Ok(CosmoTrajectory {
        times: times.to_vec(),
        hubble: hub.iter().map(|h| h.h).collect(),
        truncated: hub.iter().map(|h| h.truncated).collect(),
        rho_phi: p_v.iter().map(|&p| rho_phi(params, p)).collect(),
        p_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn rhs_values() {
        let p = CosmoParams {
            beta: 1.0,
            chi: 1.0,
            ..CosmoParams::default()
        };
        assert_eq!(pv_rhs(&p, 0.0), 0.0);
        assert_relative_eq!(pv_rhs(&p, 1.0), 3.0 / (4.0 * PI * PI) * 3f64.sqrt(), max_relative = 1e-15);
        assert!(pv_rhs(&p, -2.0) > 0.0);
    }

    #[test]
    fn closed_form_example() {
        let p = CosmoParams::default();
        assert_relative_eq!(p.a_coefficient(), 1.0, max_relative = 1e-15);
        assert_abs_diff_eq!(p.singularity_time(), 0.0, epsilon = 1e-15);
        let v = analytic_pv(&p, 1.0).unwrap();
        assert_relative_eq!(-v, 1.0 / ((1.0 + 2f64.sqrt()).powi(2) - 2.0).sqrt(), max_relative = 1e-15);
        assert_abs_diff_eq!(-v, 0.511080, epsilon = 2e-6);
    }

    #[test]
    fn rk45_matches_closed_form() {
        let p = CosmoParams::default();
        let times: Vec<f64> = (0..=40).map(|i| 0.05 + i as f64 * 0.5).collect();
        let tr = solve_pv(&p, &times).unwrap();
        for (t, v) in tr.times.iter().zip(&tr.p_v) {
            let exact = analytic_pv(&p, *t).unwrap();
            assert_relative_eq!(*v, exact, max_relative = 1e-7);
        }
        assert!(tr.p_v.windows(2).all(|w| w[1].abs() < w[0].abs()));
        assert!(tr.hubble.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn singularity_is_bracketed() {
        let p = CosmoParams::default();
        let (lo, hi) = blowup_bracket(&p).unwrap();
        assert!(lo <= 0.0 && 0.0 <= hi, "[{lo}, {hi}]");
        match solve_pv(&p, &[-0.5, 1.0]) {
            Err(Error::Singularity { t, bracket }) => {
                assert_eq!(t, -0.5);
                assert!(bracket.0 <= 0.0 && 0.0 <= bracket.1);
            }
            other => panic!("expected a singularity error, got {other:?}"),
        }
    }

    #[test]
    fn hubble_and_friedmann() {
        let p = CosmoParams {
            beta: 0.5,
            chi: 1.0,
            c: 1.0,
            ..CosmoParams::default()
        };
        assert_eq!(hubble_of_pv(&p, 0.0).h, 0.0);
        let h = hubble_of_pv(&p, 1.0).h;
        assert_relative_eq!(h, 2f64.sqrt() / (4.0 * PI * PI), max_relative = 1e-15);
        let f = friedmann_check(&p, rho_phi(&p, 1.0)).unwrap();
        assert_relative_eq!(f.h2, h * h, max_relative = 1e-12);
        let q = CosmoParams { beta: 1.0, ..p };
        assert_relative_eq!(q.rho_star(), 0.75);
        let clamped = CosmoParams {
            p0_truncation: Some(1.0),
            ..p
        };
        let hc = hubble_of_pv(&clamped, 10.0);
        assert!(hc.truncated);
        assert_eq!(hc.h, hubble_of_pv(&p, 1.0).h);
    }
}
