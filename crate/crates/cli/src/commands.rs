//! Subcommand argument sets and their delegation to `gup_core`.

use std::fmt;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use gup_core::algebra::{DeformedAlgebra, PhysicalUnits};
use gup_core::compacttheory::{
    delta_x_min, gft_truncated, gft_truncated_inverse, max_loc_state, overlap_table, series_bounds as bounds,
    InverseOptions, TruncatedSpace,
};
use gup_core::cosmology::{blowup_bracket, solve_pv, CosmoParams};
use gup_core::export::Table;
use gup_core::fulltheory::{gft_full, gft_full_inverse, uniform_grid, TAIL_TOLERANCE};
use gup_core::numerics::QuadratureSpec;
use gup_core::squeezed::{self, gaussian_state, kmm_max_loc_state, minimize_delta_x, SqueezedState, SurfaceGrid};
use gup_core::state::MomentumState;
use gup_core::wavepacket::{
    build_packet, evolve_and_project, spreading_report, DispersionRelation, Framework, WavePacketSpec,
};

use crate::output::{meta, Dim, Dimensioned, Extra, Report, Units};
use crate::GlobalArgs;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(gup_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<gup_core::Error> for CliError {
    /// Parameter and precondition violations are usage errors; the rest are numeric.
    fn from(e: gup_core::Error) -> Self {
        use gup_core::Error as E;
        match e {
            E::NonFinite { .. }
            | E::InvalidParameter(_)
            | E::Precondition(_)
            | E::UnsupportedGrid(_)
            | E::WavenumberBound { .. }
            | E::EndpointSingularity { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

type CliResult = Result<Report, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn units(g: &GlobalArgs, mass: f64) -> Result<Option<PhysicalUnits>, CliError> {
    match g.units {
        Units::Scaled => Ok(None),
        Units::Paper if g.beta > 0.0 && g.beta.is_finite() => Ok(Some(PhysicalUnits::new(g.beta, mass))),
        Units::Paper => Err(usage("paper units need a positive beta")),
    }
}

fn sqrt_algebra(g: &GlobalArgs) -> Result<DeformedAlgebra, CliError> {
    Ok(DeformedAlgebra::sqrt_gup(g.beta)?)
}

fn space(g: &GlobalArgs, p0: f64) -> Result<TruncatedSpace, CliError> {
    Ok(TruncatedSpace::new(sqrt_algebra(g)?, p0)?)
}

fn grid(spec: &[f64], name: &str) -> Result<Vec<f64>, CliError> {
    match spec {
        [a, b, n] if a < b && *n >= 2.0 && n.fract() == 0.0 => Ok(uniform_grid(*a, *b, *n as usize)),
        _ => Err(usage(format!("--{name} takes MIN,MAX,N with MIN < MAX and integer N >= 2"))),
    }
}

const PSI_MOMENTUM: Dim = Dim::new(0.0, -0.5, 0.0);

fn amplitude_table(axis: &str, axis_dim: Dim, grid: &[f64], values: &[Complex64]) -> Dimensioned {
    let mut t = Table::new([axis, "re_psi", "im_psi", "abs2"]);
    for (&x, v) in grid.iter().zip(values) {
        t.push(vec![x, v.re, v.im, v.norm_sqr()]);
    }
    let psi = Dim::new(-0.5 * axis_dim.length, -0.5 * axis_dim.momentum, 0.0);
    let abs2 = Dim::new(-axis_dim.length, -axis_dim.momentum, 0.0);
    Dimensioned::new(t, vec![axis_dim, psi, psi, abs2])
}

#[derive(Debug, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 0.01)]
    lambda_min: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda_max: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    eta_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    eta_max: f64,
    #[arg(long, default_value_t = 31)]
    n_lambda: usize,
    #[arg(long, default_value_t = 31)]
    n_eta: usize,
}

pub fn surface(g: &GlobalArgs, a: &SurfaceArgs) -> CliResult {
    let grid = SurfaceGrid {
        lambda_min: a.lambda_min,
        lambda_max: a.lambda_max,
        eta_min: a.eta_min,
        eta_max: a.eta_max,
        n_lambda: a.n_lambda,
        n_eta: a.n_eta,
    };
    grid.validate()?;
    let u = units(g, 1.0)?;
    let s = minimize_delta_x(&sqrt_algebra(g)?, &grid, &QuadratureSpec::default())?;
    if s.failures > 0 {
        eprintln!("warning: {} grid points failed and are reported as nan", s.failures);
    }
    let mut m = meta("surface", g, a);
    m["grid_minimum"] = json!(s.grid_minimum);
    m["refined_minimum"] = json!(s.refined);
    m["failures"] = json!(s.failures);
    let table = Dimensioned::new(s.to_table(), vec![Dim::new(0.0, -2.0, 0.0), Dim::MOMENTUM, Dim::LENGTH]);
    Ok(Report::new(table.rescaled(u.as_ref()), m))
}

#[derive(Debug, Args, Serialize)]
pub struct MaxlocArgs {
    #[arg(long, default_value_t = 1.0)]
    p0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xi: f64,
    /// Mode number, starting at 1.
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Momentum samples across (-p0, p0).
    #[arg(long, default_value_t = 201)]
    points: usize,
}

pub fn maxloc(g: &GlobalArgs, a: &MaxlocArgs) -> CliResult {
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let u = units(g, 1.0)?;
    let space = space(g, a.p0)?;
    let state = max_loc_state(&space, a.xi, a.n)?;
    let spec = QuadratureSpec::default();
    let norm = state.norm_squared(&spec)?;
    let mean_x = state.position_mean(&spec)? / norm;
    let report = squeezed::verify_gup(&state, &spec)?;
    let ps = uniform_grid(-a.p0, a.p0, a.points);
    let table = amplitude_table("p", Dim::MOMENTUM, &ps, &state.sample(&ps)).rescaled(u.as_ref());
    let length = u.map_or(1.0, |u| u.length_unit());
    let summary = json!({
        "delta_x_min": delta_x_min(&space, a.n) / length,
        "delta_x": report.delta_x / length,
        "norm": norm,
        "mean_x": mean_x / length,
        "q0": space.q0(),
    });
    Ok(Report::new(table, meta("maxloc", g, a)).with_extra("summary", Extra::Value(summary)))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameworkArg {
    Standard,
    Full,
    Compact,
}

impl From<FrameworkArg> for Framework {
    fn from(f: FrameworkArg) -> Self {
        match f {
            FrameworkArg::Standard => Framework::StandardQm,
            FrameworkArg::Full => Framework::FullGup,
            FrameworkArg::Compact => Framework::CompactGup,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct WavepacketArgs {
    #[arg(long, value_enum, default_value_t = FrameworkArg::Full)]
    framework: FrameworkArg,
    /// Momentum cut-off of the compact framework.
    #[arg(long, default_value_t = 5.0)]
    p0: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_p: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    mean_p: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5", allow_hyphen_values = true)]
    times: Vec<f64>,
    /// Position grid as MIN,MAX,N; extended per frame to cover the packet.
    #[arg(long, value_delimiter = ',', default_value = "-20,20,401", allow_hyphen_values = true)]
    grid: Vec<f64>,
}

pub fn wavepacket(g: &GlobalArgs, a: &WavepacketArgs) -> CliResult {
    let xs = grid(&a.grid, "grid")?;
    if a.times.is_empty() {
        return Err(usage("--times needs at least one value"));
    }
    let u = units(g, a.mass)?;
    let spec = WavePacketSpec {
        beta: g.beta,
        p0: Some(a.p0),
        sigma_p: a.sigma_p,
        mass: a.mass,
        target_mean_p: a.mean_p,
        ..WavePacketSpec::new(a.framework.into())
    };
    spec.validate()?;
    let q = QuadratureSpec::default();
    let packet = build_packet(&spec, &q)?;
    let frames = evolve_and_project(&packet, &a.times, &xs, &q)?;
    let spreading = spreading_report(&packet, &a.times, &q)?;
    let frames = Dimensioned::new(frames.to_table(), vec![Dim::TIME, Dim::LENGTH, Dim::new(-1.0, 0.0, 0.0)]);
    let spreading = Dimensioned::new(
        spreading.to_table(),
        vec![Dim::TIME, Dim::LENGTH, Dim::LENGTH, Dim::NONE, Dim::MOMENTUM],
    );
    let mut m = meta("wavepacket", g, a);
    m["center"] = json!(packet.center);
    Ok(Report::new(frames.rescaled(u.as_ref()), m).with_extra("spreading", Extra::Table(spreading.rescaled(u.as_ref()))))
}

#[derive(Debug, Args, Serialize)]
pub struct CosmoArgs {
    /// Coupling; the default makes the rate coefficient equal to one.
    #[arg(long, default_value_t = 4.0 * std::f64::consts::PI * std::f64::consts::PI / 3.0)]
    chi: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Integration constant of the implicit solution.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2, allow_hyphen_values = true)]
    k: f64,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    t_start: f64,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    t_end: f64,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    /// Clamp |p_v| at this cut-off when evaluating the Hubble rate.
    #[arg(long)]
    p0_truncate: Option<f64>,
}

/// The model is dimensionless; `--units` does not rescale it.
pub fn cosmo(g: &GlobalArgs, a: &CosmoArgs) -> CliResult {
    if a.samples < 2 || !(a.t_end > a.t_start) {
        return Err(usage("need --samples >= 2 and --t-end > --t-start"));
    }
    let params = CosmoParams {
        beta: g.beta,
        chi: a.chi,
        c: a.c,
        k: a.k,
        p0_truncation: a.p0_truncate,
    };
    params.validate()?;
    let traj = solve_pv(&params, &uniform_grid(a.t_start, a.t_end, a.samples))?;
    let truncated = traj.truncated.iter().filter(|&&t| t).count();
    if truncated > 0 {
        eprintln!("warning: {truncated} samples exceed the momentum cut-off; H is clamped there");
    }
    let mut m = meta("cosmo", g, a);
    m["singularity_time"] = json!(params.singularity_time());
    m["blowup_bracket"] = json!(blowup_bracket(&params)?);
    m["rho_star"] = json!(params.rho_star());
    m["truncated_samples"] = json!(truncated);
    Ok(Report::new(traj.to_table(), m))
}

#[derive(Debug, Args, Serialize)]
pub struct OverlapArgs {
    #[arg(long, default_value_t = 5.0)]
    p0: f64,
    /// Largest separation.
    #[arg(long, default_value_t = 10.0)]
    max_separation: f64,
    #[arg(long, default_value_t = 401)]
    n: usize,
}

pub fn overlap(g: &GlobalArgs, a: &OverlapArgs) -> CliResult {
    if a.n < 2 || !(a.max_separation > 0.0) {
        return Err(usage("need --n >= 2 and a positive --max-separation"));
    }
    let u = units(g, 1.0)?;
    let space = space(g, a.p0)?;
    let table = overlap_table(&space, &uniform_grid(0.0, a.max_separation, a.n));
    let table = Dimensioned::new(table, vec![Dim::LENGTH, Dim::NONE, Dim::NONE, Dim::NONE]);
    Ok(Report::new(table.rescaled(u.as_ref()), meta("overlap", g, a)))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    /// Real-line momentum space; a Gaussian state.
    Full,
    /// Momentum space cut at p0; a maximally localized state.
    Truncated,
}

#[derive(Debug, Args, Serialize)]
pub struct TransformArgs {
    #[arg(long, value_enum, default_value_t = Theory::Full)]
    theory: Theory,
    /// Transform back to momentum space and compare with the input.
    #[arg(long)]
    round_trip: bool,
    /// Gaussian mean (full theory).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mean: f64,
    /// Gaussian width (full theory).
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Cut-off (truncated theory).
    #[arg(long, default_value_t = 5.0)]
    p0: f64,
    /// Localization point (truncated theory).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xi: f64,
    /// Mode number (truncated theory).
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Position grid as MIN,MAX,N.
    #[arg(long, value_delimiter = ',', default_value = "-40,40,1601", allow_hyphen_values = true)]
    grid: Vec<f64>,
    /// Momentum samples for the round trip.
    #[arg(long, default_value_t = 201)]
    points: usize,
}

pub fn transform(g: &GlobalArgs, a: &TransformArgs) -> CliResult {
    let xs = grid(&a.grid, "grid")?;
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let u = units(g, 1.0)?;
    let q = QuadratureSpec::default();
    let alg = sqrt_algebra(g)?;
    let (state, forward, space): (MomentumState, _, _) = match a.theory {
        Theory::Full => {
            let state = gaussian_state(alg, a.mean, a.sigma, &q)?;
            let f = gft_full(&state, &xs, &q)?;
            (state, f, None)
        }
        Theory::Truncated => {
            let space = space(g, a.p0)?;
            let state = max_loc_state(&space, a.xi, a.n)?;
            let f = gft_truncated(&space, &state, &xs, &q)?;
            (state, f, Some(space))
        }
    };
    if !forward.failed.is_empty() {
        eprintln!("warning: {} samples failed to converge and are reported as nan", forward.failed.len());
    }
    let mut m = meta("transform", g, a);
    m["grid_norm"] = json!(forward.norm_squared().ok());
    if !a.round_trip {
        let table = amplitude_table("x", Dim::LENGTH, &forward.grid, &forward.values);
        return Ok(Report::new(table.rescaled(u.as_ref()), m));
    }
    if !forward.failed.is_empty() {
        return Err(CliError::Numeric(gup_core::Error::Convergence {
            estimate: f64::NAN,
            error_bound: f64::INFINITY,
        }));
    }
    let back = match &space {
        None => {
            let (lo, hi) = (a.mean - 8.0 * a.sigma, a.mean + 8.0 * a.sigma);
            gft_full_inverse(&alg, &forward, &uniform_grid(lo, hi, a.points), TAIL_TOLERANCE)?
        }
        Some(space) => {
            let opts = InverseOptions::default();
            let limit = space.q0() * (1.0 - opts.margin);
            gft_truncated_inverse(space, &forward, &uniform_grid(-limit, limit, a.points), &opts)?
        }
    };
    if back.truncation_warning {
        eprintln!("warning: the position samples do not decay at the grid ends ({:e})", back.tail_estimate);
    }
    let mut t = Table::new(["p", "re_psi", "im_psi", "re_exact", "im_exact"]);
    for (&p, v) in back.p.iter().zip(&back.values) {
        let exact = state.amplitude(p);
        t.push(vec![p, v.re, v.im, exact.re, exact.im]);
    }
    let dims = vec![Dim::MOMENTUM, PSI_MOMENTUM, PSI_MOMENTUM, PSI_MOMENTUM, PSI_MOMENTUM];
    m["tail_estimate"] = json!(back.tail_estimate);
    Ok(Report::new(Dimensioned::new(t, dims).rescaled(u.as_ref()), m))
}

#[derive(Debug, Args, Serialize)]
pub struct DispersionArgs {
    #[arg(long, value_enum, default_value_t = FrameworkArg::Full)]
    framework: FrameworkArg,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Cut-off of the compact framework; bounds the wavenumber.
    #[arg(long, default_value_t = 5.0)]
    p0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    k_min: f64,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    k_max: f64,
    #[arg(long, default_value_t = 151)]
    n: usize,
}

pub fn dispersion(g: &GlobalArgs, a: &DispersionArgs) -> CliResult {
    if a.n < 2 || !(a.k_max > a.k_min) {
        return Err(usage("need --n >= 2 and --k-max > --k-min"));
    }
    let u = units(g, a.mass)?;
    let rel = DispersionRelation {
        framework: a.framework.into(),
        beta: g.beta,
        mass: a.mass,
        p0: Some(a.p0),
    };
    let table = rel.table(&uniform_grid(a.k_min, a.k_max, a.n))?;
    let mut m = meta("dispersion", g, a);
    m["k_max"] = json!(rel.k_max()?);
    let dims = vec![
        Dim::new(-1.0, 0.0, 0.0),
        Dim::new(0.0, 0.0, -1.0),
        Dim::new(1.0, 0.0, -1.0),
        Dim::new(2.0, 0.0, -1.0),
    ];
    Ok(Report::new(Dimensioned::new(table, dims).rescaled(u.as_ref()), m))
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    Squeezed,
    Maxloc,
    KmmMaxloc,
    Gaussian,
    /// Random superposition of the first `--modes` maximally localized modes, drawn from `--seed`.
    RandomMaxloc,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = NamedState::Squeezed)]
    state: NamedState,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xi: f64,
    #[arg(long, default_value_t = 1.0)]
    p0: f64,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mean: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 6)]
    modes: u32,
}

pub fn verify_gup(g: &GlobalArgs, a: &VerifyArgs) -> CliResult {
    let u = units(g, 1.0)?;
    let q = QuadratureSpec::default();
    let state = match a.state {
        NamedState::Squeezed => SqueezedState::new(sqrt_algebra(g)?, a.lambda, a.eta, a.xi)?.to_momentum_state(&q)?,
        NamedState::Maxloc => max_loc_state(&space(g, a.p0)?, a.xi, a.n)?,
        NamedState::KmmMaxloc => kmm_max_loc_state(g.beta, a.xi)?,
        NamedState::Gaussian => gaussian_state(sqrt_algebra(g)?, a.mean, a.sigma, &q)?,
        NamedState::RandomMaxloc => {
            if a.modes == 0 {
                return Err(usage("--modes must be at least 1"));
            }
            let space = space(g, a.p0)?;
            let mut rng = StdRng::seed_from_u64(g.seed);
            let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let mut state = max_loc_state(&space, a.xi, 1)?.scaled(draw());
            for n in 2..=a.modes {
                state = state.superpose(Complex64::new(1.0, 0.0), &max_loc_state(&space, a.xi, n)?, draw())?;
            }
            state
        }
    };
    let r = squeezed::verify_gup(&state, &q)?;
    let mut t = Table::new(["delta_x", "delta_p", "exp_f", "exp_x", "exp_p", "gup_slack"]);
    t.push(vec![r.delta_x, r.delta_p, r.exp_f, r.exp_x, r.exp_p, r.gup_slack]);
    let dims = vec![Dim::LENGTH, Dim::MOMENTUM, Dim::NONE, Dim::LENGTH, Dim::MOMENTUM, Dim::NONE];
    Ok(Report::new(Dimensioned::new(t, dims).rescaled(u.as_ref()), meta("verify-gup", g, a)))
}

/// Evaluated at the cut-off `p0 = 1/sqrt(2 beta)`.
pub fn series_bounds(g: &GlobalArgs) -> CliResult {
    let u = units(g, 1.0)?;
    let space = space(g, (2.0 * g.beta).sqrt().recip())?;
    let b = bounds(&space)?;
    let mut t = Table::new(["lower_bound", "delta_x_min"]);
    t.push(vec![b.lower_bound, b.delta_x_min]);
    let mut m = meta("series-bounds", g, &json!({}));
    m["p0"] = json!(space.p0());
    Ok(Report::new(Dimensioned::new(t, vec![Dim::LENGTH; 2]).rescaled(u.as_ref()), m))
}
