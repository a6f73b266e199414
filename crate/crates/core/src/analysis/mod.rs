//! Orbit diagnostics: first-return periods, geodesic circle measurements,
//! the swept symplectic area of the circle action, and escape witnesses for
//! weak fields on hyperbolic surfaces.

mod area;
mod circle;
mod escape;

use std::f64::consts::PI;

use serde::Serialize;

use crate::dynamics::{
    self, express_in, kinetic_energy, speed, HamiltonianKind, MagneticSystem, PhaseState,
};
use crate::{Error, Result};

pub use area::swept_symplectic_area;
pub use circle::{fit_geodesic_circle, measure_geodesic_curvature, CircleFit};
pub use escape::{default_transient, escape_witness, EscapeReport, DEFAULT_RETURN_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnReport {
    pub period: f64,
    /// Phase distance `|Φ^T(x0) - x0|` in the chart of `x0`.
    pub closure_error: f64,
    pub converged: bool,
    pub candidates_checked: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnOptions {
    /// Integrator tolerance.
    pub tol: f64,
    pub t_max: f64,
    /// Largest accepted closure error.
    pub closure_tol: f64,
    /// Scan resolution, in samples per estimated period.
    pub samples_per_period: usize,
}

impl ReturnOptions {
    pub fn new(tol: f64, t_max: f64) -> Self {
        ReturnOptions {
            tol,
            t_max,
            closure_tol: (1e4 * tol).clamp(1e-9, 1e-4),
            samples_per_period: 200,
        }
    }
}

/// Period predicted by the closed-form laws, when the level is periodic.
pub fn period_estimate(sys: &MagneticSystem, st: &PhaseState, kind: &HamiltonianKind) -> Option<f64> {
    let e = kinetic_energy(sys, st);
    let t_kin = dynamics::period_of_energy(sys, e).ok()?;
    match kind {
        HamiltonianKind::Kinetic => Some(t_kin),
        HamiltonianKind::CircleAction => Some(1.0),
        HamiltonianKind::Profiled(f) => {
            let slope = f.derivative(dynamics::h_of_energy(sys, e).ok()?);
            (slope > 0.0).then(|| 1.0 / slope)
        }
    }
}

/// Time scale for scanning orbits without a closed-form period.
fn fallback_time_scale(sys: &MagneticSystem, st: &PhaseState, kind: &HamiltonianKind) -> Result<f64> {
    let v = speed(sys, st);
    let k = sys.k();
    let turn = sys.s.abs().max(v * k.abs().sqrt());
    let base = if turn > 0.0 { 2.0 * PI / turn } else { 2.0 * PI / v.max(1e-300) };
    let scale = dynamics::field_scale(sys, kinetic_energy(sys, st), kind).unwrap_or(1.0);
    Ok(if scale > 0.0 { base / scale } else { base })
}

pub fn first_return(
    sys: &MagneticSystem,
    st0: &PhaseState,
    kind: &HamiltonianKind,
    tol: f64,
    t_max: f64,
) -> Result<ReturnReport> {
    first_return_with(sys, st0, kind, &ReturnOptions::new(tol, t_max))
}

/// Smallest `t ∈ (0, t_max]` with `Φ^t(x0) = x0`.
///
/// Phase distances to `x0` are scanned at `T_est / samples_per_period`; every
/// local minimum below the coarse threshold is refined by golden-section search
/// on the dense output and accepted if its closure error is within `closure_tol`.
pub fn first_return_with(
    sys: &MagneticSystem,
    st0: &PhaseState,
    kind: &HamiltonianKind,
    opts: &ReturnOptions,
) -> Result<ReturnReport> {
    if !(opts.t_max.is_finite() && opts.t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max = {} must be positive", opts.t_max)));
    }
    let x0 = dynamics::vector_field(sys, st0, kind)?;
    let phase_speed = x0.iter().map(|c| c * c).sum::<f64>().sqrt();
    if phase_speed == 0.0 {
        return Err(Error::DegenerateTrajectory("initial state is stationary"));
    }
    let t_est = match period_estimate(sys, st0, kind) {
        Some(t) => t,
        None => fallback_time_scale(sys, st0, kind)?,
    };
    let dt = t_est / opts.samples_per_period.max(8) as f64;
    let n = (opts.t_max / dt).ceil() as usize;
    let sol = dynamics::solve(sys, st0, kind, opts.t_max, opts.tol)?;

    let dist = |t: f64| -> f64 {
        let st = sol.eval(t);
        match express_in(sys, &st, &st0.p.chart) {
            Ok(st) => st.phase_distance(st0),
            Err(_) => f64::INFINITY,
        }
    };
    let time = |k: usize| (k as f64 * dt).min(opts.t_max);
    let coarse = 2.0 * dt * phase_speed + opts.closure_tol;

    let mut candidates = 0;
    let mut best: Option<(f64, f64)> = None;
    let mut prev = dist(0.0);
    let mut cur = dist(time(1));
    for k in 1..n {
        let next = dist(time(k + 1));
        if cur <= prev && cur <= next && cur < coarse {
            candidates += 1;
            let (t_star, d_star) = golden_min(&dist, time(k - 1), time(k + 1), 1e-13 * time(k).max(1.0));
            if best.is_none_or(|(_, d)| d_star < d) {
                best = Some((t_star, d_star));
            }
            if d_star <= opts.closure_tol {
                return Ok(ReturnReport {
                    period: t_star,
                    closure_error: d_star,
                    converged: true,
                    candidates_checked: candidates,
                });
            }
        }
        prev = cur;
        cur = next;
    }
    let (period, closure_error) = best.unwrap_or((0.0, f64::INFINITY));
    Ok(ReturnReport { period, closure_error, converged: false, candidates_checked: candidates })
}

/// Golden-section minimization of `f` on `[a, b]` down to width `width`.
fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
