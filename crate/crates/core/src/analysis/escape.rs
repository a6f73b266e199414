use std::f64::consts::PI;

use serde::Serialize;

use crate::dynamics::{self, speed, HamiltonianKind, MagneticSystem, PhaseState};
use crate::geometry;
use crate::{Error, Result};

pub const DEFAULT_RETURN_THRESHOLD: f64 = 0.1;
const ESCAPE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EscapeReport {
    pub max_distance: f64,
    pub min_return_after_transient: f64,
    pub escaped: bool,
}

/// Default transient `5 · 2π/|s|`.
pub fn default_transient(sys: &MagneticSystem) -> f64 {
    5.0 * 2.0 * PI / sys.s.abs()
}

/// Track the base distance `d(γ(0), γ(t))` of a kinetic orbit on a hyperbolic
/// surface. The orbit has escaped if, after `transient`, it never comes back
/// within `return_threshold` of its starting point.
pub fn escape_witness(
    sys: &MagneticSystem,
    st0: &PhaseState,
    horizon: f64,
    return_threshold: f64,
    transient: f64,
) -> Result<EscapeReport> {
    let k = sys.k();
    if k >= 0.0 {
        return Err(Error::Unsupported("escape witness needs kappa < 0"));
    }
    if !(horizon > 0.0 && horizon.is_finite() && return_threshold > 0.0 && transient >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need horizon > 0, threshold > 0, transient >= 0 (got {horizon}, {return_threshold}, {transient})"
        )));
    }
    let v = speed(sys, st0);
    if v == 0.0 {
        return Err(Error::DegenerateTrajectory("initial state is stationary"));
    }
    let turn = sys.s.abs().max(v * (-k).sqrt());
    let dt = (2.0 * PI / turn / 200.0).min(horizon / 64.0);
    let sol = dynamics::solve(sys, st0, &HamiltonianKind::Kinetic, horizon, ESCAPE_TOL)?;
    let n = (horizon / dt).ceil() as usize;

    let mut max_distance = 0.0f64;
    let mut min_return = f64::INFINITY;
    for i in 0..=n {
        let t = (i as f64 * dt).min(horizon);
        let p = sol.eval(t).p;
        let d = geometry::distance(sys.kappa, &st0.p, &p)?;
        max_distance = max_distance.max(d);
        if t >= transient {
            min_return = min_return.min(d);
        }
    }
    Ok(EscapeReport {
        max_distance,
        min_return_after_transient: min_return,
        escaped: min_return > return_threshold,
    })
}
