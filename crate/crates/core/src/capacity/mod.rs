//! Hofer-Zehnder capacity of the magnetic disc bundle `(D_r Σ, dλ - s π*σ)`.
//!
//! In the strong-field regime `s ≠ 0`, `s² + κ r² > 0` the capacity equals the
//! oscillation of the circle-action Hamiltonian `h∘E` on `D_r Σ`:
//! `2π r² / (√(s² + κ r²) + |s|)`. The lower half is certified numerically: an
//! admissible profile `f∘h∘E` whose non-constant orbits all have period
//! `1/f' > 1` is constructed and its periods are measured.

mod profile;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::first_return;
use crate::dynamics::{self, HamiltonianKind, MagneticSystem};
use crate::{Error, Result};

pub use profile::ProfileF;

/// Integrator tolerance used when measuring profiled periods.
const CERT_INTEGRATION_TOL: f64 = 1e-11;
pub const DEFAULT_LEVELS: usize = 8;
pub const DEFAULT_PERIOD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    pub value: f64,
    pub kappa: f64,
    pub s: f64,
    pub r: f64,
    pub stable_branch: bool,
}

/// `s ≠ 0` and `s² + κ r² > 0`.
pub fn strong_field_check(kappa: f64, s: f64, r: f64) -> bool {
    s != 0.0 && s * s + kappa * r * r > 0.0
}

pub fn capacity_value(kappa: f64, s: f64, r: f64) -> Result<CapacityResult> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius r = {r} must be positive")));
    }
    let sys = MagneticSystem::new(kappa, s)?;
    if s == 0.0 {
        return Err(Error::ZeroField);
    }
    if !strong_field_check(kappa, s, r) {
        return Err(Error::WeakField { kappa, s, r, discriminant: s * s + kappa * r * r });
    }
    let value = dynamics::h_of_energy(&sys, 0.5 * r * r)?;
    Ok(CapacityResult { value, kappa, s, r, stable_branch: true })
}

pub fn build_profile(max_h: f64, delta: f64, eta: f64, ramp_w: f64) -> Result<ProfileF> {
    ProfileF::new(max_h, delta, eta, ramp_w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelCheck {
    /// Value of `h∘E` on the level.
    pub level: f64,
    pub slope: f64,
    /// `1/f'`, or `None` on flat levels.
    pub expected_period: Option<f64>,
    pub measured_period: Option<f64>,
    pub stationary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub min_period_measured: f64,
    pub levels_checked: usize,
    pub certified_lower_bound: f64,
    pub levels: Vec<LevelCheck>,
}

/// Levels of `h∘E` to probe: two on each ramp, the rest spread over the plateau.
fn sample_levels(f: &ProfileF, n_levels: usize) -> Vec<f64> {
    let w = f.ramp_w;
    let (lo, hi) = f.support();
    let mut levels = Vec::with_capacity(n_levels);
    let ramp_points = [lo + 0.5 * w, lo + 0.8 * w, hi - 0.8 * w, hi - 0.5 * w];
    let n_ramp = (n_levels / 2).min(ramp_points.len());
    levels.extend_from_slice(&ramp_points[..n_ramp]);
    let n_plateau = n_levels - n_ramp;
    let (a, b) = f.plateau();
    for i in 0..n_plateau {
        levels.push(a + (b - a) * (i as f64 + 0.5) / n_plateau as f64);
    }
    levels
}

fn check_level(sys: &MagneticSystem, f: &ProfileF, level: f64, period_tol: f64) -> Result<LevelCheck> {
    let energy = dynamics::energy_of_h(sys, level)?;
    let st = sys.state_with_speed((2.0 * energy).sqrt());
    let kind = HamiltonianKind::Profiled(*f);
    let slope = f.derivative(level);
    if slope == 0.0 {
        let x = dynamics::vector_field(sys, &st, &kind)?;
        let stationary = x.iter().all(|c| *c == 0.0);
        if !stationary {
            return Err(Error::CertificationFailed(format!("flat level {level} is not stationary")));
        }
        return Ok(LevelCheck { level, slope, expected_period: None, measured_period: None, stationary });
    }
    let expected = 1.0 / slope;
    let report = first_return(sys, &st, &kind, CERT_INTEGRATION_TOL, 1.5 * expected)?;
    if !report.converged {
        return Err(Error::CertificationFailed(format!("no return detected on level {level}")));
    }
    if report.period < 1.0 {
        return Err(Error::CertificationFailed(format!(
            "period {} < 1 on level {level}",
            report.period
        )));
    }
    let floor = 1.0 / f.slope_bound() - period_tol;
    if report.period < floor {
        return Err(Error::CertificationFailed(format!(
            "period {} below the floor {floor} on level {level}",
            report.period
        )));
    }
    if (report.period - expected).abs() > period_tol {
        return Err(Error::CertificationFailed(format!(
            "period {} differs from 1/f' = {expected} on level {level}",
            report.period
        )));
    }
    Ok(LevelCheck {
        level,
        slope,
        expected_period: Some(expected),
        measured_period: Some(report.period),
        stationary: false,
    })
}

/// Measure the periods of the profiled flow `f'(H)·X_H` on `n_levels` levels
/// with `f' > 0` and check stationarity on one flat level at each end.
pub fn verify_admissibility(
    sys: &MagneticSystem,
    r: f64,
    profile: &ProfileF,
    n_levels: usize,
    tol: f64,
) -> Result<AdmissibilityReport> {
    let cap = capacity_value(sys.k(), sys.s, r)?;
    if (profile.max_h - cap.value).abs() > 1e-12 * cap.value {
        return Err(Error::InvalidArgument(format!(
            "profile maxH = {} differs from the capacity value {}",
            profile.max_h, cap.value
        )));
    }
    if n_levels == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let mut levels = sample_levels(profile, n_levels);
    levels.push(0.5 * profile.eta);
    levels.push(profile.max_h - 0.5 * profile.eta);

    let checks: Vec<LevelCheck> = levels
        .par_iter()
        .map(|&lv| check_level(sys, profile, lv, tol))
        .collect::<Result<_>>()?;
    let min_period_measured = checks
        .iter()
        .filter_map(|c| c.measured_period)
        .fold(f64::INFINITY, f64::min);
    Ok(AdmissibilityReport {
        min_period_measured,
        levels_checked: checks.len(),
        certified_lower_bound: profile.top(),
        levels: checks,
    })
}

/// Machine-readable lower-bound certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityCertificate {
    pub value: f64,
    pub kappa: f64,
    pub s: f64,
    pub r: f64,
    pub stable_branch: bool,
    pub delta: f64,
    pub eta: f64,
    pub ramp_w: f64,
    pub certified_lower_bound: f64,
    pub min_period_measured: f64,
    pub levels_checked: usize,
    /// `value - certified_lower_bound = delta·maxH + (1 - delta)(2 eta + ramp_w)`.
    pub gap: f64,
}

pub fn capacity_certificate(
    kappa: f64,
    s: f64,
    r: f64,
    delta: f64,
    eta: f64,
    ramp_w: f64,
) -> Result<CapacityCertificate> {
    let cap = capacity_value(kappa, s, r)?;
    let profile = build_profile(cap.value, delta, eta, ramp_w)?;
    let sys = MagneticSystem::new(kappa, s)?;
    let report = verify_admissibility(&sys, r, &profile, DEFAULT_LEVELS, DEFAULT_PERIOD_TOL)?;
    if !(report.certified_lower_bound < cap.value) {
        return Err(Error::CertificationFailed(format!(
            "lower bound {} is not below the capacity {}",
            report.certified_lower_bound, cap.value
        )));
    }
    Ok(CapacityCertificate {
        value: cap.value,
        kappa,
        s,
        r,
        stable_branch: cap.stable_branch,
        delta,
        eta,
        ramp_w,
        certified_lower_bound: report.certified_lower_bound,
        min_period_measured: report.min_period_measured,
        levels_checked: report.levels_checked,
        gap: cap.value - report.certified_lower_bound,
    })
}
