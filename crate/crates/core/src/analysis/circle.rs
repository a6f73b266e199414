use serde::Serialize;

use crate::dynamics::{express_in, MagneticSystem, PhaseState, Trajectory};
use crate::geometry::{self, rho, ChartPoint, TangentVec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: ChartPoint,
    pub radius: f64,
    pub max_radial_residual: f64,
}

#[derive(Serialize)]
struct CircleFitRow {
    center_x: f64,
    center_y: f64,
    radius: f64,
    max_radial_residual: f64,
}

impl Serialize for CircleFit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircleFitRow {
            center_x: self.center.x,
            center_y: self.center.y,
            radius: self.radius,
            max_radial_residual: self.max_radial_residual,
        }
        .serialize(s)
    }
}

fn uniform_step(traj: &Trajectory) -> Result<f64> {
    let s = &traj.samples;
    let dt = (s[s.len() - 1].t - s[0].t) / (s.len() - 1) as f64;
    let uniform = s.windows(2).all(|p| ((p[1].t - p[0].t) - dt).abs() <= 1e-9 * dt);
    if !(dt > 0.0) || !uniform {
        return Err(Error::DegenerateTrajectory("samples must be uniformly spaced in time"));
    }
    Ok(dt)
}

/// Mean geodesic curvature `|∇_γ̇ γ̇|_g / |γ̇|²_g` along a kinetic trajectory.
///
/// The velocity is differentiated with the five-point stencil and corrected by
/// the Christoffel symbols of `g = e^{2φ}|dz|²`, `φ = ln ρ`:
/// `Γᵏᵢⱼ vⁱvʲ = 2 vᵏ (v·∇φ) - |v|² ∂ₖφ`.
pub fn measure_geodesic_curvature(sys: &MagneticSystem, traj: &Trajectory) -> Result<f64> {
    let s = &traj.samples;
    if s.len() < 20 {
        return Err(Error::DegenerateTrajectory("need at least 20 samples"));
    }
    let dt = uniform_step(traj)?;
    let k = sys.k();
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 2..s.len() - 2 {
        let here = &s[i].state;
        let local: Option<Vec<PhaseState>> = (i - 2..=i + 2)
            .map(|j| express_in(sys, &s[j].state, &here.p.chart).ok())
            .collect();
        let Some(nb) = local else { continue };
        let fd = |c: fn(&PhaseState) -> f64| {
            (-c(&nb[4]) + 8.0 * c(&nb[3]) - 8.0 * c(&nb[1]) + c(&nb[0])) / (12.0 * dt)
        };
        let (au, aw) = (fd(|p| p.u), fd(|p| p.w));
        let (x, y, u, w) = (here.p.x, here.p.y, here.u, here.w);
        let r = rho(k, x, y);
        let v2 = u * u + w * w;
        if r * r * v2 < 1e-24 {
            return Err(Error::DegenerateTrajectory("speed vanishes along the trajectory"));
        }
        let (phx, phy) = (-0.5 * k * r * x, -0.5 * k * r * y);
        let vphi = u * phx + w * phy;
        let du = au + 2.0 * u * vphi - v2 * phx;
        let dw = aw + 2.0 * w * vphi - v2 * phy;
        total += du.hypot(dw) / (r * v2);
        count += 1;
    }
    if count == 0 {
        return Err(Error::DegenerateTrajectory("no interior samples in a common chart"));
    }
    Ok(total / count as f64)
}

/// Fit the geodesic circle traced by one full period of a kinetic orbit.
///
/// The centre lies on the geodesic from `γ(0)` along the inward normal
/// `sign(s)·Jγ̇/|γ̇|`; its distance `R₀` is the root of
/// `d(c(R₀), γ(t*)) = R₀` for the sample `γ(t*)` farthest from `γ(0)`.
pub fn fit_geodesic_circle(sys: &MagneticSystem, traj: &Trajectory) -> Result<CircleFit> {
    let kappa = sys.kappa;
    let s = &traj.samples;
    if s.len() < 8 {
        return Err(Error::DegenerateTrajectory("need at least 8 samples"));
    }
    let st0 = traj.first();
    let chart = st0.p.chart;
    let last = express_in(sys, traj.last(), &chart)?;
    let scale = 1.0 + st0.coords().iter().map(|c| c.abs()).fold(0.0, f64::max);
    let closure = last.phase_distance(st0);
    if !(closure <= 1e-5 * scale) {
        return Err(Error::NotClosed(closure));
    }
    let pts: Vec<ChartPoint> = s[..s.len() - 1]
        .iter()
        .map(|smp| geometry::change_chart(kappa, &smp.state.p, TangentVec::default(), &chart).map(|(p, _)| p))
        .collect::<Result<_>>()?;

    let gamma0 = st0.p;
    let speed = geometry::norm(kappa, &gamma0, st0.velocity())?;
    if speed == 0.0 {
        return Err(Error::DegenerateTrajectory("stationary orbit"));
    }
    let jv = geometry::rotate90(kappa, &gamma0, st0.velocity())?;
    let sign = if sys.s < 0.0 { -1.0 } else { 1.0 };
    let normal = TangentVec::new(sign * jv.a / speed, sign * jv.b / speed);

    let (far, far_dist) = pts
        .iter()
        .map(|p| (*p, geometry::distance(kappa, &gamma0, p).unwrap_or(0.0)))
        .fold((gamma0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    if far_dist <= 0.0 {
        return Err(Error::DegenerateTrajectory("orbit does not leave its starting point"));
    }

    let centre_at = |r0: f64| -> Result<ChartPoint> {
        let w = TangentVec::new(r0 * normal.a, r0 * normal.b);
        Ok(geometry::exp_map(kappa, &gamma0, w)?.point)
    };
    let residual = |r0: f64| -> Result<f64> { Ok(geometry::distance(kappa, &centre_at(r0)?, &far)? - r0) };

    let limit = if kappa.value() > 0.0 { std::f64::consts::PI / kappa.value().sqrt() } else { f64::INFINITY };
    let mut hi = far_dist;
    let mut tries = 0;
    while residual(hi)? >= 0.0 {
        hi = (hi * 1.5).min(0.999_999 * limit);
        tries += 1;
        if tries > 60 {
            return Err(Error::DegenerateTrajectory("could not bracket the circle centre"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let center = centre_at(0.5 * (lo + hi))?;
    let dists: Vec<f64> = pts
        .iter()
        .map(|p| geometry::distance(kappa, &center, p))
        .collect::<Result<_>>()?;
    let radius = dists.iter().sum::<f64>() / dists.len() as f64;
    let max_radial_residual = dists.iter().map(|d| (d - radius).abs()).fold(0.0, f64::max);
    Ok(CircleFit { center, radius, max_radial_residual })
}
