//! The twisted symplectic form `ω_s = dλ - s π*σ` on the tangent bundle, in
//! chart coordinates `(x, y, u, w)` with `v = u ∂x + w ∂y`, and the flows of the
//! kinetic energy and its reparametrizations.
//!
//! Sign convention: `ι_X ω_s = -dH` and `σ(v, Jv) > 0`. In a positively
//! oriented flat chart with `s > 0` the velocity turns counterclockwise,
//! `u̇ = -s w`, `ẇ = s u`.

mod integrator;

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};

use crate::capacity::ProfileF;
use crate::geometry::{self, rho, ChartPoint, Curvature, TangentVec};
use crate::{Error, Result};

pub use integrator::{circle_action_flow, integrate, solve, DenseSolution, Sample, Stats, Trajectory};

/// Phase-space vector `(δx, δy, δu, δw)` in chart coordinates.
pub type PhaseVec = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticSystem {
    pub kappa: Curvature,
    pub s: f64,
}

impl MagneticSystem {
    pub fn new(kappa: f64, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("magnetic strength {s} is not finite")));
        }
        Ok(MagneticSystem { kappa: Curvature::new(kappa)?, s })
    }

    pub fn k(&self) -> f64 {
        self.kappa.value()
    }

    /// A state in the Main chart, validated against the chart domain.
    pub fn state(&self, x: f64, y: f64, u: f64, w: f64) -> Result<PhaseState> {
        let st = PhaseState::new(x, y, u, w);
        geometry::conformal_factor(self.kappa, &st.p)?;
        if !(u.is_finite() && w.is_finite()) {
            return Err(Error::InvalidArgument("velocity components must be finite".into()));
        }
        Ok(st)
    }

    /// Origin state with speed `|v|_g = speed` pointing along `+x`.
    pub fn state_with_speed(&self, speed: f64) -> PhaseState {
        PhaseState::new(0.0, 0.0, speed, 0.0)
    }

    /// `s² + 2κE`; positive exactly in the strong-field regime at energy `E`.
    pub fn discriminant(&self, energy: f64) -> f64 {
        self.s * self.s + 2.0 * self.k() * energy
    }

    fn require_strong(&self, energy: f64) -> Result<f64> {
        if self.s == 0.0 {
            return Err(Error::ZeroField);
        }
        let disc = self.discriminant(energy);
        if !(energy >= 0.0) || !(disc > 0.0) {
            return Err(Error::WeakField {
                kappa: self.k(),
                s: self.s,
                r: (2.0 * energy).sqrt(),
                discriminant: disc,
            });
        }
        Ok(disc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub p: ChartPoint,
    pub u: f64,
    pub w: f64,
}

impl PhaseState {
    pub fn new(x: f64, y: f64, u: f64, w: f64) -> Self {
        PhaseState { p: ChartPoint::new(x, y), u, w }
    }

    pub fn coords(&self) -> PhaseVec {
        [self.p.x, self.p.y, self.u, self.w]
    }

    pub fn with_coords(&self, c: PhaseVec) -> Self {
        PhaseState {
            p: ChartPoint::in_chart(self.p.chart, c[0], c[1]),
            u: c[2],
            w: c[3],
        }
    }

    pub fn velocity(&self) -> TangentVec {
        TangentVec::new(self.u, self.w)
    }

    /// Euclidean distance in `(x, y, u, w)`; both states must share a chart.
    pub fn phase_distance(&self, other: &PhaseState) -> f64 {
        let (a, b) = (self.coords(), other.coords());
        a.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
    }
}

/// Re-express a phase state in another chart.
pub fn express_in(sys: &MagneticSystem, st: &PhaseState, target: &geometry::Chart) -> Result<PhaseState> {
    let (p, v) = geometry::change_chart(sys.kappa, &st.p, st.velocity(), target)?;
    Ok(PhaseState { p, u: v.a, w: v.b })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianKind {
    /// `E = ½|v|²_g`, the magnetic geodesic flow.
    Kinetic,
    /// `H = h∘E`, whose flow has period one on every non-zero level.
    CircleAction,
    /// `f∘H` for an admissible profile `f`.
    Profiled(ProfileF),
}

pub fn kinetic_energy(sys: &MagneticSystem, st: &PhaseState) -> f64 {
    let r = rho(sys.k(), st.p.x, st.p.y);
    0.5 * r * r * (st.u * st.u + st.w * st.w)
}

pub fn speed(sys: &MagneticSystem, st: &PhaseState) -> f64 {
    rho(sys.k(), st.p.x, st.p.y) * st.u.hypot(st.w)
}

/// `(ρ², ∂xρ², ∂yρ²)` at the base point.
fn rho2_with_gradient(k: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let r = rho(k, x, y);
    let r3 = r * r * r;
    (r * r, -k * x * r3, -k * y * r3)
}

/// Analytic differential of the kinetic energy.
pub fn energy_gradient(sys: &MagneticSystem, st: &PhaseState) -> PhaseVec {
    let (r2, r2x, r2y) = rho2_with_gradient(sys.k(), st.p.x, st.p.y);
    let v2 = st.u * st.u + st.w * st.w;
    [0.5 * v2 * r2x, 0.5 * v2 * r2y, r2 * st.u, r2 * st.w]
}

/// `λ(δ) = g(v, dπ δ) = ρ² (u δx + w δy)`.
pub fn canonical_one_form(sys: &MagneticSystem, st: &PhaseState, d: &PhaseVec) -> f64 {
    let r = rho(sys.k(), st.p.x, st.p.y);
    r * r * (st.u * d[0] + st.w * d[1])
}

/// Closed form of `dλ = ρ² (du∧dx + dw∧dy) + (w ∂xρ² - u ∂yρ²) dx∧dy`.
pub fn dlambda(sys: &MagneticSystem, st: &PhaseState, d1: &PhaseVec, d2: &PhaseVec) -> f64 {
    let (r2, r2x, r2y) = rho2_with_gradient(sys.k(), st.p.x, st.p.y);
    let wedge = |i: usize, j: usize| d1[i] * d2[j] - d1[j] * d2[i];
    r2 * (wedge(2, 0) + wedge(3, 1)) + (st.w * r2x - st.u * r2y) * wedge(0, 1)
}

/// Pulled-back area form `σ = ε ρ² dx∧dy`, `ε` the chart orientation.
pub fn area_form(sys: &MagneticSystem, st: &PhaseState, d1: &PhaseVec, d2: &PhaseVec) -> f64 {
    let r = rho(sys.k(), st.p.x, st.p.y);
    st.p.chart.orientation() * r * r * (d1[0] * d2[1] - d1[1] * d2[0])
}

pub fn twisted_form(sys: &MagneticSystem, st: &PhaseState, d1: &PhaseVec, d2: &PhaseVec) -> f64 {
    dlambda(sys, st, d1, d2) - sys.s * area_form(sys, st, d1, d2)
}

/// Matrix `Ω_ij = ω_s(e_i, e_j)` on the coordinate frame.
pub fn form_matrix(sys: &MagneticSystem, st: &PhaseState) -> Matrix4<f64> {
    let e = |i: usize| {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        v
    };
    Matrix4::from_fn(|i, j| twisted_form(sys, st, &e(i), &e(j)))
}

/// `h(E) = (2π/κ)(√(s² + 2κE) - |s|)`, evaluated as `4πE / (√(s² + 2κE) + |s|)`.
pub fn h_of_energy(sys: &MagneticSystem, energy: f64) -> Result<f64> {
    let disc = sys.require_strong(energy)?;
    Ok(4.0 * PI * energy / (disc.sqrt() + sys.s.abs()))
}

/// `h'(E) = 2π / √(s² + 2κE)`, the period of the kinetic flow at energy `E`.
pub fn period_of_energy(sys: &MagneticSystem, energy: f64) -> Result<f64> {
    let disc = sys.require_strong(energy)?;
    Ok(2.0 * PI / disc.sqrt())
}

/// Inverse of [`h_of_energy`]: `E = |s| H/(2π) + κ H²/(8π²)`.
pub fn energy_of_h(sys: &MagneticSystem, h: f64) -> Result<f64> {
    if sys.s == 0.0 {
        return Err(Error::ZeroField);
    }
    let a = sys.s.abs() + sys.k() * h / (2.0 * PI);
    if !(h >= 0.0) || !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("H = {h} is not a value of h")));
    }
    Ok(sys.s.abs() * h / (2.0 * PI) + sys.k() * h * h / (8.0 * PI * PI))
}

pub fn hamiltonian(sys: &MagneticSystem, st: &PhaseState, kind: &HamiltonianKind) -> Result<f64> {
    let e = kinetic_energy(sys, st);
    match kind {
        HamiltonianKind::Kinetic => Ok(e),
        HamiltonianKind::CircleAction => h_of_energy(sys, e),
        HamiltonianKind::Profiled(f) => Ok(f.value(h_of_energy(sys, e)?)),
    }
}

/// `dH/dE` for the chosen Hamiltonian at energy `E`.
pub fn field_scale(sys: &MagneticSystem, energy: f64, kind: &HamiltonianKind) -> Result<f64> {
    match kind {
        HamiltonianKind::Kinetic => Ok(1.0),
        HamiltonianKind::CircleAction => period_of_energy(sys, energy),
        HamiltonianKind::Profiled(f) => {
            let h = h_of_energy(sys, energy)?;
            Ok(f.derivative(h) * period_of_energy(sys, energy)?)
        }
    }
}

pub fn hamiltonian_gradient(sys: &MagneticSystem, st: &PhaseState, kind: &HamiltonianKind) -> Result<PhaseVec> {
    let scale = field_scale(sys, kinetic_energy(sys, st), kind)?;
    Ok(energy_gradient(sys, st).map(|g| scale * g))
}

/// Hamiltonian vector field from the pointwise linear solve `Ωᵀ X = -dH`.
pub fn hamiltonian_vector_field(sys: &MagneticSystem, st: &PhaseState, kind: &HamiltonianKind) -> Result<PhaseVec> {
    let dh = hamiltonian_gradient(sys, st, kind)?;
    let rhs = -Vector4::from_row_slice(&dh);
    let x = form_matrix(sys, st)
        .transpose()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::SingularForm(Box::new(*st)))?;
    Ok([x[0], x[1], x[2], x[3]])
}

/// Closed-form magnetic geodesic field `X_E`.
pub fn lorentz_rhs(sys: &MagneticSystem, st: &PhaseState) -> PhaseVec {
    let k = sys.k();
    let PhaseState { p, u, w } = *st;
    let (x, y) = (p.x, p.y);
    let r = rho(k, x, y);
    let es = p.chart.orientation() * sys.s;
    let v2 = u * u + w * w;
    let cross = x * w - y * u;
    [
        u,
        w,
        -k * r * cross * w + 0.5 * k * r * x * v2 - es * w,
        k * r * cross * u + 0.5 * k * r * y * v2 + es * u,
    ]
}

/// Fast path for `X_H`: `dH/dE · X_E`.
pub fn vector_field(sys: &MagneticSystem, st: &PhaseState, kind: &HamiltonianKind) -> Result<PhaseVec> {
    let scale = field_scale(sys, kinetic_energy(sys, st), kind)?;
    Ok(lorentz_rhs(sys, st).map(|c| scale * c))
}

#[cfg(test)]
mod tests;
