use thiserror::Error;

use crate::dynamics::PhaseState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curvature {0} is not finite or exceeds |kappa| <= 1e6")]
    InvalidCurvature(f64),

    #[error("point ({x}, {y}) lies outside the chart domain x^2 + y^2 < {bound} for kappa = {kappa}")]
    OutOfDomain { kappa: f64, x: f64, y: f64, bound: f64 },

    #[error("radius {radius} out of range for kappa = {kappa}")]
    RadiusOutOfRange { kappa: f64, radius: f64 },

    #[error("geodesic curvature {kg} <= sqrt(|kappa|) = {critical}: curves of this curvature do not close")]
    NotClosing { kg: f64, critical: f64 },

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("points live in different charts")]
    ChartMismatch,

    #[error("invalid lattice: generators are linearly dependent")]
    DegenerateLattice,

    #[error(
        "weak magnetic field: s^2 + kappa*r^2 = {discriminant} <= 0 (kappa = {kappa}, s = {s}, r = {r}); \
         the capacity is not determined in this regime"
    )]
    WeakField { kappa: f64, s: f64, r: f64, discriminant: f64 },

    #[error("magnetic strength s = 0: capacity and circle action need s != 0")]
    ZeroField,

    #[error("tolerance {0} outside [1e-13, 1e-3]")]
    InvalidTolerance(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, last: Box<PhaseState> },

    #[error("integrator left the chart domain at t = {t}")]
    DomainExit { t: f64, last: Box<PhaseState> },

    #[error("singular symplectic matrix at state {0:?}")]
    SingularForm(Box<PhaseState>),

    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(&'static str),

    #[error("orbit is not closed: closure error {0}")]
    NotClosed(f64),

    #[error("infeasible profile: {0}")]
    InfeasibleProfile(String),

    #[error("admissibility certification failed: {0}")]
    CertificationFailed(String),
}
