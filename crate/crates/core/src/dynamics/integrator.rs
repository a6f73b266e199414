//! Dormand-Prince 5(4) with PI step control and the fourth-order continuous
//! extension. No projection is applied; energy drift is only measured.

use super::{field_scale, kinetic_energy, lorentz_rhs, MagneticSystem, PhaseState, PhaseVec};
use super::HamiltonianKind;
use crate::geometry::{self, Chart};
use crate::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
/// Floor of the relative energy drift denominator.
const DRIFT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub steps: usize,
    pub rejected_steps: usize,
    pub max_energy_drift: f64,
    pub chart_swaps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: PhaseState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub tol: f64,
    pub stats: Stats,
}

impl Trajectory {
    pub fn first(&self) -> &PhaseState {
        &self.samples[0].state
    }

    pub fn last(&self) -> &PhaseState {
        &self.samples[self.samples.len() - 1].state
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

#[derive(Debug, Clone)]
struct Step {
    t0: f64,
    h: f64,
    chart: Chart,
    rc: [PhaseVec; 5],
}

impl Step {
    fn eval(&self, t: f64) -> PhaseVec {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rc;
        std::array::from_fn(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
    }
}

/// Continuous solution over `[0, duration]`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    steps: Vec<Step>,
    start: PhaseState,
    end: PhaseState,
    duration: f64,
    tol: f64,
    stats: Stats,
}

impl DenseSolution {
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn start(&self) -> &PhaseState {
        &self.start
    }

    /// Final state, after any chart change triggered by the last step.
    pub fn end_state(&self) -> &PhaseState {
        &self.end
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// State at time `t ∈ [0, duration]`, in the chart of the step covering `t`.
    pub fn eval(&self, t: f64) -> PhaseState {
        if self.steps.is_empty() || t <= 0.0 {
            return self.start;
        }
        let i = self.steps.partition_point(|s| s.t0 + s.h < t).min(self.steps.len() - 1);
        let step = &self.steps[i];
        let c = step.eval(t);
        PhaseState {
            p: geometry::ChartPoint::in_chart(step.chart, c[0], c[1]),
            u: c[2],
            w: c[3],
        }
    }

    /// `n + 1` uniformly spaced samples including both endpoints.
    pub fn sample_uniform(&self, sys: &MagneticSystem, n: usize) -> Trajectory {
        let n = n.max(1);
        let e0 = kinetic_energy(sys, &self.start);
        let mut drift = 0.0f64;
        let samples: Vec<Sample> = (0..=n)
            .map(|k| {
                let t = if k == n { self.duration } else { self.duration * k as f64 / n as f64 };
                let state = self.eval(t);
                drift = drift.max(relative_drift(e0, kinetic_energy(sys, &state)));
                Sample { t, state }
            })
            .collect();
        let samples = if self.duration == 0.0 { samples[..1].to_vec() } else { samples };
        Trajectory {
            samples,
            tol: self.tol,
            stats: Stats { max_energy_drift: drift, ..self.stats },
        }
    }
}

fn relative_drift(e0: f64, e: f64) -> f64 {
    (e - e0).abs() / e0.max(DRIFT_FLOOR)
}

fn in_domain(k: f64, y: &PhaseVec) -> bool {
    y.iter().all(|c| c.is_finite()) && 1.0 + 0.25 * k * (y[0] * y[0] + y[1] * y[1]) > 0.0
}

struct Rhs<'a> {
    sys: &'a MagneticSystem,
    scale: f64,
}

impl Rhs<'_> {
    fn eval(&self, chart: Chart, y: &PhaseVec) -> PhaseVec {
        if !in_domain(self.sys.k(), y) {
            return [f64::NAN; 4];
        }
        let st = PhaseState {
            p: geometry::ChartPoint::in_chart(chart, y[0], y[1]),
            u: y[2],
            w: y[3],
        };
        lorentz_rhs(self.sys, &st).map(|c| self.scale * c)
    }
}

fn axpy(y: &PhaseVec, h: f64, terms: &[(f64, &PhaseVec)]) -> PhaseVec {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
}

fn error_norm(tol: f64, y0: &PhaseVec, y1: &PhaseVec, err: &PhaseVec) -> f64 {
    let sum: f64 = (0..4)
        .map(|i| {
            let sc = tol + tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / 4.0).sqrt()
}

fn norm_scaled(tol: f64, y: &PhaseVec, v: &PhaseVec) -> f64 {
    let sum: f64 = (0..4).map(|i| (v[i] / (tol + tol * y[i].abs())).powi(2)).sum();
    (sum / 4.0).sqrt()
}

fn initial_step(rhs: &Rhs, chart: Chart, tol: f64, y0: &PhaseVec, f0: &PhaseVec, span: f64) -> f64 {
    let d0 = norm_scaled(tol, y0, y0);
    let d1 = norm_scaled(tol, y0, f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = rhs.eval(chart, &y1);
    let diff: PhaseVec = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = norm_scaled(tol, y0, &diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let h = (100.0 * h0).min(h1).min(span);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6f64.min(span)
    }
}

/// Swap sphere charts or recentre the hyperbolic chart when the state has
/// drifted into the badly conditioned part of its chart.
fn normalize_chart(sys: &MagneticSystem, st: PhaseState) -> Result<Option<PhaseState>> {
    let kappa = sys.kappa;
    if st.p.needs_transition(kappa) {
        let (p, v) = geometry::chart_transition(kappa, &st.p, st.velocity())?;
        return Ok(Some(PhaseState { p, u: v.a, w: v.b }));
    }
    if geometry::needs_recentre(kappa, &st.p) {
        let (p, v) = geometry::recentre(kappa, &st.p, st.velocity())?;
        return Ok(Some(PhaseState { p, u: v.a, w: v.b }));
    }
    Ok(None)
}

fn check_tol(tol: f64) -> Result<()> {
    if (1e-13..=1e-3).contains(&tol) {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Integrate the flow of `kind` from `st0` over `[0, duration]`.
///
/// The reparametrized fields are `dH/dE · X_E`; since `E` is a first integral
/// the factor is frozen at `E(st0)`, which makes the numerical flow an exact
/// time change of the kinetic one.
pub fn solve(
    sys: &MagneticSystem,
    st0: &PhaseState,
    kind: &HamiltonianKind,
    duration: f64,
    tol: f64,
) -> Result<DenseSolution> {
    check_tol(tol)?;
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::InvalidArgument(format!("duration {duration} must be finite and >= 0")));
    }
    geometry::conformal_factor(sys.kappa, &st0.p)?;
    let e0 = kinetic_energy(sys, st0);
    let rhs = Rhs { sys, scale: field_scale(sys, e0, kind)? };

    let mut stats = Stats::default();
    let mut steps = Vec::new();
    let mut chart = st0.p.chart;
    let mut y = st0.coords();
    let mut t = 0.0;
    let mut k1 = rhs.eval(chart, &y);
    let mut h = if duration > 0.0 { initial_step(&rhs, chart, tol, &y, &k1, duration) } else { 0.0 };
    let mut err_prev: f64 = 1e-4;
    let mut end = *st0;

    while t < duration {
        let remaining = duration - t;
        if h >= remaining || remaining - h < 1e-12 * duration {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, last: Box::new(end) });
        }
        let k2 = rhs.eval(chart, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs.eval(chart, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs.eval(chart, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs.eval(chart, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs.eval(
            chart,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs.eval(chart, &y1);
        let errv: PhaseVec =
            std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let err = error_norm(tol, &y, &y1, &errv);

        if !err.is_finite() || err > 1.0 {
            stats.rejected_steps += 1;
            let fac = if err.is_finite() { (SAFETY * err.powf(-ALPHA)).max(FAC_MIN) } else { FAC_MIN };
            h *= fac.min(1.0);
            continue;
        }

        let r2: PhaseVec = std::array::from_fn(|i| y1[i] - y[i]);
        let r3: PhaseVec = std::array::from_fn(|i| h * k1[i] - r2[i]);
        let r4: PhaseVec = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
        let r5: PhaseVec = std::array::from_fn(|i| {
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
        });
        steps.push(Step { t0: t, h, chart, rc: [y, r2, r3, r4, r5] });
        stats.steps += 1;
        t = if h == remaining { duration } else { t + h };

        let mut st = PhaseState {
            p: geometry::ChartPoint::in_chart(chart, y1[0], y1[1]),
            u: y1[2],
            w: y1[3],
        };
        if !in_domain(sys.k(), &y1) {
            return Err(Error::DomainExit { t, last: Box::new(end) });
        }
        y = y1;
        k1 = k7;
        if let Some(moved) = normalize_chart(sys, st)? {
            st = moved;
            chart = st.p.chart;
            y = st.coords();
            k1 = rhs.eval(chart, &y);
            stats.chart_swaps += 1;
        }
        end = st;
        stats.max_energy_drift = stats.max_energy_drift.max(relative_drift(e0, kinetic_energy(sys, &st)));

        let fac = (SAFETY * err.max(1e-10).powf(-ALPHA) * err_prev.powf(BETA)).clamp(FAC_MIN, FAC_MAX);
        err_prev = err.max(1e-4);
        h *= fac;
    }

    Ok(DenseSolution { steps, start: *st0, end, duration, tol, stats })
}

/// Trajectory of `kind` sampled at `n_samples + 1` uniform times over `[0, duration]`.
pub fn integrate(
    sys: &MagneticSystem,
    st0: &PhaseState,
    kind: &HamiltonianKind,
    duration: f64,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory> {
    Ok(solve(sys, st0, kind, duration, tol)?.sample_uniform(sys, n_samples))
}

/// Time-`t` map of the circle action generated by `H = h∘E`.
///
/// Realized as the kinetic flow for physical time `t·h'(E)`; the result is
/// returned in the chart of `st0`.
pub fn circle_action_flow(sys: &MagneticSystem, st0: &PhaseState, t: f64, tol: f64) -> Result<PhaseState> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("circle action time {t} outside [0, 1]")));
    }
    let e = kinetic_energy(sys, st0);
    let period = super::period_of_energy(sys, e)?;
    if t == 0.0 {
        return Ok(*st0);
    }
    let sol = solve(sys, st0, &HamiltonianKind::Kinetic, t * period, tol)?;
    super::express_in(sys, sol.end_state(), &st0.p.chart)
}
