//! Runtime invariant suites. Each check reports the observed residual next to
//! its threshold so that a failing build says which identity broke and by how
//! much.

pub(crate) mod dd;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{self, first_return};
use crate::capacity::{self, capacity_value, strong_field_check};
use crate::dynamics::{
    self, canonical_one_form, dlambda, energy_gradient, hamiltonian_vector_field, kinetic_energy,
    period_of_energy, twisted_form, HamiltonianKind, MagneticSystem, PhaseState, PhaseVec,
};
use crate::geometry::{self, ChartPoint, Curvature, Lattice, TangentVec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Dynamics,
    Analysis,
    Capacity,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Dynamics => "dynamics",
            Suite::Analysis => "analysis",
            Suite::Capacity => "capacity",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometry" => Ok(Suite::Geometry),
            "dynamics" => Ok(Suite::Dynamics),
            "analysis" => Ok(Suite::Analysis),
            "capacity" => Ok(Suite::Capacity),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(suite: Suite, name: &'static str, residual: f64, threshold: f64) -> Self {
        CheckResult { suite: suite.name(), name, residual, threshold, passed: residual <= threshold }
    }
}

/// Closed-form kinetic field under test.
pub type FieldFn = fn(&MagneticSystem, &PhaseState) -> PhaseVec;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub field: FieldFn,
    pub seed: u64,
    pub random_states: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { field: dynamics::lorentz_rhs, seed: 0x5eed, random_states: 200 }
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    match suite {
        Suite::Geometry => geometry_suite(opts),
        Suite::Dynamics => dynamics_suite(opts),
        Suite::Analysis => analysis_suite(),
        Suite::Capacity => capacity_suite(),
        Suite::All => {
            let mut out = geometry_suite(opts)?;
            out.extend(dynamics_suite(opts)?);
            out.extend(analysis_suite()?);
            out.extend(capacity_suite()?);
            Ok(out)
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn kappa(v: f64) -> Curvature {
    Curvature::new(v).expect("fixed curvature is valid")
}

fn geometry_suite(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let g = Suite::Geometry;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();

    // Gaussian curvature -Δ ln ρ / ρ² by a five-point stencil
    let h = 2e-4;
    let mut curv = 0.0f64;
    for k in [-1.0, 0.0, 1.0, 4.0] {
        for _ in 0..20 {
            let (x, y) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let l = |x: f64, y: f64| geometry::rho(k, x, y).ln();
            let lap = (l(x + h, y) + l(x - h, y) + l(x, y + h) + l(x, y - h) - 4.0 * l(x, y)) / (h * h);
            let r = geometry::rho(k, x, y);
            curv = curv.max((-lap / (r * r) - k).abs());
        }
    }
    out.push(CheckResult::new(g, "gaussian curvature (finite difference)", curv, 1e-6));

    let mut rot = 0.0f64;
    let mut tri = 0.0f64;
    let mut round = 0.0f64;
    let mut expd = 0.0f64;
    let mut trans = 0.0f64;
    for k in [-1.0, 0.0, 1.0] {
        let kk = kappa(k);
        for _ in 0..opts.random_states / 4 {
            let mut pt = || ChartPoint::new(rng.random_range(-0.9..0.9), rng.random_range(-0.9..0.9));
            let (p, q, r) = (pt(), pt(), pt());
            let w = TangentVec::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = geometry::norm(kk, &p, w)?;
            let jw = geometry::rotate90(kk, &p, w)?;
            rot = rot.max((geometry::norm(kk, &p, jw)? - n).abs()).max(geometry::metric_inner(kk, &p, w, jw)?.abs());
            let (pq, qr, pr) = (geometry::distance(kk, &p, &q)?, geometry::distance(kk, &q, &r)?, geometry::distance(kk, &p, &r)?);
            tri = tri.max(pr - pq - qr);
            let rad = rng.random_range(0.05..1.5);
            let kg = geometry::circle_curvature(kk, rad)?;
            round = round.max((geometry::radius_from_curvature(kk, kg)? - rad).abs());
            let e = geometry::exp_map(kk, &p, w)?;
            if e.injective {
                expd = expd.max((geometry::distance(kk, &p, &e.point)? - n).abs());
            }
            if k > 0.0 {
                let (p2, w2) = geometry::chart_transition(kk, &p, w)?;
                let (p3, w3) = geometry::chart_transition(kk, &p2, w2)?;
                let back = (p3.x - p.x).abs().max((p3.y - p.y).abs()).max((w3.a - w.a).abs()).max((w3.b - w.b).abs());
                let iso = (geometry::norm(kk, &p2, w2)? - n).abs();
                trans = trans.max(back).max(iso);
            }
        }
    }
    out.push(CheckResult::new(g, "rotation preserves the metric", rot, 1e-12));
    out.push(CheckResult::new(g, "triangle inequality violation", tri.max(0.0), 1e-12));
    out.push(CheckResult::new(g, "radius/curvature round trip", round, 1e-12));
    out.push(CheckResult::new(g, "exp map length vs distance", expd, 1e-9));
    out.push(CheckResult::new(g, "chart transition involution and isometry", trans, 1e-12));

    let lat = Lattice::new([1.0, 0.2], [0.3, 1.1])?;
    let (g1, g2) = lat.generators();
    let mut torus = 0.0f64;
    for _ in 0..50 {
        let p = ChartPoint::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let (a, b) = (rng.random_range(-3i32..=3) as f64, rng.random_range(-3i32..=3) as f64);
        let moved = ChartPoint::new(p.x + a * g1[0] + b * g2[0], p.y + a * g1[1] + b * g2[1]);
        let (u, v) = (geometry::torus_project(&p, &lat), geometry::torus_project(&moved, &lat));
        let d = (u.x - v.x).abs().max((u.y - v.y).abs());
        // projections may land on opposite edges of the cell
        let wrapped = [(0.0, 0.0), (g1[0], g1[1]), (g2[0], g2[1]), (g1[0] + g2[0], g1[1] + g2[1])]
            .iter()
            .flat_map(|(sx, sy)| [(u.x - v.x - sx).abs().max((u.y - v.y - sy).abs()), (v.x - u.x - sx).abs().max((v.y - u.y - sy).abs())])
            .fold(d, f64::min);
        torus = torus.max(wrapped);
    }
    out.push(CheckResult::new(g, "torus projection commutes with translations", torus, 1e-9));
    Ok(out)
}

fn random_state(rng: &mut ChaCha8Rng) -> PhaseState {
    PhaseState::new(
        rng.random_range(-0.9..0.9),
        rng.random_range(-0.9..0.9),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

fn unit(i: usize) -> PhaseVec {
    let mut v = [0.0; 4];
    v[i] = 1.0;
    v
}

fn dynamics_suite(opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let g = Suite::Dynamics;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let kappas = [-1.0, 0.0, 1.0];
    let strengths = [-2.0, -0.5, 0.5, 2.0];
    let mut defining = 0.0f64;
    let mut oracle = 0.0f64;
    let mut dl = 0.0f64;
    for i in 0..opts.random_states {
        let sys = MagneticSystem::new(kappas[i % 3], strengths[(i / 3) % 4])?;
        let st = random_state(&mut rng);
        let x = (opts.field)(&sys, &st);
        let de = energy_gradient(&sys, &st);
        let scale = 1.0 + de.iter().map(|c| c.abs()).fold(0.0, f64::max);
        for j in 0..4 {
            defining = defining.max((twisted_form(&sys, &st, &x, &unit(j)) + de[j]).abs() / scale);
        }
        let solved = hamiltonian_vector_field(&sys, &st, &HamiltonianKind::Kinetic)?;
        for j in 0..4 {
            oracle = oracle.max((solved[j] - x[j]).abs());
        }
        let a: PhaseVec = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let b: PhaseVec = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        dl = dl.max((fd_dlambda(&sys, &st, &a, &b, 1e-4) - dlambda(&sys, &st, &a, &b)).abs());
    }
    let mut out = vec![
        CheckResult::new(g, "omega(X,.)+dE residual", defining, 1e-10),
        CheckResult::new(g, "closed-form field vs linear solve", oracle, 1e-12),
        CheckResult::new(g, "dlambda vs finite-difference exterior derivative", dl, 1e-6),
    ];

    let mut drift = 0.0f64;
    for (k, s, v) in [(1.0, 1.0, 1.0), (0.0, 0.7, 2.0), (-1.0, 2.0, 1.0), (1.0, -0.5, 3.0)] {
        let sys = MagneticSystem::new(k, s)?;
        let st0 = sys.state_with_speed(v);
        let t = period_of_energy(&sys, kinetic_energy(&sys, &st0))?;
        drift = drift.max(dynamics::solve(&sys, &st0, &HamiltonianKind::Kinetic, 10.0 * t, 1e-10)?.stats().max_energy_drift);
    }
    out.push(CheckResult::new(g, "energy drift over ten periods", drift, 1e-8));

    // one orbit passes through the antipodal chart, the other is centred at
    // the origin and never leaves the Main chart
    let sys = MagneticSystem::new(1.0, 0.2)?;
    let v = 3.0;
    let t = period_of_energy(&sys, 0.5 * v * v)?;
    let radius = geometry::radius_from_curvature(sys.kappa, sys.s / v)?;
    let c = 2.0 * (0.5 * radius).tan();
    let centred = sys.state(c, 0.0, 0.0, v * (1.0 + 0.25 * c * c))?;
    let p1 = first_return(&sys, &sys.state_with_speed(v), &HamiltonianKind::Kinetic, 1e-11, 1.5 * t)?;
    let p2 = first_return(&sys, &centred, &HamiltonianKind::Kinetic, 1e-11, 1.5 * t)?;
    let swap = if p1.converged && p2.converged { (p1.period - p2.period).abs() } else { f64::INFINITY };
    out.push(CheckResult::new(g, "period invariance under chart swaps", swap, 1e-7));

    let sys = MagneticSystem::new(-0.5, 1.2)?;
    let st0 = sys.state(0.2, -0.1, 0.8, 0.5)?;
    let mut rep = 0.0f64;
    for t in [0.1, 0.37, 0.8, 1.0] {
        let a = dynamics::circle_action_flow(&sys, &st0, t, 1e-11)?;
        let sol = dynamics::solve(&sys, &st0, &HamiltonianKind::CircleAction, t, 1e-11)?;
        let b = dynamics::express_in(&sys, sol.end_state(), &st0.p.chart)?;
        rep = rep.max(a.phase_distance(&b));
    }
    out.push(CheckResult::new(g, "circle action vs reparametrized integration", rep, 1e-8));
    Ok(out)
}

fn fd_dlambda(sys: &MagneticSystem, st: &PhaseState, a: &PhaseVec, b: &PhaseVec, h: f64) -> f64 {
    let lam = |c: PhaseVec, d: &PhaseVec| canonical_one_form(sys, &st.with_coords(c), d);
    let x = st.coords();
    let shift = |d: &PhaseVec, t: f64| -> PhaseVec { std::array::from_fn(|i| x[i] + t * d[i]) };
    (lam(shift(a, h), b) - lam(shift(a, -h), b)) / (2.0 * h) - (lam(shift(b, h), a) - lam(shift(b, -h), a)) / (2.0 * h)
}

/// Six energies across the strong-field range of `(κ, s)`.
pub fn sample_energies(kappa: f64, s: f64) -> [f64; 6] {
    if kappa < 0.0 {
        let e_max = s * s / (-2.0 * kappa);
        [0.02, 0.2, 0.4, 0.6, 0.8, 0.95].map(|f| f * e_max)
    } else {
        [0.01, 0.1, 0.5, 1.0, 2.5, 5.0]
    }
}

fn analysis_suite() -> Result<Vec<CheckResult>> {
    let g = Suite::Analysis;
    let mut law = 0.0f64;
    let mut semi = 0.0f64;
    for k in [-1.0, 0.0, 1.0] {
        for s in [0.7, 1.0, 2.0] {
            let sys = MagneticSystem::new(k, s)?;
            for e in sample_energies(k, s) {
                let st0 = sys.state_with_speed((2.0 * e).sqrt());
                let expected = 2.0 * PI / (s * s + 2.0 * k * e).sqrt();
                let r = first_return(&sys, &st0, &HamiltonianKind::Kinetic, 1e-10, 1.5 * expected)?;
                law = law.max(if r.converged { rel(r.period, expected) } else { f64::INFINITY });
                let c = first_return(&sys, &st0, &HamiltonianKind::CircleAction, 1e-10, 1.5)?;
                semi = semi.max(if c.converged { (c.period - 1.0).abs() } else { f64::INFINITY });
            }
        }
    }
    let mut out = vec![
        CheckResult::new(g, "period law 2pi/sqrt(s^2+2kappa E)", law, 1e-6),
        CheckResult::new(g, "circle action period one (semifree)", semi, 1e-6),
    ];

    let mut circ = 0.0f64;
    let mut start = 0.0f64;
    for (k, s, v) in [(1.0, 1.0, 1.0), (1.0, 0.3, 2.0), (0.0, 1.3, 0.8), (-1.0, 2.0, 1.0), (-0.25, 1.0, 1.5), (0.0, 2.0, 1.0)] {
        let sys = MagneticSystem::new(k, s)?;
        let st0 = sys.state_with_speed(v);
        let t = period_of_energy(&sys, 0.5 * v * v)?;
        let traj = dynamics::integrate(&sys, &st0, &HamiltonianKind::Kinetic, t, 1e-11, 512)?;
        let fit = analysis::fit_geodesic_circle(&sys, &traj)?;
        let predicted = geometry::circle_circumference(sys.kappa, fit.radius)?;
        circ = circ.max(rel(t * v, predicted));
        let base = first_return(&sys, &st0, &HamiltonianKind::Kinetic, 1e-11, 1.5 * t)?;
        let sol = dynamics::solve(&sys, &st0, &HamiltonianKind::Kinetic, t, 1e-11)?;
        let moved = first_return(&sys, &sol.eval(0.37 * t), &HamiltonianKind::Kinetic, 1e-11, 1.5 * t)?;
        start = start.max((moved.period - base.period).abs());
    }
    out.push(CheckResult::new(g, "circumference of fitted circle", circ, 1e-5));
    out.push(CheckResult::new(g, "period independent of start point", start, 1e-8));

    let sys = MagneticSystem::new(1.0, 1.0)?;
    let exact = dynamics::h_of_energy(&sys, 0.5)?;
    let errs: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| analysis::swept_symplectic_area(&sys, 0.5, n, n, 1e-12).map(|a| (a - exact).abs()))
        .collect::<Result<_>>()?;
    let order = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    out.push(CheckResult::new(g, "swept area convergence order deficit (2 - p)", (2.0 - order).max(0.0), 0.2));
    Ok(out)
}

fn capacity_suite() -> Result<Vec<CheckResult>> {
    let g = Suite::Capacity;
    let mut ident = 0.0f64;
    let mut cons = 0.0f64;
    for s in [0.3, 1.0, 4.0] {
        for r in [0.2, 1.0, 3.0] {
            for e in -6..=1 {
                for sign in [-1.0, 1.0] {
                    let k = sign * 10f64.powi(e) * s * s / (r * r);
                    if !strong_field_check(k, s, r) {
                        continue;
                    }
                    let c = capacity_value(k, s, r)?.value;
                    ident = ident.max(rel(c, dd::capacity_reference(k, s, r)));
                    let sys = MagneticSystem::new(k, s)?;
                    cons = cons.max(rel(c, dynamics::h_of_energy(&sys, 0.5 * r * r)?));
                }
            }
        }
    }
    let c0 = capacity_value(0.0, 1.0, 1.0)?.value;
    let cont = [1e-9, -1e-9]
        .iter()
        .map(|&k| capacity_value(k, 1.0, 1.0).map(|c| (c.value - c0).abs() / c0))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let mut violations = 0usize;
    for k in [-1.0, 0.0, 1.0] {
        for s in [0.5, 1.0, 2.0] {
            let mut prev = 0.0;
            for i in 1..=30 {
                let r = 0.05 * i as f64;
                if !strong_field_check(k, s, r) {
                    break;
                }
                let c = capacity_value(k, s, r)?.value;
                violations += usize::from(c <= prev);
                prev = c;
            }
        }
        let mut prev = f64::INFINITY;
        for i in 1..=30 {
            let c = capacity_value(k, 0.5 + 0.1 * i as f64, 0.4)?.value;
            violations += usize::from(c >= prev);
            prev = c;
        }
    }

    let value = capacity_value(1.0, 1.0, 1.0)?.value;
    let sharp = capacity::capacity_certificate(1.0, 1.0, 1.0, 1e-4, 1e-4, 1e-4)?;
    let profile = capacity::build_profile(value, 0.2, 0.1, 0.1)?;
    let sys = MagneticSystem::new(1.0, 1.0)?;
    let rep = capacity::verify_admissibility(&sys, 1.0, &profile, capacity::DEFAULT_LEVELS, capacity::DEFAULT_PERIOD_TOL)?;
    let floor = 1.0 / profile.slope_bound();

    Ok(vec![
        CheckResult::new(g, "rationalized vs extended-precision closed form", ident, 1e-14),
        CheckResult::new(g, "kappa-continuity at kappa = +-1e-9", cont, 1e-9),
        CheckResult::new(g, "monotonicity violations", violations as f64, 0.0),
        CheckResult::new(g, "capacity vs h(r^2/2)", cons, 1e-14),
        CheckResult::new(g, "relative gap at (1e-4, 1e-4, 1e-4)", sharp.gap / value, 1e-3),
        CheckResult::new(g, "period floor 1/(1-delta) deficit", (floor - rep.min_period_measured).max(0.0), capacity::DEFAULT_PERIOD_TOL),
    ])
}
