//! Acceptance suite. Prints one PASS/FAIL line per criterion, with the
//! individual checks underneath, and exits non-zero if any enforced check fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use magcap_core::analysis::{self, first_return};
use magcap_core::capacity::{self, capacity_value};
use magcap_core::dynamics::{self, HamiltonianKind, MagneticSystem};
use magcap_core::geometry;
use magcap_core::verify::{self, sample_energies, Suite, VerifyOptions};

type Res<T> = Result<T, String>;
type Criterion = (&'static str, fn() -> Res<Vec<Check>>);

struct Check {
    name: String,
    residual: f64,
    tol: f64,
    /// Reported but not enforced: the target value cannot be reached.
    unattainable: Option<&'static str>,
}

impl Check {
    fn le(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Check { name: name.into(), residual, tol, unattainable: None }
    }

    fn passed(&self) -> bool {
        self.residual <= self.tol
    }
}

fn flag(ok: bool, name: impl Into<String>) -> Check {
    Check::le(name, if ok { 0.0 } else { 1.0 }, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn magcap(args: &[&str]) -> Res<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_magcap")).args(args).output().map_err(e)?;
    if !out.status.success() {
        return Err(format!("magcap {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(e)
}

fn capacity_values() -> Res<Vec<Check>> {
    let cases = [
        ("kappa=0 s=1 r=1 -> pi", 0.0, 1.0, 1.0, PI),
        ("kappa=-1 s=1 r=0.6 -> 0.4 pi", -1.0, 1.0, 0.6, 0.4 * PI),
        ("kappa=1 s=1 r=1 -> 2 pi (sqrt 2 - 1)", 1.0, 1.0, 1.0, 2.0 * PI * (2f64.sqrt() - 1.0)),
    ];
    cases
        .iter()
        .map(|&(name, k, s, r, want)| Ok(Check::le(name, rel(capacity_value(k, s, r).map_err(e)?.value, want), 1e-12)))
        .collect()
}

fn period_law() -> Res<Vec<Check>> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for k in [-1.0, 0.0, 1.0] {
        for s in [0.7, 1.0, 2.0] {
            let sys = MagneticSystem::new(k, s).map_err(e)?;
            for en in sample_energies(k, s) {
                let expected = 2.0 * PI / (s * s + 2.0 * k * en).sqrt();
                let st0 = sys.state_with_speed((2.0 * en).sqrt());
                let r = first_return(&sys, &st0, &HamiltonianKind::Kinetic, 1e-10, 1.5 * expected).map_err(e)?;
                worst = worst.max(if r.converged { rel(r.period, expected) } else { f64::INFINITY });
                n += 1;
            }
        }
    }
    Ok(vec![Check::le(format!("max relative period error over {n} levels"), worst, 1e-6)])
}

fn circle_action() -> Res<Vec<Check>> {
    let mut closure = 0.0f64;
    let mut early = 0.0f64;
    for k in [-1.0, 0.0, 1.0] {
        let sys = MagneticSystem::new(k, 1.0).map_err(e)?;
        for en in &sample_energies(k, 1.0)[..5] {
            let st0 = sys.state_with_speed((2.0 * en).sqrt());
            let end = dynamics::circle_action_flow(&sys, &st0, 1.0, 1e-11).map_err(e)?;
            let back = dynamics::express_in(&sys, &end, &st0.p.chart).map_err(e)?;
            closure = closure.max(back.phase_distance(&st0));
            let r = first_return(&sys, &st0, &HamiltonianKind::CircleAction, 1e-10, 1.5).map_err(e)?;
            // how far before time 1 the first return occurred
            early = early.max(if r.converged { 1.0 - r.period } else { f64::INFINITY });
        }
    }
    Ok(vec![
        Check::le("phase distance after time one (15 levels)", closure, 1e-7),
        Check::le("earliest return before time 1", early.max(0.0), 1e-6),
    ])
}

fn circle_laws() -> Res<Vec<Check>> {
    let mut radius = 0.0f64;
    let mut circumference = 0.0f64;
    for (k, s, v) in [(1.0, 1.0, 1.0), (1.0, 0.3, 2.0), (0.0, 1.3, 0.8), (-1.0, 2.0, 1.0), (-0.25, 1.0, 1.5), (0.0, 2.0, 1.0)] {
        let sys = MagneticSystem::new(k, s).map_err(e)?;
        let st0 = sys.state_with_speed(v);
        let t = dynamics::period_of_energy(&sys, 0.5 * v * v).map_err(e)?;
        let traj = dynamics::integrate(&sys, &st0, &HamiltonianKind::Kinetic, t, 1e-11, 512).map_err(e)?;
        let fit = analysis::fit_geodesic_circle(&sys, &traj).map_err(e)?;
        let predicted_r = geometry::radius_from_curvature(sys.kappa, s.abs() / v).map_err(e)?;
        radius = radius.max(rel(fit.radius, predicted_r));
        let ret = first_return(&sys, &st0, &HamiltonianKind::Kinetic, 1e-11, 1.5 * t).map_err(e)?;
        let c = geometry::circle_circumference(sys.kappa, predicted_r).map_err(e)?;
        circumference = circumference.max(if ret.converged { rel(ret.period * v, c) } else { f64::INFINITY });
    }
    Ok(vec![
        Check::le("fitted radius vs radius_from_curvature (6 configurations)", radius, 1e-5),
        Check::le("period x speed vs circle_circumference", circumference, 1e-5),
    ])
}

/// Lower bound claimed for (1, 1, 1) with profile (0.2, 0.1, 0.1).
const PUBLISHED_BOUND: f64 = 1.8420584;
/// `0.8 (2 pi (sqrt 2 - 1) - 0.3)`, evaluated in 50-digit arithmetic.
const ORACLE_BOUND: f64 = 1.8420644553097167;

fn certificate() -> Res<Vec<Check>> {
    let sys = MagneticSystem::new(1.0, 1.0).map_err(e)?;
    let cap = capacity_value(1.0, 1.0, 1.0).map_err(e)?.value;
    let profile = capacity::build_profile(cap, 0.2, 0.1, 0.1).map_err(e)?;
    // a loose internal tolerance so the report is returned and measured here
    let report = capacity::verify_admissibility(&sys, 1.0, &profile, capacity::DEFAULT_LEVELS, 1e-3).map_err(e)?;
    let mismatch = report
        .levels
        .iter()
        .filter_map(|l| Some((l.measured_period? - l.expected_period?).abs()))
        .fold(0.0f64, f64::max);
    let flat_ok = report.levels.iter().filter(|l| l.expected_period.is_none()).all(|l| l.stationary);

    let sharp = capacity::capacity_certificate(1.0, 1.0, 1.0, 1e-4, 1e-4, 1e-4).map_err(e)?;
    Ok(vec![
        Check::le(format!("|T - 1/f'| over {} levels", report.levels_checked), mismatch, 1e-6),
        Check::le("period floor: 1.25 - min measured period", (1.25 - report.min_period_measured).max(0.0), 0.0),
        flag(flat_ok, "flat levels are stationary"),
        Check {
            name: format!("certified_lower_bound {} vs published 1.8420584", report.certified_lower_bound),
            residual: (report.certified_lower_bound - PUBLISHED_BOUND).abs(),
            tol: 1e-9,
            unattainable: Some(
                "1.8420584 = 0.8 (2.6025730 - 0.3) uses a mistyped capacity; 2 pi (sqrt 2 - 1) = 2.6025806 gives 1.8420645",
            ),
        },
        Check::le("certified_lower_bound vs 0.8 (2 pi (sqrt 2 - 1) - 0.3)", (report.certified_lower_bound - ORACLE_BOUND).abs(), 1e-9),
        Check::le("sharpness at (1e-4, 1e-4, 1e-4): gap / value", sharp.gap / sharp.value, 1e-3),
    ])
}

fn swept_area() -> Res<Vec<Check>> {
    let sys = MagneticSystem::new(1.0, 1.0).map_err(e)?;
    let exact = 2.0 * PI * (2f64.sqrt() - 1.0);
    let errs: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| analysis::swept_symplectic_area(&sys, 0.5, n, n, 1e-12).map(|a| (a - exact).abs()))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let order = errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::le("|area - 2 pi (sqrt 2 - 1)| at grid 256", errs[2], 1e-3),
        Check::le(format!("observed order {order:.3}: deficit 2 - p"), (2.0 - order).max(0.0), 0.2),
    ])
}

fn mane() -> Res<Vec<Check>> {
    let csv = magcap(&["sweep", "--param", "r", "--kappa", "-1", "--s", "1", "--min", "0.5", "--max", "1.2", "--steps", "15"])?;
    let mut formula = 0.0f64;
    let mut statuses = true;
    let (mut below, mut above) = (0, 0);
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let r: f64 = cols[0].parse().map_err(e)?;
        if r < 1.0 {
            below += 1;
            statuses &= cols[3] == "ok";
            let v: f64 = cols[1].parse().map_err(e)?;
            formula = formula.max(rel(v, 2.0 * PI * (1.0 - (1.0 - r * r).sqrt())));
        } else {
            above += 1;
            statuses &= cols[3] == "weak_field" && cols[1].is_empty();
        }
    }
    let out = magcap(&[
        "mane", "--kappa", "-1", "--s", "1", "--below", "0.5", "--above", "2", "--horizon", "50", "--json",
    ])?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(e)?;
    Ok(vec![
        Check::le("sweep: capacity vs 2 pi (1 - sqrt(1 - r^2)) for r < 1", formula, 1e-12),
        flag(statuses && below > 0 && above > 0, format!("sweep: {below} rows ok below r = 1, {above} rows weak_field at r >= 1")),
        flag(v["below"]["report"]["converged"] == true, "mane: closed orbit at |v| = 0.5"),
        flag(v["above"]["report"]["escaped"] == true, "mane: escape at |v| = 2 within horizon 50"),
    ])
}

fn structural() -> Res<Vec<Check>> {
    let results = verify::run(Suite::Dynamics, &VerifyOptions::default()).map_err(e)?;
    let pinned = [
        ("omega(X,.)+dE residual", 1e-10),
        ("closed-form field vs linear solve", 1e-12),
        ("dlambda vs finite-difference exterior derivative", 1e-6),
        ("energy drift over ten periods", 1e-8),
        ("period invariance under chart swaps", 1e-7),
    ];
    pinned
        .iter()
        .map(|&(name, tol)| {
            let c = results.iter().find(|c| c.name == name).ok_or_else(|| format!("missing check {name}"))?;
            Ok(Check::le(name, c.residual, tol))
        })
        .collect()
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("capacity values", capacity_values),
        ("period law", period_law),
        ("circle action", circle_action),
        ("geodesic-circle laws", circle_laws),
        ("lower-bound certificate", certificate),
        ("swept-area identity", swept_area),
        ("Mane discontinuity", mane),
        ("structural correctness", structural),
    ];
    let mut enforced_failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(checks) => {
                let ok = checks.iter().all(Check::passed);
                println!("{} criterion {} {title} ({secs:.2}s)", if ok { "PASS" } else { "FAIL" }, i + 1);
                for c in &checks {
                    let mark = if c.passed() { "ok  " } else { "fail" };
                    println!("    {mark} {}: {:.3e} (tol {:.0e})", c.name, c.residual, c.tol);
                    if let (false, Some(why)) = (c.passed(), c.unattainable) {
                        println!("         unattainable, not enforced: {why}");
                    }
                    if !c.passed() && c.unattainable.is_none() {
                        enforced_failures += 1;
                    }
                }
            }
            Err(err) => {
                println!("FAIL criterion {} {title} ({secs:.2}s): {err}", i + 1);
                enforced_failures += 1;
            }
        }
    }
    if enforced_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{enforced_failures} enforced check(s) failed");
        ExitCode::FAILURE
    }
}
