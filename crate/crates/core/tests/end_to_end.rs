use std::f64::consts::PI;

use magcap_core::analysis::{self, first_return};
use magcap_core::capacity::{self, capacity_value};
use magcap_core::dynamics::{self, HamiltonianKind, MagneticSystem};
use magcap_core::geometry::{self, ChartPoint, TangentVec};
use magcap_core::verify::{self, Suite, VerifyOptions};
use magcap_core::Error;

#[test]
fn hyperbolic_orbit_is_a_geodesic_circle() {
    let sys = MagneticSystem::new(-1.0, 1.5).unwrap();
    let v = 1.2;
    let st0 = sys.state(0.3, -0.2, 0.0, 0.0).unwrap();
    let rho = geometry::conformal_factor(sys.kappa, &st0.p).unwrap();
    let st0 = sys.state(0.3, -0.2, v / rho, 0.0).unwrap();
    assert!((dynamics::speed(&sys, &st0) - v).abs() < 1e-14);

    let period = dynamics::period_of_energy(&sys, 0.5 * v * v).unwrap();
    let ret = first_return(&sys, &st0, &HamiltonianKind::Kinetic, 1e-11, 1.5 * period).unwrap();
    assert!(ret.converged);
    assert!((ret.period - period).abs() < 1e-7 * period);

    let traj = dynamics::integrate(&sys, &st0, &HamiltonianKind::Kinetic, period, 1e-11, 400).unwrap();
    let kg = analysis::measure_geodesic_curvature(&sys, &traj).unwrap();
    assert!((kg - 1.5 / v).abs() < 1e-6);
    let fit = analysis::fit_geodesic_circle(&sys, &traj).unwrap();
    let radius = geometry::radius_from_curvature(sys.kappa, 1.5 / v).unwrap();
    assert!((fit.radius - radius).abs() < 1e-6 * radius);
    let circumference = geometry::circle_circumference(sys.kappa, radius).unwrap();
    assert!((period * v - circumference).abs() < 1e-9 * circumference);
}

#[test]
fn exp_map_travels_its_length() {
    for k in [-2.0, 0.0, 0.5] {
        let kappa = geometry::Curvature::new(k).unwrap();
        let p = ChartPoint::new(0.1, 0.2);
        let w = TangentVec::new(0.4, -0.3);
        let len = geometry::norm(kappa, &p, w).unwrap();
        let q = geometry::exp_map(kappa, &p, w).unwrap();
        assert!(q.injective);
        let d = geometry::distance(kappa, &p, &q.point).unwrap();
        assert!((d - len).abs() < 1e-12, "kappa {k}: {d} vs {len}");
    }
}

#[test]
fn certificate_bounds_the_capacity_from_below() {
    for (k, s, r) in [(1.0, 1.0, 1.0), (0.0, 2.0, 0.8), (-1.0, 1.0, 0.6)] {
        let cap = capacity_value(k, s, r).unwrap().value;
        let cert = capacity::capacity_certificate(k, s, r, 0.2, 0.05, 0.05).unwrap();
        assert_eq!(cert.value, cap);
        assert!(cert.certified_lower_bound < cap);
        assert!(cert.min_period_measured >= 1.25 - 1e-6, "{}", cert.min_period_measured);
        assert!((cert.gap - (cap - cert.certified_lower_bound)).abs() < 1e-15);
    }
}

#[test]
fn circle_action_area_equals_capacity() {
    let sys = MagneticSystem::new(-0.5, 1.0).unwrap();
    let r = 0.9;
    let area = analysis::swept_symplectic_area(&sys, 0.5 * r * r, 128, 128, 1e-12).unwrap();
    let cap = capacity_value(-0.5, 1.0, r).unwrap().value;
    assert!((area - cap).abs() < 5e-3, "{area} vs {cap}");
}

#[test]
fn capacity_is_undefined_past_the_critical_radius() {
    let r_crit = 1.0;
    let below = capacity_value(-1.0, 1.0, r_crit - 1e-9).unwrap().value;
    assert!((below - 2.0 * PI).abs() < 1e-3);
    assert!(matches!(capacity_value(-1.0, 1.0, r_crit), Err(Error::WeakField { .. })));
}

#[test]
fn all_invariant_suites_pass() {
    let results = verify::run(Suite::All, &VerifyOptions::default()).unwrap();
    assert!(results.len() >= 20);
    for c in results {
        assert!(c.passed, "{}/{}: {} > {}", c.suite, c.name, c.residual, c.threshold);
    }
}
