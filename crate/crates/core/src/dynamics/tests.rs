use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::geometry::Chart;

fn sys(kappa: f64, s: f64) -> MagneticSystem {
    MagneticSystem::new(kappa, s).unwrap()
}

fn e(i: usize) -> PhaseVec {
    let mut v = [0.0; 4];
    v[i] = 1.0;
    v
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn assert_vec(a: &PhaseVec, b: &PhaseVec, tol: f64) {
    for i in 0..4 {
        assert!(close(a[i], b[i], tol), "{a:?} vs {b:?}");
    }
}

#[test]
fn kinetic_energy_examples() {
    assert_eq!(kinetic_energy(&sys(1.0, 1.0), &PhaseState::new(0.3, 0.2, 0.0, 0.0)), 0.0);
    assert_eq!(kinetic_energy(&sys(0.0, 1.0), &PhaseState::new(0.0, 0.0, 1.0, 0.0)), 0.5);
    let e = kinetic_energy(&sys(-1.0, 1.0), &PhaseState::new(1.0, 0.0, 1.0, 0.0));
    assert!(close(e, 8.0 / 9.0, 1e-15));
}

#[test]
fn canonical_one_form_examples() {
    let flat = sys(0.0, 1.0);
    assert_eq!(canonical_one_form(&flat, &PhaseState::new(0.0, 0.0, 1.0, 0.0), &e(0)), 1.0);
    let st = PhaseState::new(0.4, -0.2, 0.7, 1.3);
    assert_eq!(canonical_one_form(&sys(1.0, 1.0), &st, &[0.0, 0.0, 0.3, -0.8]), 0.0);
    let hyp = sys(-1.0, 1.0);
    let l = canonical_one_form(&hyp, &PhaseState::new(1.0, 0.0, 1.0, 0.0), &e(0));
    assert!(close(l, 16.0 / 9.0, 1e-15));
}

#[test]
fn twisted_form_examples() {
    let s = sys(0.0, 2.0);
    let st = PhaseState::new(0.0, 0.0, 0.0, 0.0);
    assert_eq!(twisted_form(&s, &st, &e(0), &e(2)), -1.0);
    assert_eq!(twisted_form(&s, &st, &e(0), &e(1)), -2.0);
}

#[test]
fn kinetic_field_examples() {
    let s = sys(0.0, 2.0);
    let x = hamiltonian_vector_field(&s, &PhaseState::new(0.0, 0.0, 1.0, 0.0), &HamiltonianKind::Kinetic).unwrap();
    assert_vec(&x, &[1.0, 0.0, 0.0, 2.0], 1e-15);
    for k in [-1.0, 0.0, 1.0] {
        let st = PhaseState::new(0.3, -0.1, 0.0, 0.0);
        let x = hamiltonian_vector_field(&sys(k, 1.5), &st, &HamiltonianKind::Kinetic).unwrap();
        assert_eq!(x.map(f64::abs), [0.0; 4]);
        assert_eq!(lorentz_rhs(&sys(k, 1.5), &st).map(f64::abs), [0.0; 4]);
    }
    let x = lorentz_rhs(&sys(0.0, 1.0), &PhaseState::new(0.0, 0.0, 0.0, 1.0));
    assert_vec(&x, &[0.0, 1.0, -1.0, 0.0], 0.0);
}

#[test]
fn circle_action_field_is_scaled_kinetic_field() {
    let s = sys(1.0, 1.0);
    let st = s.state_with_speed(1.0);
    let xe = hamiltonian_vector_field(&s, &st, &HamiltonianKind::Kinetic).unwrap();
    let xh = hamiltonian_vector_field(&s, &st, &HamiltonianKind::CircleAction).unwrap();
    let scale = PI * 2f64.sqrt();
    for i in 0..4 {
        assert!(close(xh[i], scale * xe[i], 1e-13));
    }
}

#[test]
fn h_and_period_examples() {
    let s = sys(1.0, 1.0);
    assert_eq!(h_of_energy(&s, 0.0).unwrap(), 0.0);
    assert!(close(period_of_energy(&sys(0.0, 3.0), 0.0).unwrap(), 2.0 * PI / 3.0, 1e-15));
    assert!(close(h_of_energy(&s, 0.5).unwrap(), 2.0 * PI * (2f64.sqrt() - 1.0), 1e-15));
    assert!(close(period_of_energy(&s, 0.5).unwrap(), 4.4428829, 1e-7));
    let flat = sys(0.0, 1.0);
    assert!(close(h_of_energy(&flat, 0.5).unwrap(), PI, 1e-15));
    assert!(close(period_of_energy(&flat, 0.5).unwrap(), 2.0 * PI, 1e-15));
}

#[test]
fn weak_and_zero_fields_rejected() {
    assert!(matches!(h_of_energy(&sys(-1.0, 1.0), 0.5), Err(Error::WeakField { .. })));
    assert!(matches!(period_of_energy(&sys(-1.0, 1.0), 0.6), Err(Error::WeakField { .. })));
    assert!(matches!(h_of_energy(&sys(1.0, 0.0), 0.5), Err(Error::ZeroField)));
    assert!(h_of_energy(&sys(1.0, 1.0), -0.1).is_err());
}

#[test]
fn energy_of_h_inverts_h() {
    for (k, s) in [(1.0, 1.0), (0.0, 0.7), (-1.0, 2.0), (-0.3, -1.1)] {
        let m = sys(k, s);
        for e in [0.0, 0.1, 0.5, 1.7] {
            if m.discriminant(e) <= 0.0 {
                continue;
            }
            let back = energy_of_h(&m, h_of_energy(&m, e).unwrap()).unwrap();
            assert!(close(back, e, 1e-14 * e.max(1.0)), "{k} {s} {e}");
        }
    }
}

#[test]
fn h_prime_is_the_period() {
    let m = sys(-0.5, 1.3);
    for e in [0.05, 0.4, 1.2] {
        let d = 1e-5;
        let fd = (h_of_energy(&m, e + d).unwrap() - h_of_energy(&m, e - d).unwrap()) / (2.0 * d);
        assert!(close(fd, period_of_energy(&m, e).unwrap(), 1e-8));
    }
}

#[test]
fn flat_orbit_closes_after_two_pi() {
    let s = sys(0.0, 1.0);
    let st0 = PhaseState::new(0.0, 0.0, 1.0, 0.0);
    let traj = integrate(&s, &st0, &HamiltonianKind::Kinetic, 2.0 * PI, 1e-10, 64).unwrap();
    assert!(traj.last().phase_distance(&st0) < 1e-8);
    // x = sin t, y = 1 - cos t
    for smp in &traj.samples {
        let t = smp.t;
        assert!(close(smp.state.p.x, t.sin(), 1e-8));
        assert!(close(smp.state.p.y, 1.0 - t.cos(), 1e-8));
    }
}

#[test]
fn stationary_state_stays_put() {
    let s = sys(1.0, 2.0);
    let st0 = PhaseState::new(0.5, -0.3, 0.0, 0.0);
    let traj = integrate(&s, &st0, &HamiltonianKind::Kinetic, 37.0, 1e-10, 10).unwrap();
    assert!(traj.samples.iter().all(|smp| smp.state == st0));
}

#[test]
fn sphere_orbit_closes_after_predicted_period() {
    let s = sys(1.0, 1.0);
    let st0 = s.state_with_speed(1.0);
    let sol = solve(&s, &st0, &HamiltonianKind::Kinetic, PI * 2f64.sqrt(), 1e-10).unwrap();
    let end = express_in(&s, sol.end_state(), &Chart::Main).unwrap();
    assert!(end.phase_distance(&st0) < 1e-7);
}

#[test]
fn circle_action_flow_examples() {
    let s = sys(1.0, 1.0);
    let st0 = s.state_with_speed(1.0);
    assert_eq!(circle_action_flow(&s, &st0, 0.0, 1e-10).unwrap(), st0);
    assert!(circle_action_flow(&s, &st0, 1.0, 1e-10).unwrap().phase_distance(&st0) < 1e-7);
    let s = sys(-1.0, 2.0);
    let st0 = s.state_with_speed(1.0);
    assert!(circle_action_flow(&s, &st0, 1.0, 1e-10).unwrap().phase_distance(&st0) < 1e-7);
    assert!(circle_action_flow(&s, &st0, 1.5, 1e-10).is_err());
    assert!(matches!(
        circle_action_flow(&sys(-1.0, 1.0), &PhaseState::new(0.0, 0.0, 2.0, 0.0), 0.5, 1e-10),
        Err(Error::WeakField { .. })
    ));
}

#[test]
fn tolerance_range_enforced() {
    let s = sys(0.0, 1.0);
    let st0 = s.state_with_speed(1.0);
    for tol in [1e-14, 1e-2, 0.0, f64::NAN] {
        assert!(matches!(
            solve(&s, &st0, &HamiltonianKind::Kinetic, 1.0, tol),
            Err(Error::InvalidTolerance(_))
        ));
    }
}

#[test]
fn energy_conserved_over_ten_periods() {
    for (k, s, v) in [(1.0, 1.0, 1.0), (0.0, 0.7, 2.0), (-1.0, 2.0, 1.0), (1.0, -0.5, 3.0)] {
        let m = sys(k, s);
        let st0 = m.state_with_speed(v);
        let t = period_of_energy(&m, kinetic_energy(&m, &st0)).unwrap();
        let sol = solve(&m, &st0, &HamiltonianKind::Kinetic, 10.0 * t, 1e-10).unwrap();
        assert!(sol.stats().max_energy_drift <= 1e-8, "{k} {s} {v}: {}", sol.stats().max_energy_drift);
    }
}

#[test]
fn dense_output_matches_closed_form() {
    // flat orbit: x = r sin(st), y = r(1 - cos(st)) with r = v/s
    let (s, v) = (1.7, 0.9);
    let m = sys(0.0, s);
    let st0 = m.state_with_speed(v);
    let sol = solve(&m, &st0, &HamiltonianKind::Kinetic, 5.0, 1e-11).unwrap();
    let r = v / s;
    for i in 0..=997 {
        let t = 5.0 * i as f64 / 997.0;
        let st = sol.eval(t);
        assert!(close(st.p.x, r * (s * t).sin(), 1e-9));
        assert!(close(st.p.y, r * (1.0 - (s * t).cos()), 1e-9));
        assert!(close(st.u, v * (s * t).cos(), 1e-9));
    }
}

#[test]
fn sphere_orbits_swap_charts() {
    // a large circle on the unit sphere passes near the antipode of the origin
    let m = sys(1.0, 0.2);
    let st0 = m.state_with_speed(3.0);
    let t = period_of_energy(&m, kinetic_energy(&m, &st0)).unwrap();
    let sol = solve(&m, &st0, &HamiltonianKind::Kinetic, t, 1e-10).unwrap();
    assert!(sol.stats().chart_swaps >= 2);
    let end = express_in(&m, sol.end_state(), &Chart::Main).unwrap();
    assert!(end.phase_distance(&st0) < 1e-7);
}

#[test]
fn period_invariant_under_chart_swaps() {
    // the same circle type, once through the antipodal chart and once centred
    // at the chart origin, where it never leaves the Main chart
    let m = sys(1.0, 0.2);
    let v = 3.0;
    let expected = period_of_energy(&m, 0.5 * v * v).unwrap();
    let radius = crate::geometry::radius_from_curvature(m.kappa, m.s / v).unwrap();
    let through = m.state_with_speed(v);
    let c = 2.0 * (0.5 * radius).tan();
    let rho_c = 1.0 / (1.0 + 0.25 * c * c);
    let centred = m.state(c, 0.0, 0.0, v / rho_c).unwrap();

    let swaps = |st0: &PhaseState| {
        solve(&m, st0, &HamiltonianKind::Kinetic, expected, 1e-11).unwrap().stats().chart_swaps
    };
    assert!(swaps(&through) > 0);
    assert_eq!(swaps(&centred), 0);
    let period_of = |st0: &PhaseState| {
        crate::analysis::first_return(&m, st0, &HamiltonianKind::Kinetic, 1e-11, 1.5 * expected)
            .unwrap()
            .period
    };
    let (p1, p2) = (period_of(&through), period_of(&centred));
    assert!(close(p1, p2, 1e-7), "{p1} vs {p2}");
    assert!(close(p1, expected, 1e-7));
}

#[test]
fn antipodal_field_is_pushforward_of_main_field() {
    // short flows from the same point in both sphere charts agree; |z| = 2 is
    // fixed by the transition, well inside both swap radii
    let m = sys(1.0, 1.3);
    let st = PhaseState::new(1.2, 1.6, 0.4, -0.7);
    let anti = express_in(&m, &st, &Chart::Antipodal).unwrap();
    let a = solve(&m, &st, &HamiltonianKind::Kinetic, 0.3, 1e-12).unwrap();
    let b = solve(&m, &anti, &HamiltonianKind::Kinetic, 0.3, 1e-12).unwrap();
    assert_eq!(a.stats().chart_swaps + b.stats().chart_swaps, 0);
    let b_main = express_in(&m, b.end_state(), &Chart::Main).unwrap();
    assert!(b_main.phase_distance(a.end_state()) < 1e-10);
}

#[test]
fn reparametrized_flow_matches_circle_action_integration() {
    let m = sys(-0.5, 1.2);
    let st0 = m.state(0.2, -0.1, 0.8, 0.5).unwrap();
    for t in [0.1, 0.37, 0.8, 1.0] {
        let a = circle_action_flow(&m, &st0, t, 1e-11).unwrap();
        let sol = solve(&m, &st0, &HamiltonianKind::CircleAction, t, 1e-11).unwrap();
        let b = express_in(&m, sol.end_state(), &st0.p.chart).unwrap();
        assert!(a.phase_distance(&b) < 1e-8, "t = {t}");
    }
}

fn finite_difference_dlambda(m: &MagneticSystem, st: &PhaseState, a: &PhaseVec, b: &PhaseVec, h: f64) -> f64 {
    // dλ(a, b) = a(λ(b)) - b(λ(a)) for constant coordinate fields a, b
    let lam = |c: &PhaseVec, d: &PhaseVec| canonical_one_form(m, &st.with_coords(*c), d);
    let x = st.coords();
    let shift = |d: &PhaseVec, t: f64| -> PhaseVec { std::array::from_fn(|i| x[i] + t * d[i]) };
    let da = (lam(&shift(a, h), b) - lam(&shift(a, -h), b)) / (2.0 * h);
    let db = (lam(&shift(b, h), a) - lam(&shift(b, -h), a)) / (2.0 * h);
    da - db
}

fn state_strategy() -> impl Strategy<Value = (f64, f64, PhaseState)> {
    (
        prop::sample::select(vec![-1.0, 0.0, 1.0]),
        prop::sample::select(vec![-2.0, -0.5, 0.5, 2.0]),
        -0.9..0.9f64,
        -0.9..0.9f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
    )
        .prop_map(|(k, s, x, y, u, w)| (k, s, PhaseState::new(x, y, u, w)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn defining_equation_holds((k, s, st) in state_strategy()) {
        let m = sys(k, s);
        let x = hamiltonian_vector_field(&m, &st, &HamiltonianKind::Kinetic).unwrap();
        let de = energy_gradient(&m, &st);
        let scale = 1.0 + de.iter().map(|c| c.abs()).fold(0.0, f64::max);
        for i in 0..4 {
            let r = twisted_form(&m, &st, &x, &e(i)) + de[i];
            prop_assert!(r.abs() <= 1e-10 * scale, "direction {i}: residual {r}");
        }
    }

    #[test]
    fn closed_form_field_matches_linear_solve((k, s, st) in state_strategy()) {
        let m = sys(k, s);
        let a = hamiltonian_vector_field(&m, &st, &HamiltonianKind::Kinetic).unwrap();
        let b = lorentz_rhs(&m, &st);
        for i in 0..4 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn closed_form_field_matches_linear_solve_in_antipodal_chart(
        s in prop::sample::select(vec![-2.0, -0.5, 0.5, 2.0]),
        x in -0.9..0.9f64, y in -0.9..0.9f64, u in -2.0..2.0f64, w in -2.0..2.0f64,
    ) {
        let m = sys(1.0, s);
        let st = PhaseState { p: ChartPoint::in_chart(Chart::Antipodal, x, y), u, w };
        let a = hamiltonian_vector_field(&m, &st, &HamiltonianKind::Kinetic).unwrap();
        let b = lorentz_rhs(&m, &st);
        for i in 0..4 {
            prop_assert!((a[i] - b[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn dlambda_is_exterior_derivative_of_lambda(
        (k, s, st) in state_strategy(),
        a in prop::array::uniform4(-1.0..1.0f64),
        b in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let m = sys(k, s);
        let fd = finite_difference_dlambda(&m, &st, &a, &b, 1e-4);
        prop_assert!((fd - dlambda(&m, &st, &a, &b)).abs() <= 1e-6);
    }

    #[test]
    fn twisted_form_is_antisymmetric(
        (k, s, st) in state_strategy(),
        a in prop::array::uniform4(-1.0..1.0f64),
        b in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let m = sys(k, s);
        prop_assert_eq!(twisted_form(&m, &st, &a, &a), 0.0);
        let ab = twisted_form(&m, &st, &a, &b);
        let ba = twisted_form(&m, &st, &b, &a);
        prop_assert!((ab + ba).abs() <= 1e-14);
    }
}
