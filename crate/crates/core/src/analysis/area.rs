use rayon::prelude::*;

use crate::dynamics::{
    self, express_in, twisted_form, HamiltonianKind, MagneticSystem, PhaseState, PhaseVec,
};
use crate::{Error, Result};

fn diff(a: &PhaseState, b: &PhaseState, h: f64) -> PhaseVec {
    let (a, b) = (a.coords(), b.coords());
    std::array::from_fn(|i| (a[i] - b[i]) / h)
}

/// `∫∫ ω_s(∂_τ u, ∂_t u) dτ dt` over the cylinder `u(τ, t) = Φᵗ_H(γ(τ))`.
///
/// `γ(τ) = (0, 0, τ v_max, 0)` runs along the fibre over the chart origin from
/// the zero section to energy `e_target`, and `Φ_H` is the period-one circle
/// action. Both partials are central differences on the grid (second-order
/// one-sided at `τ ∈ {0, 1}`, periodic in `t`); quadrature is trapezoidal.
pub fn swept_symplectic_area(
    sys: &MagneticSystem,
    e_target: f64,
    n_tau: usize,
    n_t: usize,
    tol: f64,
) -> Result<f64> {
    if n_tau < 32 || n_t < 32 {
        return Err(Error::InvalidArgument(format!("grid sizes must be >= 32, got {n_tau} x {n_t}")));
    }
    // validates s != 0 and the strong-field condition at the top level
    dynamics::h_of_energy(sys, e_target)?;
    if e_target == 0.0 {
        return Ok(0.0);
    }
    let v_max = (2.0 * e_target).sqrt();

    let rows: Vec<Vec<PhaseState>> = (0..=n_tau)
        .into_par_iter()
        .map(|i| -> Result<Vec<PhaseState>> {
            let tau = i as f64 / n_tau as f64;
            let st = PhaseState::new(0.0, 0.0, tau * v_max, 0.0);
            if i == 0 {
                return Ok(vec![st; n_t]);
            }
            let period = dynamics::period_of_energy(sys, dynamics::kinetic_energy(sys, &st))?;
            let sol = dynamics::solve(sys, &st, &HamiltonianKind::Kinetic, period, tol)?;
            Ok((0..n_t).map(|j| sol.eval(period * j as f64 / n_t as f64)).collect())
        })
        .collect::<Result<_>>()?;

    let h_tau = 1.0 / n_tau as f64;
    let h_t = 1.0 / n_t as f64;
    let row_integrals: Vec<f64> = (0..=n_tau)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut acc = 0.0;
            for j in 0..n_t {
                let here = &rows[i][j];
                let chart = here.p.chart;
                let at = |ii: usize, jj: usize| express_in(sys, &rows[ii][jj % n_t], &chart);
                let d_t = diff(&at(i, j + 1)?, &at(i, j + n_t - 1)?, 2.0 * h_t);
                let d_tau = if i == 0 {
                    let (a, b, c) = (at(0, j)?, at(1, j)?, at(2, j)?);
                    let (a, b, c) = (a.coords(), b.coords(), c.coords());
                    std::array::from_fn(|k| (-3.0 * a[k] + 4.0 * b[k] - c[k]) / (2.0 * h_tau))
                } else if i == n_tau {
                    let (a, b, c) = (at(i, j)?, at(i - 1, j)?, at(i - 2, j)?);
                    let (a, b, c) = (a.coords(), b.coords(), c.coords());
                    std::array::from_fn(|k| (3.0 * a[k] - 4.0 * b[k] + c[k]) / (2.0 * h_tau))
                } else {
                    diff(&at(i + 1, j)?, &at(i - 1, j)?, 2.0 * h_tau)
                };
                acc += twisted_form(sys, here, &d_tau, &d_t);
            }
            let w = if i == 0 || i == n_tau { 0.5 } else { 1.0 };
            Ok(w * acc * h_t)
        })
        .collect::<Result<_>>()?;
    Ok(row_integrals.iter().sum::<f64>() * h_tau)
}
