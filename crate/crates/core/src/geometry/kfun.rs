//! Curvature-parametrized trigonometry.
//!
//! `sn(κ, t) = sin(√κ t)/√κ`, `cs(κ, t) = cos(√κ t)` and `atn(κ, x) = atan(√κ x)/√κ`
//! continue analytically through `κ = 0` (hyperbolic functions for `κ < 0`).
//! Near `κ t² = 0` they are evaluated from their Taylor series, so the flat
//! case is exact and small curvatures lose no digits.

const SERIES_CUTOFF: f64 = 1e-4;

pub fn sn(kappa: f64, t: f64) -> f64 {
    let x = kappa * t * t;
    if x.abs() < SERIES_CUTOFF {
        t * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0 * (1.0 - x / 72.0))))
    } else if kappa > 0.0 {
        let q = kappa.sqrt();
        (q * t).sin() / q
    } else {
        let q = (-kappa).sqrt();
        (q * t).sinh() / q
    }
}

pub fn cs(kappa: f64, t: f64) -> f64 {
    let x = kappa * t * t;
    if x.abs() < SERIES_CUTOFF {
        1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0 * (1.0 - x / 56.0)))
    } else if kappa > 0.0 {
        (kappa.sqrt() * t).cos()
    } else {
        ((-kappa).sqrt() * t).cosh()
    }
}

pub fn tn(kappa: f64, t: f64) -> f64 {
    sn(kappa, t) / cs(kappa, t)
}

/// Inverse of [`tn`]. For `κ < 0` the argument must satisfy `√|κ| x < 1`.
pub fn atn(kappa: f64, x: f64) -> f64 {
    let y = kappa * x * x;
    if y.abs() < SERIES_CUTOFF {
        x * (1.0
            - y * (1.0 / 3.0 - y * (1.0 / 5.0 - y * (1.0 / 7.0 - y * (1.0 / 9.0 - y / 11.0)))))
    } else if kappa > 0.0 {
        let q = kappa.sqrt();
        (q * x).atan() / q
    } else {
        let q = (-kappa).sqrt();
        (q * x).atanh() / q
    }
}
