use serde::Serialize;

use crate::{Error, Result};

/// Admissible reparametrization profile `f : [0, maxH] → [0, ∞)`.
///
/// `f' = (1 - delta)·ramp`, where the ramp is zero on `[0, eta]`, rises along a
/// cosine over `ramp_w`, stays at one, falls symmetrically and is zero on
/// `[maxH - eta, maxH]`. `f` is C¹ with Lipschitz derivative and is integrated
/// in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileF {
    pub max_h: f64,
    pub delta: f64,
    pub eta: f64,
    pub ramp_w: f64,
}

impl ProfileF {
    pub fn new(max_h: f64, delta: f64, eta: f64, ramp_w: f64) -> Result<Self> {
        let finite = [max_h, delta, eta, ramp_w].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InfeasibleProfile("non-finite parameter".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InfeasibleProfile(format!("delta = {delta} must lie in (0, 1)")));
        }
        if !(eta > 0.0 && ramp_w > 0.0) {
            return Err(Error::InfeasibleProfile(format!(
                "eta = {eta} and ramp_w = {ramp_w} must be positive"
            )));
        }
        if !(2.0 * eta + 2.0 * ramp_w < max_h) {
            return Err(Error::InfeasibleProfile(format!(
                "2*eta + 2*ramp_w = {} does not fit below maxH = {max_h}",
                2.0 * eta + 2.0 * ramp_w
            )));
        }
        Ok(ProfileF { max_h, delta, eta, ramp_w })
    }

    pub fn slope_bound(&self) -> f64 {
        1.0 - self.delta
    }

    fn rise_start(&self) -> f64 {
        self.eta
    }

    fn fall_start(&self) -> f64 {
        self.max_h - self.eta - self.ramp_w
    }

    /// Interval on which `f'` equals its supremum `1 - delta`.
    pub fn plateau(&self) -> (f64, f64) {
        (self.eta + self.ramp_w, self.fall_start())
    }

    /// Interval on which `f' > 0`.
    pub fn support(&self) -> (f64, f64) {
        (self.eta, self.max_h - self.eta)
    }

    fn ramp(&self, x: f64) -> f64 {
        let w = self.ramp_w;
        let (a, b) = (self.rise_start(), self.fall_start());
        if x <= a || x >= b + w {
            0.0
        } else if x < a + w {
            let xi = (x - a) / w;
            0.5 * (1.0 - (std::f64::consts::PI * xi).cos())
        } else if x <= b {
            1.0
        } else {
            let xi = (x - b) / w;
            0.5 * (1.0 + (std::f64::consts::PI * xi).cos())
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.slope_bound() * self.ramp(x)
    }

    pub fn value(&self, x: f64) -> f64 {
        use std::f64::consts::PI;
        let w = self.ramp_w;
        let (a, b) = (self.rise_start(), self.fall_start());
        let rise = |xi: f64| w * (0.5 * xi - (PI * xi).sin() / (2.0 * PI));
        let fall = |xi: f64| w * (0.5 * xi + (PI * xi).sin() / (2.0 * PI));
        let integral = if x <= a {
            0.0
        } else if x < a + w {
            rise((x - a) / w)
        } else if x <= b {
            0.5 * w + (x - a - w)
        } else if x < b + w {
            0.5 * w + (b - a - w) + fall((x - b) / w)
        } else {
            w + (b - a - w)
        };
        self.slope_bound() * integral
    }

    /// `f(maxH) = (1 - delta)(maxH - 2 eta - ramp_w)`.
    pub fn top(&self) -> f64 {
        self.slope_bound() * (self.max_h - 2.0 * self.eta - self.ramp_w)
    }
}
