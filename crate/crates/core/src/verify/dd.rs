//! Minimal double-double arithmetic for reference evaluations.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd { hi: p, lo: a.mul_add(b, -p) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::two_sum(s.hi, s.lo + t.hi);
        Dd::two_sum(r.hi, r.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::two_prod(self.hi, o.hi);
        Dd::two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from(q1)).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from(q2)).neg());
        let q3 = r.hi / o.hi;
        Dd::two_sum(q1, q2).add(Dd::from(q3))
    }

    fn sqrt(self) -> Dd {
        // one Newton step from the double root doubles the precision
        let x = self.hi.sqrt();
        let r = self.add(Dd::two_prod(x, x).neg());
        Dd::two_sum(x, r.hi / (2.0 * x))
    }
}

/// `(2π/κ)(√(s² + κr²) - |s|)` evaluated in double-double arithmetic, where
/// the cancelling difference is exact to about 30 digits.
pub(crate) fn capacity_reference(kappa: f64, s: f64, r: f64) -> f64 {
    let q = Dd::two_prod(s, s).add(Dd::from(kappa).mul(Dd::two_prod(r, r)));
    let diff = q.sqrt().add(Dd::from(-s.abs()));
    let two_pi = Dd::PI.mul(Dd::from(2.0));
    two_pi.mul(diff).div(Dd::from(kappa)).hi
}
