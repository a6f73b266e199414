use num_complex::Complex64;

/// Which coordinate patch a [`super::ChartPoint`] is expressed in.
///
/// `Main` is the conformal chart centred at the base point of the model.
/// `Antipodal` (κ > 0 only) is the same stereographic chart composed with the
/// antipodal map, so the transition is `z ↦ -4/(κ z̄)`; it reverses orientation.
/// `Recentred` (κ < 0 only) is the Main chart pulled back by an orientation
/// preserving isometry of the disc; the integrator uses it to keep long orbits
/// away from the ideal boundary.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Chart {
    #[default]
    Main,
    Antipodal,
    Recentred(DiscFrame),
}

impl Chart {
    /// +1 when the chart orientation agrees with the surface orientation.
    pub fn orientation(&self) -> f64 {
        match self {
            Chart::Antipodal => -1.0,
            _ => 1.0,
        }
    }

    /// Small integer label used in CSV output: 0 = Main, 1 = Antipodal,
    /// n = the n-th recentring of the hyperbolic chart.
    pub fn label(&self) -> u32 {
        match self {
            Chart::Main => 0,
            Chart::Antipodal => 1,
            Chart::Recentred(f) => f.index,
        }
    }

    pub(crate) fn frame(&self) -> DiscFrame {
        match self {
            Chart::Recentred(f) => *f,
            _ => DiscFrame::IDENTITY,
        }
    }
}

/// Orientation-preserving isometry of the unit disc, `ζ ↦ (aζ + b)/(b̄ζ + ā)`
/// with `|a|² - |b|² = 1`, acting on the scaled coordinate `ζ = z √|κ| / 2`.
///
/// A frame maps local (recentred) coordinates into Main coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscFrame {
    a: Complex64,
    b: Complex64,
    index: u32,
}

impl DiscFrame {
    pub const IDENTITY: DiscFrame = DiscFrame {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        index: 0,
    };

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Homogeneous image `(aζ + b, b̄ζ + ā)` of a local point.
    pub(crate) fn homogeneous(&self, zeta: Complex64) -> (Complex64, Complex64) {
        (self.a * zeta + self.b, self.b.conj() * zeta + self.a.conj())
    }

    pub(crate) fn apply(&self, zeta: Complex64) -> Complex64 {
        let (num, den) = self.homogeneous(zeta);
        num / den
    }

    /// Complex derivative of [`Self::apply`] at `zeta`.
    pub(crate) fn derivative(&self, zeta: Complex64) -> Complex64 {
        let den = self.b.conj() * zeta + self.a.conj();
        (den * den).inv()
    }

    pub(crate) fn inverse(&self) -> DiscFrame {
        DiscFrame {
            a: self.a.conj(),
            b: -self.b,
            index: self.index,
        }
    }

    /// `self ∘ other`.
    pub(crate) fn compose(&self, other: &DiscFrame) -> DiscFrame {
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        DiscFrame { a, b, index: self.index }.normalized()
    }

    /// Frame whose local origin is the point `zeta_p` of `self`'s local chart.
    pub(crate) fn recentred_at(&self, zeta_p: Complex64) -> DiscFrame {
        let scale = (1.0 - zeta_p.norm_sqr()).sqrt().recip();
        let shift = DiscFrame {
            a: Complex64::new(scale, 0.0),
            b: zeta_p * scale,
            index: 0,
        };
        let mut f = self.compose(&shift);
        f.index = self.index + 1;
        f
    }

    /// Restore `|a|² - |b|² = 1` by resetting `|a| = √(1 + |b|²)`; the
    /// determinant itself cancels catastrophically for far-away frames.
    fn normalized(mut self) -> DiscFrame {
        let b2 = self.b.norm_sqr();
        self.a *= (1.0 + b2).sqrt() / self.a.norm();
        self
    }
}
