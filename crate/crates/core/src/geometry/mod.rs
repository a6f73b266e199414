//! Constant-curvature surface models in a single conformal chart.
//!
//! For every curvature `κ` the metric is `g = ρ² (dx² + dy²)` with
//! `ρ = 1 / (1 + κ (x² + y²)/4)`: stereographic sphere for `κ > 0`, the
//! plane for `κ = 0`, a Poincaré-type disc of radius `2/√|κ|` for `κ < 0`.

mod chart;
pub mod kfun;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use chart::{Chart, DiscFrame};

use crate::{Error, Result};

/// Sphere charts are swapped once `|z| √κ` exceeds this (the equator sits at 2).
pub const SPHERE_SWAP_RADIUS: f64 = 2.5;
/// Hyperbolic charts are recentred once the scaled radius `|z| √|κ| / 2` exceeds this.
pub const DISC_RECENTRE_RADIUS: f64 = 0.75;

/// Sectional curvature of the model surface.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Curvature(f64);

impl Curvature {
    pub const MAX: f64 = 1e6;

    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_finite() && kappa.abs() <= Self::MAX {
            Ok(Curvature(kappa))
        } else {
            Err(Error::InvalidCurvature(kappa))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Radius bound `x² + y² < 4/|κ|` of the hyperbolic chart, `∞` otherwise.
    pub fn domain_bound(self) -> f64 {
        if self.0 < 0.0 {
            4.0 / -self.0
        } else {
            f64::INFINITY
        }
    }
}

impl TryFrom<f64> for Curvature {
    type Error = Error;
    fn try_from(kappa: f64) -> Result<Self> {
        Curvature::new(kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub x: f64,
    pub y: f64,
}

impl ChartPoint {
    pub fn new(x: f64, y: f64) -> Self {
        ChartPoint { chart: Chart::Main, x, y }
    }

    pub fn in_chart(chart: Chart, x: f64, y: f64) -> Self {
        ChartPoint { chart, x, y }
    }

    pub fn radius_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn with_z(chart: Chart, z: Complex64) -> Self {
        ChartPoint { chart, x: z.re, y: z.im }
    }

    /// True when a sphere point has drifted past the swap radius of its chart.
    pub fn needs_transition(&self, kappa: Curvature) -> bool {
        let k = kappa.value();
        k > 0.0 && self.radius_sq() * k > SPHERE_SWAP_RADIUS * SPHERE_SWAP_RADIUS
    }
}

/// Tangent vector in chart components. Its length is only meaningful through
/// [`metric_inner`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentVec {
    pub a: f64,
    pub b: f64,
}

impl TangentVec {
    pub fn new(a: f64, b: f64) -> Self {
        TangentVec { a, b }
    }

    fn as_complex(self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    fn from_complex(c: Complex64) -> Self {
        TangentVec { a: c.re, b: c.im }
    }
}

/// Period lattice of a flat torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    g1: [f64; 2],
    g2: [f64; 2],
    det: f64,
}

impl Lattice {
    pub fn new(g1: [f64; 2], g2: [f64; 2]) -> Result<Self> {
        let det = g1[0] * g2[1] - g1[1] * g2[0];
        let scale = (g1[0].hypot(g1[1]) * g2[0].hypot(g2[1])).max(f64::MIN_POSITIVE);
        if !det.is_finite() || det.abs() <= 1e-12 * scale {
            return Err(Error::DegenerateLattice);
        }
        Ok(Lattice { g1, g2, det })
    }

    pub fn unit_square() -> Self {
        Lattice::new([1.0, 0.0], [0.0, 1.0]).expect("unit square is a lattice")
    }

    pub fn generators(&self) -> ([f64; 2], [f64; 2]) {
        (self.g1, self.g2)
    }
}

fn check_domain(kappa: Curvature, p: &ChartPoint) -> Result<()> {
    let bound = kappa.domain_bound();
    let r2 = p.radius_sq();
    if !(p.x.is_finite() && p.y.is_finite()) || r2 >= bound {
        return Err(Error::OutOfDomain { kappa: kappa.value(), x: p.x, y: p.y, bound });
    }
    Ok(())
}

/// `ρ = 1/(1 + κ r²/4)` without the domain check; callers guarantee validity.
#[inline]
pub(crate) fn rho(kappa: f64, x: f64, y: f64) -> f64 {
    1.0 / (1.0 + 0.25 * kappa * (x * x + y * y))
}

pub fn conformal_factor(kappa: Curvature, p: &ChartPoint) -> Result<f64> {
    check_domain(kappa, p)?;
    Ok(rho(kappa.value(), p.x, p.y))
}

pub fn metric_inner(kappa: Curvature, p: &ChartPoint, w1: TangentVec, w2: TangentVec) -> Result<f64> {
    let r = conformal_factor(kappa, p)?;
    Ok(r * r * (w1.a * w2.a + w1.b * w2.b))
}

pub fn norm(kappa: Curvature, p: &ChartPoint, w: TangentVec) -> Result<f64> {
    let r = conformal_factor(kappa, p)?;
    Ok(r * w.a.hypot(w.b))
}

/// Complex structure `J`: quarter turn in the positive sense of the surface.
///
/// In the orientation-reversing Antipodal chart the positive quarter turn is
/// `(b, -a)` in chart components.
pub fn rotate90(kappa: Curvature, p: &ChartPoint, w: TangentVec) -> Result<TangentVec> {
    check_domain(kappa, p)?;
    let e = p.chart.orientation();
    Ok(TangentVec { a: -e * w.b, b: e * w.a })
}

/// Geodesic distance. Points in different charts are first brought into a
/// common chart; hyperbolic distances use the frame-invariant homogeneous form,
/// which stays accurate far beyond the range representable in one chart.
pub fn distance(kappa: Curvature, p: &ChartPoint, q: &ChartPoint) -> Result<f64> {
    check_domain(kappa, p)?;
    check_domain(kappa, q)?;
    let k = kappa.value();
    if k < 0.0 {
        return Ok(disc_distance(k, p, q));
    }
    if p.chart != q.chart {
        if k == 0.0 {
            return Err(Error::ChartMismatch);
        }
        let (q2, _) = change_chart(kappa, q, TangentVec::default(), &p.chart)?;
        if q2.x.is_finite() && q2.y.is_finite() {
            return distance(kappa, p, &q2);
        }
        let (p2, _) = change_chart(kappa, p, TangentVec::default(), &q.chart)?;
        return distance(kappa, &p2, q);
    }
    let (zp, zq) = (p.z(), q.z());
    let num = (zq - zp).norm();
    if k == 0.0 {
        return Ok(num);
    }
    // |T_p(q)| for the isometry T_p(z) = (z - p)/(1 + κ p̄ z/4) moving p to 0,
    // then the radial relation |z| = 2 tan(√κ d / 2)/√κ.
    let den = (1.0 + 0.25 * k * zp.conj() * zq).norm();
    let sk = k.sqrt();
    Ok(2.0 * (0.5 * sk * num).atan2(den) / sk)
}

fn disc_distance(k: f64, p: &ChartPoint, q: &ChartPoint) -> f64 {
    let scale = 0.5 * (-k).sqrt();
    let zp = p.z() * scale;
    let zq = q.z() * scale;
    // Bring both into Main coordinates homogeneously. With unimodular frames
    // |B|² - |A|² = 1 - |ζ_local|², so no cancellation near the boundary.
    let (a1, b1) = p.chart.frame().homogeneous(zp);
    let (a2, b2) = q.chart.frame().homogeneous(zq);
    let cross = (a1 * b2 - a2 * b1).norm_sqr();
    let y = 2.0 * cross / ((1.0 - zp.norm_sqr()) * (1.0 - zq.norm_sqr()));
    // acosh(1 + y) without cancellation for small y
    (y + (y * (y + 2.0)).sqrt()).ln_1p() / (-k).sqrt()
}

/// Result of [`exp_map`]; `injective` is false when a sphere geodesic is
/// longer than the injectivity radius `π/√κ` (the endpoint is still returned).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPoint {
    pub point: ChartPoint,
    pub injective: bool,
}

pub fn exp_map(kappa: Curvature, p: &ChartPoint, w: TangentVec) -> Result<ExpPoint> {
    let r = conformal_factor(kappa, p)?;
    let k = kappa.value();
    let len = r * w.a.hypot(w.b);
    if len == 0.0 {
        return Ok(ExpPoint { point: *p, injective: true });
    }
    let injective = k <= 0.0 || len < PI / k.sqrt();
    // At the origin the geodesic of length L ends at radius 2 tn(κ, L/2) in the
    // direction of w; T_p has real derivative ρ(p) at p, so directions agree.
    let dir = w.as_complex() / w.as_complex().norm();
    let zeta = dir * (2.0 * kfun::tn(k, 0.5 * len));
    let zp = p.z();
    let z = (zeta + zp) / (1.0 - 0.25 * k * zp.conj() * zeta);
    Ok(ExpPoint { point: ChartPoint::with_z(p.chart, z), injective })
}

fn check_radius(kappa: Curvature, radius: f64) -> Result<()> {
    let k = kappa.value();
    let ok = radius.is_finite() && radius > 0.0 && (k <= 0.0 || radius < PI / k.sqrt());
    if ok {
        Ok(())
    } else {
        Err(Error::RadiusOutOfRange { kappa: k, radius })
    }
}

/// Circumference `2π sin(√κ R)/√κ` of a geodesic circle of radius `R`.
pub fn circle_circumference(kappa: Curvature, radius: f64) -> Result<f64> {
    check_radius(kappa, radius)?;
    Ok(2.0 * PI * kfun::sn(kappa.value(), radius))
}

/// Geodesic curvature `√κ / tan(√κ R)` of a geodesic circle of radius `R`.
pub fn circle_curvature(kappa: Curvature, radius: f64) -> Result<f64> {
    check_radius(kappa, radius)?;
    let k = kappa.value();
    Ok(kfun::cs(k, radius) / kfun::sn(k, radius))
}

/// Radius of the geodesic circle with geodesic curvature `kg`.
pub fn radius_from_curvature(kappa: Curvature, kg: f64) -> Result<f64> {
    let k = kappa.value();
    if !(kg.is_finite() && kg > 0.0) {
        return Err(Error::InvalidArgument(format!("geodesic curvature must be positive, got {kg}")));
    }
    if k < 0.0 {
        let critical = (-k).sqrt();
        if kg <= critical {
            return Err(Error::NotClosing { kg, critical });
        }
    }
    Ok(kfun::atn(k, kg.recip()))
}

/// Sphere chart transition `z ↦ -4/(κ z̄)`, an involutive isometry between
/// the Main and Antipodal charts.
pub fn chart_transition(kappa: Curvature, p: &ChartPoint, w: TangentVec) -> Result<(ChartPoint, TangentVec)> {
    let k = kappa.value();
    if k <= 0.0 {
        return Err(Error::Unsupported("chart transitions exist only for kappa > 0"));
    }
    let target = match p.chart {
        Chart::Main => Chart::Antipodal,
        Chart::Antipodal => Chart::Main,
        Chart::Recentred(_) => return Err(Error::Unsupported("recentred charts belong to kappa < 0")),
    };
    let z = p.z();
    if z.norm_sqr() == 0.0 {
        return Err(Error::InvalidArgument("chart origin has no image under the transition".into()));
    }
    let zc = z.conj();
    let image = -4.0 / (k * zc);
    let dw = 4.0 / (k * zc * zc) * w.as_complex().conj();
    Ok((ChartPoint::with_z(target, image), TangentVec::from_complex(dw)))
}

/// Re-express a point and tangent vector in `target`.
pub fn change_chart(
    kappa: Curvature,
    p: &ChartPoint,
    w: TangentVec,
    target: &Chart,
) -> Result<(ChartPoint, TangentVec)> {
    if p.chart == *target {
        return Ok((*p, w));
    }
    let k = kappa.value();
    match (p.chart, *target) {
        (Chart::Main, Chart::Antipodal) | (Chart::Antipodal, Chart::Main) if k > 0.0 => {
            chart_transition(kappa, p, w)
        }
        (Chart::Main | Chart::Recentred(_), Chart::Main | Chart::Recentred(_)) if k < 0.0 => {
            let scale = 0.5 * (-k).sqrt();
            let g = target.frame().inverse().compose(&p.chart.frame());
            let zeta = p.z() * scale;
            let image = g.apply(zeta);
            if !(image.norm_sqr() < 1.0) {
                return Err(Error::OutOfDomain {
                    kappa: k,
                    x: image.re / scale,
                    y: image.im / scale,
                    bound: kappa.domain_bound(),
                });
            }
            let dw = g.derivative(zeta) * w.as_complex();
            Ok((ChartPoint::with_z(*target, image / scale), TangentVec::from_complex(dw)))
        }
        _ => Err(Error::ChartMismatch),
    }
}

/// Hyperbolic recentring: a chart in which `p` is the origin. The velocity is
/// scaled by `ρ(p)`, the (real) derivative of the recentring isometry at `p`.
pub fn recentre(kappa: Curvature, p: &ChartPoint, w: TangentVec) -> Result<(ChartPoint, TangentVec)> {
    let k = kappa.value();
    if k >= 0.0 {
        return Err(Error::Unsupported("recentring applies to kappa < 0"));
    }
    let r = conformal_factor(kappa, p)?;
    let zeta = p.z() * (0.5 * (-k).sqrt());
    let frame = p.chart.frame().recentred_at(zeta);
    Ok((
        ChartPoint::in_chart(Chart::Recentred(frame), 0.0, 0.0),
        TangentVec { a: r * w.a, b: r * w.b },
    ))
}

/// True when a hyperbolic point is far enough out that the chart should be recentred.
pub fn needs_recentre(kappa: Curvature, p: &ChartPoint) -> bool {
    let k = kappa.value();
    k < 0.0 && 0.25 * (-k) * p.radius_sq() > DISC_RECENTRE_RADIUS * DISC_RECENTRE_RADIUS
}

/// Representative of `p` in the fundamental parallelogram `{α g1 + β g2 : α, β ∈ [0, 1)}`.
pub fn torus_project(p: &ChartPoint, lat: &Lattice) -> ChartPoint {
    let (g1, g2) = (lat.g1, lat.g2);
    let alpha = (p.x * g2[1] - p.y * g2[0]) / lat.det;
    let beta = (g1[0] * p.y - g1[1] * p.x) / lat.det;
    let wrap = |c: f64| {
        let f = c - c.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    };
    let (a, b) = (wrap(alpha), wrap(beta));
    if a == alpha && b == beta {
        return *p;
    }
    ChartPoint {
        chart: p.chart,
        x: a * g1[0] + b * g2[0],
        y: a * g1[1] + b * g2[1],
    }
}
