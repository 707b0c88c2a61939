//! Closed boundary parametrizations on the periodic parameter `t ∈ [0, 1)`.

use crate::conformal::ExplicitMap;
use crate::numeric::TrigSeries;
use crate::C64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// A closed, counterclockwise boundary parametrization with period 1.
pub trait Parametrization: Send + Sync + fmt::Debug {
    fn point(&self, t: f64) -> C64;

    /// Derivative with respect to `t`. May be non-finite at isolated
    /// singular parameters (the C¹ image-map boundary of the logarithmic
    /// example has unbounded speed at one point).
    fn tangent(&self, t: f64) -> C64;

    fn second_derivative(&self, t: f64) -> C64 {
        let h = 1e-5;
        (self.tangent(t + h) - self.tangent(t - h)) / (2.0 * h)
    }

    /// Unit tangent; at a point of infinite speed the one-sided directions
    /// are averaged.
    fn unit_tangent(&self, t: f64) -> Option<C64> {
        let d = self.tangent(t);
        let m = d.norm();
        if m.is_finite() && m > 0.0 {
            return Some(d / m);
        }
        let h = 1e-9;
        let l = self.tangent(t - h);
        let r = self.tangent(t + h);
        let (ml, mr) = (l.norm(), r.norm());
        if !(ml.is_finite() && mr.is_finite() && ml > 0.0 && mr > 0.0) {
            return None;
        }
        let avg = l / ml + r / mr;
        (avg.norm() > 1e-6).then(|| avg / avg.norm())
    }
}

fn angle(t: f64) -> f64 {
    2.0 * PI * t
}

#[derive(Debug, Clone, Copy)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Parametrization for Circle {
    fn point(&self, t: f64) -> C64 {
        self.center + C64::from_polar(self.radius, angle(t))
    }
    fn tangent(&self, t: f64) -> C64 {
        C64::from_polar(self.radius, angle(t)) * C64::new(0.0, 2.0 * PI)
    }
    fn second_derivative(&self, t: f64) -> C64 {
        -C64::from_polar(self.radius, angle(t)) * (4.0 * PI * PI)
    }
}

/// Axis-aligned ellipse `center + a cos θ + i b sin θ`.
#[derive(Debug, Clone, Copy)]
pub struct Ellipse {
    pub center: C64,
    pub a: f64,
    pub b: f64,
}

impl Parametrization for Ellipse {
    fn point(&self, t: f64) -> C64 {
        let th = angle(t);
        self.center + C64::new(self.a * th.cos(), self.b * th.sin())
    }
    fn tangent(&self, t: f64) -> C64 {
        let th = angle(t);
        C64::new(-self.a * th.sin(), self.b * th.cos()) * (2.0 * PI)
    }
    fn second_derivative(&self, t: f64) -> C64 {
        let th = angle(t);
        C64::new(-self.a * th.cos(), -self.b * th.sin()) * (4.0 * PI * PI)
    }
}

/// Superellipse `|x/a|^p + |y/b|^p = 1` with even integer `p`, written in
/// polar form so the parametrization is real-analytic. This is the
/// smoothed rectangle of the test suite.
#[derive(Debug, Clone, Copy)]
pub struct Superellipse {
    pub a: f64,
    pub b: f64,
    pub exponent: i32,
}

impl Superellipse {
    fn radius(&self, th: f64) -> (f64, f64) {
        let p = self.exponent;
        let (s, c) = th.sin_cos();
        let (cx, sy) = (c / self.a, s / self.b);
        let f = cx.powi(p) + sy.powi(p);
        let df = p as f64 * (-cx.powi(p - 1) * s / self.a + sy.powi(p - 1) * c / self.b);
        let r = f.powf(-1.0 / p as f64);
        let dr = -r / (p as f64 * f) * df;
        (r, dr)
    }
}

impl Parametrization for Superellipse {
    fn point(&self, t: f64) -> C64 {
        let th = angle(t);
        C64::from_polar(self.radius(th).0, th)
    }
    fn tangent(&self, t: f64) -> C64 {
        let th = angle(t);
        let (r, dr) = self.radius(th);
        C64::new(dr, r) * C64::from_polar(1.0, th) * (2.0 * PI)
    }
}

/// Ellipse with a multiplicative cosine bump:
/// `(1 + amplitude cos(frequency θ)) (a cos θ + i b sin θ)`.
#[derive(Debug, Clone, Copy)]
pub struct PerturbedEllipse {
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl Parametrization for PerturbedEllipse {
    fn point(&self, t: f64) -> C64 {
        let th = angle(t);
        let bump = 1.0 + self.amplitude * (self.frequency * th).cos();
        C64::new(self.a * th.cos(), self.b * th.sin()) * bump
    }
    fn tangent(&self, t: f64) -> C64 {
        let th = angle(t);
        let bump = 1.0 + self.amplitude * (self.frequency * th).cos();
        let dbump = -self.amplitude * self.frequency * (self.frequency * th).sin();
        let e = C64::new(self.a * th.cos(), self.b * th.sin());
        let de = C64::new(-self.a * th.sin(), self.b * th.cos());
        (e * dbump + de * bump) * (2.0 * PI)
    }
}

/// Trigonometric interpolant of an equispaced table of boundary points.
#[derive(Debug, Clone)]
pub struct FourierCurve {
    series: TrigSeries,
}

impl FourierCurve {
    pub fn from_samples(points: &[C64]) -> FourierCurve {
        FourierCurve {
            series: TrigSeries::fit(points),
        }
    }
}

impl Parametrization for FourierCurve {
    fn point(&self, t: f64) -> C64 {
        self.series.eval(t)
    }
    fn tangent(&self, t: f64) -> C64 {
        self.series.derivative(t)
    }
    fn second_derivative(&self, t: f64) -> C64 {
        self.series.second_derivative(t)
    }
}

/// Boundary `f(e^{2πit})` of the image of the unit disc under an explicit
/// univalent map.
#[derive(Debug, Clone)]
pub struct ImageCurve {
    pub map: ExplicitMap,
}

impl Parametrization for ImageCurve {
    fn point(&self, t: f64) -> C64 {
        self.map.boundary_value(C64::from_polar(1.0, angle(t)))
    }
    fn tangent(&self, t: f64) -> C64 {
        let u = C64::from_polar(1.0, angle(t));
        match self.map.derivative(u) {
            Some(d) => d * u * C64::new(0.0, 2.0 * PI),
            None => C64::new(f64::NAN, f64::NAN),
        }
    }
    fn second_derivative(&self, t: f64) -> C64 {
        let u = C64::from_polar(1.0, angle(t));
        let iu = u * C64::new(0.0, 2.0 * PI);
        match (self.map.derivative(u), self.map.second_derivative(u)) {
            (Some(d1), Some(d2)) => d2 * iu * iu + d1 * iu * C64::new(0.0, 2.0 * PI),
            _ => C64::new(f64::NAN, f64::NAN),
        }
    }
}

/// Orientation-preserving rigid motion `z ↦ (z - origin) · rotation`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RigidMotion {
    pub origin: C64,
    /// Unit complex number.
    pub rotation: C64,
}

impl RigidMotion {
    pub fn identity() -> RigidMotion {
        RigidMotion {
            origin: C64::new(0.0, 0.0),
            rotation: C64::new(1.0, 0.0),
        }
    }

    pub fn new(origin: C64, angle: f64) -> RigidMotion {
        RigidMotion {
            origin,
            rotation: C64::from_polar(1.0, angle),
        }
    }

    pub fn apply(&self, z: C64) -> C64 {
        (z - self.origin) * self.rotation
    }

    pub fn apply_vector(&self, v: C64) -> C64 {
        v * self.rotation
    }

    pub fn invert(&self, w: C64) -> C64 {
        w * self.rotation.conj() + self.origin
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        // (((z - o2) r2) - o1) r1 = (z - (o2 + o1 conj(r2))) r2 r1
        RigidMotion {
            origin: other.origin + self.origin * other.rotation.conj(),
            rotation: self.rotation * other.rotation,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Transformed {
    pub inner: Arc<dyn Parametrization>,
    pub motion: RigidMotion,
}

impl Parametrization for Transformed {
    fn point(&self, t: f64) -> C64 {
        self.motion.apply(self.inner.point(t))
    }
    fn tangent(&self, t: f64) -> C64 {
        self.motion.apply_vector(self.inner.tangent(t))
    }
    fn second_derivative(&self, t: f64) -> C64 {
        self.motion.apply_vector(self.inner.second_derivative(t))
    }
    fn unit_tangent(&self, t: f64) -> Option<C64> {
        self.inner.unit_tangent(t).map(|u| self.motion.apply_vector(u))
    }
}

/// Closure-backed parametrization for ad hoc curves (tests, experiments).
#[derive(Clone)]
pub struct FnCurve {
    pub name: &'static str,
    pub point: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
    pub tangent: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
}

impl fmt::Debug for FnCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnCurve").field("name", &self.name).finish()
    }
}

impl Parametrization for FnCurve {
    fn point(&self, t: f64) -> C64 {
        (self.point)(t.rem_euclid(1.0))
    }
    fn tangent(&self, t: f64) -> C64 {
        (self.tangent)(t.rem_euclid(1.0))
    }
}
