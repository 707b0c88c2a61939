//! Bounded planar domains with smooth Jordan boundaries.
//!
//! A [`Domain`] owns a sampled [`BoundaryCurve`] and, optionally, an explicit
//! defining function `r` with `r < 0` inside. Distances are computed by a
//! coarse scan of the boundary samples followed by golden-section and Newton
//! refinement over the curve parameter.

pub mod cone;
pub mod curves;
pub mod piecewise;
pub mod regularity;
pub mod description;

pub use cone::{cone_domains, ConeDomainPair};
pub use curves::{
    Circle, Ellipse, FnCurve, FourierCurve, ImageCurve, Parametrization, PerturbedEllipse, RigidMotion, Superellipse,
    Transformed,
};
pub use piecewise::{Piece, PiecewiseCurve};
pub use regularity::{regularity_check, RegularityBudget, RegularityReport};
pub use description::{build_domain, build_domain_in, DomainSpec, MapSpec};

use crate::conformal::ExplicitMap;
use crate::error::{Error, Result};
use crate::numeric::golden_section;
use crate::C64;
use std::fmt;
use std::sync::Arc;

/// Default number of boundary samples.
pub const DEFAULT_SAMPLES: usize = 1024;
/// Smallest sample count accepted from a domain description.
pub const MIN_SAMPLES: usize = 512;

/// Sampled closed Jordan curve with its validated invariants.
#[derive(Clone)]
pub struct BoundaryCurve {
    param: Arc<dyn Parametrization>,
    holder_exponent: f64,
    holder_constant: f64,
    samples: Vec<C64>,
    tangents: Vec<C64>,
    max_spacing: f64,
    diameter: f64,
    length: f64,
    area: f64,
}

impl fmt::Debug for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCurve")
            .field("param", &self.param)
            .field("sample_count", &self.samples.len())
            .field("holder_exponent", &self.holder_exponent)
            .field("holder_constant", &self.holder_constant)
            .finish()
    }
}

impl BoundaryCurve {
    /// Sample and validate a parametrization: closed, immersed, simple and
    /// counterclockwise.
    pub fn new(param: Arc<dyn Parametrization>, sample_count: usize, holder_exponent: f64) -> Result<BoundaryCurve> {
        if sample_count < 16 {
            return Err(Error::OutOfRange(format!("sample_count {sample_count} < 16")));
        }
        if !(holder_exponent > 0.0 && holder_exponent <= 1.0) {
            return Err(Error::OutOfRange(format!("hölder exponent {holder_exponent} not in (0, 1]")));
        }
        let n = sample_count;
        let samples: Vec<C64> = (0..n).map(|j| param.point(j as f64 / n as f64)).collect();
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Unbounded("non-finite boundary sample".into()));
        }
        let tangents: Vec<C64> = (0..n).map(|j| param.tangent(j as f64 / n as f64)).collect();
        let diameter = sample_diameter(&samples);
        if diameter <= 0.0 {
            return Err(Error::InvalidDomain("degenerate boundary".into()));
        }
        let closure_gap = (param.point(1.0) - param.point(0.0)).norm();
        if closure_gap > 1e-9 * (1.0 + diameter) {
            return Err(Error::InvalidDomain(format!("curve is not closed (gap {closure_gap:e})")));
        }
        for (j, d) in tangents.iter().enumerate() {
            let t = j as f64 / n as f64;
            let m = d.norm();
            if m.is_finite() {
                if m <= 1e-12 * diameter {
                    return Err(Error::VanishingTangent { t });
                }
            } else if param.unit_tangent(t).is_none() {
                return Err(Error::VanishingTangent { t });
            }
        }
        check_simple(&samples)?;
        let area = shoelace(&samples);
        if area <= 0.0 {
            return Err(Error::InvalidDomain("boundary must be oriented counterclockwise".into()));
        }
        let max_spacing = (0..n)
            .map(|j| (samples[(j + 1) % n] - samples[j]).norm())
            .fold(0.0, f64::max);
        let length = (0..n).map(|j| (samples[(j + 1) % n] - samples[j]).norm()).sum();
        let holder_constant = holder_quotient(&tangents, holder_exponent);
        Ok(BoundaryCurve {
            param,
            holder_exponent,
            holder_constant,
            samples,
            tangents,
            max_spacing,
            diameter,
            length,
            area,
        })
    }

    fn moved(&self, motion: RigidMotion) -> BoundaryCurve {
        BoundaryCurve {
            param: Arc::new(Transformed {
                inner: self.param.clone(),
                motion,
            }),
            samples: self.samples.iter().map(|&z| motion.apply(z)).collect(),
            tangents: self.tangents.iter().map(|&d| motion.apply_vector(d)).collect(),
            ..self.clone()
        }
    }

    pub fn point(&self, t: f64) -> C64 {
        self.param.point(t)
    }

    pub fn tangent(&self, t: f64) -> C64 {
        self.param.tangent(t)
    }

    pub fn second_derivative(&self, t: f64) -> C64 {
        self.param.second_derivative(t)
    }

    pub fn unit_tangent(&self, t: f64) -> Option<C64> {
        self.param.unit_tangent(t)
    }

    pub fn parametrization(&self) -> &Arc<dyn Parametrization> {
        &self.param
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn sample_tangents(&self) -> &[C64] {
        &self.tangents
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    /// Largest sampled `|γ'(s) - γ'(t)| / |s - t|^ε`.
    pub fn holder_constant(&self) -> f64 {
        self.holder_constant
    }

    pub fn max_spacing(&self) -> f64 {
        self.max_spacing
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Polygonal length of the samples.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Enclosed area of the sample polygon.
    pub fn area(&self) -> f64 {
        self.area
    }
}

fn sample_diameter(samples: &[C64]) -> f64 {
    // exact on the samples for moderate n; subsample large sets
    let step = (samples.len() / 512).max(1);
    let pts: Vec<C64> = samples.iter().step_by(step).copied().collect();
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

fn shoelace(samples: &[C64]) -> f64 {
    let n = samples.len();
    0.5 * (0..n)
        .map(|j| {
            let (a, b) = (samples[j], samples[(j + 1) % n]);
            a.re * b.im - a.im * b.re
        })
        .sum::<f64>()
}

fn orient(a: C64, b: C64, c: C64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn segments_cross(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn check_simple(samples: &[C64]) -> Result<()> {
    let n = samples.len();
    let boxes: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|j| {
            let (a, b) = (samples[j], samples[(j + 1) % n]);
            (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
        })
        .collect();
    for i in 0..n {
        let bi = boxes[i];
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let bj = boxes[j];
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            if segments_cross(samples[i], samples[(i + 1) % n], samples[j], samples[(j + 1) % n]) {
                return Err(Error::NonSimpleCurve { first: i, second: j });
            }
        }
    }
    Ok(())
}

fn holder_quotient(tangents: &[C64], exponent: f64) -> f64 {
    let n = tangents.len();
    let mut best: f64 = 0.0;
    let mut lag = 1;
    while lag <= n / 4 {
        let h = (lag as f64 / n as f64).powf(exponent);
        for j in 0..n {
            let (a, b) = (tangents[j], tangents[(j + lag) % n]);
            let q = (a - b).norm() / h;
            if q.is_finite() {
                best = best.max(q);
            }
        }
        lag *= 2;
    }
    best
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BBox {
    pub min: C64,
    pub max: C64,
}

impl BBox {
    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.min.re && z.re <= self.max.re && z.im >= self.min.im && z.im <= self.max.im
    }

    pub fn width(&self) -> f64 {
        self.max.re - self.min.re
    }

    pub fn height(&self) -> f64 {
        self.max.im - self.min.im
    }
}

/// Known closed-form structure of a domain, used to pick exact maps.
#[derive(Debug, Clone)]
pub enum Shape {
    Disc { center: C64, radius: f64 },
    /// Image of the unit disc under an explicit univalent map.
    Image(ExplicitMap),
    General,
}

/// Explicit defining function `r` (negative inside) with its gradient,
/// written as the complex number `∂r/∂x + i ∂r/∂y`.
#[derive(Clone)]
pub enum DefiningFunction {
    /// `|z - c|² - R²`.
    Disc { center: C64, radius: f64 },
    /// `((x - cx)/a)² + ((y - cy)/b)² - 1`.
    Ellipse { center: C64, a: f64, b: f64 },
    /// `max(|x|, |y|) - half_side`, a non-smooth comparison function.
    Square { half_side: f64 },
    Custom(Arc<dyn Fn(C64) -> (f64, C64) + Send + Sync>),
    Moved {
        inner: Box<DefiningFunction>,
        motion: RigidMotion,
    },
}

impl fmt::Debug for DefiningFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefiningFunction::Disc { center, radius } => write!(f, "Disc({center}, {radius})"),
            DefiningFunction::Ellipse { center, a, b } => write!(f, "Ellipse({center}, {a}, {b})"),
            DefiningFunction::Square { half_side } => write!(f, "Square({half_side})"),
            DefiningFunction::Custom(_) => write!(f, "Custom"),
            DefiningFunction::Moved { inner, motion } => write!(f, "Moved({inner:?}, {motion:?})"),
        }
    }
}

impl DefiningFunction {
    pub fn eval(&self, z: C64) -> (f64, C64) {
        match self {
            DefiningFunction::Disc { center, radius } => {
                let w = z - center;
                (w.norm_sqr() - radius * radius, w * 2.0)
            }
            DefiningFunction::Ellipse { center, a, b } => {
                let w = z - center;
                let (x, y) = (w.re / a, w.im / b);
                (x * x + y * y - 1.0, C64::new(2.0 * x / a, 2.0 * y / b))
            }
            DefiningFunction::Square { half_side } => {
                if z.re.abs() >= z.im.abs() {
                    (z.re.abs() - half_side, C64::new(z.re.signum(), 0.0))
                } else {
                    (z.im.abs() - half_side, C64::new(0.0, z.im.signum()))
                }
            }
            DefiningFunction::Custom(f) => f(z),
            DefiningFunction::Moved { inner, motion } => {
                let (v, g) = inner.eval(motion.invert(z));
                (v, motion.apply_vector(g))
            }
        }
    }

    fn moved(&self, motion: RigidMotion) -> DefiningFunction {
        match self {
            DefiningFunction::Moved { inner, motion: m } => DefiningFunction::Moved {
                inner: inner.clone(),
                motion: motion.compose(m),
            },
            other => DefiningFunction::Moved {
                inner: Box::new(other.clone()),
                motion,
            },
        }
    }
}

/// Nearest boundary point of a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    /// Boundary parameter in `[0, 1)`.
    pub t: f64,
    pub point: C64,
    /// Positive inside, negative outside.
    pub signed_distance: f64,
}

/// A bounded planar domain.
#[derive(Debug, Clone)]
pub struct Domain {
    curve: BoundaryCurve,
    shape: Shape,
    defining: Option<DefiningFunction>,
    bbox: BBox,
}

impl Domain {
    pub fn new(curve: BoundaryCurve, shape: Shape, defining: Option<DefiningFunction>) -> Result<Domain> {
        let pad = curve.max_spacing();
        let (mut min, mut max) = (curve.samples[0], curve.samples[0]);
        for z in curve.samples() {
            min = C64::new(min.re.min(z.re), min.im.min(z.im));
            max = C64::new(max.re.max(z.re), max.im.max(z.im));
        }
        let bbox = BBox {
            min: min - C64::new(pad, pad),
            max: max + C64::new(pad, pad),
        };
        let domain = Domain {
            curve,
            shape,
            defining,
            bbox,
        };
        if domain.curve.area() <= 0.0 {
            return Err(Error::InvalidDomain("empty interior".into()));
        }
        if let Some(r) = &domain.defining {
            // r must be negative exactly inside: spot-check a few points on
            // both sides of the boundary
            let n = domain.curve.sample_count();
            let off = 1e-3 * domain.curve.diameter();
            for j in (0..n).step_by((n / 16).max(1)) {
                let t = (j as f64 + 0.5) / n as f64;
                let Ok(nrm) = domain.inward_normal(t) else { continue };
                let p = domain.curve.point(t);
                if r.eval(p + nrm * off).0 >= 0.0 || r.eval(p - nrm * off).0 <= 0.0 {
                    return Err(Error::InvalidDomain(
                        "defining function disagrees with the boundary curve".into(),
                    ));
                }
            }
        }
        Ok(domain)
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn diameter(&self) -> f64 {
        self.curve.diameter()
    }

    pub fn explicit_defining(&self) -> Option<&DefiningFunction> {
        self.defining.as_ref()
    }

    /// Defining function value and gradient. Without an explicit one, the
    /// negated signed distance is used; its gradient is minus the inward
    /// normal at the nearest boundary point.
    pub fn defining(&self, z: C64) -> (f64, C64) {
        match &self.defining {
            Some(r) => r.eval(z),
            None => {
                let near = self.nearest(z);
                let n = self.inward_normal(near.t).unwrap_or(C64::new(0.0, 0.0));
                (-near.signed_distance, -n)
            }
        }
    }

    /// Unit inward normal `i γ'(t) / |γ'(t)|`.
    pub fn inward_normal(&self, t: f64) -> Result<C64> {
        self.curve
            .unit_tangent(t)
            .map(|u| u * C64::new(0.0, 1.0))
            .ok_or(Error::VanishingTangent { t })
    }

    pub fn signed_distance(&self, z: C64) -> f64 {
        self.nearest(z).signed_distance
    }

    pub fn contains(&self, z: C64) -> bool {
        self.signed_distance(z) > 0.0
    }

    /// Nearest boundary point: coarse scan over the samples, then
    /// golden-section and Newton refinement around each candidate local
    /// minimum. Ties resolve to the smallest parameter.
    pub fn nearest(&self, z: C64) -> Nearest {
        let samples = self.curve.samples();
        let n = samples.len();
        let nf = n as f64;
        let d2: Vec<f64> = samples.iter().map(|s| (s - z).norm_sqr()).collect();
        let min = d2.iter().cloned().fold(f64::INFINITY, f64::min);
        let cutoff = (min.sqrt() + 2.0 * self.curve.max_spacing()).powi(2);
        let mut cands: Vec<usize> = (0..n)
            .filter(|&j| d2[j] <= cutoff && d2[j] <= d2[(j + n - 1) % n] && d2[j] <= d2[(j + 1) % n])
            .collect();
        // exact ties (up to rounding) keep index order so the smallest
        // parameter wins
        let tie = min * (1.0 + 1e-10) + f64::MIN_POSITIVE;
        cands.sort_by(|&a, &b| match (d2[a] <= tie, d2[b] <= tie) {
            (true, true) => a.cmp(&b),
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => d2[a].total_cmp(&d2[b]),
        });
        cands.truncate(16);

        let dist2 = |t: f64| (self.curve.point(t) - z).norm_sqr();
        let mut best: Option<(f64, f64)> = None; // (distance², t)
        for &j in &cands {
            let tj = j as f64 / nf;
            let mut t = tj;
            let mut f = d2[j];
            let (tg, fg) = golden_section(dist2, tj - 1.0 / nf, tj + 1.0 / nf, 1e-15);
            if fg < f * (1.0 - 1e-15) {
                t = tg;
                f = fg;
            }
            // Newton on the stationarity condition Re(conj(γ - z) γ') = 0
            for _ in 0..3 {
                let g = self.curve.point(t) - z;
                let d1 = self.curve.tangent(t);
                let dd = self.curve.second_derivative(t);
                let num = (g.conj() * d1).re;
                let den = d1.norm_sqr() + (g.conj() * dd).re;
                if !(num.is_finite() && den.is_finite()) || den <= 0.0 {
                    break;
                }
                let cand = t - num / den;
                let fc = dist2(cand);
                if fc < f {
                    t = cand;
                    f = fc;
                } else {
                    break;
                }
            }
            let t = t.rem_euclid(1.0);
            best = match best {
                None => Some((f, t)),
                Some((bf, bt)) => {
                    let tie = (f - bf).abs() <= 1e-12 * bf.max(f64::MIN_POSITIVE);
                    if (tie && t < bt) || (!tie && f < bf) {
                        Some((f, t))
                    } else {
                        Some((bf, bt))
                    }
                }
            };
        }
        let (f, t) = best.unwrap_or((min, 0.0));
        let point = self.curve.point(t);
        let dist = f.sqrt();
        let sign = self.side(z, point, t);
        Nearest {
            t,
            point,
            signed_distance: sign * dist,
        }
    }

    fn side(&self, z: C64, foot: C64, t: f64) -> f64 {
        let v = z - foot;
        if v.norm() <= 1e-15 * (1.0 + self.diameter()) {
            return 0.0;
        }
        if let Ok(n) = self.inward_normal(t) {
            let s = (n.conj() * v).re;
            if s.abs() >= 0.5 * v.norm() {
                return s.signum();
            }
        }
        if self.winding_contains(z) {
            1.0
        } else {
            -1.0
        }
    }

    /// Crossing-number test against the sample polygon.
    pub fn winding_contains(&self, z: C64) -> bool {
        let s = self.curve.samples();
        let n = s.len();
        let mut inside = false;
        for j in 0..n {
            let (a, b) = (s[j], s[(j + 1) % n]);
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if x > z.re {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Image of the domain under a rigid motion.
    pub fn transformed(&self, motion: RigidMotion) -> Domain {
        let shape = match &self.shape {
            Shape::Disc { center, radius } => Shape::Disc {
                center: motion.apply(*center),
                radius: *radius,
            },
            Shape::Image(map) => Shape::Image(map.moved(motion)),
            Shape::General => Shape::General,
        };
        let curve = self.curve.moved(motion);
        let corners = [
            self.bbox.min,
            self.bbox.max,
            C64::new(self.bbox.min.re, self.bbox.max.im),
            C64::new(self.bbox.max.re, self.bbox.min.im),
        ]
        .map(|c| motion.apply(c));
        let pad = curve.max_spacing();
        let (mut min, mut max) = (curve.samples[0], curve.samples[0]);
        for z in curve.samples() {
            min = C64::new(min.re.min(z.re), min.im.min(z.im));
            max = C64::new(max.re.max(z.re), max.im.max(z.im));
        }
        let _ = corners;
        Domain {
            curve,
            shape,
            defining: self.defining.as_ref().map(|r| r.moved(motion)),
            bbox: BBox {
                min: min - C64::new(pad, pad),
                max: max + C64::new(pad, pad),
            },
        }
    }

    /// Approximately deepest interior point (largest boundary distance) on
    /// a coarse grid, refined by a shrinking pattern search.
    pub fn deepest_point(&self) -> (C64, f64) {
        let bb = self.bbox;
        let m = 24;
        let mut best = (C64::new(0.0, 0.0), f64::NEG_INFINITY);
        for i in 0..m {
            for j in 0..m {
                let z = C64::new(
                    bb.min.re + (i as f64 + 0.5) / m as f64 * bb.width(),
                    bb.min.im + (j as f64 + 0.5) / m as f64 * bb.height(),
                );
                if !self.winding_contains(z) {
                    continue;
                }
                let d = self.signed_distance(z);
                if d > best.1 {
                    best = (z, d);
                }
            }
        }
        let mut step = bb.width().max(bb.height()) / m as f64;
        while step > 1e-6 * self.diameter() {
            let mut improved = false;
            for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let z = best.0 + dir * step;
                let d = self.signed_distance(z);
                if d > best.1 {
                    best = (z, d);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best
    }
}

/// `signed_distance` as a free function.
pub fn signed_distance(domain: &Domain, z: C64) -> f64 {
    domain.signed_distance(z)
}

/// Unit inward normal at boundary parameter `t`.
pub fn inward_normal(domain: &Domain, t: f64) -> Result<C64> {
    domain.inward_normal(t)
}

/// Move `domain` so that the boundary point `a` goes to the origin and the
/// inward normal there becomes the positive real axis.
pub fn normalize_at(domain: &Domain, a: C64) -> Result<(Domain, RigidMotion)> {
    let near = domain.nearest(a);
    let tol = 1e-9 * domain.diameter();
    if near.signed_distance.abs() > tol {
        return Err(Error::NotOnBoundary {
            distance: near.signed_distance.abs(),
            tolerance: tol,
        });
    }
    let n = domain.inward_normal(near.t)?;
    let motion = RigidMotion {
        origin: a,
        rotation: n.conj(),
    };
    Ok((domain.transformed(motion), motion))
}
