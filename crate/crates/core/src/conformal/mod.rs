//! Riemann maps `ψ: D → 𝔻` with `ψ(center) = 0` and `ψ'(center) > 0`.
//!
//! A map is a base map onto the disc (exact for discs and explicit image
//! domains, numerical otherwise) followed by a disc automorphism that
//! enforces the normalization.

pub mod explicit;
pub mod szego;
pub mod theodorsen;

pub use explicit::ExplicitMap;
pub use szego::{SzegoMap, SzegoOptions};
pub use theodorsen::TheodorsenMap;

use crate::domain::{build_domain, Domain, DomainSpec, MapSpec, Shape};
use crate::error::{Error, Result};
use crate::C64;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Relative width of the boundary collar in which numerical maps refuse to
/// evaluate.
pub const COLLAR: f64 = 1e-6;

/// Disc automorphism `v ↦ λ (v - α) / (1 - ᾱ v)` with `|λ| = 1`, `|α| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mobius {
    pub alpha: C64,
    pub lambda: C64,
}

impl Mobius {
    pub fn identity() -> Mobius {
        Mobius {
            alpha: C64::new(0.0, 0.0),
            lambda: C64::new(1.0, 0.0),
        }
    }

    pub fn apply(&self, v: C64) -> C64 {
        self.lambda * (v - self.alpha) / (C64::new(1.0, 0.0) - self.alpha.conj() * v)
    }

    pub fn derivative(&self, v: C64) -> C64 {
        let q = C64::new(1.0, 0.0) - self.alpha.conj() * v;
        self.lambda * (1.0 - self.alpha.norm_sqr()) / (q * q)
    }

    /// `1 - |apply(v)|²` from `1 - |v|²` without cancellation.
    pub fn defect(&self, v: C64, defect: f64) -> f64 {
        let q = C64::new(1.0, 0.0) - self.alpha.conj() * v;
        (1.0 - self.alpha.norm_sqr()) * defect / q.norm_sqr()
    }

    pub fn invert(&self, w: C64) -> C64 {
        let u = w / self.lambda;
        (u + self.alpha) / (C64::new(1.0, 0.0) + self.alpha.conj() * u)
    }
}

/// Value of `ψ` with its derivative and `1 - |ψ|²`, the last computed
/// directly so it stays accurate when `|ψ|` is close to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapValue {
    pub value: C64,
    pub derivative: C64,
    pub defect: f64,
}

#[derive(Debug, Clone)]
enum Base {
    Disc { center: C64, radius: f64 },
    Explicit(ExplicitMap),
    Szego(Arc<SzegoMap>),
    Theodorsen(Arc<TheodorsenMap>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MapMethod {
    /// Exact maps where the shape is known, otherwise Szegő with a
    /// Theodorsen fallback.
    #[default]
    Auto,
    Szego,
    Theodorsen,
}

#[derive(Debug, Clone, Copy)]
pub struct MapOptions {
    pub method: MapMethod,
    /// Boundary nodes for numerical methods; defaults to the domain's
    /// sample count.
    pub nodes: Option<usize>,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            method: MapMethod::Auto,
            nodes: None,
        }
    }
}

/// Normalized Riemann map of a Jordan domain onto the unit disc.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    source: Domain,
    center: C64,
    base: Base,
    post: Mobius,
    collar: f64,
}

/// Build `ψ: D → 𝔻` with `ψ(center) = 0` and `ψ'(center) > 0`.
pub fn build_riemann_map(domain: &Domain, center: C64) -> Result<ConformalMap> {
    build_riemann_map_with(domain, center, &MapOptions::default())
}

pub fn build_riemann_map_with(domain: &Domain, center: C64, opts: &MapOptions) -> Result<ConformalMap> {
    let sd = domain.signed_distance(center);
    let collar = COLLAR * domain.diameter();
    if sd <= 0.0 {
        return Err(Error::OutsideDomain { distance: sd });
    }
    if sd < collar {
        return Err(Error::TooCloseToBoundary { distance: sd, collar });
    }
    let exact = opts.method == MapMethod::Auto;
    let (base, collar) = match domain.shape() {
        Shape::Disc { center: c, radius } if exact => (
            Base::Disc {
                center: *c,
                radius: *radius,
            },
            0.0,
        ),
        Shape::Image(f) if exact => (Base::Explicit(f.clone()), 0.0),
        _ => (numeric_base(domain, center, opts)?, collar),
    };
    let mut map = ConformalMap {
        source: domain.clone(),
        center,
        base,
        post: Mobius::identity(),
        collar,
    };
    // normalize: send the centre to 0 with positive derivative
    let v = map.base_forward(center, None)?;
    let alpha = v.value;
    let d = v.derivative / (1.0 - alpha.norm_sqr());
    map.post = Mobius {
        alpha,
        lambda: d.conj() / d.norm(),
    };
    Ok(map)
}

fn numeric_base(domain: &Domain, center: C64, opts: &MapOptions) -> Result<Base> {
    let nodes = opts.nodes.unwrap_or(domain.curve().sample_count());
    let szego = || {
        let o = SzegoOptions {
            nodes,
            ..SzegoOptions::default()
        };
        SzegoMap::solve(domain.curve(), center, &o).map(|m| Base::Szego(Arc::new(m)))
    };
    let theodorsen = || TheodorsenMap::solve(domain.curve(), center, nodes).map(|m| Base::Theodorsen(Arc::new(m)));
    match opts.method {
        MapMethod::Szego => szego(),
        MapMethod::Theodorsen => theodorsen(),
        MapMethod::Auto => szego().or_else(|e| theodorsen().map_err(|_| e)),
    }
}

/// Disc automorphism `z ↦ (z - a) / (1 - āz)` as a map of the unit disc.
pub fn disc_automorphism(a: C64) -> Result<ConformalMap> {
    if !(a.norm() < 1.0) {
        return Err(Error::OutOfRange(format!("|a| = {} is not below 1", a.norm())));
    }
    let disc = build_domain(&DomainSpec::UnitDisc { samples: 512 })?;
    Ok(ConformalMap {
        source: disc,
        center: a,
        base: Base::Disc {
            center: C64::new(0.0, 0.0),
            radius: 1.0,
        },
        post: Mobius {
            alpha: a,
            lambda: C64::new(1.0, 0.0),
        },
        collar: 0.0,
    })
}

/// The logarithmic example domain `f(𝔻)`, `f(u) = 2u + (1 - u) log(1 - u)`,
/// with its map normalized at 0.
pub fn example4_domain() -> Result<(Domain, ConformalMap)> {
    let domain = build_domain(&DomainSpec::ImageMap {
        map: MapSpec::Example4,
        samples: 2048,
        holder_exponent: 1.0,
    })?;
    let map = build_riemann_map(&domain, C64::new(0.0, 0.0))?;
    Ok((domain, map))
}

impl ConformalMap {
    pub fn source(&self) -> &Domain {
        &self.source
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    /// Width of the refused boundary collar (zero for exact maps).
    pub fn collar(&self) -> f64 {
        self.collar
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.base, Base::Disc { .. } | Base::Explicit(_))
    }

    pub fn method(&self) -> &'static str {
        match self.base {
            Base::Disc { .. } => "disc",
            Base::Explicit(_) => "explicit",
            Base::Szego(_) => "szego",
            Base::Theodorsen(_) => "theodorsen",
        }
    }

    fn base_forward(&self, z: C64, near: Option<crate::domain::Nearest>) -> Result<MapValue> {
        match &self.base {
            Base::Disc { center, radius } => {
                let v = (z - center) / *radius;
                let r = (z - center).norm();
                Ok(MapValue {
                    value: v,
                    derivative: C64::new(1.0 / radius, 0.0),
                    defect: (radius - r) * (radius + r) / (radius * radius),
                })
            }
            Base::Explicit(f) => {
                let u = f.preimage(z)?;
                let d = f.derivative(u).ok_or(Error::SingularJacobian("explicit map derivative"))?;
                Ok(MapValue {
                    value: u,
                    derivative: d.inv(),
                    defect: 1.0 - u.norm_sqr(),
                })
            }
            Base::Szego(m) => {
                let near = near.unwrap_or_else(|| self.source.nearest(z));
                let (value, derivative, defect) = m.eval(self.source.curve(), z, &near);
                Ok(MapValue {
                    value,
                    derivative,
                    defect,
                })
            }
            Base::Theodorsen(m) => {
                let seed = (z - self.center) / (1.0 + (z - self.center).norm());
                let v = m.forward(z, seed)?;
                Ok(MapValue {
                    value: v,
                    derivative: m.inverse(v).1.inv(),
                    defect: 1.0 - v.norm_sqr(),
                })
            }
        }
    }

    /// `ψ(z)`, `ψ'(z)` and `1 - |ψ(z)|²`.
    pub fn forward(&self, z: C64) -> Result<MapValue> {
        let near = self.source.nearest(z);
        let sd = near.signed_distance;
        if sd <= 0.0 {
            return Err(Error::OutsideDomain { distance: sd });
        }
        if sd < self.collar {
            return Err(Error::TooCloseToBoundary {
                distance: sd,
                collar: self.collar,
            });
        }
        let b = self.base_forward(z, Some(near))?;
        Ok(MapValue {
            value: self.post.apply(b.value),
            derivative: self.post.derivative(b.value) * b.derivative,
            defect: self.post.defect(b.value, b.defect),
        })
    }

    /// `(ψ(z), ψ'(z))`.
    pub fn map_forward(&self, z: C64) -> Result<(C64, C64)> {
        self.forward(z).map(|v| (v.value, v.derivative))
    }

    /// `ψ⁻¹(w)`.
    pub fn inverse(&self, w: C64) -> Result<C64> {
        if !(w.norm() < 1.0) {
            return Err(Error::OutsideDomain {
                distance: 1.0 - w.norm(),
            });
        }
        let v = self.post.invert(w);
        match &self.base {
            Base::Disc { center, radius } => Ok(center + v * *radius),
            Base::Explicit(f) => Ok(f.value(v)),
            Base::Theodorsen(m) => Ok(m.inverse(v).0),
            Base::Szego(m) => self.newton_inverse(w, m.inverse_seed(v)),
        }
    }

    /// `(ψ⁻¹)'(w)`.
    pub fn inverse_derivative(&self, w: C64) -> Result<C64> {
        let z = self.inverse(w)?;
        let v = self.post.invert(w);
        match &self.base {
            Base::Disc { radius, .. } => Ok(C64::new(*radius, 0.0) / self.post.derivative(v)),
            Base::Explicit(f) => f
                .derivative(v)
                .map(|d| d / self.post.derivative(v))
                .ok_or(Error::SingularJacobian("explicit map derivative")),
            Base::Theodorsen(m) => Ok(m.inverse(v).1 / self.post.derivative(v)),
            Base::Szego(_) => Ok(self.forward(z)?.derivative.inv()),
        }
    }

    fn newton_inverse(&self, w: C64, seed: C64) -> Result<C64> {
        let tol = 1e-13 * (1.0 + self.source.diameter());
        let mut z = seed;
        if self.forward(z).is_err() {
            // fall back to the centre when the seed lands outside
            z = self.center;
        }
        let mut val = self.forward(z)?;
        let mut res = (val.value - w).norm();
        for it in 0..60 {
            let step = (val.value - w) / val.derivative;
            if step.norm() <= tol {
                return Ok(z - step);
            }
            let mut lambda = 1.0;
            loop {
                let cand = z - step * lambda;
                if let Ok(v) = self.forward(cand) {
                    let r = (v.value - w).norm();
                    if r < res || r < 1e-15 {
                        z = cand;
                        val = v;
                        res = r;
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-12 {
                    return if res < 1e-11 {
                        Ok(z)
                    } else {
                        Err(Error::NonConvergence {
                            stage: "inverse map Newton",
                            iterations: it,
                            residual: res,
                        })
                    };
                }
            }
        }
        if res < 1e-11 {
            Ok(z)
        } else {
            Err(Error::NonConvergence {
                stage: "inverse map Newton",
                iterations: 60,
                residual: res,
            })
        }
    }

    /// Boundary correspondence `(t, ψ(γ(t)))` on `n` equispaced source
    /// parameters.
    pub fn boundary_correspondence(&self, n: usize) -> Vec<(f64, C64)> {
        (0..n)
            .map(|j| {
                let t = j as f64 / n as f64;
                (t, self.boundary_correspondence_at(t))
            })
            .collect()
    }

    /// Smallest and largest `|ψ'|` on the boundary: from the boundary
    /// nodes of a Szegő map, otherwise sampled on the circle. `None` when
    /// the derivative degenerates somewhere on the boundary.
    pub fn boundary_derivative_range(&self) -> Option<(f64, f64)> {
        let values: Vec<f64> = match &self.base {
            Base::Szego(m) => m
                .boundary_values()
                .iter()
                .zip(m.boundary_derivatives())
                .map(|(v, d)| (self.post.derivative(*v) * d).norm())
                .collect(),
            _ => (0..1024)
                .map(|j| {
                    let v = C64::from_polar(1.0, 2.0 * PI * j as f64 / 1024.0);
                    let inv = match &self.base {
                        Base::Disc { radius, .. } => Some(C64::new(*radius, 0.0)),
                        Base::Explicit(f) => f.derivative(v),
                        Base::Theodorsen(m) => Some(m.inverse(v).1),
                        Base::Szego(_) => unreachable!(),
                    };
                    inv.map(|d| (self.post.derivative(v) / d).norm()).unwrap_or(f64::NAN)
                })
                .collect(),
        };
        if values.iter().any(|x| !x.is_finite() || *x == 0.0) {
            return None;
        }
        Some((
            values.iter().copied().fold(f64::INFINITY, f64::min),
            values.iter().copied().fold(0.0, f64::max),
        ))
    }

    /// Boundary parameter and point whose image is closest to `q` on the
    /// unit circle, refined by bisection on the argument.
    pub fn boundary_preimage(&self, q: C64) -> (f64, C64) {
        let n = self.source.curve().sample_count();
        let table = self.boundary_correspondence(n);
        let k = (0..n)
            .min_by(|&i, &j| (table[i].1 - q).norm().total_cmp(&(table[j].1 - q).norm()))
            .unwrap_or(0);
        let image = |t: f64| self.boundary_correspondence_at(t);
        let angle = |t: f64| (image(t) / q).arg();
        let (mut lo, mut hi) = ((k as f64 - 1.0) / n as f64, (k as f64 + 1.0) / n as f64);
        if angle(lo) <= 0.0 && angle(hi) >= 0.0 {
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if angle(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        } else {
            lo = k as f64 / n as f64;
            hi = lo;
        }
        let t = (0.5 * (lo + hi)).rem_euclid(1.0);
        (t, self.source.curve().point(t))
    }

    fn boundary_correspondence_at(&self, t: f64) -> C64 {
        let b = match &self.base {
            Base::Disc { center, .. } => {
                let p = self.source.curve().point(t) - center;
                p / p.norm()
            }
            Base::Explicit(_) => C64::from_polar(1.0, 2.0 * PI * t),
            Base::Szego(m) => m.boundary_value(t),
            Base::Theodorsen(m) => {
                let p = self.source.curve().point(t);
                let v = m.forward(p, (p - self.center) / (p - self.center).norm() * 0.999);
                v.map(|v| v / v.norm()).unwrap_or(C64::new(f64::NAN, f64::NAN))
            }
        };
        self.post.apply(b)
    }

    /// CSV export `t_source,re,im`.
    pub fn write_correspondence_csv<W: Write>(&self, n: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_source", "re", "im"])?;
        for (t, b) in self.boundary_correspondence(n) {
            w.serialize((t, b.re, b.im))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn export_correspondence(&self, n: usize, path: &Path) -> Result<()> {
        self.write_correspondence_csv(n, std::fs::File::create(path)?)
    }
}
