//! JSON domain descriptions.
//!
//! ```json
//! {"kind": "ellipse", "a": 2.0, "b": 1.0}
//! {"kind": "disc", "center": [0.0, 0.0], "radius": 2.0, "samples": 2048}
//! {"kind": "param_table", "path": "boundary.csv"}
//! {"kind": "image_map", "map": "example4"}
//! ```
//!
//! Every kind accepts `samples` (default 1024, at least 512) and
//! `holder_exponent` (default 1).

use super::curves::{Circle, Ellipse, FnCurve, FourierCurve, ImageCurve, Parametrization, PerturbedEllipse, Superellipse};
use super::{BoundaryCurve, DefiningFunction, Domain, Shape, DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::conformal::ExplicitMap;
use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_holder() -> f64 {
    1.0
}

fn default_exponent() -> i32 {
    4
}

fn origin() -> C64 {
    C64::new(0.0, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSpec {
    /// `u ↦ 2u + (1 - u) log(1 - u)`.
    Example4,
    Polynomial { coefficients: Vec<C64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    UnitDisc {
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Disc {
        #[serde(default = "origin")]
        center: C64,
        radius: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Ellipse {
        #[serde(default = "origin")]
        center: C64,
        a: f64,
        b: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Superellipse `|x/a|^p + |y/b|^p = 1` with even `p`.
    SmoothedRectangle {
        a: f64,
        b: f64,
        #[serde(default = "default_exponent")]
        exponent: i32,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    PerturbedEllipse {
        a: f64,
        b: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Square `max(|x|, |y|) < half_side` with its corners left sharp.
    Square {
        half_side: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Equispaced boundary table, either inline or as CSV `t,re,im`.
    ParamTable {
        #[serde(default)]
        path: Option<PathBuf>,
        #[serde(default)]
        points: Option<Vec<C64>>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_holder")]
        holder_exponent: f64,
    },
    ImageMap {
        map: MapSpec,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_holder")]
        holder_exponent: f64,
    },
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<DomainSpec> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<DomainSpec> {
        DomainSpec::from_json(&std::fs::read_to_string(path)?)
    }

    fn samples(&self) -> usize {
        match self {
            DomainSpec::UnitDisc { samples }
            | DomainSpec::Disc { samples, .. }
            | DomainSpec::Ellipse { samples, .. }
            | DomainSpec::SmoothedRectangle { samples, .. }
            | DomainSpec::PerturbedEllipse { samples, .. }
            | DomainSpec::Square { samples, .. }
            | DomainSpec::ParamTable { samples, .. }
            | DomainSpec::ImageMap { samples, .. } => *samples,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else if !v.is_finite() {
        Err(Error::Unbounded(format!("{name} = {v}")))
    } else {
        Err(Error::OutOfRange(format!("{name} must be positive, got {v}")))
    }
}

/// Build and validate a domain. Relative table paths resolve against the
/// working directory.
pub fn build_domain(spec: &DomainSpec) -> Result<Domain> {
    build_domain_in(spec, Path::new("."))
}

/// As [`build_domain`], resolving relative table paths against `base`.
pub fn build_domain_in(spec: &DomainSpec, base: &Path) -> Result<Domain> {
    let n = spec.samples();
    if n < MIN_SAMPLES {
        return Err(Error::OutOfRange(format!("samples {n} < {MIN_SAMPLES}")));
    }
    let curve = |p: Arc<dyn Parametrization>, eps: f64| BoundaryCurve::new(p, n, eps);
    match spec {
        DomainSpec::UnitDisc { .. } => disc_domain(origin(), 1.0, n),
        DomainSpec::Disc { center, radius, .. } => {
            positive("radius", *radius)?;
            disc_domain(*center, *radius, n)
        }
        DomainSpec::Ellipse { center, a, b, .. } => {
            positive("a", *a)?;
            positive("b", *b)?;
            let e = Ellipse {
                center: *center,
                a: *a,
                b: *b,
            };
            Domain::new(
                curve(Arc::new(e), 1.0)?,
                Shape::General,
                Some(DefiningFunction::Ellipse {
                    center: *center,
                    a: *a,
                    b: *b,
                }),
            )
        }
        DomainSpec::SmoothedRectangle { a, b, exponent, .. } => {
            positive("a", *a)?;
            positive("b", *b)?;
            if *exponent < 2 || exponent % 2 != 0 {
                return Err(Error::OutOfRange(format!("exponent {exponent} must be even and ≥ 2")));
            }
            let s = Superellipse {
                a: *a,
                b: *b,
                exponent: *exponent,
            };
            let (a, b, p) = (*a, *b, *exponent);
            let r = DefiningFunction::Custom(Arc::new(move |z: C64| {
                let (x, y) = (z.re / a, z.im / b);
                let v = x.powi(p) + y.powi(p) - 1.0;
                let g = C64::new(p as f64 * x.powi(p - 1) / a, p as f64 * y.powi(p - 1) / b);
                (v, g)
            }));
            Domain::new(curve(Arc::new(s), 1.0)?, Shape::General, Some(r))
        }
        DomainSpec::PerturbedEllipse {
            a,
            b,
            amplitude,
            frequency,
            ..
        } => {
            positive("a", *a)?;
            positive("b", *b)?;
            if !(amplitude.abs() < 1.0) {
                return Err(Error::OutOfRange(format!("amplitude {amplitude} must lie in (-1, 1)")));
            }
            let p = PerturbedEllipse {
                a: *a,
                b: *b,
                amplitude: *amplitude,
                frequency: *frequency,
            };
            Domain::new(curve(Arc::new(p), 1.0)?, Shape::General, None)
        }
        DomainSpec::Square { half_side, .. } => {
            positive("half_side", *half_side)?;
            let h = *half_side;
            let sq = square_curve(h);
            Domain::new(
                curve(Arc::new(sq), 1.0)?,
                Shape::General,
                Some(DefiningFunction::Square { half_side: h }),
            )
        }
        DomainSpec::ParamTable {
            path,
            points,
            holder_exponent,
            ..
        } => {
            let pts = match (path, points) {
                (Some(p), None) => read_table(&base.join(p))?,
                (None, Some(pts)) => pts.clone(),
                _ => {
                    return Err(Error::InvalidDomain(
                        "param_table needs exactly one of `path` or `points`".into(),
                    ))
                }
            };
            if pts.len() < 8 {
                return Err(Error::InvalidDomain(format!("table has only {} points", pts.len())));
            }
            if pts.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Unbounded("non-finite table entry".into()));
            }
            Domain::new(
                curve(Arc::new(FourierCurve::from_samples(&pts)), *holder_exponent)?,
                Shape::General,
                None,
            )
        }
        DomainSpec::ImageMap {
            map, holder_exponent, ..
        } => {
            let f = match map {
                MapSpec::Example4 => ExplicitMap::LogarithmicExample,
                MapSpec::Polynomial { coefficients } => ExplicitMap::Polynomial(coefficients.clone()),
            };
            Domain::new(
                curve(Arc::new(ImageCurve { map: f.clone() }), *holder_exponent)?,
                Shape::Image(f),
                None,
            )
        }
    }
}

fn disc_domain(center: C64, radius: f64, n: usize) -> Result<Domain> {
    Domain::new(
        BoundaryCurve::new(Arc::new(Circle { center, radius }), n, 1.0)?,
        Shape::Disc { center, radius },
        Some(DefiningFunction::Disc { center, radius }),
    )
}

/// Square traversed at constant speed, starting at `(h, 0)`.
pub fn square_curve(h: f64) -> FnCurve {
    let corners = [C64::new(h, h), C64::new(-h, h), C64::new(-h, -h), C64::new(h, -h)];
    let start = C64::new(h, 0.0);
    let path: Vec<C64> = std::iter::once(start)
        .chain(corners)
        .chain(std::iter::once(start))
        .collect();
    // segment lengths: h, 2h, 2h, 2h, h out of 8h
    let knots = [0.0, 0.125, 0.375, 0.625, 0.875, 1.0];
    let locate = move |t: f64| {
        let k = (0..5).rfind(|&k| t >= knots[k]).unwrap_or(0);
        (k, (t - knots[k]) / (knots[k + 1] - knots[k]))
    };
    let path2 = path.clone();
    FnCurve {
        name: "square",
        point: Arc::new(move |t| {
            let (k, u) = locate(t);
            path[k] + (path[k + 1] - path[k]) * u
        }),
        tangent: Arc::new(move |t| {
            let (k, _) = locate(t);
            (path2[k + 1] - path2[k]) / (knots[k + 1] - knots[k])
        }),
    }
}

/// Read a CSV table `t,re,im` whose parameters are equispaced `j/N`.
pub fn read_table(path: &Path) -> Result<Vec<C64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<(f64, C64)> = Vec::new();
    for rec in rdr.deserialize() {
        let (t, re, im): (f64, f64, f64) = rec?;
        rows.push((t, C64::new(re, im)));
    }
    let n = rows.len();
    for (j, (t, _)) in rows.iter().enumerate() {
        if (t - j as f64 / n as f64).abs() > 1e-9 {
            return Err(Error::InvalidDomain(format!(
                "table parameters must be equispaced j/N; row {j} has t = {t}"
            )));
        }
    }
    Ok(rows.into_iter().map(|(_, z)| z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_kinds() {
        let s = DomainSpec::from_json(r#"{"kind": "ellipse", "a": 2.0, "b": 1.0}"#).unwrap();
        assert!(matches!(s, DomainSpec::Ellipse { samples: 1024, .. }));
        let s = DomainSpec::from_json(r#"{"kind": "disc", "center": [1.0, 0.0], "radius": 2.0}"#).unwrap();
        assert!(matches!(s, DomainSpec::Disc { .. }));
        let s = DomainSpec::from_json(r#"{"kind": "image_map", "map": "example4"}"#).unwrap();
        assert!(matches!(s, DomainSpec::ImageMap { map: MapSpec::Example4, .. }));
    }

    #[test]
    fn rejects_too_few_samples_and_bad_radius() {
        assert!(build_domain(&DomainSpec::UnitDisc { samples: 100 }).is_err());
        let bad = DomainSpec::Disc {
            center: origin(),
            radius: f64::INFINITY,
            samples: 1024,
        };
        assert!(matches!(build_domain(&bad), Err(Error::Unbounded(_))));
    }

    #[test]
    fn square_curve_is_closed_and_ccw() {
        let sq = square_curve(1.0);
        assert!((sq.point(0.0) - sq.point(1.0 - 1e-12)).norm() < 1e-9);
        assert!((sq.point(0.125) - C64::new(1.0, 1.0)).norm() < 1e-12);
        let d = build_domain(&DomainSpec::Square {
            half_side: 1.0,
            samples: 1024,
        })
        .unwrap();
        assert!((d.signed_distance(C64::new(0.5, 0.0)) - 0.5).abs() < 1e-10);
    }
}
