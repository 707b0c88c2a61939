//! Polynomial curves through two boundary points meeting the boundary
//! normally, and the admissibility test that they stay inside.

use crate::ambient::{hermitian, norm, AmbientDomain};
use crate::error::{Error, Result};
use crate::numeric::{chebyshev_coefficients, chebyshev_derivative, chebyshev_integral, chebyshev_points, clenshaw};
use crate::C64;
use serde::Serialize;

/// Degrees tried in turn by [`lemma3_curve`].
pub const DEGREES: [usize; 7] = [8, 12, 16, 24, 32, 48, 64];

const ENDPOINT_TOL: f64 = 1e-10;

/// `φ: ℂ → ℂⁿ` in the Chebyshev basis, with `φ(1) = a`, `φ(-1) = b`,
/// `φ'(1) = -n_a`, `φ'(-1) = n_b`.
#[derive(Debug, Clone, Serialize)]
pub struct PolynomialCurve {
    /// `coords[k][j]`: coefficient of `T_j` in coordinate `k`.
    coords: Vec<Vec<C64>>,
    #[serde(skip)]
    derivative: Vec<Vec<C64>>,
    #[serde(skip)]
    second: Vec<Vec<C64>>,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub n_a: Vec<C64>,
    pub n_b: Vec<C64>,
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

impl PolynomialCurve {
    fn from_coords(coords: Vec<Vec<C64>>, a: Vec<C64>, b: Vec<C64>, n_a: Vec<C64>, n_b: Vec<C64>) -> PolynomialCurve {
        let derivative: Vec<Vec<C64>> = coords.iter().map(|c| chebyshev_derivative(c)).collect();
        let second = derivative.iter().map(|c| chebyshev_derivative(c)).collect();
        PolynomialCurve {
            coords,
            derivative,
            second,
            a,
            b,
            n_a,
            n_b,
        }
    }

    /// From monomial coefficients `monomials[j] ∈ ℂⁿ` of `ζ^j`; the endpoint
    /// conditions are verified.
    pub fn from_monomials(
        monomials: &[Vec<C64>],
        a: Vec<C64>,
        b: Vec<C64>,
        n_a: Vec<C64>,
        n_b: Vec<C64>,
    ) -> Result<PolynomialCurve> {
        let n = a.len();
        if monomials.is_empty() || monomials.iter().any(|m| m.len() != n) || [&b, &n_a, &n_b].iter().any(|v| v.len() != n) {
            return Err(Error::OutOfRange("inconsistent dimensions".into()));
        }
        let deg = monomials.len().max(2) - 1;
        let xs = chebyshev_points(deg);
        let coords = (0..n)
            .map(|k| {
                let vals: Vec<C64> = xs
                    .iter()
                    .map(|&x| monomials.iter().rev().fold(C64::new(0.0, 0.0), |acc, m| acc * x + m[k]))
                    .collect();
                chebyshev_coefficients(&vals)
            })
            .collect();
        let curve = PolynomialCurve::from_coords(coords, a, b, n_a, n_b);
        curve.check_endpoints()?;
        Ok(curve)
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn degree(&self) -> usize {
        self.coords.iter().map(|c| c.len()).max().unwrap_or(1) - 1
    }

    /// Chebyshev coefficients as points of `ℂⁿ`, lowest degree first.
    pub fn coefficients(&self) -> Vec<Vec<C64>> {
        (0..=self.degree())
            .map(|j| self.coords.iter().map(|c| c.get(j).copied().unwrap_or_default()).collect())
            .collect()
    }

    pub fn value(&self, zeta: C64) -> Vec<C64> {
        self.coords.iter().map(|c| clenshaw(c, zeta)).collect()
    }

    pub fn derivative(&self, zeta: C64) -> Vec<C64> {
        self.derivative.iter().map(|c| clenshaw(c, zeta)).collect()
    }

    pub fn second_derivative(&self, zeta: C64) -> Vec<C64> {
        self.second.iter().map(|c| clenshaw(c, zeta)).collect()
    }

    /// Largest deviation from the endpoint conditions.
    pub fn endpoint_error(&self) -> f64 {
        let one = C64::new(1.0, 0.0);
        let dist = |x: Vec<C64>, y: &[C64], sign: f64| x.iter().zip(y).map(|(p, q)| (p - q * sign).norm()).fold(0.0, f64::max);
        [
            dist(self.value(one), &self.a, 1.0),
            dist(self.value(-one), &self.b, 1.0),
            dist(self.derivative(one), &self.n_a, -1.0),
            dist(self.derivative(-one), &self.n_b, 1.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn check_endpoints(&self) -> Result<()> {
        let e = self.endpoint_error();
        let scale = 1.0 + norm(&self.a).max(norm(&self.b));
        if e > ENDPOINT_TOL * scale {
            return Err(Error::Admissibility {
                t: 1.0,
                reason: format!("endpoint conditions violated by {e:e}"),
            });
        }
        Ok(())
    }
}

/// `φ_{u,v}(ζ) = φ(ζ) + ((ζ+1)/2)² u + ((ζ-1)/2)² v` for `u ⊥ n_a` and
/// `v ⊥ n_b` in the Hermitian sense (the complex tangent spaces). The
/// endpoint data of the result still refer to the unperturbed curve.
pub fn perturbed_disc(curve: &PolynomialCurve, u: &[C64], v: &[C64]) -> Result<PolynomialCurve> {
    let n = curve.dimension();
    if u.len() != n || v.len() != n {
        return Err(Error::OutOfRange("perturbation has the wrong dimension".into()));
    }
    for (x, nrm, which) in [(u, &curve.n_a, "u"), (v, &curve.n_b, "v")] {
        let c = hermitian(x, nrm).norm();
        if c > 1e-8 * (1.0 + norm(x)) {
            return Err(Error::OutOfRange(format!(
                "{which} is not a complex tangent vector (normal component {c:e})"
            )));
        }
    }
    let mut coords = curve.coords.clone();
    for (k, c) in coords.iter_mut().enumerate() {
        if c.len() < 3 {
            c.resize(3, C64::new(0.0, 0.0));
        }
        // ((ζ ± 1)/2)² = 3/8 T₀ ± 1/2 T₁ + 1/8 T₂
        c[0] += (u[k] + v[k]) * 0.375;
        c[1] += (u[k] - v[k]) * 0.5;
        c[2] += (u[k] + v[k]) * 0.125;
    }
    Ok(PolynomialCurve::from_coords(
        coords,
        curve.a.clone(),
        curve.b.clone(),
        curve.n_a.clone(),
        curve.n_b.clone(),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    /// Criterion `r(φ(1-t)) < -t/2 · scale` holds on `(0, delta1)`.
    pub delta1: f64,
    /// The mirrored criterion at `-1`.
    pub delta2: f64,
    /// `min(delta1, delta2)`; `φ([-1+δ₃, 1-δ₃])` lies inside.
    pub delta3: f64,
    /// Sup deviation of `φ'` from the smooth base curve's derivative.
    pub epsilon: f64,
    pub scale_a: f64,
    pub scale_b: f64,
    pub degree: usize,
}

const END_SAMPLES: usize = 200;
const INTERIOR_SAMPLES: usize = 2001;

/// Sample-level version of the endpoint estimate and interior containment.
/// The scale is `|∇r|` at the endpoint, so the criterion reads the same for
/// every normalization of `r`.
pub fn admissibility_check(domain: &dyn AmbientDomain, curve: &PolynomialCurve, epsilon: f64) -> Result<AdmissibilityReport> {
    let end = |p: &[C64], sign: f64| -> Result<(f64, f64)> {
        let scale = norm(&domain.defining(p).1);
        if !(scale > 0.0) {
            return Err(Error::Admissibility {
                t: 0.0,
                reason: "vanishing gradient of the defining function at an endpoint".into(),
            });
        }
        let mut delta = 0.0;
        for k in 0..END_SAMPLES {
            let t = 1e-6 * 1e6f64.powf(k as f64 / (END_SAMPLES - 1) as f64);
            let x = curve.value(C64::new(sign * (1.0 - t), 0.0));
            let (r, _) = domain.defining(&x);
            if r < -0.5 * t * scale {
                delta = t;
            } else if k == 0 {
                return Err(Error::Admissibility {
                    t,
                    reason: format!("endpoint criterion fails next to {}", if sign > 0.0 { "a" } else { "b" }),
                });
            } else {
                break;
            }
        }
        Ok((delta, scale))
    };
    let (delta1, scale_a) = end(&curve.a, 1.0)?;
    let (delta2, scale_b) = end(&curve.b, -1.0)?;
    let delta3 = delta1.min(delta2);
    for j in 0..INTERIOR_SAMPLES {
        let t = -1.0 + delta3 + (2.0 - 2.0 * delta3) * j as f64 / (INTERIOR_SAMPLES - 1) as f64;
        if !domain.contains(&curve.value(C64::new(t, 0.0))) {
            return Err(Error::Admissibility {
                t,
                reason: "curve leaves the domain".into(),
            });
        }
    }
    Ok(AdmissibilityReport {
        delta1,
        delta2,
        delta3,
        epsilon,
        scale_a,
        scale_b,
        degree: curve.degree(),
    })
}

/// Clamped cubic spline through `b`, a waypoint and `a` at `t = -1, 0, 1`.
struct BaseCurve {
    knots: [Vec<C64>; 3],
    slopes: [Vec<C64>; 3],
}

impl BaseCurve {
    /// Derivative on `[-1, 1]`.
    fn derivative(&self, t: f64) -> Vec<C64> {
        let (i, s) = if t < 0.0 { (0, t + 1.0) } else { (1, t) };
        let (y0, y1, m0, m1) = (&self.knots[i], &self.knots[i + 1], &self.slopes[i], &self.slopes[i + 1]);
        // Hermite basis derivatives on a unit interval
        let d00 = 6.0 * s * s - 6.0 * s;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        (0..y0.len())
            .map(|k| y0[k] * d00 + m0[k] * d10 + y1[k] * d01 + m1[k] * d11)
            .collect()
    }
}

/// Cubic on `[-1, 1]` with the given end values and end derivatives.
fn hermite_cubic(v0: &[C64], d0: &[C64], v1: &[C64], d1: &[C64]) -> Vec<Vec<C64>> {
    let xs = chebyshev_points(3);
    (0..v0.len())
        .map(|k| {
            let vals: Vec<C64> = xs
                .iter()
                .map(|&t| {
                    let s = (t + 1.0) / 2.0;
                    let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
                    let h10 = s * s * s - 2.0 * s * s + s;
                    let h01 = -2.0 * s * s * s + 3.0 * s * s;
                    let h11 = s * s * s - s * s;
                    v0[k] * h00 + d0[k] * (2.0 * h10) + v1[k] * h01 + d1[k] * (2.0 * h11)
                })
                .collect();
            chebyshev_coefficients(&vals)
        })
        .collect()
}

fn waypoint(domain: &dyn AmbientDomain, a: &[C64], b: &[C64], n_a: &[C64]) -> Vec<C64> {
    let diam = domain.diameter();
    let gap: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let candidate: Vec<C64> = if norm(&gap) > 1e-9 * diam {
        a.iter().zip(b).map(|(x, y)| (x + y) * 0.5).collect()
    } else {
        a.iter().zip(n_a).map(|(x, n)| x + n * (diam / 4.0)).collect()
    };
    if domain.boundary_distance(&candidate) > 1e-3 * diam {
        candidate
    } else {
        domain.deepest_point()
    }
}

/// Polynomial curve from `b` to `a` entering and leaving along the inward
/// normals. A clamped spline through an interior waypoint serves as the
/// smooth model; its derivative is interpolated at Chebyshev points,
/// integrated, and corrected by a cubic so the endpoint data hold exactly.
/// The degree is raised until the result is admissible.
pub fn lemma3_curve(domain: &dyn AmbientDomain, a: &[C64], b: &[C64]) -> Result<(PolynomialCurve, AdmissibilityReport)> {
    let n = domain.dimension();
    if a.len() != n || b.len() != n {
        return Err(Error::OutOfRange(format!("points must lie in dimension {n}")));
    }
    let n_a = domain.inward_normal(a)?;
    let n_b = domain.inward_normal(b)?;
    let mid = waypoint(domain, a, b, &n_a);
    let m1: Vec<C64> = (0..n).map(|k| (3.0 * (a[k] - b[k]) - n_b[k] + n_a[k]) / 4.0).collect();
    let minus_na: Vec<C64> = n_a.iter().map(|x| -x).collect();
    let base = BaseCurve {
        knots: [b.to_vec(), mid, a.to_vec()],
        slopes: [n_b.clone(), m1, minus_na.clone()],
    };
    let probe: Vec<f64> = (0..=400).map(|j| -1.0 + j as f64 / 200.0).collect();
    let mut last_err = None;
    for &deg in &DEGREES {
        let xs = chebyshev_points(deg - 1);
        let dvals: Vec<Vec<C64>> = xs.iter().map(|&t| base.derivative(t)).collect();
        let mut coords: Vec<Vec<C64>> = (0..n)
            .map(|k| {
                let d: Vec<C64> = dvals.iter().map(|v| v[k]).collect();
                let mut c = chebyshev_integral(&chebyshev_coefficients(&d));
                let at_minus = clenshaw(&c, C64::new(-1.0, 0.0));
                c[0] += b[k] - at_minus;
                c
            })
            .collect();
        let provisional = PolynomialCurve::from_coords(coords.clone(), a.to_vec(), b.to_vec(), n_a.clone(), n_b.clone());
        let one = C64::new(1.0, 0.0);
        let e0: Vec<C64> = vec![C64::new(0.0, 0.0); n];
        let v1: Vec<C64> = provisional.value(one).iter().zip(a).map(|(p, q)| q - p).collect();
        let d0: Vec<C64> = provisional.derivative(-one).iter().zip(&n_b).map(|(p, q)| q - p).collect();
        let d1: Vec<C64> = provisional.derivative(one).iter().zip(&minus_na).map(|(p, q)| q - p).collect();
        let fix = hermite_cubic(&e0, &d0, &v1, &d1);
        for (c, f) in coords.iter_mut().zip(&fix) {
            for (j, x) in f.iter().enumerate() {
                c[j] += x;
            }
        }
        let curve = PolynomialCurve::from_coords(coords, a.to_vec(), b.to_vec(), n_a.clone(), n_b.clone());
        curve.check_endpoints()?;
        let epsilon = probe
            .iter()
            .map(|&t| {
                let mut d = curve.derivative(C64::new(t, 0.0));
                axpy(&mut d, C64::new(-1.0, 0.0), &base.derivative(t));
                norm(&d)
            })
            .fold(0.0, f64::max);
        match admissibility_check(domain, &curve, epsilon) {
            Ok(report) => return Ok((curve, report)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Admissibility {
        t: 0.0,
        reason: "no degree tried".into(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Ball;
    use crate::domain::{build_domain, DomainSpec};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn disc_identity_curve() {
        let d = build_domain(&DomainSpec::UnitDisc { samples: 1024 }).unwrap();
        let (curve, report) = lemma3_curve(&d, &[c(1.0)], &[c(-1.0)]).unwrap();
        assert!(curve.endpoint_error() < 1e-10);
        assert_eq!(curve.degree(), 8);
        for t in [-0.7, 0.0, 0.3, 0.95] {
            assert!((curve.value(c(t))[0] - t).norm() < 1e-9);
        }
        assert!(report.delta3 > 0.5 && report.epsilon < 1e-9);
    }

    #[test]
    fn perturbation_coefficients() {
        let d = Ball::new(2).unwrap();
        let a = [c(1.0), c(0.0)];
        let b = [c(-1.0), c(0.0)];
        let (curve, _) = lemma3_curve(&d, &a, &b).unwrap();
        let u = [c(0.0), C64::new(0.1, 0.2)];
        let v = [c(0.0), c(-0.3)];
        let p = perturbed_disc(&curve, &u, &v).unwrap();
        for z in [c(1.0), c(-1.0), C64::new(0.3, 0.4), C64::new(-2.0, 1.0)] {
            let s1 = (z + 1.0) / 2.0;
            let s2 = (z - 1.0) / 2.0;
            let base = curve.value(z);
            let got = p.value(z);
            for k in 0..2 {
                let want = base[k] + s1 * s1 * u[k] + s2 * s2 * v[k];
                assert!((got[k] - want).norm() < 1e-14 * (1.0 + want.norm()));
            }
        }
        assert!(perturbed_disc(&curve, &[c(0.1), c(0.0)], &v).is_err());
    }
}
