use crate::domain::RigidMotion;
use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

/// A univalent map `f: 𝔻 → D` known in closed form.
#[derive(Debug, Clone)]
pub enum ExplicitMap {
    /// `u ↦ center + radius · u`.
    Affine { center: C64, radius: f64 },
    /// `u ↦ Σ c_k u^k`; univalence is the caller's responsibility and is
    /// checked indirectly through the simplicity test of the image curve.
    Polynomial(Vec<C64>),
    /// `u ↦ 2u + (1 - u) log(1 - u)`, principal branch. Its image is a C¹
    /// but not C^{1+ε} domain with boundary point `2 = f(1)`.
    LogarithmicExample,
    Moved {
        inner: Box<ExplicitMap>,
        motion: RigidMotion,
    },
}

impl ExplicitMap {
    pub fn value(&self, u: C64) -> C64 {
        match self {
            ExplicitMap::Affine { center, radius } => center + u * *radius,
            ExplicitMap::Polynomial(c) => c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * u + ck),
            ExplicitMap::LogarithmicExample => {
                let s = C64::new(1.0, 0.0) - u;
                if s.norm() == 0.0 {
                    C64::new(2.0, 0.0)
                } else {
                    u * 2.0 + s * s.ln()
                }
            }
            ExplicitMap::Moved { inner, motion } => motion.apply(inner.value(u)),
        }
    }

    /// Value on the closed disc, using the continuous extension at
    /// singular boundary points.
    pub fn boundary_value(&self, u: C64) -> C64 {
        self.value(u)
    }

    /// `f'(u)`, or `None` where it is unbounded (`u = 1` for the
    /// logarithmic example).
    pub fn derivative(&self, u: C64) -> Option<C64> {
        match self {
            ExplicitMap::Affine { radius, .. } => Some(C64::new(*radius, 0.0)),
            ExplicitMap::Polynomial(c) => Some(
                c.iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, (k, &ck)| acc * u + ck * k as f64),
            ),
            ExplicitMap::LogarithmicExample => {
                let s = C64::new(1.0, 0.0) - u;
                (s.norm() > 0.0).then(|| C64::new(1.0, 0.0) - s.ln())
            }
            ExplicitMap::Moved { inner, motion } => inner.derivative(u).map(|d| motion.apply_vector(d)),
        }
    }

    pub fn second_derivative(&self, u: C64) -> Option<C64> {
        match self {
            ExplicitMap::Affine { .. } => Some(C64::new(0.0, 0.0)),
            ExplicitMap::Polynomial(c) => Some(
                c.iter()
                    .enumerate()
                    .skip(2)
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, (k, &ck)| acc * u + ck * (k * (k - 1)) as f64),
            ),
            ExplicitMap::LogarithmicExample => {
                let s = C64::new(1.0, 0.0) - u;
                (s.norm() > 0.0).then(|| s.inv())
            }
            ExplicitMap::Moved { inner, motion } => inner.second_derivative(u).map(|d| motion.apply_vector(d)),
        }
    }

    pub fn moved(&self, motion: RigidMotion) -> ExplicitMap {
        match self {
            ExplicitMap::Moved { inner, motion: m } => ExplicitMap::Moved {
                inner: inner.clone(),
                motion: motion.compose(m),
            },
            other => ExplicitMap::Moved {
                inner: Box::new(other.clone()),
                motion,
            },
        }
    }

    /// Solve `f(u) = z` for `u ∈ 𝔻` by damped Newton iteration seeded from
    /// a polar grid.
    pub fn preimage(&self, z: C64) -> Result<C64> {
        if let ExplicitMap::Affine { center, radius } = self {
            let u = (z - center) / *radius;
            return if u.norm() < 1.0 {
                Ok(u)
            } else {
                Err(Error::OutsideDomain {
                    distance: radius * (1.0 - u.norm()),
                })
            };
        }
        let scale = 1.0 + z.norm();
        let mut u = self.seed(z);
        let mut residual = (self.value(u) - z).norm();
        for _ in 0..100 {
            if residual <= 4.0 * f64::EPSILON * scale {
                break;
            }
            let d = match self.derivative(u) {
                Some(d) if d.norm() > 0.0 => d,
                _ => return Err(Error::SingularJacobian("explicit map preimage")),
            };
            let step = (self.value(u) - z) / d;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand = u - step * lambda;
                if cand.norm() < 1.0 {
                    let r = (self.value(cand) - z).norm();
                    if r < residual || lambda < 1e-12 {
                        u = cand;
                        residual = r;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted || step.norm() * lambda <= f64::EPSILON * 0.5 {
                break;
            }
        }
        if residual > 1e-11 * scale {
            return Err(Error::NonConvergence {
                stage: "explicit map preimage",
                iterations: 100,
                residual,
            });
        }
        Ok(u)
    }

    fn seed(&self, z: C64) -> C64 {
        const RADII: [f64; 10] = [0.0, 0.3, 0.55, 0.75, 0.88, 0.95, 0.985, 0.996, 0.9995, 0.99995];
        let mut best = (f64::INFINITY, C64::new(0.0, 0.0));
        for &r in &RADII {
            let count = if r == 0.0 { 1 } else { 96 };
            for k in 0..count {
                let u = C64::from_polar(r, 2.0 * PI * k as f64 / count as f64);
                let d = (self.value(u) - z).norm();
                if d < best.0 {
                    best = (d, u);
                }
            }
        }
        best.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logarithmic_example_values() {
        let f = ExplicitMap::LogarithmicExample;
        assert!(f.value(C64::new(0.0, 0.0)).norm() < 1e-15);
        let expected = -2.0 + 2.0 * 2f64.ln();
        assert!((f.value(C64::new(-1.0, 0.0)) - C64::new(expected, 0.0)).norm() < 1e-14);
        assert!((f.boundary_value(C64::new(1.0, 0.0)) - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(f.derivative(C64::new(1.0, 0.0)).is_none());
        // conjugate symmetry from real coefficients
        let u = C64::new(0.3, 0.4);
        assert!((f.value(u.conj()) - f.value(u).conj()).norm() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let maps = [
            ExplicitMap::LogarithmicExample,
            ExplicitMap::Polynomial(vec![C64::new(0.1, 0.0), C64::new(1.0, 0.0), C64::new(0.2, 0.1)]),
        ];
        let u = C64::new(0.2, -0.5);
        let h = 1e-6;
        for f in &maps {
            let fd = (f.value(u + h) - f.value(u - h)) / (2.0 * h);
            assert!((fd - f.derivative(u).unwrap()).norm() < 1e-8);
            let fd2 = (f.derivative(u + h).unwrap() - f.derivative(u - h).unwrap()) / (2.0 * h);
            assert!((fd2 - f.second_derivative(u).unwrap()).norm() < 1e-7);
        }
    }

    #[test]
    fn preimage_inverts_near_the_boundary() {
        let f = ExplicitMap::LogarithmicExample;
        for &u in &[C64::new(0.5, 0.2), C64::new(0.999_999, 0.0), C64::new(-0.7, 0.69)] {
            let back = f.preimage(f.value(u)).unwrap();
            assert!((back - u).norm() < 1e-10, "{u} -> {back}");
        }
    }
}
