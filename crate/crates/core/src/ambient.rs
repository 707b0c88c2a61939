//! Domains in `ℂⁿ` as seen by the analytic-disc construction: a defining
//! function with its gradient, boundary distance and inward normals.
//! Planar domains are the case `n = 1`; the unit ball is the model case in
//! higher dimension.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::C64;

pub trait AmbientDomain: Send + Sync {
    fn dimension(&self) -> usize;

    /// `r(z)` and its real gradient written coordinatewise as
    /// `∂r/∂x_k + i ∂r/∂y_k`, i.e. `2 ∂r/∂z̄_k`.
    fn defining(&self, z: &[C64]) -> (f64, Vec<C64>);

    /// Signed Euclidean distance to the boundary, positive inside.
    fn boundary_distance(&self, z: &[C64]) -> f64;

    /// Unit inward normal at a boundary point.
    fn inward_normal(&self, a: &[C64]) -> Result<Vec<C64>>;

    fn diameter(&self) -> f64;

    /// A point far from the boundary.
    fn deepest_point(&self) -> Vec<C64>;

    fn contains(&self, z: &[C64]) -> bool {
        self.boundary_distance(z) > 0.0
    }
}

pub fn norm(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ z_k w̄_k`.
pub fn hermitian(z: &[C64], w: &[C64]) -> C64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

impl AmbientDomain for Domain {
    fn dimension(&self) -> usize {
        1
    }

    fn defining(&self, z: &[C64]) -> (f64, Vec<C64>) {
        let (r, g) = Domain::defining(self, z[0]);
        (r, vec![g])
    }

    fn boundary_distance(&self, z: &[C64]) -> f64 {
        self.signed_distance(z[0])
    }

    fn inward_normal(&self, a: &[C64]) -> Result<Vec<C64>> {
        let near = self.nearest(a[0]);
        let tolerance = 1e-9 * self.diameter();
        if near.signed_distance.abs() > tolerance {
            return Err(Error::NotOnBoundary {
                distance: near.signed_distance,
                tolerance,
            });
        }
        Ok(vec![Domain::inward_normal(self, near.t)?])
    }

    fn diameter(&self) -> f64 {
        Domain::diameter(self)
    }

    fn deepest_point(&self) -> Vec<C64> {
        vec![Domain::deepest_point(self).0]
    }
}

/// The unit ball of `ℂⁿ` with `r = ‖z‖² - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ball {
    pub dim: usize,
}

impl Ball {
    pub fn new(dim: usize) -> Result<Ball> {
        if dim == 0 {
            return Err(Error::OutOfRange("ball of dimension 0".into()));
        }
        Ok(Ball { dim })
    }
}

impl AmbientDomain for Ball {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn defining(&self, z: &[C64]) -> (f64, Vec<C64>) {
        let n2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        (n2 - 1.0, z.iter().map(|c| c * 2.0).collect())
    }

    fn boundary_distance(&self, z: &[C64]) -> f64 {
        1.0 - norm(z)
    }

    fn inward_normal(&self, a: &[C64]) -> Result<Vec<C64>> {
        let n = norm(a);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::NotOnBoundary {
                distance: 1.0 - n,
                tolerance: 1e-9,
            });
        }
        Ok(a.iter().map(|c| -c / n).collect())
    }

    fn diameter(&self) -> f64 {
        2.0
    }

    fn deepest_point(&self) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); self.dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, DomainSpec};

    #[test]
    fn planar_and_ball_agree_in_dimension_one() {
        let d = build_domain(&DomainSpec::UnitDisc { samples: 1024 }).unwrap();
        let b = Ball::new(1).unwrap();
        for z in [C64::new(0.3, 0.2), C64::new(-0.7, 0.1)] {
            assert!((AmbientDomain::boundary_distance(&d, &[z]) - b.boundary_distance(&[z])).abs() < 1e-9);
            let (r1, g1) = AmbientDomain::defining(&d, &[z]);
            let (r2, g2) = b.defining(&[z]);
            assert!((r1 - r2).abs() < 1e-12 && (g1[0] - g2[0]).norm() < 1e-12);
        }
        let a = [C64::new(0.0, 1.0)];
        let n1 = AmbientDomain::inward_normal(&d, &a).unwrap();
        let n2 = b.inward_normal(&a).unwrap();
        assert!((n1[0] - n2[0]).norm() < 1e-9);
        assert!(b.inward_normal(&[C64::new(0.5, 0.0)]).is_err());
    }
}
