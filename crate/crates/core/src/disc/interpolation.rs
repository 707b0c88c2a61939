//! The map `Φ(ζ₁, u, ζ₂, v) = (φ_{u,v}(ζ₁), φ_{u,v}(ζ₂))` and its Newton
//! inversion. Tangent perturbations are written in an orthonormal basis of
//! the complex tangent space, so the unknowns are `2n` complex numbers:
//! `ζ₁`, the `n - 1` coordinates of `u`, `ζ₂`, the `n - 1` of `v`. In the
//! plane the tangent spaces are trivial and only `ζ₁, ζ₂` remain.

use super::curve::{perturbed_disc, PolynomialCurve};
use crate::ambient::{hermitian, norm};
use crate::error::{Error, Result};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub const MAX_ITERATIONS: usize = 50;
pub const TOLERANCE: f64 = 1e-10;

/// Orthonormal basis (Hermitian product) of `{x : ⟨x, n⟩ = 0}`.
pub fn tangent_basis(n: &[C64]) -> Vec<Vec<C64>> {
    let dim = n.len();
    let nn = norm(n);
    let unit: Vec<C64> = n.iter().map(|x| x / nn).collect();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    // start from the coordinate vectors least aligned with n
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| unit[i].norm().total_cmp(&unit[j].norm()));
    for &k in &order {
        if basis.len() + 1 == dim {
            break;
        }
        let mut e = vec![C64::new(0.0, 0.0); dim];
        e[k] = C64::new(1.0, 0.0);
        for q in std::iter::once(&unit).chain(basis.iter()) {
            let c = hermitian(&e, q);
            for (x, y) in e.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        let l = norm(&e);
        if l > 1e-8 {
            basis.push(e.into_iter().map(|x| x / l).collect());
        }
    }
    basis
}

/// `Φ` for a fixed base curve.
#[derive(Debug, Clone)]
pub struct InterpolationSystem {
    curve: PolynomialCurve,
    basis_a: Vec<Vec<C64>>,
    basis_b: Vec<Vec<C64>>,
}

/// Converged unknowns.
#[derive(Debug, Clone, Serialize)]
pub struct InterpolationSolution {
    pub zeta1: C64,
    pub zeta2: C64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
}

impl InterpolationSystem {
    pub fn new(curve: &PolynomialCurve) -> InterpolationSystem {
        InterpolationSystem {
            basis_a: tangent_basis(&curve.n_a),
            basis_b: tangent_basis(&curve.n_b),
            curve: curve.clone(),
        }
    }

    pub fn curve(&self) -> &PolynomialCurve {
        &self.curve
    }

    /// Number of complex unknowns, `2n`.
    pub fn size(&self) -> usize {
        2 * self.curve.dimension()
    }

    /// `(ζ₁, u, ζ₂, v)` from the unknown vector.
    pub fn split(&self, x: &[C64]) -> (C64, Vec<C64>, C64, Vec<C64>) {
        let n = self.curve.dimension();
        let m = n - 1;
        let combine = |basis: &[Vec<C64>], c: &[C64]| {
            let mut out = vec![C64::new(0.0, 0.0); n];
            for (b, &ck) in basis.iter().zip(c) {
                for (o, y) in out.iter_mut().zip(b) {
                    *o += ck * y;
                }
            }
            out
        };
        (
            x[0],
            combine(&self.basis_a, &x[1..1 + m]),
            x[1 + m],
            combine(&self.basis_b, &x[2 + m..2 + 2 * m]),
        )
    }

    /// The starting point `(1, 0, -1, 0)`.
    pub fn anchor(&self) -> Vec<C64> {
        let n = self.curve.dimension();
        let mut x = vec![C64::new(0.0, 0.0); 2 * n];
        x[0] = C64::new(1.0, 0.0);
        x[n] = C64::new(-1.0, 0.0);
        x
    }

    fn perturbed_value(&self, zeta: C64, u: &[C64], v: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let s1 = (zeta + 1.0) * 0.5;
        let s2 = (zeta - 1.0) * 0.5;
        let mut p = self.curve.value(zeta);
        let mut d = self.curve.derivative(zeta);
        for k in 0..p.len() {
            p[k] += s1 * s1 * u[k] + s2 * s2 * v[k];
            d[k] += s1 * u[k] + s2 * v[k];
        }
        (p, d)
    }

    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        let (z1, u, z2, v) = self.split(x);
        let mut out = self.perturbed_value(z1, &u, &v).0;
        out.extend(self.perturbed_value(z2, &u, &v).0);
        out
    }

    /// Holomorphic Jacobian, assembled from the polynomial coefficients.
    pub fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        let n = self.curve.dimension();
        let m = n - 1;
        let (z1, u, z2, v) = self.split(x);
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        let d1 = self.perturbed_value(z1, &u, &v).1;
        let d2 = self.perturbed_value(z2, &u, &v).1;
        let sq = |s: C64| s * s;
        let (a1, a2) = (sq((z1 + 1.0) * 0.5), sq((z2 + 1.0) * 0.5));
        let (b1, b2) = (sq((z1 - 1.0) * 0.5), sq((z2 - 1.0) * 0.5));
        for k in 0..n {
            j[(k, 0)] = d1[k];
            j[(n + k, 1 + m)] = d2[k];
            for (c, e) in self.basis_a.iter().enumerate() {
                j[(k, 1 + c)] = a1 * e[k];
                j[(n + k, 1 + c)] = a2 * e[k];
            }
            for (c, e) in self.basis_b.iter().enumerate() {
                j[(k, 2 + m + c)] = b1 * e[k];
                j[(n + k, 2 + m + c)] = b2 * e[k];
            }
        }
        j
    }

    /// Jacobian by central differences with real step `h`.
    pub fn jacobian_fd(&self, x: &[C64], h: f64) -> DMatrix<C64> {
        let s = self.size();
        let mut j = DMatrix::zeros(s, s);
        for c in 0..s {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[c] += h;
            xm[c] -= h;
            let (fp, fm) = (self.eval(&xp), self.eval(&xm));
            for r in 0..s {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    /// `max |J - J_fd| / max |J|`.
    pub fn jacobian_check(&self, x: &[C64]) -> f64 {
        let j = self.jacobian(x);
        let fd = self.jacobian_fd(x, 1e-5);
        let scale = j.iter().map(|c| c.norm()).fold(0.0, f64::max);
        (j - fd).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
    }

    /// Newton iteration for `Φ = (z, w)`, started at `(1, 0, -1, 0)` with
    /// `ζ₁, ζ₂` moved to the curve parameters closest to `z` and `w`.
    pub fn solve(&self, z: &[C64], w: &[C64]) -> Result<InterpolationSolution> {
        let n = self.curve.dimension();
        if z.len() != n || w.len() != n {
            return Err(Error::OutOfRange(format!("points must lie in dimension {n}")));
        }
        let mut target = z.to_vec();
        target.extend_from_slice(w);
        let mut x = self.anchor();
        x[0] = self.closest_parameter(z, 1.0);
        x[n] = self.closest_parameter(w, -1.0);
        let residual_of = |x: &[C64]| {
            let f = self.eval(x);
            norm(&f.iter().zip(&target).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let mut res = residual_of(&x);
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            if res < 1e-14 * (1.0 + norm(&target)) {
                break;
            }
            iterations += 1;
            let f = self.eval(&x);
            let rhs = DVector::from_iterator(2 * n, f.iter().zip(&target).map(|(a, b)| a - b));
            let step = self
                .jacobian(&x)
                .lu()
                .solve(&rhs)
                .ok_or(Error::SingularJacobian("interpolation system"))?;
            let mut lambda = 1.0;
            let mut improved = false;
            while lambda > 1e-4 {
                let cand: Vec<C64> = x.iter().zip(step.iter()).map(|(a, s)| a - s * lambda).collect();
                let r = residual_of(&cand);
                if r < res {
                    x = cand;
                    res = r;
                    improved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if !(res < TOLERANCE) {
            return Err(Error::NonConvergence {
                stage: "interpolation Newton",
                iterations,
                residual: res,
            });
        }
        let (zeta1, u, zeta2, v) = self.split(&x);
        Ok(InterpolationSolution {
            zeta1,
            zeta2,
            u,
            v,
            residual: res,
            iterations,
        })
    }

    /// Ties go to the parameter nearest `end`.
    fn closest_parameter(&self, p: &[C64], end: f64) -> C64 {
        let best = (0..=400)
            .map(|j| end * (1.0 - j as f64 / 200.0))
            .map(|t| {
                let d: Vec<C64> = self.curve.value(C64::new(t, 0.0)).iter().zip(p).map(|(a, b)| a - b).collect();
                (t, norm(&d))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(t, _)| t)
            .unwrap_or(end);
        C64::new(best, 0.0)
    }

    /// `φ_{u,v}` for a solution.
    pub fn disc(&self, sol: &InterpolationSolution) -> Result<PolynomialCurve> {
        perturbed_disc(&self.curve, &sol.u, &sol.v)
    }
}

/// Solve `φ_{u,v}(ζ₁) = z`, `φ_{u,v}(ζ₂) = w`.
pub fn solve_interpolation(curve: &PolynomialCurve, z: &[C64], w: &[C64]) -> Result<InterpolationSolution> {
    InterpolationSystem::new(curve).solve(z, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_basis_is_orthonormal() {
        let n = [C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)];
        let b = tangent_basis(&n);
        assert_eq!(b.len(), 2);
        for (i, x) in b.iter().enumerate() {
            assert!(hermitian(x, &n).norm() < 1e-14);
            for (j, y) in b.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((hermitian(x, y) - e).norm() < 1e-14);
            }
        }
        assert!(tangent_basis(&[C64::new(0.0, 1.0)]).is_empty());
    }
}
