//! Riemann map from the Szegő kernel. The kernel `S(·, a)` solves the
//! second-kind Kerzman–Stein equation on the boundary, discretized by the
//! trapezoidal rule at equispaced parameters (Nyström). Boundary values of
//! the map and its derivative follow from `S` in closed form; interior
//! values come from the barycentric Cauchy formula, evaluated on an
//! FFT-upsampled copy of the boundary data near the curve and by a Taylor
//! expansion from the nearest boundary point inside the last few fine
//! spacings.

use crate::domain::{BoundaryCurve, Nearest};
use crate::error::{Error, Result};
use crate::numeric::{conjugate_gradient, local_lagrange, upsample, CgOutcome};
use crate::C64;
use std::f64::consts::PI;

/// Boundary nodes with map data.
#[derive(Debug, Clone)]
struct Nodes {
    z: Vec<C64>,
    dz: Vec<C64>,
    value: Vec<C64>,
    derivative: Vec<C64>,
}

impl Nodes {
    /// Barycentric Cauchy interpolation of value and derivative.
    fn cauchy(&self, z: C64) -> (C64, C64) {
        let mut num = C64::new(0.0, 0.0);
        let mut dnum = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for j in 0..self.z.len() {
            let w = self.dz[j] / (self.z[j] - z);
            num += w * self.value[j];
            dnum += w * self.derivative[j];
            den += w;
        }
        (num / den, dnum / den)
    }
}

/// About ten times the accuracy reached on graded piecewise boundaries.
const MONOTONE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SzegoMap {
    center: C64,
    coarse: Nodes,
    fine: Nodes,
    factor: usize,
    cg: CgOutcome,
}

/// Linear-solve settings.
#[derive(Debug, Clone, Copy)]
pub struct SzegoOptions {
    pub nodes: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub upsample: usize,
}

impl Default for SzegoOptions {
    fn default() -> Self {
        SzegoOptions {
            nodes: 1024,
            tolerance: 1e-14,
            max_iterations: 400,
            upsample: 16,
        }
    }
}

fn kernel_h(x: C64, y: C64, ty: C64) -> C64 {
    // (1 / 2πi) T(y) / (y - x)
    ty / ((y - x) * C64::new(0.0, 2.0 * PI))
}

impl SzegoMap {
    pub fn solve(curve: &BoundaryCurve, center: C64, opts: &SzegoOptions) -> Result<SzegoMap> {
        let n = opts.nodes;
        if n < 16 {
            return Err(Error::OutOfRange(format!("{n} Szegő nodes")));
        }
        let nf = n as f64;
        let z: Vec<C64> = (0..n).map(|j| curve.point(j as f64 / nf)).collect();
        let dz: Vec<C64> = (0..n).map(|j| curve.tangent(j as f64 / nf)).collect();
        if let Some(j) = dz.iter().position(|d| !(d.norm().is_finite() && d.norm() > 0.0)) {
            return Err(Error::VanishingTangent { t: j as f64 / nf });
        }
        let unit: Vec<C64> = dz.iter().map(|d| d / d.norm()).collect();
        let sw: Vec<f64> = dz.iter().map(|d| (d.norm() / nf).sqrt()).collect();

        // K = W^{1/2} A W^{1/2} is skew-Hermitian; store the strict upper
        // triangle implicitly through the full dense matrix
        let mut k = vec![C64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for l in j + 1..n {
                let a = kernel_h(z[l], z[j], unit[j]).conj() - kernel_h(z[j], z[l], unit[l]);
                let v = a * (sw[j] * sw[l]);
                k[j * n + l] = v;
                k[l * n + j] = -v.conj();
            }
        }
        let rhs: Vec<C64> = (0..n)
            .map(|j| kernel_h(center, z[j], unit[j]).conj() * sw[j])
            .collect();
        let matvec = |x: &[C64], y: &mut [C64]| {
            for (j, yj) in y.iter_mut().enumerate() {
                let row = &k[j * n..(j + 1) * n];
                *yj = row.iter().zip(x).map(|(a, b)| a * b).sum();
            }
        };
        // normal equations (I - K)(I + K) x = (I - K) rhs
        let mut tmp = vec![C64::new(0.0, 0.0); n];
        matvec(&rhs, &mut tmp);
        let b: Vec<C64> = rhs.iter().zip(&tmp).map(|(r, t)| r - t).collect();
        let apply = |x: &[C64], out: &mut [C64]| {
            let mut kx = vec![C64::new(0.0, 0.0); n];
            matvec(x, &mut kx);
            let y: Vec<C64> = x.iter().zip(&kx).map(|(a, b)| a + b).collect();
            matvec(&y, &mut kx);
            for j in 0..n {
                out[j] = y[j] - kx[j];
            }
        };
        let mut x = rhs.clone();
        let cg = conjugate_gradient(apply, &b, &mut x, opts.tolerance, opts.max_iterations);
        if !cg.converged && cg.residual > 1e-10 {
            return Err(Error::NonConvergence {
                stage: "Szegő kernel solve",
                iterations: cg.iterations,
                residual: cg.residual,
            });
        }
        let s_aa: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let s: Vec<C64> = x.iter().zip(&sw).map(|(v, w)| v / *w).collect();
        let value: Vec<C64> = s
            .iter()
            .zip(&unit)
            .map(|(sj, tj)| {
                let p = sj / sj.norm();
                -C64::new(0.0, 1.0) * p * p * tj
            })
            .collect();
        let derivative: Vec<C64> = s.iter().map(|sj| sj * sj * (2.0 * PI / s_aa)).collect();

        // the boundary correspondence must wind once, monotonically; where a
        // graded parametrization nearly stalls the node steps fall below the
        // solver accuracy, so backward steps of that size are tolerated
        for j in 0..n {
            let step = (value[(j + 1) % n] / value[j]).arg();
            if step <= -MONOTONE_SLACK {
                return Err(Error::NonConvergence {
                    stage: "Szegő boundary correspondence",
                    iterations: cg.iterations,
                    residual: step.abs(),
                });
            }
        }

        let factor = opts.upsample.max(1);
        let m = n * factor;
        let fine = Nodes {
            z: (0..m).map(|j| curve.point(j as f64 / m as f64)).collect(),
            dz: (0..m).map(|j| curve.tangent(j as f64 / m as f64)).collect(),
            value: upsample(&value, factor),
            derivative: upsample(&derivative, factor),
        };
        let coarse = Nodes {
            z,
            dz,
            value,
            derivative,
        };
        Ok(SzegoMap {
            center,
            coarse,
            fine,
            factor,
            cg,
        })
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn nodes(&self) -> usize {
        self.coarse.z.len()
    }

    pub fn solver_outcome(&self) -> CgOutcome {
        self.cg
    }

    /// Boundary values `ψ(γ(j/N))`.
    pub fn boundary_values(&self) -> &[C64] {
        &self.coarse.value
    }

    /// Boundary values `ψ'(γ(j/N))`.
    pub fn boundary_derivatives(&self) -> &[C64] {
        &self.coarse.derivative
    }

    /// `ψ(γ(t))` by interpolation of the fine boundary data.
    pub fn boundary_value(&self, t: f64) -> C64 {
        let v = local_lagrange(&self.fine.value, C64::new(0.0, 0.0), t.rem_euclid(1.0), 10).0;
        v / v.norm()
    }

    /// Value, derivative and `1 - |ψ|²` at an interior point whose nearest
    /// boundary point is known.
    pub fn eval(&self, curve: &BoundaryCurve, z: C64, near: &Nearest) -> (C64, C64, f64) {
        let d = near.signed_distance;
        let n = self.coarse.z.len() as f64;
        let speed = curve.tangent(near.t).norm();
        let hc = speed / n;
        let hf = hc / self.factor as f64;
        let cauchy = |nodes: &Nodes| {
            let (v, dv) = nodes.cauchy(z);
            (v, dv, 1.0 - v.norm_sqr())
        };
        if d >= 8.0 * hc {
            return cauchy(&self.coarse);
        }
        if d >= 5.0 * hf {
            return cauchy(&self.fine);
        }
        let taylor = self.taylor(curve, z, near);
        if d <= 3.0 * hf {
            return taylor;
        }
        let c = cauchy(&self.fine);
        let s = (d - 3.0 * hf) / (2.0 * hf);
        let w = s * s * (3.0 - 2.0 * s);
        (
            c.0 * w + taylor.0 * (1.0 - w),
            c.1 * w + taylor.1 * (1.0 - w),
            c.2 * w + taylor.2 * (1.0 - w),
        )
    }

    fn taylor(&self, curve: &BoundaryCurve, z: C64, near: &Nearest) -> (C64, C64, f64) {
        let zero = C64::new(0.0, 0.0);
        let t = near.t;
        let rb = {
            let v = local_lagrange(&self.fine.value, zero, t, 10).0;
            v / v.norm()
        };
        let (r1, dr1, ddr1) = local_lagrange(&self.fine.derivative, zero, t, 10);
        let g1 = curve.tangent(t);
        let g2 = curve.second_derivative(t);
        let r2 = dr1 / g1;
        let r3 = (ddr1 - r2 * g2) / (g1 * g1);
        let delta = z - near.point;
        let inc = r1 * delta + r2 * delta * delta * 0.5 + r3 * delta * delta * delta / 6.0;
        let value = rb + inc;
        let derivative = r1 + r2 * delta + r3 * delta * delta * 0.5;
        let defect = -2.0 * (rb.conj() * inc).re - inc.norm_sqr();
        (value, derivative, defect)
    }

    /// Inverse map `f(w)` from the Cauchy formula on the circle, written as
    /// a trapezoidal sum in the boundary parameter. Accurate away from the
    /// circle; used to seed Newton iteration.
    pub fn inverse_seed(&self, w: C64) -> C64 {
        let nodes = if w.norm() > 0.9 { &self.fine } else { &self.coarse };
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        for j in 0..nodes.z.len() {
            let dv = nodes.derivative[j] * nodes.dz[j] / (nodes.value[j] - w);
            num += dv * nodes.z[j];
            den += dv;
        }
        num / den
    }
}
