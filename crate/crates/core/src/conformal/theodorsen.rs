//! Theodorsen iteration for domains that are star-shaped about the centre
//! and close to a circle. Writing the boundary in polar form `ρ(θ)`, the
//! boundary correspondence `θ(φ)` of `f: 𝔻 → D` satisfies
//! `θ - φ = K[log ρ(θ)]` with `K` the periodic conjugate-function
//! operator. The fixed point gives `f(v) = c + v exp(g(v))` with the Taylor
//! coefficients of `g` read off by FFT.

use crate::domain::BoundaryCurve;
use crate::error::{Error, Result};
use crate::numeric::brent_root;
use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct TheodorsenMap {
    center: C64,
    /// Taylor coefficients of `g`.
    coeffs: Vec<C64>,
    iterations: usize,
}

struct Polar<'a> {
    curve: &'a BoundaryCurve,
    center: C64,
    /// Unwrapped arguments at the samples, increasing.
    args: Vec<f64>,
}

impl Polar<'_> {
    fn arg_at(&self, t: f64) -> f64 {
        // continuous branch near the sample bracket
        let n = self.args.len();
        let j = ((t * n as f64).floor() as usize).min(n - 1);
        let a = (self.curve.point(t) - self.center).arg();
        let base = self.args[j];
        a + 2.0 * PI * ((base - a) / (2.0 * PI)).round()
    }

    /// Boundary radius in direction `theta` (any real; reduced mod 2π).
    fn radius(&self, theta: f64) -> f64 {
        let a0 = self.args[0];
        let th = a0 + (theta - a0).rem_euclid(2.0 * PI);
        let n = self.args.len();
        let j = self.args.partition_point(|&a| a <= th).max(1) - 1;
        let (t0, t1) = (j as f64 / n as f64, (j + 1) as f64 / n as f64);
        let t = brent_root(|t| self.arg_at(t) - th, t0, t1, 1e-15).unwrap_or(t0);
        (self.curve.point(t) - self.center).norm()
    }
}

impl TheodorsenMap {
    pub fn solve(curve: &BoundaryCurve, center: C64, m: usize) -> Result<TheodorsenMap> {
        let samples = curve.samples();
        let n = samples.len();
        let mut args = Vec::with_capacity(n + 1);
        let mut raw = (samples[0] - center).arg();
        let mut acc = raw;
        args.push(acc);
        for k in 1..=n {
            let a = (samples[k % n] - center).arg();
            let step = (a - raw + PI).rem_euclid(2.0 * PI) - PI;
            if step <= 0.0 {
                return Err(Error::InvalidDomain("domain is not star-shaped about the centre".into()));
            }
            raw = a;
            acc += step;
            args.push(acc);
        }
        if ((args[n] - args[0]) - 2.0 * PI).abs() > 1e-9 {
            return Err(Error::InvalidDomain("centre is not enclosed once".into()));
        }
        args.pop();
        let polar = Polar { curve, center, args };

        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let phi: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let mut theta = phi.clone();
        let mut iterations = 0;
        let mut change = f64::INFINITY;
        while iterations < 200 && change > 1e-14 {
            let mut buf: Vec<C64> = theta.iter().map(|&t| C64::new(polar.radius(t).ln(), 0.0)).collect();
            fwd.process(&mut buf);
            for (k, c) in buf.iter_mut().enumerate() {
                let sign = if k == 0 || 2 * k == m {
                    0.0
                } else if 2 * k < m {
                    1.0
                } else {
                    -1.0
                };
                *c *= C64::new(0.0, -sign) / m as f64;
            }
            inv.process(&mut buf);
            change = 0.0;
            for k in 0..m {
                let next = phi[k] + buf[k].re;
                change = f64::max(change, (next - theta[k]).abs());
                theta[k] = next;
            }
            iterations += 1;
        }
        if change > 1e-10 {
            return Err(Error::NonConvergence {
                stage: "Theodorsen iteration",
                iterations,
                residual: change,
            });
        }
        let mut g: Vec<C64> = theta
            .iter()
            .zip(&phi)
            .map(|(&t, &p)| C64::new(polar.radius(t).ln(), t - p))
            .collect();
        fwd.process(&mut g);
        let coeffs: Vec<C64> = g.iter().take(m / 2).map(|c| c / m as f64).collect();
        Ok(TheodorsenMap {
            center,
            coeffs,
            iterations,
        })
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn g(&self, v: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * v + p;
            p = p * v + c;
        }
        (p, dp)
    }

    /// `f(v)` and `f'(v)`.
    pub fn inverse(&self, v: C64) -> (C64, C64) {
        let (g, dg) = self.g(v);
        let e = g.exp();
        (self.center + v * e, e * (C64::new(1.0, 0.0) + v * dg))
    }

    /// Solve `f(v) = z` by damped Newton iteration from `v0`.
    pub fn forward(&self, z: C64, v0: C64) -> Result<C64> {
        let mut v = v0;
        let (mut fz, _) = self.inverse(v);
        let mut res = (fz - z).norm();
        for it in 0..100 {
            if res < 1e-15 * (1.0 + z.norm()) {
                return Ok(v);
            }
            let (_, d) = self.inverse(v);
            let step = (fz - z) / d;
            let mut lambda = 1.0;
            loop {
                let cand = v - step * lambda;
                if cand.norm() < 1.0 {
                    let (fc, _) = self.inverse(cand);
                    let rc = (fc - z).norm();
                    if rc < res {
                        v = cand;
                        fz = fc;
                        res = rc;
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-10 {
                    return if res < 1e-12 * (1.0 + z.norm()) {
                        Ok(v)
                    } else {
                        Err(Error::NonConvergence {
                            stage: "Theodorsen inverse",
                            iterations: it,
                            residual: res,
                        })
                    };
                }
            }
        }
        Ok(v)
    }
}
