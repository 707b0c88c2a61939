//! Small numerical kernels shared by the geometric and conformal code:
//! bracketed 1-D search, local interpolation on uniform periodic grids,
//! trigonometric interpolation, Chebyshev series and a conjugate-gradient
//! solver for Hermitian positive definite operators.

use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimisation of `f` on `[a, b]`. Returns `(x, f(x))`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Root of `f` on a sign-changing bracket (Brent's method).
pub fn brent_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Some(b)
}

/// Value and first two derivatives (with respect to `t`) of the local
/// Lagrange interpolant through `order` consecutive samples of a periodic
/// sequence sampled at `t_j = j / n`. `lift` is added once per period wrap
/// (used for unwrapped angles that gain `2π` per turn).
pub fn local_lagrange(values: &[C64], lift: C64, t: f64, order: usize) -> (C64, C64, C64) {
    let n = values.len();
    let nf = n as f64;
    let s = t * nf;
    let base = s.floor() as i64 - (order as i64 - 1) / 2;
    let nodes: Vec<f64> = (0..order).map(|i| (base + i as i64) as f64).collect();
    let sample = |k: i64| -> C64 {
        let turns = k.div_euclid(n as i64);
        let idx = k.rem_euclid(n as i64) as usize;
        values[idx] + lift * turns as f64
    };
    let mut v = C64::new(0.0, 0.0);
    let mut d1 = C64::new(0.0, 0.0);
    let mut d2 = C64::new(0.0, 0.0);
    for i in 0..order {
        let mut denom = 1.0;
        for k in 0..order {
            if k != i {
                denom *= nodes[i] - nodes[k];
            }
        }
        // L_i(s) = prod_{k != i} (s - s_k) / denom and its derivatives
        let mut l0 = 1.0;
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for (k, &node) in nodes.iter().enumerate().take(order) {
            if k == i {
                continue;
            }
            let x = s - node;
            l2 = l2 * x + 2.0 * l1;
            l1 = l1 * x + l0;
            l0 *= x;
        }
        let fi = sample(base + i as i64);
        v += fi * (l0 / denom);
        d1 += fi * (l1 / denom);
        d2 += fi * (l2 / denom);
    }
    (v, d1 * nf, d2 * nf * nf)
}

/// Trigonometric interpolant of uniformly sampled periodic complex data on
/// `[0, 1)`.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    /// (frequency, coefficient) pairs.
    terms: Vec<(f64, C64)>,
}

impl TrigSeries {
    pub fn fit(samples: &[C64]) -> TrigSeries {
        let n = samples.len();
        let mut buf = samples.to_vec();
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let mut terms = Vec::with_capacity(n);
        for (k, c) in buf.into_iter().enumerate() {
            let c = c * scale;
            if 2 * k < n {
                terms.push((k as f64, c));
            } else if 2 * k == n {
                // split the Nyquist term symmetrically
                terms.push((k as f64, c * 0.5));
                terms.push((-(k as f64), c * 0.5));
            } else {
                terms.push((k as f64 - n as f64, c));
            }
        }
        TrigSeries { terms }
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.terms
            .iter()
            .map(|&(k, c)| c * C64::from_polar(1.0, 2.0 * PI * k * t))
            .sum()
    }

    pub fn derivative(&self, t: f64) -> C64 {
        self.terms
            .iter()
            .map(|&(k, c)| c * C64::new(0.0, 2.0 * PI * k) * C64::from_polar(1.0, 2.0 * PI * k * t))
            .sum()
    }

    pub fn second_derivative(&self, t: f64) -> C64 {
        self.terms
            .iter()
            .map(|&(k, c)| c * (-(2.0 * PI * k).powi(2)) * C64::from_polar(1.0, 2.0 * PI * k * t))
            .sum()
    }
}

/// Values of the trigonometric interpolant of `samples` on the uniform grid
/// of `samples.len() * factor` points, by zero padding in frequency.
pub fn upsample(samples: &[C64], factor: usize) -> Vec<C64> {
    let n = samples.len();
    let m = n * factor;
    let mut planner = FftPlanner::<f64>::new();
    let mut spec = samples.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut padded = vec![C64::new(0.0, 0.0); m];
    for (k, c) in spec.into_iter().enumerate() {
        let c = c / n as f64;
        if 2 * k < n {
            padded[k] = c;
        } else if 2 * k == n {
            padded[k] += c * 0.5;
            padded[m - k] += c * 0.5;
        } else {
            padded[m - (n - k)] = c;
        }
    }
    planner.plan_fft_inverse(m).process(&mut padded);
    padded
}

/// Chebyshev points of the second kind on `[-1, 1]`, `n + 1` of them,
/// ordered from `1` down to `-1`.
pub fn chebyshev_points(n: usize) -> Vec<f64> {
    (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect()
}

/// Coefficients of the degree-`n` Chebyshev interpolant of `values` given at
/// [`chebyshev_points`]`(n)`.
pub fn chebyshev_coefficients<T>(values: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = values.len() - 1;
    let mut coeffs = vec![T::default(); n + 1];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut acc = T::default();
        for (j, &v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc = acc + v * (w * (PI * (j * k) as f64 / n as f64).cos());
        }
        let scale = if k == 0 || k == n { 1.0 } else { 2.0 } / n as f64;
        *ck = acc * scale;
    }
    coeffs
}

/// Chebyshev coefficients of the derivative of a Chebyshev series.
pub fn chebyshev_derivative<T>(c: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = c.len();
    if n <= 1 {
        return vec![T::default()];
    }
    let mut d = vec![T::default(); n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + c[k] * (2.0 * k as f64);
    }
    d[0] = d[0] * 0.5;
    d.truncate(n - 1);
    d
}

/// Chebyshev coefficients of an antiderivative (constant term zero before
/// the caller fixes it).
pub fn chebyshev_integral<T>(c: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = c.len();
    let get = |k: usize| if k < n { c[k] } else { T::default() };
    let mut out = vec![T::default(); n + 1];
    for (k, o) in out.iter_mut().enumerate().skip(1) {
        let lower = if k == 1 { get(0) * 2.0 } else { get(k - 1) };
        *o = (lower - get(k + 1)) * (1.0 / (2.0 * k as f64));
    }
    out
}

/// Clenshaw evaluation of a Chebyshev series with coefficients of type `T`
/// at a complex point.
pub fn clenshaw<T>(c: &[T], x: C64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<C64, Output = T> + Default,
{
    let mut b1 = T::default();
    let mut b2 = T::default();
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (x * 2.0) - b2;
        b2 = b1;
        b1 = b0;
    }
    match c.first() {
        Some(&c0) => c0 + b1 * x - b2,
        None => T::default(),
    }
}

/// Outcome of [`conjugate_gradient`].
#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Conjugate gradients for a Hermitian positive definite operator `apply`.
pub fn conjugate_gradient<A>(apply: A, rhs: &[C64], x: &mut [C64], tol: f64, max_iter: usize) -> CgOutcome
where
    A: Fn(&[C64], &mut [C64]),
{
    let n = rhs.len();
    let mut ax = vec![C64::new(0.0, 0.0); n];
    apply(x, &mut ax);
    let mut r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let norm_b = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut rr: f64 = r.iter().map(|v| v.norm_sqr()).sum();
    let mut ap = vec![C64::new(0.0, 0.0); n];
    for it in 0..max_iter {
        if rr.sqrt() <= tol * norm_b {
            return CgOutcome {
                iterations: it,
                residual: rr.sqrt() / norm_b,
                converged: true,
            };
        }
        apply(&p, &mut ap);
        let pap: C64 = p.iter().zip(&ap).map(|(pi, ai)| pi.conj() * ai).sum();
        let alpha = rr / pap.re;
        for i in 0..n {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rr_new: f64 = r.iter().map(|v| v.norm_sqr()).sum();
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + p[i] * beta;
        }
        rr = rr_new;
    }
    CgOutcome {
        iterations: max_iter,
        residual: rr.sqrt() / norm_b,
        converged: rr.sqrt() <= tol * norm_b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
        assert!(brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn local_lagrange_reproduces_trig_data() {
        let n = 128;
        let vals: Vec<C64> = (0..n)
            .map(|j| C64::new((2.0 * PI * j as f64 / n as f64).sin(), 0.0))
            .collect();
        let t = 0.123_456;
        let (v, d1, d2) = local_lagrange(&vals, C64::new(0.0, 0.0), t, 10);
        assert!((v.re - (2.0 * PI * t).sin()).abs() < 1e-12);
        assert!((d1.re - 2.0 * PI * (2.0 * PI * t).cos()).abs() < 1e-8);
        assert!((d2.re + 4.0 * PI * PI * (2.0 * PI * t).sin()).abs() < 1e-5);
    }

    #[test]
    fn local_lagrange_wraps_with_lift() {
        let n = 64;
        let lift = C64::new(2.0 * PI, 0.0);
        let vals: Vec<C64> = (0..n).map(|j| C64::new(2.0 * PI * j as f64 / n as f64, 0.0)).collect();
        let (v, d1, _) = local_lagrange(&vals, lift, 0.999, 8);
        assert!((v.re - 2.0 * PI * 0.999).abs() < 1e-12);
        assert!((d1.re - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn trig_series_matches_exact_derivatives() {
        let n = 32;
        let f = |t: f64| C64::new((2.0 * PI * t).cos(), (4.0 * PI * t).sin());
        let samples: Vec<C64> = (0..n).map(|j| f(j as f64 / n as f64)).collect();
        let s = TrigSeries::fit(&samples);
        let t = 0.377;
        assert!((s.eval(t) - f(t)).norm() < 1e-13);
        let df = C64::new(-2.0 * PI * (2.0 * PI * t).sin(), 4.0 * PI * (4.0 * PI * t).cos());
        assert!((s.derivative(t) - df).norm() < 1e-11);
    }

    #[test]
    fn upsample_matches_exact_values() {
        let n = 16;
        let f = |t: f64| C64::from_polar(1.0, 2.0 * PI * 3.0 * t) + C64::new((2.0 * PI * 5.0 * t).cos(), 0.0);
        let s: Vec<C64> = (0..n).map(|j| f(j as f64 / n as f64)).collect();
        let up = upsample(&s, 4);
        for (m, v) in up.iter().enumerate() {
            assert!((v - f(m as f64 / 64.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn chebyshev_round_trip_and_calculus() {
        let n = 12;
        let pts = chebyshev_points(n);
        let vals: Vec<C64> = pts.iter().map(|&x| C64::new(x.powi(3) - x, 0.0)).collect();
        let c = chebyshev_coefficients(&vals);
        let x = C64::new(0.3, 0.2);
        let p = clenshaw(&c, x);
        assert!((p - (x * x * x - x)).norm() < 1e-13);
        let dc = chebyshev_derivative(&c);
        assert!((clenshaw(&dc, x) - (x * x * 3.0 - 1.0)).norm() < 1e-12);
        let ic = chebyshev_integral(&dc);
        let diff = clenshaw(&ic, x) - clenshaw(&ic, C64::new(0.0, 0.0));
        assert!((diff - (x * x * x - x)).norm() < 1e-12);
    }

    #[test]
    fn cg_solves_small_hpd_system() {
        // (I + K^H K) with K = [[0, 1], [-1, 0]] * i is 2 I
        let apply = |x: &[C64], y: &mut [C64]| {
            y[0] = x[0] * 2.0 + x[1] * C64::new(0.0, 0.5);
            y[1] = x[1] * 2.0 - x[0] * C64::new(0.0, 0.5);
        };
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
        let mut x = [C64::new(0.0, 0.0); 2];
        let out = conjugate_gradient(apply, &b, &mut x, 1e-14, 10);
        assert!(out.converged);
        let mut y = [C64::new(0.0, 0.0); 2];
        apply(&x, &mut y);
        assert!((y[0] - b[0]).norm() < 1e-12 && (y[1] - b[1]).norm() < 1e-12);
    }
}
