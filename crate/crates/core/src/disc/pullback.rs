//! The planar domain `H = ψ⁻¹(D) ∩ strip`, bounded by the two zero-level
//! arcs of `ρ = r ∘ ψ` near `ζ = ±1` and by the horizontal lines
//! `|Im ζ| = δ'`, with its four corners rounded.

use super::curve::PolynomialCurve;
use crate::ambient::AmbientDomain;
use crate::domain::{BoundaryCurve, Domain, Piece, PiecewiseCurve, Shape};
use crate::error::{Error, Result};
use crate::numeric::{brent_root, chebyshev_coefficients, chebyshev_derivative, chebyshev_points, clenshaw};
use crate::C64;
use serde::Serialize;
use std::sync::Arc;

/// Boundary samples of `H`.
pub const PULLBACK_SAMPLES: usize = 1024;
/// Fillet radius as a fraction of `δ'`.
pub const FILLET_FRACTION: f64 = 0.125;
/// Parameter speed at the joints of `∂H` relative to its mean. The fillets
/// leave curvature jumps, and without strong grading the Szegő solve on
/// `H` stalls near 1e-5.
pub const PULLBACK_GRADING: f64 = 1e-3;
/// Joints sit on multiples of `1 / BREAK_SLOTS`; node counts for the map of
/// `H` must be divisible by it.
pub const BREAK_SLOTS: usize = 256;

const CROSSING_SAMPLES: usize = 65;
const GRID_ROWS: usize = 17;
const GRID_COLS: usize = 41;

/// `ρ(ζ) = r(ψ(ζ))` and its real gradient `∂ρ/∂ξ + i ∂ρ/∂η`.
pub fn pulled_defining(domain: &dyn AmbientDomain, disc: &PolynomialCurve, zeta: C64) -> (f64, C64) {
    let (r, g) = domain.defining(&disc.value(zeta));
    let d = disc.derivative(zeta);
    (r, g.iter().zip(&d).map(|(gk, dk)| gk * dk.conj()).sum())
}

/// Chebyshev interpolant of an end arc `x = X(y)`, `|y| ≤ δ'`.
#[derive(Debug, Clone, Serialize)]
pub struct EndArc {
    half_height: f64,
    coeffs: Vec<C64>,
    #[serde(skip)]
    dcoeffs: Vec<C64>,
}

impl EndArc {
    pub fn x(&self, y: f64) -> f64 {
        clenshaw(&self.coeffs, C64::new(y / self.half_height, 0.0)).re
    }

    pub fn dx(&self, y: f64) -> f64 {
        clenshaw(&self.dcoeffs, C64::new(y / self.half_height, 0.0)).re / self.half_height
    }
}

#[derive(Debug, Clone)]
pub struct PullbackDomain {
    pub domain: Domain,
    pub delta: f64,
    pub delta_prime: f64,
    pub fillet_radius: f64,
    pub right: EndArc,
    pub left: EndArc,
}

impl PullbackDomain {
    /// Whether a point of `∂H` lies on one of the zero-level arcs, away from
    /// the rounded corners.
    pub fn on_end_arc(&self, p: C64, tolerance: f64) -> bool {
        if p.im.abs() > self.delta_prime - 2.0 * self.fillet_radius {
            return false;
        }
        (p.re - self.right.x(p.im)).abs() <= tolerance || (p.re - self.left.x(p.im)).abs() <= tolerance
    }

    /// Sampled check that `{|x| < 1 - δ/2, |y| < δ'}` lies inside.
    pub fn contains_core_rectangle(&self) -> bool {
        let hx = (1.0 - self.delta / 2.0) * (1.0 - 1e-9);
        let hy = self.delta_prime * (1.0 - 1e-6);
        (0..=20).all(|i| {
            (0..=8).all(|j| {
                let z = C64::new(hx * (-1.0 + i as f64 / 10.0), hy * (-1.0 + j as f64 / 4.0));
                self.domain.contains(z)
            })
        })
    }
}

fn shrink(msg: String) -> Error {
    Error::ShrinkRequest(msg)
}

/// Root of `ρ(x + iy)` on `[c - δ, c + δ]`, where `side = 1` means the
/// segment is crossed from inside (left) to outside (right).
fn crossing(rho: &dyn Fn(C64) -> f64, y: f64, center: f64, delta: f64, side: f64) -> Result<f64> {
    let xs: Vec<f64> = (0..CROSSING_SAMPLES)
        .map(|k| center - delta + 2.0 * delta * k as f64 / (CROSSING_SAMPLES - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| rho(C64::new(x, y))).collect();
    let changes: Vec<usize> = (0..xs.len() - 1).filter(|&k| (vals[k] < 0.0) != (vals[k + 1] < 0.0)).collect();
    let inside_first = if side > 0.0 { vals[0] < 0.0 } else { vals[0] >= 0.0 };
    if changes.len() != 1 || !inside_first {
        return Err(shrink(format!(
            "level curve crosses the segment y = {y:.3e} near x = {center} {} times",
            changes.len()
        )));
    }
    let k = changes[0];
    brent_root(|x| rho(C64::new(x, y)), xs[k], xs[k + 1], 1e-15)
        .ok_or_else(|| shrink(format!("no root bracketed at y = {y:.3e}")))
}

fn end_arc(rho: &dyn Fn(C64) -> f64, delta: f64, delta_prime: f64, center: f64) -> Result<EndArc> {
    let side = center.signum();
    let mut m = 32;
    while m <= 256 {
        let ys: Vec<f64> = chebyshev_points(m).into_iter().map(|t| t * delta_prime).collect();
        let roots: Vec<C64> = ys
            .iter()
            .map(|&y| crossing(rho, y, center, delta, side).map(|x| C64::new(x, 0.0)))
            .collect::<Result<_>>()?;
        let coeffs = chebyshev_coefficients(&roots);
        let arc = EndArc {
            half_height: delta_prime,
            dcoeffs: chebyshev_derivative(&coeffs),
            coeffs,
        };
        let mut worst: f64 = 0.0;
        for j in 0..m {
            let y = delta_prime * (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
            worst = worst.max((arc.x(y) - crossing(rho, y, center, delta, side)?).abs());
        }
        if worst < 1e-11 {
            return Ok(arc);
        }
        m *= 2;
    }
    Err(shrink("end arc not resolved by its interpolant".into()))
}

/// Assemble `H` for the disc `ψ` (already perturbed to pass through the
/// data points). Fails with [`Error::ShrinkRequest`] when the level
/// curve is not a graph over the end segments or `ρ` is not negative on
/// the enclosed region.
pub fn pullback_domain(
    domain: &dyn AmbientDomain,
    disc: &PolynomialCurve,
    delta: f64,
    delta_prime: f64,
) -> Result<PullbackDomain> {
    if !(delta > 0.0 && delta < 1.0 && delta_prime > 0.0) {
        return Err(Error::OutOfRange(format!("δ = {delta}, δ' = {delta_prime}")));
    }
    let rho = |z: C64| pulled_defining(domain, disc, z).0;
    let right = end_arc(&rho, delta, delta_prime, 1.0)?;
    let left = end_arc(&rho, delta, delta_prime, -1.0)?;

    for i in 0..GRID_ROWS {
        let y = delta_prime * (-1.0 + 2.0 * i as f64 / (GRID_ROWS - 1) as f64);
        let (xl, xr) = (left.x(y), right.x(y));
        if !(xr > 1.0 - delta / 2.0 && xl < -1.0 + delta / 2.0) {
            return Err(shrink(format!("end arcs cut into the core rectangle at y = {y:.3e}")));
        }
        for k in 0..GRID_COLS {
            let x = xl + (xr - xl) * (k as f64 + 0.5) / GRID_COLS as f64;
            if rho(C64::new(x, y)) >= 0.0 {
                return Err(shrink(format!("ρ ≥ 0 inside the strip at {x:.4} + {y:.4}i")));
            }
        }
    }

    let r = right.clone();
    let l = left.clone();
    let dp = delta_prime;
    let pieces = vec![
        Piece::curve(move |s| (C64::new(r.x(s), s), C64::new(r.dx(s), 1.0)), -dp, dp),
        Piece::Line {
            from: C64::new(right.x(dp), dp),
            to: C64::new(left.x(dp), dp),
        },
        Piece::curve(move |s| (C64::new(l.x(-s), -s), C64::new(-l.dx(-s), -1.0)), -dp, dp),
        Piece::Line {
            from: C64::new(left.x(-dp), -dp),
            to: C64::new(right.x(-dp), -dp),
        },
    ];
    let fillet_radius = FILLET_FRACTION * delta_prime;
    let boundary =
        PiecewiseCurve::with_fillets(pieces, fillet_radius, 1e-3, PULLBACK_GRADING)?.align_breaks(BREAK_SLOTS)?;
    let curve = BoundaryCurve::new(Arc::new(boundary), PULLBACK_SAMPLES, 1.0)?;
    let h = Domain::new(curve, Shape::General, None)?;
    Ok(PullbackDomain {
        domain: h,
        delta,
        delta_prime,
        fillet_radius,
        right,
        left,
    })
}
