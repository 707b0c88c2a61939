//! Sampled check of the gradient lower bound and Hölder bound of a defining
//! function on a band around the boundary.

use super::Domain;
use crate::error::{Error, Result};
use crate::C64;
use rayon::prelude::*;
use serde::Serialize;

/// `‖∇r‖ ≥ ε` and `‖∇r(z) - ∇r(w)‖ ≤ ε⁻¹ ‖z - w‖^ε` on the band of the
/// given width around the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RegularityBudget {
    pub epsilon: f64,
    pub band_width: f64,
}

impl RegularityBudget {
    pub fn new(epsilon: f64, band_width: f64) -> Result<RegularityBudget> {
        if !(epsilon > 0.0 && band_width > 0.0) {
            return Err(Error::OutOfRange(format!(
                "regularity budget needs positive epsilon and band width, got {epsilon}, {band_width}"
            )));
        }
        Ok(RegularityBudget { epsilon, band_width })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub gradient_min: f64,
    /// Largest sampled quotient over pairs closer than the band width.
    pub holder_constant: f64,
    pub pass: bool,
    pub samples: usize,
    /// `"explicit"` or `"signed_distance"`.
    pub source: &'static str,
}

const PARAMS: usize = 256;
const OFFSETS: usize = 9;

/// Sample the band and compare against the budget. Without an explicit
/// defining function the negated signed distance is used, which requires
/// the normal map to be injective on the band.
pub fn regularity_check(domain: &Domain, budget: &RegularityBudget) -> Result<RegularityReport> {
    let budget = RegularityBudget::new(budget.epsilon, budget.band_width)?;
    let explicit = domain.explicit_defining().is_some();
    if !explicit {
        let radius = normal_injectivity_radius(domain);
        if budget.band_width >= radius {
            return Err(Error::BandTooWide {
                band: budget.band_width,
                radius,
            });
        }
    }
    let curve = domain.curve();
    let points: Vec<C64> = (0..PARAMS)
        .flat_map(|j| {
            let t = j as f64 / PARAMS as f64;
            let p = curve.point(t);
            let n = domain.inward_normal(t).ok();
            (0..OFFSETS).filter_map(move |k| {
                let s = budget.band_width * (2.0 * k as f64 / (OFFSETS - 1) as f64 - 1.0) * 0.999;
                n.map(|n| p + n * s)
            })
        })
        .collect();
    let grads: Vec<C64> = points.par_iter().map(|&z| domain.defining(z).1).collect();
    let gradient_min = grads.iter().map(|g| g.norm()).fold(f64::INFINITY, f64::min);
    let eps = budget.epsilon;
    let holder_constant = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            for j in i + 1..points.len() {
                let d = (points[i] - points[j]).norm();
                if d > 0.0 && d <= budget.band_width {
                    best = best.max((grads[i] - grads[j]).norm() / d.powf(eps));
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(RegularityReport {
        gradient_min,
        holder_constant,
        pass: gradient_min >= eps && holder_constant <= 1.0 / eps,
        samples: points.len(),
        source: if explicit { "explicit" } else { "signed_distance" },
    })
}

/// Smaller of the minimal curvature radius and the inradius; a lower
/// estimate of how far the normal map stays injective.
pub fn normal_injectivity_radius(domain: &Domain) -> f64 {
    let curve = domain.curve();
    let n = curve.sample_count();
    let kmax = (0..n)
        .map(|j| {
            let t = j as f64 / n as f64;
            let d1 = curve.tangent(t);
            let d2 = curve.second_derivative(t);
            (d1.conj() * d2).im.abs() / d1.norm().powi(3)
        })
        .filter(|k| k.is_finite())
        .fold(0.0, f64::max);
    let inradius = domain.deepest_point().1;
    if kmax > 0.0 {
        inradius.min(1.0 / kmax)
    } else {
        inradius
    }
}
