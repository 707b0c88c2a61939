//! Explicit analytic discs through two points and the Lempert upper bounds
//! they certify.
//!
//! For boundary points `a, b` a polynomial curve `φ` runs from `b` to `a`
//! meeting the boundary normally. A quadratic perturbation `φ_{u,v}` passes
//! through `z` and `w` at `ζ₁, ζ₂`. Pulling the domain back by `φ_{u,v}` and
//! cutting it to a strip gives a planar domain `H`; with `η: 𝔻 → H` its
//! Riemann map, `θ = φ_{u,v} ∘ η` is an analytic disc in the domain through
//! `z` and `w`, and the Möbius distance of `η⁻¹(ζ₁), η⁻¹(ζ₂)` bounds
//! `l(z, w)` from above.

pub mod curve;
pub mod interpolation;
pub mod pullback;

pub use curve::{admissibility_check, lemma3_curve, perturbed_disc, AdmissibilityReport, PolynomialCurve, DEGREES};
pub use interpolation::{solve_interpolation, tangent_basis, InterpolationSolution, InterpolationSystem};
pub use pullback::{pullback_domain, pulled_defining, EndArc, PullbackDomain, BREAK_SLOTS};

use crate::ambient::{norm, AmbientDomain, Ball};
use crate::conformal::{build_riemann_map_with, ConformalMap, MapOptions};
use crate::domain::Domain;
use crate::error::{Error, Result, StageExt};
use crate::metrics::{ball_ratios, boundary_ratios, mobius_distance, MetricSample};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UpperBoundOptions {
    pub delta: f64,
    pub delta_prime: f64,
    /// Simultaneous halvings of `δ, δ'` allowed on a shrink request.
    pub max_halvings: usize,
    /// Boundary nodes of the Riemann map of `H`.
    pub nodes: usize,
}

impl Default for UpperBoundOptions {
    fn default() -> Self {
        UpperBoundOptions {
            delta: 0.5,
            delta_prime: 0.4,
            max_halvings: 8,
            nodes: 1024,
        }
    }
}

/// Everything a bound depends on, in serializable form.
#[derive(Debug, Clone, Serialize)]
pub struct DiscInterpolation {
    pub zeta1: C64,
    pub zeta2: C64,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub p1: C64,
    pub p2: C64,
    pub upper_bound: f64,
    /// `1 - upper_bound`, computed without cancellation.
    pub gap: f64,
    pub newton_residual: f64,
    pub newton_iterations: usize,
    pub delta: f64,
    pub delta_prime: f64,
    pub fillet_radius: f64,
    pub halvings: usize,
    pub d_z: f64,
    pub d_w: f64,
    /// `max(d(z) / (1 - |p₁|), d(w) / (1 - |p₂|))`.
    pub measured_c: f64,
    /// `1 / (2C²)`; the bound guarantees `1 - upper ≥ κ d(z) d(w)`.
    pub kappa: f64,
    pub bound_holds: bool,
    /// Whether `η(p_j / |p_j|)` lies on the zero set of `ρ`.
    pub q_on_level_set: [bool; 2],
    /// `sup |η'|` over the closed disc, from the boundary by the maximum
    /// principle.
    pub sup_eta_derivative: Option<f64>,
    /// `max_j ‖θ(p_j) - (z, w)_j‖`.
    pub interpolation_error: f64,
    pub degree: usize,
    pub admissibility: AdmissibilityReport,
    pub curve_coefficients: Vec<Vec<C64>>,
}

/// The disc behind a certificate, kept for inspection.
#[derive(Debug, Clone)]
pub struct ConstructedDisc {
    pub certificate: DiscInterpolation,
    pub psi: PolynomialCurve,
    pub pullback: PullbackDomain,
    pub eta_inverse: ConformalMap,
}

impl ConstructedDisc {
    /// `θ(p) = ψ(η(p))`.
    pub fn theta(&self, p: C64) -> Result<Vec<C64>> {
        Ok(self.psi.value(self.eta_inverse.inverse(p)?))
    }
}

fn distance_to(x: &[C64], y: &[C64]) -> f64 {
    norm(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())
}

/// Run the whole construction for `z, w` with base points `a, b`.
pub fn construct_disc(
    domain: &dyn AmbientDomain,
    z: &[C64],
    w: &[C64],
    a: &[C64],
    b: &[C64],
    opts: &UpperBoundOptions,
) -> Result<ConstructedDisc> {
    let d_z = domain.boundary_distance(z);
    let d_w = domain.boundary_distance(w);
    if !(d_z > 0.0 && d_w > 0.0) {
        return Err(Error::OutsideDomain {
            distance: d_z.min(d_w),
        });
    }
    if opts.nodes == 0 || !opts.nodes.is_multiple_of(BREAK_SLOTS) {
        return Err(Error::OutOfRange(format!(
            "{} nodes for the map of H; must be a positive multiple of {BREAK_SLOTS}",
            opts.nodes
        )));
    }
    let (curve, admissibility) = lemma3_curve(domain, a, b).stage("polynomial curve")?;
    let system = InterpolationSystem::new(&curve);
    let sol = system.solve(z, w).stage("interpolation")?;
    let psi = system.disc(&sol).stage("interpolation")?;

    let mut delta = opts.delta;
    let mut delta_prime = opts.delta_prime;
    let mut halvings = 0;
    let pullback = loop {
        match pullback_domain(domain, &psi, delta, delta_prime) {
            Ok(p) => break p,
            Err(Error::ShrinkRequest(_)) if halvings < opts.max_halvings => {
                delta *= 0.5;
                delta_prime *= 0.5;
                halvings += 1;
            }
            Err(e) => return Err(e.at_stage("pullback domain")),
        }
    };
    let h = &pullback.domain;
    for zeta in [sol.zeta1, sol.zeta2] {
        if !h.contains(zeta) {
            return Err(Error::ShrinkRequest(format!("ζ = {zeta} lies outside the pullback domain")).at_stage("pullback domain"));
        }
    }
    let map_opts = MapOptions {
        nodes: Some(opts.nodes),
        ..MapOptions::default()
    };
    let eta_inverse = build_riemann_map_with(h, C64::new(0.0, 0.0), &map_opts).stage("pullback Riemann map")?;
    let p1 = eta_inverse.forward(sol.zeta1).stage("disc preimages")?;
    let p2 = eta_inverse.forward(sol.zeta2).stage("disc preimages")?;
    for p in [&p1, &p2] {
        if !(p.defect > 0.0) {
            return Err(Error::NonConvergence {
                stage: "pullback Riemann map",
                iterations: opts.nodes,
                residual: p.defect,
            })
            .stage("disc preimages");
        }
    }
    let l = mobius_distance(&p1, &p2);

    // 1 - |p| from 1 - |p|² without cancellation
    let d1 = p1.defect / (1.0 + p1.value.norm());
    let d2 = p2.defect / (1.0 + p2.value.norm());
    let measured_c = (d_z / d1).max(d_w / d2);
    let kappa = 1.0 / (2.0 * measured_c * measured_c);

    let scale = 1e-6 * (1.0 + h.diameter());
    let level = |p: C64| {
        if p == C64::new(0.0, 0.0) {
            return false;
        }
        let (_, point) = eta_inverse.boundary_preimage(p / p.norm());
        pullback.on_end_arc(point, 1e-3 * pullback.delta_prime) || pulled_defining(domain, &psi, point).0.abs() < scale
    };
    let q_on_level_set = [level(p1.value), level(p2.value)];
    let sup_eta_derivative = eta_inverse.boundary_derivative_range().map(|(lo, _)| 1.0 / lo);

    let mut interpolation_error: f64 = 0.0;
    for (p, seed, target) in [(p1.value, sol.zeta1, z), (p2.value, sol.zeta2, w)] {
        // the inverse can leave H when p sits within rounding of the circle;
        // η(p) = ζ holds by construction there
        let zeta = eta_inverse.inverse(p).unwrap_or(seed);
        interpolation_error = interpolation_error.max(distance_to(&psi.value(zeta), target));
    }

    let certificate = DiscInterpolation {
        zeta1: sol.zeta1,
        zeta2: sol.zeta2,
        u: sol.u.clone(),
        v: sol.v.clone(),
        p1: p1.value,
        p2: p2.value,
        upper_bound: l.value,
        gap: l.gap,
        newton_residual: sol.residual,
        newton_iterations: sol.iterations,
        delta,
        delta_prime,
        fillet_radius: pullback.fillet_radius,
        halvings,
        d_z,
        d_w,
        measured_c,
        kappa,
        bound_holds: l.gap >= kappa * d_z * d_w,
        q_on_level_set,
        sup_eta_derivative,
        interpolation_error,
        degree: curve.degree(),
        admissibility,
        curve_coefficients: curve.coefficients(),
    };
    Ok(ConstructedDisc {
        certificate,
        psi,
        pullback,
        eta_inverse,
    })
}

/// Upper bound for `l(z, w)` from an explicit disc through `z` and `w`,
/// built on boundary points `a` (near `z`) and `b` (near `w`). When `z`
/// lies deep inside, `a` can be any boundary point beyond it on a curve
/// from `b`; the same construction applies.
pub fn lempert_upper_bound(
    domain: &dyn AmbientDomain,
    z: &[C64],
    w: &[C64],
    a: &[C64],
    b: &[C64],
) -> Result<(f64, DiscInterpolation)> {
    lempert_upper_bound_with(domain, z, w, a, b, &UpperBoundOptions::default())
}

pub fn lempert_upper_bound_with(
    domain: &dyn AmbientDomain,
    z: &[C64],
    w: &[C64],
    a: &[C64],
    b: &[C64],
    opts: &UpperBoundOptions,
) -> Result<(f64, DiscInterpolation)> {
    let disc = construct_disc(domain, z, w, a, b, opts)?;
    Ok((disc.certificate.upper_bound, disc.certificate))
}

/// Exact Lempert function available for comparison.
#[derive(Clone, Copy)]
pub enum Oracle<'a> {
    Planar { domain: &'a Domain, map: &'a ConformalMap },
    Ball(Ball),
}

impl Oracle<'_> {
    fn sample(&self, z: &[C64], w: &[C64]) -> Result<MetricSample> {
        match self {
            Oracle::Planar { domain, map } => boundary_ratios(domain, map, z[0], w[0]),
            Oracle::Ball(_) => ball_ratios(z, w),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Oracle::Planar { .. } => 1,
            Oracle::Ball(b) => b.dim,
        }
    }

    /// `count` boundary points with their inward normals: equispaced in
    /// the curve parameter, or a Kronecker sequence on the sphere.
    pub fn boundary_points(&self, count: usize) -> Result<Vec<(Vec<C64>, Vec<C64>)>> {
        match self {
            Oracle::Planar { domain, .. } => (0..count)
                .map(|j| {
                    let t = j as f64 / count as f64;
                    Ok((vec![domain.curve().point(t)], vec![domain.inward_normal(t)?]))
                })
                .collect(),
            Oracle::Ball(ball) => Ok((0..count)
                .map(|j| {
                    let a = sphere_point(ball.dim, j);
                    let n = a.iter().map(|c| -c).collect();
                    (a, n)
                })
                .collect()),
        }
    }
}

/// Deterministic, roughly uniform points on the unit sphere of `ℂⁿ`; the
/// first one is `(1, 0, …, 0)` and the second its antipode.
pub fn sphere_point(dim: usize, j: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    if j < 2 {
        v[0] = C64::new(if j == 0 { 1.0 } else { -1.0 }, 0.0);
        return v;
    }
    // Kronecker sequence through a Gaussian-like map, then normalize
    let alphas = [0.754877666, 0.569840291, 0.618033989, 0.414213562, 0.732050808, 0.236067977];
    for (k, c) in v.iter_mut().enumerate() {
        let f = |i: usize| ((j as f64) * alphas[i % alphas.len()] + 0.5 * i as f64).fract();
        let (u1, u2) = (f(2 * k).max(1e-12), f(2 * k + 1));
        let r = (-2.0 * u1.ln()).sqrt();
        *c = C64::from_polar(r, 2.0 * std::f64::consts::PI * u2);
    }
    let n = norm(&v);
    v.into_iter().map(|c| c / n).collect()
}

/// Boundary points and distances along the inward normals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSchedule {
    pub boundary_points: usize,
    pub distances: Vec<f64>,
}

impl SampleSchedule {
    pub fn refined(&self) -> SampleSchedule {
        let mut distances = Vec::with_capacity(2 * self.distances.len());
        for w in self.distances.windows(2) {
            distances.push(w[0]);
            distances.push((w[0] * w[1]).sqrt());
        }
        distances.extend(self.distances.last());
        SampleSchedule {
            boundary_points: 2 * self.boundary_points,
            distances,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Estimate {
    /// `min (1 - l) / (d_z d_w)` over the schedule.
    pub c_estimate: f64,
    pub z: Vec<C64>,
    pub w: Vec<C64>,
    pub pairs: usize,
    pub failures: usize,
}

/// Minimum of `(1 - l)/(d_z d_w)` over all pairs of normal-ray points, with
/// `l` from the oracle.
pub fn theorem1_constant(oracle: &Oracle, schedule: &SampleSchedule) -> Result<(Theorem1Estimate, Vec<MetricSample>)> {
    if schedule.boundary_points == 0 || schedule.distances.is_empty() {
        return Err(Error::OutOfRange("empty sample schedule".into()));
    }
    let mut points = Vec::new();
    for (a, n) in oracle.boundary_points(schedule.boundary_points)? {
        for &s in &schedule.distances {
            points.push(a.iter().zip(&n).map(|(x, y)| x + y * s).collect::<Vec<C64>>());
        }
    }
    let pairs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<MetricSample>> = match oracle {
        Oracle::Planar { domain, map } => {
            // map every point once, then pair up
            let values: Vec<_> = points.par_iter().map(|p| map.forward(p[0])).collect();
            pairs
                .par_iter()
                .map(|&(i, j)| {
                    let (vi, vj) = (values[i].as_ref().map_err(clone_err)?, values[j].as_ref().map_err(clone_err)?);
                    let l = mobius_distance(vi, vj);
                    MetricSample::new(
                        points[i].clone(),
                        points[j].clone(),
                        l,
                        domain.signed_distance(points[i][0]),
                        domain.signed_distance(points[j][0]),
                    )
                })
                .collect()
        }
        Oracle::Ball(_) => pairs.par_iter().map(|&(i, j)| oracle.sample(&points[i], &points[j])).collect(),
    };
    let failures = results.iter().filter(|r| r.is_err()).count();
    let samples: Vec<MetricSample> = results.into_iter().filter_map(|r| r.ok()).collect();
    let best = samples
        .iter()
        .min_by(|x, y| x.theorem1.total_cmp(&y.theorem1))
        .ok_or_else(|| Error::OutOfRange("no pair could be evaluated".into()))?;
    Ok((
        Theorem1Estimate {
            c_estimate: best.theorem1,
            z: best.z.clone(),
            w: best.w.clone(),
            pairs: samples.len(),
            failures,
        },
        samples,
    ))
}

fn clone_err(e: &Error) -> Error {
    Error::OutOfRange(e.to_string())
}
