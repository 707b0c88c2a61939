//! Metric and boundary-distance estimates: `κ d` on interior grids,
//! `(1 - l)/d_z` along normal rays with `w` fixed, the upper comparison
//! `star_gap` for separated pairs, and the lower comparison `lower_gap`.

use super::report::{ExperimentReport, Reduction, RowFilter, Table};
use super::svg::{Chart, Series};
use super::{distances_ok, point_text, positive, require, Built, Target};
use crate::ambient::{norm, AmbientDomain};
use crate::conformal::ConformalMap;
use crate::disc::{Oracle, SampleSchedule};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::metrics::{ball_ratios, boundary_ratios, estimate1_ratio, mobius_distance, MetricSample};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesConfig {
    pub targets: Vec<Target>,
    /// `grid × grid` points over the bounding box; those inside are used.
    pub grid: usize,
    /// Normal-ray points for the ray and pair sweeps.
    pub rays: SampleSchedule,
    /// Minimal `‖z - w‖` for pair sweeps.
    pub separation: f64,
    pub thresholds: EstimatesThresholds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesThresholds {
    pub koebe_min: f64,
    pub koebe_max: f64,
    pub koebe_tolerance: f64,
    /// `(1 - l(z, w))/d(z)` must stay above this along the rays.
    pub estimate2_min: f64,
    /// Allowed absolute change of `max star_gap` under refinement of the
    /// rays, and of `min lower_gap` when the deepest level is added.
    pub refinement_tolerance: f64,
}

impl EstimatesConfig {
    pub fn validate(&self) -> Result<()> {
        require(!self.targets.is_empty(), "no targets")?;
        require(self.grid >= 2, "grid must be at least 2")?;
        require(self.rays.boundary_points >= 2, "rays need two boundary points")?;
        distances_ok(&self.rays.distances, "rays.distances")?;
        for t in &self.targets {
            t.validate_schedule()?;
        }
        positive(self.separation, "separation")?;
        let t = &self.thresholds;
        positive(t.koebe_min, "koebe_min")?;
        require(t.koebe_max > t.koebe_min, "koebe_max must exceed koebe_min")?;
        positive(t.koebe_tolerance, "koebe_tolerance")?;
        require(t.estimate2_min >= 0.0, "estimate2_min must be nonnegative")?;
        positive(t.refinement_tolerance, "refinement_tolerance")
    }
}

const COLUMNS: [&str; 11] = ["target", "z", "w", "d_z", "d_w", "d_min", "l", "estimate1", "estimate2", "star_gap", "lower_gap"];

fn sample_row(target: &str, s: &MetricSample) -> Vec<super::Cell> {
    vec![
        target.into(),
        point_text(&s.z).into(),
        point_text(&s.w).into(),
        s.d_z.into(),
        s.d_w.into(),
        s.d_z.min(s.d_w).into(),
        s.lempert.into(),
        super::Cell::Empty,
        s.estimate2.into(),
        s.star_gap.into(),
        s.lower_gap.into(),
    ]
}

pub fn run_estimates(config: &EstimatesConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = ExperimentReport::new("estimates", serde_json::to_value(config)?, Table::new(&COLUMNS));
    let mut koebe_chart = Chart::new("kappa d on interior grids", "d", "kappa d").log_x();
    let mut ray_chart = Chart::new("(1 - l(z, w))/d(z) along normal rays", "d(z)", "ratio").log_x();

    for target in &config.targets {
        let built = match target.build() {
            Ok(b) => b,
            Err(e) => {
                report.failure(&target.name, "build".into(), &e);
                report.verdict(&format!("{}_built", target.name), false, e.to_string());
                continue;
            }
        };
        let rays = target.schedule(&config.rays);
        match &built {
            Built::Planar(domain, map) => {
                let pts = koebe(&mut report, config, &target.name, domain, map)?;
                koebe_chart = koebe_chart.with(Series::scatter(&target.name, pts));
                let pts = ray_sweep(&mut report, config, target, domain, map)?;
                ray_chart = ray_chart.with(Series::line(&target.name, pts));
                pairs(&mut report, config, rays, &target.name, &Oracle::Planar { domain, map }, Gap::Star)?;
            }
            Built::Ball(ball) => {
                pairs(&mut report, config, rays, &target.name, &Oracle::Ball(*ball), Gap::Lower)?;
                pairs(&mut report, config, rays, &target.name, &Oracle::Ball(*ball), Gap::Star)?;
            }
        }
    }
    report.plot("estimate1", koebe_chart.render());
    report.plot("estimate2", ray_chart.render());
    Ok(report)
}

/// `κ d` on the grid points inside the domain; returns `(d, κ d)` for plotting.
fn koebe(
    report: &mut ExperimentReport,
    config: &EstimatesConfig,
    name: &str,
    domain: &Domain,
    map: &ConformalMap,
) -> Result<Vec<(f64, f64)>> {
    let section = format!("{name}/estimate1");
    let bb = domain.bbox();
    let n = config.grid;
    let grid: Vec<C64> = (0..n)
        .flat_map(|i| {
            (0..n).map(move |j| {
                C64::new(
                    bb.min.re + (i as f64 + 0.5) / n as f64 * bb.width(),
                    bb.min.im + (j as f64 + 0.5) / n as f64 * bb.height(),
                )
            })
        })
        .filter(|&z| domain.contains(z))
        .collect();
    let vals: Vec<Result<f64>> = grid.par_iter().map(|&z| estimate1_ratio(domain, map, z)).collect();
    let mut pts = Vec::new();
    for (z, v) in grid.iter().zip(vals) {
        match v {
            Ok(v) => {
                let d = domain.signed_distance(*z);
                report.table.push(
                    &section,
                    vec![
                        name.into(),
                        point_text(&[*z]).into(),
                        super::Cell::Empty,
                        d.into(),
                        super::Cell::Empty,
                        super::Cell::Empty,
                        super::Cell::Empty,
                        v.into(),
                        super::Cell::Empty,
                        super::Cell::Empty,
                        super::Cell::Empty,
                    ],
                );
                pts.push((d, v));
            }
            Err(e) => report.failure(&section, point_text(&[*z]), &e),
        }
    }
    let th = &config.thresholds;
    let lo = report.aggregate(&format!("{name}_estimate1_min"), &section, "estimate1", Reduction::Min, None)?;
    let hi = report.aggregate(&format!("{name}_estimate1_max"), &section, "estimate1", Reduction::Max, None)?;
    let (a, b) = (th.koebe_min - th.koebe_tolerance, th.koebe_max + th.koebe_tolerance);
    report.verdict(
        &format!("{name}_estimate1_koebe"),
        lo.is_some_and(|lo| lo >= a) && hi.is_some_and(|hi| hi <= b),
        format!("kappa d in [{lo:?}, {hi:?}] over {} points, allowed [{a}, {b}]", pts.len()),
    );
    Ok(pts)
}

/// `(1 - l(z, w))/d(z)` for `z` on normal rays and `w` the deepest point.
fn ray_sweep(
    report: &mut ExperimentReport,
    config: &EstimatesConfig,
    target: &Target,
    domain: &Domain,
    map: &ConformalMap,
) -> Result<Vec<(f64, f64)>> {
    let name = &target.name;
    let rays = target.schedule(&config.rays);
    let section = format!("{name}/estimate2");
    let w = AmbientDomain::deepest_point(domain)[0];
    let oracle = Oracle::Planar { domain, map };
    let mut points = Vec::new();
    for (a, n) in oracle.boundary_points(rays.boundary_points)? {
        for &s in &rays.distances {
            points.push(a[0] + n[0] * s);
        }
    }
    let vals: Vec<Result<MetricSample>> = points.par_iter().map(|&z| boundary_ratios(domain, map, z, w)).collect();
    for (z, v) in points.iter().zip(vals) {
        match v {
            Ok(s) => report.table.push(&section, sample_row(name, &s)),
            Err(e) => report.failure(&section, point_text(&[*z]), &e),
        }
    }
    let lo = report.aggregate(&format!("{name}_estimate2_min"), &section, "estimate2", Reduction::Min, None)?;
    report.aggregate(&format!("{name}_estimate2_max"), &section, "estimate2", Reduction::Max, None)?;
    let d_w = domain.signed_distance(w);
    if !target.expect_collapse {
        report.verdict(
            &format!("{name}_estimate2_positive"),
            lo.is_some_and(|lo| lo > config.thresholds.estimate2_min),
            format!("min (1 - l)/d(z) = {lo:?} with d(w) = {d_w}"),
        );
    }
    // smallest ratio per distance, for the plot
    let (dz, e2) = (report.table.index("d_z")?, report.table.index("estimate2")?);
    let mut pts = Vec::new();
    for &s in &rays.distances {
        let m = report
            .table
            .section_rows(&section)
            .filter(|r| r[dz].num().is_some_and(|d| (d / s - 1.0).abs() < 1e-6))
            .filter_map(|r| r[e2].num())
            .fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            pts.push((s, m));
        }
    }
    Ok(pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gap {
    Star,
    Lower,
}

/// Pairs of normal-ray points at least `separation` apart, on the base and
/// the refined schedule.
fn pairs(
    report: &mut ExperimentReport,
    config: &EstimatesConfig,
    rays: &SampleSchedule,
    name: &str,
    oracle: &Oracle,
    gap: Gap,
) -> Result<()> {
    let (tag, column, reduction) = match gap {
        Gap::Star => ("star", "star_gap", Reduction::Max),
        Gap::Lower => ("lower", "lower_gap", Reduction::Min),
    };
    let mut extremes = Vec::new();
    for (suffix, schedule) in [("", rays.clone()), ("_refined", rays.refined())] {
        let section = format!("{name}/{tag}{suffix}");
        let mut points = Vec::new();
        for (a, n) in oracle.boundary_points(schedule.boundary_points)? {
            for &s in &schedule.distances {
                points.push(a.iter().zip(&n).map(|(x, y)| x + y * s).collect::<Vec<C64>>());
            }
        }
        let idx: Vec<(usize, usize)> = (0..points.len())
            .flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let diff: Vec<C64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
                norm(&diff) >= config.separation
            })
            .collect();
        let samples: Vec<Result<MetricSample>> = match oracle {
            Oracle::Planar { domain, map } => {
                let values: Vec<_> = points.par_iter().map(|p| map.forward(p[0])).collect();
                idx.par_iter()
                    .map(|&(i, j)| {
                        let vi = values[i].as_ref().map_err(|e| Error::OutOfRange(e.to_string()))?;
                        let vj = values[j].as_ref().map_err(|e| Error::OutOfRange(e.to_string()))?;
                        MetricSample::new(
                            points[i].clone(),
                            points[j].clone(),
                            mobius_distance(vi, vj),
                            domain.signed_distance(points[i][0]),
                            domain.signed_distance(points[j][0]),
                        )
                    })
                    .collect()
            }
            Oracle::Ball(_) => idx.par_iter().map(|&(i, j)| ball_ratios(&points[i], &points[j])).collect(),
        };
        for (&(i, j), s) in idx.iter().zip(samples) {
            match s {
                Ok(s) => report.table.push(&section, sample_row(name, &s)),
                Err(e) => report.failure(&section, format!("{} / {}", point_text(&points[i]), point_text(&points[j])), &e),
            }
        }
        let label = match reduction {
            Reduction::Max => "max",
            Reduction::Min => "min",
        };
        extremes.push(report.aggregate(&format!("{name}_{label}_{column}{suffix}"), &section, column, reduction, None)?);
    }
    let tol = config.thresholds.refinement_tolerance;
    let (base, refined) = (extremes[0], extremes[1]);
    match gap {
        Gap::Star => {
            let change = base.zip(refined).map(|(a, b)| (b - a).abs());
            report.verdict(
                &format!("{name}_star_gap_stable"),
                base.is_some_and(f64::is_finite) && change.is_some_and(|c| c <= tol),
                format!("max {base:?}, refined {refined:?}, change {change:?}, tolerance {tol}"),
            );
        }
        Gap::Lower => {
            // the minimum must settle as the deepest level is added
            let refined_distances = rays.refined().distances;
            let shallower = match refined_distances.len() {
                n if n >= 2 => report.aggregate(
                    &format!("{name}_min_lower_gap_without_deepest"),
                    &format!("{name}/lower_refined"),
                    column,
                    reduction,
                    Some(RowFilter::at_least("d_min", refined_distances[n - 2] * (1.0 - 1e-9))),
                )?,
                _ => None,
            };
            let change = shallower.zip(refined).map(|(a, b)| (b - a).abs());
            report.verdict(
                &format!("{name}_lower_gap_bounded_below"),
                refined.is_some_and(f64::is_finite) && change.is_some_and(|c| c <= tol),
                format!(
                    "min {refined:?}, without the deepest level {shallower:?}, change {change:?}, tolerance {tol}, c' = {:?}",
                    refined.map(|m| -m)
                ),
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(targets: &str) -> EstimatesConfig {
        serde_json::from_str(&format!(
            r#"{{
                "targets": {targets},
                "grid": 12,
                "rays": {{"boundary_points": 6, "distances": [0.1, 0.01, 0.001]}},
                "separation": 0.5,
                "thresholds": {{"koebe_min": 0.25, "koebe_max": 1.0, "koebe_tolerance": 1e-4,
                               "estimate2_min": 0.0, "refinement_tolerance": 0.1}}
            }}"#
        ))
        .unwrap()
    }

    fn agg(r: &ExperimentReport, name: &str) -> f64 {
        r.aggregates.iter().find(|a| a.name == name).unwrap().value
    }

    #[test]
    fn disc_estimates() {
        let r = run_estimates(&config(r#"[{"name": "disc", "domain": {"kind": "unit_disc"}}]"#)).unwrap();
        // on the disc κ d = (1 - |z|)/(1 - |z|²) = 1/(1 + |z|)
        let k = r.table.index("estimate1").unwrap();
        let z = r.table.index("d_z").unwrap();
        for row in r.table.section_rows("disc/estimate1") {
            let d = row[z].num().unwrap();
            assert!((row[k].num().unwrap() - 1.0 / (2.0 - d)).abs() < 1e-12);
        }
        // w = 0: (1 - |z|)/d(z) = 1
        assert!((agg(&r, "disc_estimate2_min") - 1.0).abs() < 1e-9);
        assert!(agg(&r, "disc_max_star_gap").is_finite());
        assert!(r.passed(), "{:?}", r.verdicts);
    }

    #[test]
    fn ball_lower_gap() {
        let r = run_estimates(&config(r#"[{"name": "ball", "ball_dimension": 2}]"#)).unwrap();
        let c = -agg(&r, "ball_min_lower_gap_refined");
        assert!(c.is_finite());
        assert!(r.table.count("ball/lower") > 0 && r.table.count("ball/lower_refined") > r.table.count("ball/lower"));
        assert!(r.passed(), "{:?}", r.verdicts);
    }
}
