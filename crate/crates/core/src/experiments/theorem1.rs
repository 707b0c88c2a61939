//! Sweeps of `(1 - l) / (d_z d_w)` over normal-ray pairs, from the exact
//! oracle and from constructed discs.

use super::report::{Cell, ExperimentReport, Reduction, RowFilter, Table};
use super::svg::{Chart, Series};
use super::{distances_ok, point_text, positive, require, Built, Target};
use crate::ambient::{AmbientDomain, Ball};
use crate::disc::{lempert_upper_bound_with, theorem1_constant, Oracle, SampleSchedule, UpperBoundOptions};
use crate::domain::Domain;
use crate::error::Result;
use crate::metrics::{lempert_ball_full, lempert_planar_full, MetricSample};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Config {
    pub targets: Vec<Target>,
    pub schedule: SampleSchedule,
    pub certificates: CertificatePlan,
    pub thresholds: Theorem1Thresholds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificatePlan {
    /// Names of targets to certify with constructed discs.
    pub targets: Vec<String>,
    pub pairs: usize,
    pub distances: Vec<f64>,
    #[serde(default)]
    pub options: UpperBoundOptions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Thresholds {
    /// The sampled constant must exceed this.
    pub min_constant: f64,
    /// Allowed relative change of the constant under refinement.
    pub refinement_tolerance: f64,
    /// Collapse is declared when the constant over all pairs drops below
    /// this fraction of the constant over pairs at the largest distance.
    pub collapse_ratio: f64,
    pub oracle_tolerance: f64,
    pub interpolation_tolerance: f64,
    pub min_certificates: usize,
}

impl Theorem1Config {
    pub fn validate(&self) -> Result<()> {
        require(!self.targets.is_empty(), "no targets")?;
        require(self.schedule.boundary_points >= 2, "schedule needs two boundary points")?;
        distances_ok(&self.schedule.distances, "schedule.distances")?;
        for t in &self.targets {
            t.validate_schedule()?;
        }
        let c = &self.certificates;
        for name in &c.targets {
            let t = self.targets.iter().find(|t| &t.name == name);
            require(t.is_some(), &format!("certificate target {name} is not a target"))?;
        }
        if !c.targets.is_empty() {
            require(c.pairs > 0, "certificates.pairs must be positive")?;
            distances_ok(&c.distances, "certificates.distances")?;
        }
        let t = &self.thresholds;
        require(t.min_constant >= 0.0, "min_constant must be nonnegative")?;
        positive(t.refinement_tolerance, "refinement_tolerance")?;
        require(t.collapse_ratio > 0.0 && t.collapse_ratio < 1.0, "collapse_ratio must lie in (0, 1)")?;
        positive(t.oracle_tolerance, "oracle_tolerance")?;
        positive(t.interpolation_tolerance, "interpolation_tolerance")
    }
}

const COLUMNS: [&str; 16] = [
    "target",
    "z",
    "w",
    "d_z",
    "d_w",
    "d_min",
    "l",
    "gap",
    "theorem1",
    "upper",
    "upper_gap",
    "kappa",
    "measured_c",
    "bound_margin",
    "interpolation_error",
    "halvings",
];

fn oracle_row(target: &str, s: &MetricSample) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![
        target.into(),
        point_text(&s.z).into(),
        point_text(&s.w).into(),
        s.d_z.into(),
        s.d_w.into(),
        s.d_z.min(s.d_w).into(),
        s.lempert.into(),
        s.gap.into(),
        s.theorem1.into(),
    ];
    row.resize(COLUMNS.len(), Cell::Empty);
    row
}

pub fn run_theorem1(config: &Theorem1Config) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = ExperimentReport::new("theorem1", serde_json::to_value(config)?, Table::new(&COLUMNS));
    let th = &config.thresholds;
    let mut chart = Chart::new("min (1 - l)/(d_z d_w) over pairs with d_z, d_w >= d", "d", "constant").log_x();

    for target in &config.targets {
        let built = match target.build() {
            Ok(b) => b,
            Err(e) => {
                report.failure(&target.name, "build".into(), &e);
                report.verdict(&format!("{}_built", target.name), false, e.to_string());
                continue;
            }
        };
        let oracle = match &built {
            Built::Planar(domain, map) => Oracle::Planar { domain, map },
            Built::Ball(b) => Oracle::Ball(*b),
        };
        let schedule = target.schedule(&config.schedule);
        let refined = schedule.refined();
        let base_section = format!("{}/oracle", target.name);
        let refined_section = format!("{}/refined", target.name);
        for (section, schedule) in [(&base_section, schedule), (&refined_section, &refined)] {
            match theorem1_constant(&oracle, schedule) {
                Ok((est, samples)) => {
                    for s in &samples {
                        report.table.push(section, oracle_row(&target.name, s));
                    }
                    if est.failures > 0 {
                        report.failures.push(super::Failure {
                            section: section.clone(),
                            label: format!("{} pairs", est.failures),
                            error: "pair evaluation failed".into(),
                        });
                    }
                }
                Err(e) => report.failure(section, "sweep".into(), &e),
            }
        }
        let c = report.aggregate(&format!("{}_c", target.name), &base_section, "theorem1", Reduction::Min, None)?;
        let c_ref = report.aggregate(
            &format!("{}_c_refined", target.name),
            &refined_section,
            "theorem1",
            Reduction::Min,
            None,
        )?;
        let mut depth = Vec::new();
        for &d in &schedule.distances {
            let v = report.aggregate(
                &format!("{}_c_depth_{d:e}", target.name),
                &base_section,
                "theorem1",
                Reduction::Min,
                Some(RowFilter::at_least("d_min", d * (1.0 - 1e-9))),
            )?;
            if let Some(v) = v {
                depth.push((d, v));
            }
        }
        chart = chart.with(Series::line(&target.name, depth.clone()));

        if target.expect_collapse {
            let ratio = match (depth.first(), depth.last()) {
                (Some(a), Some(b)) if depth.len() >= 2 => Some(b.1 / a.1),
                _ => None,
            };
            report.verdict(
                &format!("{}_constant_collapses", target.name),
                ratio.is_some_and(|r| r < th.collapse_ratio),
                format!("all-pairs over far-pairs constant {ratio:?}, collapse below {}", th.collapse_ratio),
            );
        } else {
            report.verdict(
                &format!("{}_constant_positive", target.name),
                c.is_some_and(|c| c > th.min_constant),
                format!("c = {c:?}"),
            );
            let change = c.zip(c_ref).map(|(a, b)| (b / a - 1.0).abs());
            report.verdict(
                &format!("{}_constant_stable_under_refinement", target.name),
                change.is_some_and(|x| x <= th.refinement_tolerance),
                format!("c = {c:?}, refined {c_ref:?}, relative change {change:?}"),
            );
        }

        if config.certificates.targets.contains(&target.name) {
            certify(&mut report, &target.name, &built, config)?;
        }
    }
    report.plot("theorem1_constant_by_depth", chart.render());
    Ok(report)
}

/// Boundary pair `(a, n_a), (b, n_b)` for certificate `i`.
fn certificate_anchors(built: &Built, i: usize, pairs: usize) -> Result<[(Vec<C64>, Vec<C64>); 2]> {
    match built {
        Built::Planar(domain, _) => {
            let ta = i as f64 / pairs as f64;
            let tb = (ta + 0.5 + 0.1 * ((i % 5) as f64 - 2.0)).rem_euclid(1.0);
            let at = |t: f64| -> Result<(Vec<C64>, Vec<C64>)> {
                Ok((vec![domain.curve().point(t)], vec![domain.inward_normal(t)?]))
            };
            Ok([at(ta)?, at(tb)?])
        }
        Built::Ball(ball) => {
            let a = crate::disc::sphere_point(ball.dim, i + 2);
            let b = crate::disc::sphere_point(ball.dim, i + 3);
            let n = |p: &[C64]| p.iter().map(|c| -c).collect::<Vec<_>>();
            let (na, nb) = (n(&a), n(&b));
            Ok([(a, na), (b, nb)])
        }
    }
}

fn oracle_value(built: &Built, z: &[C64], w: &[C64]) -> Result<f64> {
    match built {
        Built::Planar(_, map) => Ok(lempert_planar_full(map, z[0], w[0])?.value),
        Built::Ball(_) => Ok(lempert_ball_full(z, w)?.value),
    }
}

fn ambient<'a>(built: &'a Built, ball: &'a Ball) -> &'a dyn AmbientDomain {
    match built {
        Built::Planar(domain, _) => domain as &Domain,
        Built::Ball(_) => ball,
    }
}

fn certify(report: &mut ExperimentReport, name: &str, built: &Built, config: &Theorem1Config) -> Result<()> {
    let plan = &config.certificates;
    let th = &config.thresholds;
    let section = format!("{name}/certificate");
    let ball = match built {
        Built::Ball(b) => *b,
        Built::Planar(..) => Ball { dim: 1 },
    };
    let domain = ambient(built, &ball);
    let m = plan.distances.len();
    let results: Vec<(usize, Result<Vec<Cell>>)> = (0..plan.pairs)
        .into_par_iter()
        .map(|i| {
            let row = (|| {
                let [(a, na), (b, nb)] = certificate_anchors(built, i, plan.pairs)?;
                let (sz, sw) = (plan.distances[i % m], plan.distances[(i / m) % m]);
                let z: Vec<C64> = a.iter().zip(&na).map(|(p, n)| p + n * sz).collect();
                let w: Vec<C64> = b.iter().zip(&nb).map(|(p, n)| p + n * sw).collect();
                let l = oracle_value(built, &z, &w)?;
                let (upper, cert) = lempert_upper_bound_with(domain, &z, &w, &a, &b, &plan.options)?;
                let dd = cert.d_z * cert.d_w;
                Ok(vec![
                    name.into(),
                    point_text(&z).into(),
                    point_text(&w).into(),
                    cert.d_z.into(),
                    cert.d_w.into(),
                    cert.d_z.min(cert.d_w).into(),
                    l.into(),
                    Cell::Empty,
                    Cell::Empty,
                    upper.into(),
                    cert.gap.into(),
                    cert.kappa.into(),
                    cert.measured_c.into(),
                    (cert.gap - cert.kappa * dd).into(),
                    cert.interpolation_error.into(),
                    cert.halvings.into(),
                ])
            })();
            (i, row)
        })
        .collect();
    for (i, r) in results {
        match r {
            Ok(row) => report.table.push(&section, row),
            Err(e) => report.failure(&section, format!("pair {i}"), &e),
        }
    }
    // validity margin `upper - l` recomputed from the rows
    let upper = report.table.values(&section, "upper")?;
    let oracle = report.table.values(&section, "l")?;
    let worst_margin = upper.iter().zip(&oracle).map(|(u, l)| u - l).fold(f64::INFINITY, f64::min);
    let n = upper.len();
    report.verdict(
        &format!("{name}_certificate_count"),
        n >= th.min_certificates,
        format!("{n} of {} pairs certified, {} needed", plan.pairs, th.min_certificates),
    );
    report.verdict(
        &format!("{name}_upper_bounds_valid"),
        n > 0 && worst_margin >= -th.oracle_tolerance,
        format!("min (upper - l) = {worst_margin:e}, tolerance {:e}", th.oracle_tolerance),
    );
    let interp = report.aggregate(&format!("{name}_max_interpolation_error"), &section, "interpolation_error", Reduction::Max, None)?;
    report.verdict(
        &format!("{name}_interpolation"),
        interp.is_some_and(|e| e <= th.interpolation_tolerance),
        format!("max interpolation error {interp:?}"),
    );
    let kappa = report.aggregate(&format!("{name}_min_kappa"), &section, "kappa", Reduction::Min, None)?;
    report.aggregate(&format!("{name}_max_measured_c"), &section, "measured_c", Reduction::Max, None)?;
    let margin = report.aggregate(&format!("{name}_min_bound_margin"), &section, "bound_margin", Reduction::Min, None)?;
    report.verdict(
        &format!("{name}_kappa_bound"),
        kappa.is_some_and(|k| k > 0.0) && margin.is_some_and(|m| m >= 0.0),
        format!("min kappa {kappa:?}, min (1 - upper - kappa d_z d_w) {margin:?}"),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> Theorem1Config {
        serde_json::from_str(
            r#"{
                "targets": [{"name": "disc", "domain": {"kind": "unit_disc"}}],
                "schedule": {"boundary_points": 4, "distances": [0.1, 0.01, 0.001]},
                "certificates": {"targets": ["disc"], "pairs": 3, "distances": [0.1, 0.05]},
                "thresholds": {"min_constant": 0.0, "refinement_tolerance": 0.05, "collapse_ratio": 0.5,
                               "oracle_tolerance": 1e-6, "interpolation_tolerance": 1e-6, "min_certificates": 3}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn disc_sweep_and_certificates() {
        let r = run_theorem1(&config()).unwrap();
        // 12 points, 66 pairs; refined 8 × 5 = 40 points, 780 pairs
        assert_eq!(r.table.count("disc/oracle"), 66);
        assert_eq!(r.table.count("disc/refined"), 780);
        assert_eq!(r.table.count("disc/certificate") + r.failures.len(), 3);
        let c = r.aggregates.iter().find(|a| a.name == "disc_c").unwrap().value;
        assert!(c >= 0.49 && c <= 1.0 / (1.0 + 0.999f64.powi(2)) + 1e-9, "{c}");
        assert!(r.passed(), "{:?}", r.verdicts);
    }

    #[test]
    fn unknown_certificate_target_is_rejected() {
        let mut c = config();
        c.certificates.targets = vec!["nope".into()];
        assert!(run_theorem1(&c).is_err());
    }
}
