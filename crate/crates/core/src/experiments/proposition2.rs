//! Uniform derivative bounds for the inverse Riemann maps `f_j: 𝔻 → G_j` of
//! a family of domains converging to a limit.

use super::report::{ExperimentReport, Reduction, RowFilter, Table};
use super::svg::{Chart, Series};
use super::{positive, require};
use crate::conformal::build_riemann_map;
use crate::domain::{build_domain, DomainSpec, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `G_j = 𝔻` for every `j`.
    ConstantDisc,
    /// `G_j = disc(0, 1 + 1/j)`.
    ScaledDisc,
    /// Semi-axes `a(1 + growth/j)`, `b(1 + growth/j)` and a bump of
    /// amplitude `amplitude/j`.
    PerturbedEllipse {
        a: f64,
        b: f64,
        growth: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

impl Family {
    pub fn member(&self, j: usize) -> Result<DomainSpec> {
        if j == 0 {
            return Err(Error::OutOfRange("family members start at j = 1".into()));
        }
        let jf = j as f64;
        Ok(match *self {
            Family::ConstantDisc => DomainSpec::UnitDisc { samples: DEFAULT_SAMPLES },
            Family::ScaledDisc => DomainSpec::Disc {
                center: C64::new(0.0, 0.0),
                radius: 1.0 + 1.0 / jf,
                samples: DEFAULT_SAMPLES,
            },
            Family::PerturbedEllipse {
                a,
                b,
                growth,
                amplitude,
                frequency,
                samples,
            } => DomainSpec::PerturbedEllipse {
                a: a * (1.0 + growth / jf),
                b: b * (1.0 + growth / jf),
                amplitude: amplitude / jf,
                frequency,
                samples,
            },
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Proposition2Config {
    pub family: Family,
    pub members: usize,
    /// Sampling radii in `[0, 1)`.
    pub radii: Vec<f64>,
    pub angles: usize,
    pub thresholds: Proposition2Thresholds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Proposition2Thresholds {
    /// Required boundary distance of `f_j(0)`.
    pub epsilon: f64,
    /// Largest acceptable envelope constant `c`.
    pub max_constant: f64,
    pub stabilization_window: usize,
    /// Allowed relative spread of the per-member extremes over the window.
    pub stabilization_tolerance: f64,
}

impl Proposition2Config {
    pub fn validate(&self) -> Result<()> {
        require(self.members > 0, "members must be positive")?;
        require(!self.radii.is_empty(), "radii is empty")?;
        require(self.radii.iter().all(|r| (0.0..1.0).contains(r)), "radii must lie in [0, 1)")?;
        require(self.angles > 0, "angles must be positive")?;
        let t = &self.thresholds;
        positive(t.epsilon, "epsilon")?;
        require(t.max_constant >= 1.0, "max_constant must be at least 1")?;
        require(
            t.stabilization_window >= 2 && t.stabilization_window <= self.members,
            "stabilization_window must lie in 2..=members",
        )?;
        positive(t.stabilization_tolerance, "stabilization_tolerance")
    }
}

const SECTION: &str = "member";

/// `(max - min) / min` of a positive list.
fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

pub fn run_proposition2(config: &Proposition2Config) -> Result<ExperimentReport> {
    config.validate()?;
    let th = &config.thresholds;
    let mut report = ExperimentReport::new(
        "proposition2",
        serde_json::to_value(config)?,
        Table::new(&["j", "radius", "angle", "abs_derivative", "distance_ratio", "center_distance"]),
    );
    let mut members: Vec<Member> = Vec::new();
    for j in 1..=config.members {
        let built = config
            .family
            .member(j)
            .and_then(|spec| build_domain(&spec))
            .and_then(|d| build_riemann_map(&d, C64::new(0.0, 0.0)).map(|m| (d, m)));
        let (domain, map) = match built {
            Ok(x) => x,
            Err(e) => {
                report.failure(SECTION, format!("j = {j} map"), &e);
                continue;
            }
        };
        let center_distance = domain.signed_distance(C64::new(0.0, 0.0));
        let points: Vec<(f64, f64)> = config
            .radii
            .iter()
            .flat_map(|&r| (0..config.angles).map(move |k| (r, k as f64 / config.angles as f64)))
            .collect();
        let rows: Vec<_> = points
            .par_iter()
            .map(|&(r, s)| {
                let p = C64::from_polar(r, std::f64::consts::TAU * s);
                let z = map.inverse(p)?;
                let d = map.inverse_derivative(p)?;
                Ok::<_, Error>((r, s, d.norm(), domain.signed_distance(z) / (1.0 - r)))
            })
            .collect();
        for (row, &(r, s)) in rows.into_iter().zip(&points) {
            match row {
                Ok((r, s, df, ratio)) => report.table.push(
                    SECTION,
                    vec![j.into(), r.into(), s.into(), df.into(), ratio.into(), center_distance.into()],
                ),
                Err(e) => report.failure(SECTION, format!("j = {j}, r = {r}, angle = {s}"), &e),
            }
        }
        let only_j = || Some(RowFilter::equal("j", j as f64));
        let lo = report.aggregate(&format!("j{j}_min_derivative"), SECTION, "abs_derivative", Reduction::Min, only_j())?;
        let hi = report.aggregate(&format!("j{j}_max_derivative"), SECTION, "abs_derivative", Reduction::Max, only_j())?;
        report.aggregate(&format!("j{j}_min_distance_ratio"), SECTION, "distance_ratio", Reduction::Min, only_j())?;
        report.aggregate(&format!("j{j}_max_distance_ratio"), SECTION, "distance_ratio", Reduction::Max, only_j())?;
        if let (Some(lo), Some(hi)) = (lo, hi) {
            members.push(Member { j, lo, hi, center_distance });
        }
    }

    let built = members.len();
    report.verdict(
        "all_members_sampled",
        built == config.members && report.failures.is_empty(),
        format!("{built} of {} members, {} failures", config.members, report.failures.len()),
    );
    let shallow = members.iter().filter(|m| !(m.center_distance >= th.epsilon)).count();
    report.verdict(
        "center_depth",
        built > 0 && shallow == 0,
        format!("{shallow} members with d(f_j(0)) below {}", th.epsilon),
    );

    let lo = report.aggregate("family_min_derivative", SECTION, "abs_derivative", Reduction::Min, None)?;
    let hi = report.aggregate("family_max_derivative", SECTION, "abs_derivative", Reduction::Max, None)?;
    let c = lo.zip(hi).map(|(lo, hi)| hi.max(1.0 / lo));
    report.verdict(
        "uniform_envelope",
        c.is_some_and(|c| c.is_finite() && c <= th.max_constant),
        format!("|f'_j| within [{lo:?}, {hi:?}], c = {c:?}, limit {}", th.max_constant),
    );
    let r_lo = report.aggregate("family_min_distance_ratio", SECTION, "distance_ratio", Reduction::Min, None)?;
    let r_hi = report.aggregate("family_max_distance_ratio", SECTION, "distance_ratio", Reduction::Max, None)?;
    let c2 = r_lo.zip(r_hi).map(|(lo, hi)| hi.max(1.0 / lo));
    report.verdict(
        "distance_ratio_envelope",
        c2.is_some_and(|c| c.is_finite() && c <= th.max_constant),
        format!("d(f_j(p))/(1 - |p|) within [{r_lo:?}, {r_hi:?}], c2 = {c2:?}"),
    );

    let w = th.stabilization_window;
    let tail: Vec<&Member> = members.iter().filter(|m| m.j + w > config.members).collect();
    let (s_lo, s_hi) = if tail.len() == w {
        (
            spread(&tail.iter().map(|m| m.lo).collect::<Vec<_>>()),
            spread(&tail.iter().map(|m| m.hi).collect::<Vec<_>>()),
        )
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    report.verdict(
        "envelope_stabilizes",
        s_lo <= th.stabilization_tolerance && s_hi <= th.stabilization_tolerance,
        format!(
            "last {w} members: spread of min {s_lo:e}, of max {s_hi:e}, tolerance {}",
            th.stabilization_tolerance
        ),
    );

    let chart = Chart::new("|f'_j| envelope", "j", "|f'_j|")
        .with(Series::line("min", members.iter().map(|m| (m.j as f64, m.lo)).collect()))
        .with(Series::line("max", members.iter().map(|m| (m.j as f64, m.hi)).collect()));
    report.plot("derivative_envelope", chart.render());
    Ok(report)
}

struct Member {
    j: usize,
    lo: f64,
    hi: f64,
    center_distance: f64,
}
