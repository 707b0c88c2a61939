//! Configurable sweeps. Each experiment reads a JSON config (thresholds
//! included, nothing defaulted in code), never aborts on a single failing
//! sample, and produces a [`ExperimentReport`] that writes `report.csv`,
//! `report.json` and `plots/*.svg`.

pub mod estimates;
pub mod example4;
pub mod proposition2;
pub mod report;
pub mod svg;
pub mod theorem1;

pub use estimates::{run_estimates, EstimatesConfig};
pub use example4::{run_example4, Example4Config};
pub use proposition2::{run_proposition2, Proposition2Config};
pub use report::{Aggregate, Cell, ExperimentReport, Failure, Reduction, RowFilter, Table, Verdict};
pub use theorem1::{run_theorem1, Theorem1Config};

use crate::ambient::Ball;
use crate::conformal::{build_riemann_map, ConformalMap};
use crate::disc::SampleSchedule;
use crate::domain::{build_domain, Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Example4,
    Theorem1,
    Proposition2,
    Estimates,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Example4,
        Experiment::Theorem1,
        Experiment::Proposition2,
        Experiment::Estimates,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Example4 => "example4",
            Experiment::Theorem1 => "theorem1",
            Experiment::Proposition2 => "proposition2",
            Experiment::Estimates => "estimates",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Experiment> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown experiment {s:?}")))
    }
}

/// Parse `config` for `experiment` and run it.
pub fn run(experiment: Experiment, config: &str) -> Result<ExperimentReport> {
    match experiment {
        Experiment::Example4 => run_example4(&parse(config)?),
        Experiment::Theorem1 => run_theorem1(&parse(config)?),
        Experiment::Proposition2 => run_proposition2(&parse(config)?),
        Experiment::Estimates => run_estimates(&parse(config)?),
    }
}

pub fn run_file(experiment: Experiment, path: &Path) -> Result<ExperimentReport> {
    run(experiment, &std::fs::read_to_string(path)?)
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// A named domain with its exact Lempert oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub name: String,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    /// Unit ball of `ℂⁿ` instead of a planar domain.
    #[serde(default)]
    pub ball_dimension: Option<usize>,
    /// Centre of the Riemann map; the origin when absent.
    #[serde(default)]
    pub center: Option<C64>,
    /// The target is only `C¹` and its ratios are expected to degenerate.
    #[serde(default)]
    pub expect_collapse: bool,
    /// Replaces the experiment's normal-ray schedule for this target.
    #[serde(default)]
    pub schedule: Option<SampleSchedule>,
}

// one per target and short-lived, so the size gap is harmless
#[allow(clippy::large_enum_variant)]
pub(crate) enum Built {
    Planar(Domain, ConformalMap),
    Ball(Ball),
}

impl Target {
    pub(crate) fn schedule<'a>(&'a self, default: &'a SampleSchedule) -> &'a SampleSchedule {
        self.schedule.as_ref().unwrap_or(default)
    }

    pub(crate) fn validate_schedule(&self) -> Result<()> {
        if let Some(s) = &self.schedule {
            require(s.boundary_points >= 2, &format!("{}: schedule needs two boundary points", self.name))?;
            distances_ok(&s.distances, &format!("{}: schedule.distances", self.name))?;
        }
        Ok(())
    }

    pub(crate) fn build(&self) -> Result<Built> {
        match (&self.domain, self.ball_dimension) {
            (Some(spec), None) => {
                let domain = build_domain(spec)?;
                let map = build_riemann_map(&domain, self.center.unwrap_or_default())?;
                Ok(Built::Planar(domain, map))
            }
            (None, Some(n)) => Ok(Built::Ball(Ball::new(n)?)),
            _ => Err(Error::OutOfRange(format!(
                "target {} needs exactly one of domain and ball_dimension",
                self.name
            ))),
        }
    }
}

pub(crate) fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("invalid config: {what}")))
    }
}

pub(crate) fn positive(v: f64, what: &str) -> Result<()> {
    require(v.is_finite() && v > 0.0, &format!("{what} must be positive"))
}

pub(crate) fn distances_ok(d: &[f64], what: &str) -> Result<()> {
    require(!d.is_empty(), &format!("{what} is empty"))?;
    require(
        d.iter().all(|x| x.is_finite() && *x > 0.0) && d.windows(2).all(|w| w[1] < w[0]),
        &format!("{what} must be positive and strictly decreasing"),
    )
}

/// Compact text form of a point for table cells.
pub(crate) fn point_text(z: &[C64]) -> String {
    z.iter()
        .map(|c| format!("{}{:+}i", c.re, c.im))
        .collect::<Vec<_>>()
        .join(";")
}
