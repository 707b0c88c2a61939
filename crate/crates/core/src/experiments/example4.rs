//! Boundary decay of `(1 - l(0, w)) / d(w)` on the logarithmic domain, with
//! the unit disc as control.

use super::report::{ExperimentReport, Reduction, Table};
use super::svg::{Chart, Series};
use super::{positive, require};
use crate::conformal::example4_domain;
use crate::error::Result;
use crate::metrics::{lempert_disc_full, lempert_planar_full};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example4Config {
    /// `w = 2 - 10^{-k}` on the domain, `1 - 10^{-k}` on the disc.
    pub exponents: Vec<u32>,
    pub thresholds: Example4Thresholds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example4Thresholds {
    pub final_ratio_max: f64,
    pub control_min: f64,
    pub control_max: f64,
    /// Allowed `max/min - 1` of the control ratios.
    pub control_flatness: f64,
}

impl Example4Config {
    pub fn validate(&self) -> Result<()> {
        require(!self.exponents.is_empty(), "exponents is empty")?;
        require(self.exponents.windows(2).all(|w| w[0] < w[1]), "exponents must increase")?;
        require(self.exponents.iter().all(|&k| (1..=15).contains(&k)), "exponents must lie in 1..=15")?;
        let t = &self.thresholds;
        positive(t.final_ratio_max, "final_ratio_max")?;
        positive(t.control_min, "control_min")?;
        positive(t.control_flatness, "control_flatness")?;
        require(t.control_max > t.control_min, "control_max must exceed control_min")
    }
}

const DOMAIN: &str = "example4";
const CONTROL: &str = "disc_control";

pub fn run_example4(config: &Example4Config) -> Result<ExperimentReport> {
    config.validate()?;
    let (domain, map) = example4_domain()?;
    let origin = C64::new(0.0, 0.0);
    let mut report = ExperimentReport::new(
        "example4",
        serde_json::to_value(config)?,
        Table::new(&["k", "w", "l", "gap", "d", "ratio"]),
    );
    for &k in &config.exponents {
        let eps = 10f64.powi(-(k as i32));
        let w = C64::new(2.0 - eps, 0.0);
        match lempert_planar_full(&map, origin, w) {
            Ok(l) => {
                let d = domain.signed_distance(w);
                report.table.push(
                    DOMAIN,
                    vec![(k as usize).into(), w.re.into(), l.value.into(), l.gap.into(), d.into(), (l.gap / d).into()],
                );
            }
            Err(e) => report.failure(DOMAIN, format!("k = {k}"), &e),
        }
        let w = 1.0 - eps;
        match lempert_disc_full(origin, C64::new(w, 0.0)) {
            Ok(l) => {
                let d = 1.0 - w;
                report
                    .table
                    .push(CONTROL, vec![(k as usize).into(), w.into(), l.value.into(), l.gap.into(), d.into(), (l.gap / d).into()]);
            }
            Err(e) => report.failure(CONTROL, format!("k = {k}"), &e),
        }
    }

    let t = &config.thresholds;
    let ratios = report.table.values(DOMAIN, "ratio")?;
    let decreasing = ratios.len() >= 2 && ratios.windows(2).all(|w| w[1] < w[0]);
    report.verdict(
        "example4_ratios_strictly_decreasing",
        decreasing,
        format!("{} ratios: {ratios:?}", ratios.len()),
    );
    let last = ratios.last().copied();
    report.verdict(
        "example4_final_ratio_below_threshold",
        last.is_some_and(|r| r < t.final_ratio_max),
        format!("final ratio {last:?} against {}", t.final_ratio_max),
    );
    report.aggregate("example4_min_ratio", DOMAIN, "ratio", Reduction::Min, None)?;
    report.aggregate("example4_max_ratio", DOMAIN, "ratio", Reduction::Max, None)?;

    let lo = report.aggregate("control_min_ratio", CONTROL, "ratio", Reduction::Min, None)?;
    let hi = report.aggregate("control_max_ratio", CONTROL, "ratio", Reduction::Max, None)?;
    let complete = report.table.count(CONTROL) == config.exponents.len();
    let (band, flat) = match (lo, hi) {
        (Some(lo), Some(hi)) => (
            complete && lo >= t.control_min && hi <= t.control_max,
            complete && hi / lo - 1.0 <= t.control_flatness,
        ),
        _ => (false, false),
    };
    report.verdict(
        "disc_control_within_band",
        band,
        format!("control ratios in [{lo:?}, {hi:?}], band [{}, {}]", t.control_min, t.control_max),
    );
    report.verdict(
        "disc_control_not_decreasing",
        flat,
        format!("max/min - 1 = {:?}, allowed {}", lo.zip(hi).map(|(a, b)| b / a - 1.0), t.control_flatness),
    );

    let series = |section: &str| -> Result<Vec<(f64, f64)>> {
        let k = report.table.values(section, "k")?;
        let r = report.table.values(section, "ratio")?;
        Ok(k.into_iter().zip(r).collect())
    };
    let chart = Chart::new("(1 - l(0, w)) / d(w)", "k", "ratio")
        .log_y()
        .with(Series::line("logarithmic domain, w = 2 - 10^-k", series(DOMAIN)?))
        .with(Series::line("unit disc, w = 1 - 10^-k", series(CONTROL)?));
    report.plot("ratios", chart.render());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(exponents: Vec<u32>) -> Example4Config {
        Example4Config {
            exponents,
            thresholds: Example4Thresholds {
                final_ratio_max: 0.05,
                control_min: 0.9,
                control_max: 1.1,
                control_flatness: 1e-6,
            },
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(run_example4(&config(vec![])).is_err());
        assert!(run_example4(&config(vec![2, 1])).is_err());
        let mut c = config(vec![1]);
        c.thresholds.control_max = 0.5;
        assert!(run_example4(&c).is_err());
    }

    #[test]
    fn first_rows_and_control() {
        let r = run_example4(&config(vec![1, 2])).unwrap();
        let ratios = r.table.values(DOMAIN, "ratio").unwrap();
        assert_eq!(ratios.len() + r.failures.len(), 2);
        assert!(ratios[0] < 1.0 && ratios[0] > 0.0);
        for c in r.table.values(CONTROL, "ratio").unwrap() {
            assert!((c - 1.0).abs() < 1e-9);
        }
        let band = r.verdicts.iter().find(|v| v.name == "disc_control_within_band").unwrap();
        assert!(band.pass);
        assert_eq!(r.plots.len(), 1);
    }
}
