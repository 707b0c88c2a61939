//! Tables, aggregates and verdicts. Aggregates are always recomputed from
//! the table, so each one is exactly the min or max of the rows it names.

use crate::error::{Error, Result};
use serde::{Serialize, Serializer};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Num(x) => s.serialize_str(&x.to_string()),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Empty => s.serialize_none(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Cell {
        Cell::Num(x as f64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Cell {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Cell {
        x.map(Into::into).unwrap_or(Cell::Empty)
    }
}

/// Rows with a fixed header. The first column is always `section`.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        let mut all = vec!["section".to_string()];
        all.extend(columns.iter().map(|c| c.to_string()));
        Table {
            columns: all,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, section: &str, cells: Vec<Cell>) {
        assert_eq!(cells.len() + 1, self.columns.len(), "row width does not match the header");
        let mut row = vec![Cell::Text(section.to_string())];
        row.extend(cells);
        self.rows.push(row);
    }

    pub fn index(&self, column: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == column)
            .ok_or_else(|| Error::OutOfRange(format!("no column {column}")))
    }

    pub fn section_rows<'a>(&'a self, section: &'a str) -> impl Iterator<Item = &'a [Cell]> + 'a {
        self.rows
            .iter()
            .filter(move |r| r[0].text() == Some(section))
            .map(|r| r.as_slice())
    }

    pub fn count(&self, section: &str) -> usize {
        self.section_rows(section).count()
    }

    /// Numeric values of `column` in `section`, in row order.
    pub fn values(&self, section: &str, column: &str) -> Result<Vec<f64>> {
        let k = self.index(column)?;
        Ok(self.section_rows(section).filter_map(|r| r[k].num()).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Min,
    Max,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub name: String,
    pub section: String,
    pub column: String,
    pub reduction: Reduction,
    /// Rows considered, after the optional filter.
    pub rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<RowFilter>,
    pub value: f64,
}

/// Keeps rows whose `column` lies in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFilter {
    pub column: String,
    pub min: f64,
    pub max: f64,
}

impl RowFilter {
    pub fn at_least(column: &str, min: f64) -> RowFilter {
        RowFilter {
            column: column.to_string(),
            min,
            max: f64::INFINITY,
        }
    }

    pub fn equal(column: &str, value: f64) -> RowFilter {
        RowFilter {
            column: column.to_string(),
            min: value,
            max: value,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub section: String,
    pub label: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub aggregates: Vec<Aggregate>,
    pub verdicts: Vec<Verdict>,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub table: Table,
    #[serde(skip)]
    pub plots: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: serde_json::Value, table: Table) -> ExperimentReport {
        ExperimentReport {
            experiment: experiment.to_string(),
            config,
            aggregates: Vec::new(),
            verdicts: Vec::new(),
            failures: Vec::new(),
            table,
            plots: Vec::new(),
        }
    }

    /// Min or max of `column` over the rows of `section` that pass
    /// `filter`. `None` when no row qualifies.
    pub fn aggregate(
        &mut self,
        name: &str,
        section: &str,
        column: &str,
        reduction: Reduction,
        filter: Option<RowFilter>,
    ) -> Result<Option<f64>> {
        let k = self.table.index(column)?;
        let f = filter
            .as_ref()
            .map(|f| self.table.index(&f.column).map(|i| (i, f.min, f.max)))
            .transpose()?;
        let vals: Vec<f64> = self
            .table
            .section_rows(section)
            .filter(|r| f.is_none_or(|(i, lo, hi)| r[i].num().is_some_and(|x| x >= lo && x <= hi)))
            .filter_map(|r| r[k].num())
            .filter(|x| !x.is_nan())
            .collect();
        if vals.is_empty() {
            return Ok(None);
        }
        let value = match reduction {
            Reduction::Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
            Reduction::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        self.aggregates.push(Aggregate {
            name: name.to_string(),
            section: section.to_string(),
            column: column.to_string(),
            reduction,
            rows: vals.len(),
            filter,
            value,
        });
        Ok(Some(value))
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: String) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    pub fn failure(&mut self, section: &str, label: String, error: &Error) {
        self.failures.push(Failure {
            section: section.to_string(),
            label,
            error: error.to_string(),
        });
    }

    pub fn plot(&mut self, name: &str, svg: String) {
        self.plots.push((name.to_string(), svg));
    }

    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass)
    }

    /// `report.csv`, `report.json` and `plots/*.svg` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("plots"))?;
        self.table.write_csv(&dir.join("report.csv"))?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        for (name, svg) in &self.plots {
            fs::write(dir.join("plots").join(format!("{name}.svg")), svg)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_come_from_rows() {
        let mut t = Table::new(&["x", "d"]);
        t.push("a", vec![3.0.into(), 0.1.into()]);
        t.push("a", vec![1.0.into(), 0.01.into()]);
        t.push("b", vec![(-5.0).into(), 0.1.into()]);
        t.push("a", vec![Cell::Empty, 0.1.into()]);
        let mut r = ExperimentReport::new("t", serde_json::Value::Null, t);
        assert_eq!(r.aggregate("m", "a", "x", Reduction::Min, None).unwrap(), Some(1.0));
        assert_eq!(r.aggregate("m", "a", "x", Reduction::Min, Some(RowFilter::at_least("d", 0.05))).unwrap(), Some(3.0));
        assert_eq!(r.aggregate("m", "a", "x", Reduction::Max, Some(RowFilter::equal("d", 0.01))).unwrap(), Some(1.0));
        assert_eq!(r.aggregate("m", "c", "x", Reduction::Max, None).unwrap(), None);
        assert_eq!(r.aggregates.len(), 3);
        assert_eq!(r.aggregates[0].rows, 2);
        assert!(r.aggregate("m", "a", "nope", Reduction::Max, None).is_err());
        assert!(!r.passed());
        r.verdict("v", true, String::new());
        assert!(r.passed());
    }

    #[test]
    fn writes_all_artifacts() {
        let mut t = Table::new(&["x"]);
        t.push("a", vec![0.5.into()]);
        let mut r = ExperimentReport::new("t", serde_json::json!({"k": 1}), t);
        r.plot("p", "<svg/>".into());
        let dir = tempfile::tempdir().unwrap();
        r.write(dir.path()).unwrap();
        let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
        assert_eq!(csv, "section,x\na,0.5\n");
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(json["config"]["k"], 1);
        assert!(dir.path().join("plots/p.svg").exists());
    }
}
