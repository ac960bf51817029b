use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::sampled::fmt_f64;

/// One line of `report.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub case: String,
    pub metric: String,
    pub value: f64,
    pub reference: Option<f64>,
    pub abs_error: Option<f64>,
    pub std_error: Option<f64>,
    /// `None` for informational rows.
    pub pass: Option<bool>,
}

/// A named CSV payload written next to the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Artifact {
    pub name: String,
    #[serde(skip)]
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    pub artifacts: Vec<Artifact>,
}

impl ExperimentReport {
    pub fn new(command: &str, seed: u64) -> Self {
        ExperimentReport {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            rows: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    /// Informational value.
    pub fn info(&mut self, case: &str, metric: &str, value: f64) {
        self.push(case, metric, value, None, None, None);
    }

    /// `pass` is recorded as given; `reference` and `abs_error` are optional.
    pub fn push(&mut self, case: &str, metric: &str, value: f64, reference: Option<f64>, std_error: Option<f64>, pass: Option<bool>) {
        self.rows.push(ReportRow {
            case: case.to_string(),
            metric: metric.to_string(),
            value,
            reference,
            abs_error: reference.map(|r| (value - r).abs()),
            std_error,
            pass,
        });
    }

    /// Pass iff `|value − reference| ≤ tol`.
    pub fn check_abs(&mut self, case: &str, metric: &str, value: f64, reference: f64, tol: f64) -> bool {
        let ok = (value - reference).abs() <= tol;
        self.push(case, metric, value, Some(reference), None, Some(ok));
        ok
    }

    /// Pass iff `|value − reference| ≤ k·se`.
    pub fn check_se(&mut self, case: &str, metric: &str, value: f64, reference: f64, se: f64, k: f64) -> bool {
        let ok = (value - reference).abs() <= k * se;
        self.push(case, metric, value, Some(reference), Some(se), Some(ok));
        ok
    }

    pub fn check(&mut self, case: &str, metric: &str, value: f64, pass: bool) -> bool {
        self.push(case, metric, value, None, None, Some(pass));
        pass
    }

    pub fn artifact(&mut self, name: &str, contents: String) {
        self.artifacts.push(Artifact { name: name.to_string(), contents });
    }

    /// Conjunction of every declared check.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    /// `case,metric,value,reference,abs_error,std_error,pass`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["case", "metric", "value", "reference", "abs_error", "std_error", "pass"])?;
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for r in &self.rows {
            let pass = match r.pass {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            w.write_record([
                r.case.clone(),
                r.metric.clone(),
                fmt_f64(r.value),
                opt(r.reference),
                opt(r.abs_error),
                opt(r.std_error),
                pass.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Stamp<'a> {
            command: &'a str,
            version: &'a str,
            seed: u64,
            passed: bool,
            rows: &'a [ReportRow],
            artifacts: Vec<&'a str>,
        }
        let stamp = Stamp {
            command: &self.command,
            version: &self.version,
            seed: self.seed,
            passed: self.passed(),
            rows: &self.rows,
            artifacts: self.artifacts.iter().map(|a| a.name.as_str()).collect(),
        };
        Ok(serde_json::to_string_pretty(&stamp)?)
    }

    /// Write `report.csv`, `report.json` and every artifact into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.to_csv()?)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        for a in &self.artifacts {
            fs::write(dir.join(&a.name), &a.contents)?;
        }
        Ok(())
    }
}

/// Render rows of floats as CSV with a header.
pub(crate) fn csv_table<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.into_iter().map(fmt_f64))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
}

/// Like [`csv_table`] with a leading text column.
pub(crate) fn labeled_csv_table<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = (String, Vec<f64>)>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for (label, r) in rows {
        w.write_record(std::iter::once(label).chain(r.into_iter().map(fmt_f64)))?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_pass_logic() {
        let mut r = ExperimentReport::new("x", 3);
        r.info("a", "m", 1.5);
        assert!(r.check_abs("a", "n", 1.0, 1.0 + 1e-13, 1e-12));
        assert!(r.passed());
        assert!(!r.check_se("b", "z", 1.0, 0.0, 0.1, 3.0));
        assert!(!r.passed());
        let csv = r.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "case,metric,value,reference,abs_error,std_error,pass");
        assert_eq!(lines[1], "a,m,1.5,,,,");
        assert!(lines[3].starts_with("b,z,1.0,0.0,1.0,0.1,false"));
        assert!(r.to_json().unwrap().contains("\"passed\": false"));
    }
}
