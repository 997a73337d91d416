//! Verification reports: one row per identity instance, written as CSV with a
//! JSON summary.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub anchor: String,
    pub params: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    pub micros: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub context: String,
    pub rows: Vec<ReportRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub context: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub suites: Vec<(String, usize, usize)>,
    pub failures: Vec<ReportRow>,
    pub config: serde_json::Value,
}

/// Runs `f` and returns its value with the elapsed microseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_micros() as u64)
}

impl VerificationReport {
    pub fn new(context: impl Into<String>) -> Self {
        VerificationReport { context: context.into(), rows: Vec::new() }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn push(
        &mut self,
        suite: &str,
        anchor: &str,
        params: impl Into<String>,
        lhs: impl Display,
        rhs: impl Display,
        pass: bool,
        micros: u64,
    ) {
        self.rows.push(ReportRow {
            suite: suite.into(),
            anchor: anchor.into(),
            params: params.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass,
            micros,
        });
    }

    /// Row comparing two values with `==`.
    pub fn check<T: Display + PartialEq>(&mut self, suite: &str, anchor: &str, params: impl Into<String>, lhs: T, rhs: T, micros: u64) -> bool {
        let pass = lhs == rhs;
        self.push(suite, anchor, params, lhs, rhs, pass, micros);
        pass
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn suite(&self, name: &str) -> impl Iterator<Item = &ReportRow> + '_ {
        let name = name.to_string();
        self.rows.iter().filter(move |r| r.suite == name)
    }

    /// Same rows with timings zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> VerificationReport {
        let mut r = self.clone();
        r.rows.iter_mut().for_each(|row| row.micros = 0);
        r
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wr.serialize(row).map_err(|e| std::io::Error::other(e.to_string()))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn summary(&self, config: serde_json::Value) -> Summary {
        let mut suites: Vec<(String, usize, usize)> = Vec::new();
        for r in &self.rows {
            match suites.iter_mut().find(|s| s.0 == r.suite) {
                Some(s) => {
                    s.1 += 1;
                    s.2 += r.pass as usize;
                }
                None => suites.push((r.suite.clone(), 1, r.pass as usize)),
            }
        }
        let passed = self.rows.iter().filter(|r| r.pass).count();
        Summary {
            context: self.context.clone(),
            total: self.rows.len(),
            passed,
            failed: self.rows.len() - passed,
            suites,
            failures: self.failures().cloned().collect(),
            config,
        }
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write_files(&self, dir: &Path, stem: &str, config: serde_json::Value) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::fs::File::create(dir.join(format!("{stem}.csv")))?)?;
        let json = serde_json::to_string_pretty(&self.summary(config))?;
        std::fs::write(dir.join(format!("{stem}.json")), json)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_quotes() {
        let mut r = VerificationReport::new("t");
        r.check("reg", "sum", "n=2, q=2", "15", "15", 3);
        r.push("reg", "sum", "x", "1/2", "1", false, 0);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("suite,anchor,params,lhs,rhs,pass,micros\n"));
        assert!(s.contains("\"n=2, q=2\""));
        let sum = r.summary(serde_json::json!({}));
        assert_eq!((sum.total, sum.passed, sum.failed), (2, 1, 1));
    }
}
