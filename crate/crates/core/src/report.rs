//! Check records and reports shared by the verification suites.

use serde::{Deserialize, Serialize};

/// One verified identity or inequality. `pass` is exactly
/// `residual <= tol` (false for non-finite residuals).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check_id: String,
    /// Name of the identity or inequality being verified.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn build(suite: &str, id: &str, anchor: &str, lhs: f64, rhs: f64, residual: f64, tol: f64) -> Self {
        Self {
            suite: suite.into(),
            check_id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            tol,
            pass: residual.is_finite() && residual <= tol,
        }
    }

    /// `lhs = rhs` with absolute residual.
    pub fn equality(suite: &str, id: &str, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(suite, id, anchor, lhs, rhs, (lhs - rhs).abs(), tol)
    }

    /// `lhs = rhs` with residual relative to `max(|rhs|, floor)`.
    pub fn relative(suite: &str, id: &str, anchor: &str, lhs: f64, rhs: f64, floor: f64, tol: f64) -> Self {
        let scale = rhs.abs().max(floor);
        Self::build(suite, id, anchor, lhs, rhs, (lhs - rhs).abs() / scale, tol)
    }

    /// `lhs <= rhs`; the residual is the violation `max(0, lhs - rhs)`.
    pub fn upper_bound(suite: &str, id: &str, anchor: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = if lhs.is_nan() || rhs.is_nan() { f64::NAN } else { (lhs - rhs).max(0.0) };
        Self::build(suite, id, anchor, lhs, rhs, residual, tol)
    }

    /// A quantity that must itself be at most `tol` (reported as `lhs`, with `rhs = 0`).
    pub fn small(suite: &str, id: &str, anchor: &str, value: f64, tol: f64) -> Self {
        Self::build(suite, id, anchor, value, 0.0, value.abs(), tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    /// Wall-clock time; only filled on request so reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn new(suite: &str, seed: u64, records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            suite: suite.into(),
            seed,
            summary: Summary {
                total: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
            runtime_ms: None,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub const CSV_HEADER: &'static str = "suite,check_id,anchor,lhs,rhs,residual,tol,pass";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{:e},{:e},{:e},{:e},{}\n",
                csv_field(&r.suite),
                csv_field(&r.check_id),
                csv_field(&r.anchor),
                r.lhs,
                r.rhs,
                r.residual,
                r.tol,
                r.pass
            ));
        }
        s
    }

    /// Concatenates the records of several reports under a combined name.
    pub fn merge(name: &str, seed: u64, reports: &[Report]) -> Report {
        let records = reports.iter().flat_map(|r| r.records.iter().cloned()).collect();
        Report::new(name, seed, records)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_residual_within_tolerance() {
        let r = CheckRecord::equality("s", "c", "a", 1.0, 1.0 + 1e-10, 1e-9);
        assert!(r.pass);
        let r = CheckRecord::equality("s", "c", "a", 1.0, 1.1, 0.0);
        assert!(!r.pass);
        let r = CheckRecord::upper_bound("s", "c", "a", 0.5, 1.0, 0.0);
        assert!(r.pass && r.residual == 0.0);
        let r = CheckRecord::small("s", "c", "a", f64::NAN, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let rep = Report::new("s", 1, vec![CheckRecord::equality("s", "c,1", "a", 1.0, 2.0, 0.5)]);
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), Report::CSV_HEADER);
        assert!(lines.next().unwrap().starts_with("s,\"c,1\",a,"));
        assert_eq!(rep.summary.failed, 1);
    }
}
