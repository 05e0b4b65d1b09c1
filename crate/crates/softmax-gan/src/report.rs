//! Check records shared by the verification suites and the CLI reports.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One named check: `pass` is true iff `value` is finite and does not
/// exceed `tolerance`. Checks are always phrased so that smaller is
/// better (discrepancies, residuals, negated margins).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Serialize checks as a JSON array of `{name, value, tolerance, pass}`.
pub fn write_report(path: &Path, checks: &[Check]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, checks)?;
    writeln!(file)?;
    Ok(())
}

/// One `PASS`/`FAIL` line per check, for terminal output.
pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{status}  {:width$}  value={:<12.3e} tolerance={:.3e}\n",
            c.name, c.value, c.tolerance,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_requires_finite_value_within_tolerance() {
        assert!(Check::within("a", 0.5, 1.0).pass);
        assert!(Check::within("b", 1.0, 1.0).pass);
        assert!(!Check::within("c", 1.1, 1.0).pass);
        assert!(!Check::within("d", f64::NAN, 1.0).pass);
        assert!(!Check::within("e", f64::INFINITY, f64::INFINITY).pass);
    }

    #[test]
    fn json_round_trip() {
        let checks = vec![Check::within("alpha", 1e-9, 1e-6)];
        let text = serde_json::to_string(&checks).unwrap();
        let back: Vec<Check> = serde_json::from_str(&text).unwrap();
        assert_eq!(back[0].name, "alpha");
        assert!(back[0].pass);
    }

    #[test]
    fn table_marks_failures() {
        let checks = vec![
            Check::within("good", 0.0, 1.0),
            Check::within("bad", 2.0, 1.0),
        ];
        let table = render_table(&checks);
        assert!(table.contains("PASS  good"));
        assert!(table.contains("FAIL  bad"));
    }
}
