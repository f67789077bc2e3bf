//! Verification reports shared by every suite.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub status: Status,
    /// Numeric residual, if the check is numeric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// True for exact checks whose residual is identically zero.
    pub exact_zero: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Known misprint in the source formula that this check exercises.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub erratum: Option<String>,
}

impl Check {
    pub fn new(id: impl Into<String>, description: impl Into<String>, status: Status) -> Self {
        Check {
            id: id.into(),
            description: description.into(),
            status,
            residual: None,
            exact_zero: false,
            witness: None,
            erratum: None,
        }
    }

    /// Exact check: `witness` is the rendered nonzero residual, if any.
    pub fn exact(id: impl Into<String>, description: impl Into<String>, witness: Option<String>) -> Self {
        let mut c = Check::new(id, description, if witness.is_none() { Status::Pass } else { Status::Fail });
        c.exact_zero = witness.is_none();
        c.witness = witness;
        c
    }

    /// Numeric check passing when `residual <= tol`.
    pub fn numeric(id: impl Into<String>, description: impl Into<String>, residual: f64, tol: f64) -> Self {
        let ok = residual.is_finite() && residual <= tol;
        let mut c = Check::new(id, description, if ok { Status::Pass } else { Status::Fail });
        c.residual = Some(residual);
        c
    }

    pub fn skip(id: impl Into<String>, description: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut c = Check::new(id, description, Status::Skip);
        c.witness = Some(reason.into());
        c
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn with_erratum(mut self, e: impl Into<String>) -> Self {
        self.erratum = Some(e.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Per-block norms with a least-squares log-slope.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub label: String,
    pub per_block_norms: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    pub target_slope: f64,
    pub rel_slope_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub decay: Vec<DecayReport>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            config: BTreeMap::new(),
            checks: Vec::new(),
            decay: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn with_config(mut self, k: impl Into<String>, v: impl ToString) -> Self {
        self.config.insert(k.into(), v.to_string());
        self
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Append another report's checks, prefixing their ids.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.id = format!("{prefix}{}", c.id);
            self.checks.push(c);
        }
        self.decay.extend(other.decay);
        for (k, v) in other.config {
            self.config.entry(k).or_insert(v);
        }
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn failed_ids(&self) -> Vec<String> {
        self.failed().map(|c| c.id.clone()).collect()
    }

    /// Failures not tagged as a known erratum.
    pub fn unexpected_failures(&self) -> Vec<&Check> {
        self.failed().filter(|c| c.erratum.is_none()).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.failed().next().is_none()
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let n = |s| self.checks.iter().filter(|c| c.status == s).count();
        (n(Status::Pass), n(Status::Fail), n(Status::Skip))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let (p, f, k) = self.counts();
        let _ = writeln!(s, "suite {}: {p} pass, {f} fail, {k} skip", self.suite);
        for c in &self.checks {
            let _ = write!(s, "{:<4} {}  {}", c.status.as_str().to_uppercase(), c.id, c.description);
            if let Some(r) = c.residual {
                let _ = write!(s, "  residual={r:.3e}");
            }
            if let Some(w) = &c.witness {
                let _ = write!(s, "  [{w}]");
            }
            if let Some(e) = &c.erratum {
                let _ = write!(s, "  erratum: {e}");
            }
            s.push('\n');
        }
        for d in &self.decay {
            let _ = writeln!(
                s,
                "decay {}: slope {:.4} target {:.4} rel.err {:.3}",
                d.label, d.fitted_slope, d.target_slope, d.rel_slope_error
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_and_counts() {
        let mut r = Report::new("t");
        r.push(Check::exact("a", "zero", None));
        r.push(Check::exact("b", "nonzero", Some("q".into())).with_erratum("misprint"));
        r.push(Check::numeric("c", "small", 1e-13, 1e-12));
        assert_eq!(r.counts(), (2, 1, 0));
        assert!(!r.all_passed());
        assert!(r.unexpected_failures().is_empty());
        assert_eq!(r.failed_ids(), vec!["b".to_string()]);
    }

    #[test]
    fn json_has_schema_and_lowercase_status() {
        let mut r = Report::new("t");
        r.push(Check::numeric("n", "nan fails", f64::NAN, 1.0));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["checks"][0]["status"], "fail");
    }
}
