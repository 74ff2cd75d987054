use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A ladder whose limiting behaviour is described by the report's `trend` label.
    Trend,
    /// The check's hypothesis does not hold for this domain.
    Skipped,
    /// The check itself crashed.
    Error,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Trend => "trend",
            Verdict::Skipped => "skipped",
            Verdict::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub param: f64,
    pub value: f64,
}

/// A named scalar result, optionally compared against its own tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

/// `attempted = evaluated + guard_trips + margin_exclusions`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCounts {
    pub attempted: usize,
    pub evaluated: usize,
    pub guard_trips: usize,
    pub margin_exclusions: usize,
}

impl PointCounts {
    pub fn is_balanced(&self) -> bool {
        self.attempted == self.evaluated + self.guard_trips + self.margin_exclusions
    }

    pub fn merge(&mut self, other: PointCounts) {
        self.attempted += other.attempted;
        self.evaluated += other.evaluated;
        self.guard_trips += other.guard_trips;
        self.margin_exclusions += other.margin_exclusions;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub domain: String,
    pub anchor: [f64; 2],
    pub verdict: Verdict,
    /// Limiting behaviour of a trend ladder, e.g. `continuous` or `divergent`.
    pub trend: Option<String>,
    /// Outcome anticipated for this domain, in the same vocabulary as
    /// `verdict` (or `trend:<label>`); `None` when nothing is claimed.
    pub expected: Option<String>,
    pub as_expected: bool,
    pub tolerance: f64,
    pub residual_max: f64,
    pub residual_mean: f64,
    pub residual_argmax: [f64; 2],
    pub ladder: Vec<LadderPoint>,
    pub findings: Vec<Finding>,
    pub points: PointCounts,
    pub source: String,
    pub citation: String,
    pub notes: Vec<String>,
    pub runtime_ms: Option<f64>,
}

impl CheckReport {
    pub fn new(check_id: &str, domain: &str, anchor: C, source: String, citation: &str, tolerance: f64) -> Self {
        CheckReport {
            check_id: check_id.to_string(),
            domain: domain.to_string(),
            anchor: [anchor.re, anchor.im],
            verdict: Verdict::Pass,
            trend: None,
            expected: None,
            as_expected: true,
            tolerance,
            residual_max: 0.0,
            residual_mean: 0.0,
            residual_argmax: [anchor.re, anchor.im],
            ladder: Vec::new(),
            findings: Vec::new(),
            points: PointCounts::default(),
            source,
            citation: citation.to_string(),
            notes: Vec::new(),
            runtime_ms: None,
        }
    }

    pub fn finding(&mut self, name: &str, value: f64, tolerance: Option<f64>, pass: Option<bool>) {
        self.findings.push(Finding {
            name: name.to_string(),
            value,
            tolerance,
            pass,
        });
    }

    pub fn get(&self, name: &str) -> Option<&Finding> {
        self.findings.iter().find(|f| f.name == name)
    }

    /// `true` when every finding with a pass flag passed.
    pub fn findings_pass(&self) -> bool {
        self.findings.iter().all(|f| f.pass != Some(false))
    }

    pub fn set_residuals(&mut self, r: &Residuals) {
        self.residual_max = r.max;
        self.residual_mean = r.mean();
        self.residual_argmax = [r.argmax.re, r.argmax.im];
    }

    /// The `verdict` or `trend:<label>` string compared against `expected`.
    pub fn outcome(&self) -> String {
        match (&self.verdict, &self.trend) {
            (Verdict::Trend, Some(t)) => format!("trend:{t}"),
            (v, _) => v.as_str().to_string(),
        }
    }

    /// Fills `expected` and `as_expected`. Without an expectation any outcome
    /// but `fail` and `error` counts as expected.
    pub fn expect(&mut self, expected: Option<String>) {
        self.as_expected = match &expected {
            Some(e) => *e == self.outcome(),
            None => !matches!(self.verdict, Verdict::Fail | Verdict::Error),
        };
        self.expected = expected;
    }

    pub fn error(check_id: &str, domain: &str, anchor: C, message: String) -> Self {
        let mut r = CheckReport::new(check_id, domain, anchor, String::new(), "", 0.0);
        r.verdict = Verdict::Error;
        r.as_expected = false;
        r.notes.push(message);
        r
    }
}

/// Running max/mean of a residual field with the location of the max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub max: f64,
    pub sum: f64,
    pub count: usize,
    pub argmax: C,
}

impl Default for Residuals {
    fn default() -> Self {
        Residuals {
            max: 0.0,
            sum: 0.0,
            count: 0,
            argmax: C::new(0.0, 0.0),
        }
    }
}

impl Residuals {
    pub fn push(&mut self, z: C, r: f64) {
        if self.count == 0 || r > self.max || r.is_nan() {
            self.max = r;
            self.argmax = z;
        }
        self.sum += r;
        self.count += 1;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_matching() {
        let mut r = CheckReport::new("x", "d", C::new(0.0, 0.0), "s".into(), "c", 1e-7);
        r.verdict = Verdict::Trend;
        r.trend = Some("divergent".into());
        r.expect(Some("trend:divergent".into()));
        assert!(r.as_expected);
        r.expect(Some("pass".into()));
        assert!(!r.as_expected);
        r.verdict = Verdict::Fail;
        r.expect(None);
        assert!(!r.as_expected);
    }

    #[test]
    fn residual_tracking() {
        let mut res = Residuals::default();
        res.push(C::new(1.0, 0.0), 2.0);
        res.push(C::new(2.0, 0.0), 5.0);
        res.push(C::new(3.0, 0.0), 1.0);
        assert_eq!(res.max, 5.0);
        assert_eq!(res.argmax, C::new(2.0, 0.0));
        assert!((res.mean() - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn report_json_has_schema_keys() {
        let r = CheckReport::new("suita", "disc(1)", C::new(0.5, 0.0), "s".into(), "c", 1e-7);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "check_id",
            "domain",
            "anchor",
            "verdict",
            "tolerance",
            "residual_max",
            "residual_argmax",
            "ladder",
            "citation",
            "runtime_ms",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "pass");
        let back: CheckReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
