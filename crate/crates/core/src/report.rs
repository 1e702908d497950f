//! Pass/fail summaries shared by the verification operations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    pub fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// Outcome of one named check: the worst value seen, where, and the
/// tolerance it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub check: String,
    pub status: Status,
    /// Worst-case value (largest residual, smallest derivative, ...).
    pub worst_value: f64,
    pub worst_location: Option<Complex64>,
    pub tolerance: f64,
    /// Number of items examined.
    pub count: usize,
    pub parameters: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl VerificationSummary {
    /// A summary where smaller is better: PASS iff `worst_value < tolerance`.
    pub fn upper_bound(
        check: impl Into<String>,
        worst_value: f64,
        worst_location: Option<Complex64>,
        tolerance: f64,
        count: usize,
        parameters: serde_json::Value,
    ) -> VerificationSummary {
        VerificationSummary {
            check: check.into(),
            status: Status::from_pass(worst_value < tolerance),
            worst_value,
            worst_location,
            tolerance,
            count,
            parameters,
            detail: None,
        }
    }

    /// A summary where larger is better: PASS iff `worst_value > tolerance`.
    pub fn lower_bound(
        check: impl Into<String>,
        worst_value: f64,
        worst_location: Option<Complex64>,
        tolerance: f64,
        count: usize,
        parameters: serde_json::Value,
    ) -> VerificationSummary {
        VerificationSummary {
            check: check.into(),
            status: Status::from_pass(worst_value > tolerance),
            worst_value,
            worst_location,
            tolerance,
            count,
            parameters,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> VerificationSummary {
        self.detail = Some(detail.into());
        self
    }

    /// Force a FAIL regardless of the numeric comparison, keeping the values.
    pub fn fail(mut self, why: impl Into<String>) -> VerificationSummary {
        self.status = Status::Fail;
        self.detail = Some(why.into());
        self
    }
}

/// Running maximum with its location, for residual sweeps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Worst {
    pub value: f64,
    pub location: Option<Complex64>,
    pub count: usize,
}

impl Worst {
    pub fn max() -> Worst {
        Worst {
            value: 0.0,
            location: None,
            count: 0,
        }
    }

    pub fn min() -> Worst {
        Worst {
            value: f64::INFINITY,
            location: None,
            count: 0,
        }
    }

    pub fn push_max(&mut self, value: f64, at: Complex64) {
        self.count += 1;
        // NaN must win so that a broken evaluation cannot pass
        if value.is_nan() || value > self.value || self.location.is_none() && value >= self.value {
            self.value = value;
            self.location = Some(at);
        }
    }

    pub fn push_min(&mut self, value: f64, at: Complex64) {
        self.count += 1;
        if value.is_nan() || value < self.value {
            self.value = value;
            self.location = Some(at);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        let mut w = Worst::max();
        w.push_max(1e-12, Complex64::new(0.0, 0.0));
        w.push_max(f64::NAN, Complex64::new(1.0, 0.0));
        let s = VerificationSummary::upper_bound("x", w.value, w.location, 1e-9, w.count, serde_json::json!({}));
        assert_eq!(s.status, Status::Fail);
    }

    #[test]
    fn status_serializes_upper_case() {
        assert_eq!(serde_json::to_string(&Status::Pass).unwrap(), "\"PASS\"");
    }
}
