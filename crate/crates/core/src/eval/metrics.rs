use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::align::AlignmentCounts;

/// Largest accepted gap between a row's accuracy and the one implied by its precision and recall.
pub const ACCURACY_TOLERANCE: f64 = 0.0005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub name: String,
    pub counts: AlignmentCounts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// Set when the row is compared against a baseline.
    pub errors_fixed_pct: Option<f64>,
    pub time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn ratio(num: u64, den: u64, what: &str, warnings: &mut Vec<String>) -> f64 {
    if den == 0 {
        warnings.push(format!("{what}: zero denominator, reported as 0"));
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Accuracy implied by precision and recall when there are no true negatives:
/// `TP / (TP + FP + FN)` rewritten as `1 / (1/p + 1/r - 1)`.
pub fn accuracy_from(precision: f64, recall: f64) -> f64 {
    if precision <= 0.0 || recall <= 0.0 {
        0.0
    } else {
        1.0 / (1.0 / precision + 1.0 / recall - 1.0)
    }
}

pub fn metrics(counts: AlignmentCounts, name: &str, time_s: Option<f64>) -> MetricsRow {
    let mut warnings = Vec::new();
    let c = counts;
    let precision = ratio(c.tp, c.tp + c.fp, "precision", &mut warnings);
    let recall = ratio(c.tp, c.tp + c.fn_, "recall", &mut warnings);
    let accuracy = ratio(c.tn + c.tp, c.tp + c.tn + c.fn_ + c.fp, "accuracy", &mut warnings);
    MetricsRow {
        name: name.to_string(),
        counts,
        precision,
        recall,
        f1: f1_score(precision, recall),
        accuracy,
        errors_fixed_pct: None,
        time_s,
        warnings,
    }
}

/// Percentage of the baseline's errors removed. Negative when `errors` exceeds the baseline.
pub fn errors_fixed(baseline_errors: u64, errors: u64) -> Result<f64> {
    if baseline_errors == 0 {
        return Err(Error::UndefinedBaseline);
    }
    Ok(100.0 * (baseline_errors as f64 - errors as f64) / baseline_errors as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub field: String,
    pub reported: f64,
    pub expected: f64,
}

impl Finding {
    pub fn deviation(&self) -> f64 {
        (self.reported - self.expected).abs()
    }
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: reported {:.4}, implied {:.4} (off by {:.4})",
            self.field,
            self.reported,
            self.expected,
            self.deviation()
        )
    }
}

/// Checks that the row's accuracy is the one its precision and recall imply with TN = 0.
pub fn consistency_check(row: &MetricsRow) -> Vec<Finding> {
    let expected = accuracy_from(row.precision, row.recall);
    let finding = Finding {
        field: "accuracy".into(),
        reported: row.accuracy,
        expected,
    };
    if finding.deviation() > ACCURACY_TOLERANCE {
        vec![finding]
    } else {
        Vec::new()
    }
}
