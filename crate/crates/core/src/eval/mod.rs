//! Scoring of system token lines against gold token lines.

mod align;
mod metrics;
mod oracle;
mod report;

pub use align::{align, align_files, align_with, AlignEvent, AlignMode, AlignmentCounts};
pub use metrics::{
    accuracy_from, consistency_check, errors_fixed, f1_score, metrics, Finding, MetricsRow, ACCURACY_TOLERANCE,
};
pub use oracle::align_oracle;
pub use report::{compare_rows, render, Format, COLUMNS};
