//! Acceptance suite and lemma report for `laguerre-edge`.
//!
//! Thresholds come from a single JSON manifest, embedded by default and
//! replaceable at run time.

pub mod acceptance;
pub mod report;
pub mod tolerances;

pub use acceptance::{run_all, run_criterion, CriterionReport, CRITERIA};
pub use report::{lemma_report, LemmaReport};
pub use tolerances::Tolerances;
