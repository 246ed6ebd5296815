//! ROC-space and cost-space analysis of binary scoring classifiers.
//!
//! Scores rank samples: class 0 is the positive class and a sample is
//! predicted positive when its score is at or below the threshold. From a
//! [`ScoredDataset`] the crate builds ROC curves and their convex hull, cost
//! lines, and the cost curves of the optimal, rate-driven, probabilistic and
//! fixed threshold choice methods, with exact areas and the closed forms
//! relating them to AUC and the Brier score.

pub mod cli;
pub mod cost_model;
pub mod curves;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod report;
pub mod roc;
pub mod svg;
pub mod synth;

pub use cost_model::{ConditionKind, CostLine, OperatingCondition, ThresholdChoiceMethod};
pub use curves::{
    brier_curve, brier_score, evenly_spaced_rescore, expected_loss, optimal_cost_curve,
    rate_driven_curve, BrierScore, PiecewiseLinearCurve, Segment, Weight,
};
pub use dataset::{Class, ScoredDataset, ScoredSample, ThresholdInterval};
pub use error::{Error, Result};
pub use exec::Execution;
pub use roc::{auc, auch, roc_curve, RocCurve};
pub use synth::{generate, Family, Fixture, GeneratorSpec};
