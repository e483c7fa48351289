//! Anomaly detection for sequences of graphs observed over time.
//!
//! The main entry point is [`pipeline::detect`], which turns a sequence of
//! [`GraphSnapshot`]s into per-snapshot anomaly scores: structural features
//! are extracted from every snapshot, per-feature time-series models strip
//! the predictable part, the residuals are robustly projected to two
//! dimensions, and a fitted tail over the kernel density of that embedding
//! turns low-density time points into calibrated scores.
//!
//! The [`generators`] and [`experiments`] modules reproduce the synthetic
//! benchmark the detector was validated on, and [`baselines`] holds the
//! comparison methods scored alongside it.

pub mod arima;
pub mod baselines;
pub mod eval;
pub mod evt;
pub mod experiments;
pub mod features;
pub mod generators;
pub mod graph;
pub mod optim;
pub mod pipeline;
pub mod residual;

pub use arima::{ArimaModel, ArimaOrder};
pub use eval::{auc, boxplot_stats, BoxplotStats};
pub use evt::GpdFit;
pub use experiments::{run_experiment, ExperimentResult, Method};
pub use features::{FeatureMatrix, FeatureVector, FEATURE_NAMES};
pub use generators::{ExperimentId, LabeledSequence, SequenceSpec};
pub use graph::GraphSnapshot;
pub use pipeline::{detect, DetectConfig, Detection, DetectError};
