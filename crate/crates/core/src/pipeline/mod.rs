// SPDX-License-Identifier: MIT OR Apache-2.0

//! Forecaster pools, meta-learning inputs, experiment runs and report tables.

pub mod experiment;
pub mod inputs;
pub mod pools;
pub mod tables;

pub use experiment::{
    boundary, detect_decreasing_pattern, evaluate_recommendations, label_distribution,
    outperformance, outperformance_table, run_evaluation, run_experiment, run_features, run_meta,
    ExperimentConfig, ExperimentReport, IndividualRow, LabelShare, LearnerResult, PatternRow,
    VariantReport,
};
pub use inputs::{build_inputs, InputVariant, Reduction, ReductionConfig};
pub use pools::{build_pools, PoolId, PoolSpec, BASIC_POOL};
pub use tables::{report_tables, write_report, Table};
