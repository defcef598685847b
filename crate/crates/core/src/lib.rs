//! Fairgroup construction for binary classifiers.
//!
//! Given a trained classifier and a dataset with one binary protected
//! feature, the pipeline ranks points by weighted feature importance,
//! clusters them with k-medians under the L1 distance, matches protected and
//! unprotected points inside each cluster into fixed-ratio fairgroups, and
//! labels every fairgroup through a randomly drawn representative.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, CSV ingestion and
//! the command-line front end live in the `fairgroup` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classifiers;
pub mod clustering;
pub mod dataset;
pub mod fairgroups;
pub mod importance;
mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod synth;

pub use classifiers::{train, ClassifierError, LinearModel, ModelKind, TrainConfig};
pub use clustering::{kmedians, l1_distance, Clustering, ClusteringError};
pub use dataset::{Dataset, DatasetError, FeatureSpec, Kind, Role};
pub use fairgroups::{
    build_fairgroups, plan_balance, reduce_ratio, BalanceRatio, Fairgroup, FairgroupError,
    FairgroupPlan,
};
pub use importance::{build_importance, pearson, ImportanceError, ImportanceMatrix};
pub use metrics::balance;
pub use pipeline::{
    evaluate, fair_classify, run_experiment, ExperimentConfig, ExperimentOutcome,
    FairPrediction, FairnessReport, PipelineError, PropagationMode, Provenance,
};
pub use synth::{synth_acs, SynthConfig, SynthEffects, SynthError};
