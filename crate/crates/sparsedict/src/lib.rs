//! Sparse-representation toolkit: learns compact classification
//! dictionaries by active selection over random probe dictionaries,
//! classifies by class-wise residual decoding, and benchmarks the learned
//! dictionaries against clustering-based and whole-training-data baselines
//! under cross-validation.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod chart;
pub mod classify;
pub mod data;
pub mod dictionaries;
pub mod error;
pub mod eval;
pub mod lasso;
mod linalg;
pub mod manifest;

pub use classify::{class_residuals, src_classify, ClassResiduals, DictMethod, Dictionary};
pub use data::{
    load_csv, make_folds, pca_fit, pca_project, pca_project_dataset, standardize, write_csv,
    ColumnSpec, CsvSchema, Dataset, FoldPlan, PcaModel, Scaler,
};
pub use dictionaries::{
    adl_learn, load_dictionary, ngas_dictionary, quantization_error, random_dictionary,
    save_dictionary, som_dictionary, wd_dictionary, AdlConfig, ClassifErrorNorm, ClusterConfig,
    ErrorLedger,
};
pub use error::{Error, Result};
pub use eval::{
    aggregate_report, compare_methods, run_experiment, Cell, EvaluationReport, ExperimentConfig,
};
pub use lasso::{
    kkt_residual, lasso_objective, reconstruction_error, solve_lasso, LassoConfig, SparseCode,
};
pub use manifest::RunManifest;
