//! Conformal selection with data-driven model choice and full-data training.

pub mod cli;
pub mod error;
pub mod models;
pub mod mtest;
pub mod problem;
pub mod procedures;
pub mod pvalues;
pub mod rng;
pub mod scores;
pub mod simlab;

pub use error::{Error, Result};
pub use models::{FittedModel, Predictor, Trainer, TrainerSpec};
pub use mtest::{bh, optcs_select, PruneMode, SelectionOutcome};
pub use problem::{DataSplit, LabeledSample, Problem, TestSample};
pub use procedures::{run_procedure, ProcedureKind, ProcedureSpec, SepMode};
pub use pvalues::conformal_pvalue;
pub use scores::{Candidate, ScoreConfig, ScoreFunction, ScoreKind, ScoreMatrix};
