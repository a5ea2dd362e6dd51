//! Filter-style feature selection and classification benchmarks for nominal
//! survey data.
//!
//! The pipeline mirrors a classic data-mining workflow: load a nominal table
//! with a designated class variable, score every attribute with one of six
//! filter methods, rank the attributes, then measure how well Naive Bayes and
//! a Random Forest classify the class from the top-`k` attributes under
//! stratified cross-validation, for increasing `k`.
//!
//! Modules, bottom-up:
//!
//! - [`data`]: nominal variables, schemas, the column-oriented [`DataTable`] and CSV I/O.
//! - [`stats`]: contingency tables, entropy, conditional entropy, symmetrical uncertainty.
//! - [`scoring`]: information gain, gain ratio, Gini decrease, chi-square, ReliefF, FCBF and ranking.
//! - [`classifiers`]: categorical Naive Bayes, multiway Gini trees and a bagged forest.
//! - [`evaluation`]: stratified folds, cross-validation and AUC / CA / P / R / F1.
//! - [`sweep`]: the top-`k` sweep over scorers and classifiers, CSV and SVG reports.
//! - [`synth`]: a seeded generator with planted informative attributes, and naive
//!   reference implementations of the scorers in [`oracle`].
//! - [`cli`]: the `fsbench` command line.

pub mod classifiers;
pub mod cli;
pub mod data;
mod error;
pub mod evaluation;
pub mod exec;
pub mod oracle;
pub mod rng;
pub mod scoring;
pub mod stats;
pub mod sweep;
pub mod synth;

pub use data::{DataTable, MissingPolicy, NominalVariable, Schema, MISSING};
pub use error::{Error, Result};
pub use exec::Execution;

/// Version string embedded in every report this crate writes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
