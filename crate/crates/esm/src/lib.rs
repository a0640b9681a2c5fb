//! Datasets, model files, cross-validation and the command line for the
//! ellipsoidal separation classifier in [`esm_core`].

pub mod cli;
pub mod data;
mod error;
pub mod eval;
pub mod model_file;

pub use error::{EsmError, Result};
