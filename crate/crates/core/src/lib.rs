//! Ellipsoidal separation of two labelled point sets.
//!
//! The crate trains an ellipsoid that every segment between a positive and a
//! negative training point should cross, while the training points themselves
//! stay outside of it. New points are classified by counting which training
//! segments towards them cross the ellipsoid; points that are not clearly
//! separated from one class more than from the other are rejected.
//!
//! Everything here is pure computation on owned buffers: the crate is
//! `no_std` and only needs `alloc`. Dataset IO, model files, cross
//! validation and the command line live in the `esm` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classifier;
mod error;
pub mod geometry;
pub mod metrics;
pub mod symmat;
pub mod training;

pub use classifier::{ClassScores, Label, Prediction, ReducedSets, TrainedModel};
pub use error::{Error, Result};
pub use geometry::{CenteredEllipsoid, HomEllipsoid, SegmentMin};
pub use metrics::RejectionScores;
pub use symmat::{EigDecomp, SymMat};
pub use training::{fit, DualStep, FitOutput, Hyperparams, SdpMode};
