//! Zero-shot audio classification over precomputed embeddings.
//!
//! The crate trains a factorized nonlinear projection that maps class-level
//! semantic embeddings (image, text, hybrid, or acoustic class means) into
//! acoustic embedding space, scores audio instances against candidate classes
//! by dot-product compatibility, and classifies by argmax. Classes seen in
//! training and classes used at test time are always disjoint; accuracy is
//! reported per trial and aggregated as mean and sample standard deviation.
//!
//! Pipeline stages, each its own module:
//!
//! - [`embeddings`]: instance tables, class-level aggregation, hybrid
//!   concatenation, optional L2 normalization.
//! - [`ontology`]: label taxonomy, mutual-class intersection by MID,
//!   hierarchy pruning, per-class sample caps.
//! - [`model`]: the projection `H(phi) = V^T t(U^T phi)`, compatibility
//!   scoring, and argmax classification.
//! - [`training`]: minibatch SGD on a seen-class classification loss with
//!   checkpoint selection on validation classes.
//! - [`partitions`]: the three seeded class-split protocols (random,
//!   within-category, across-category).
//! - [`evaluation`]: top-1 accuracy, trial aggregation, and the multi-trial
//!   multi-modality experiment driver.
//! - [`synth`]: synthetic embedding worlds with controllable cross-modal
//!   alignment, used by the acceptance suite.
//!
//! Everything is deterministic given the seeds carried in configs and specs;
//! collections iterate in sorted order so repeated runs are bit-identical.
//! The crate is `no_std` (with `alloc`) so the numeric core can be embedded;
//! file formats and parallel trial execution live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod model;
pub mod ontology;
pub mod partitions;
pub mod rng;
pub mod synth;
pub mod training;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
