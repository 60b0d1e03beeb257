//! Heart beat annotation for dual-channel (ECG + arterial blood pressure)
//! records by particle filtering over a dynamic Bayesian network.
//!
//! The pipeline is: raw signals → [`features`] (stand-in detectors, heart
//! rate, signal quality, windowing) → [`filter`] (sequential importance
//! resampling over the [`model`]) → beat annotations, which [`scoring`]
//! compares against a reference. [`synth`] produces records with known
//! ground truth and [`io`] holds the plain-text file formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod filter;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod scoring;
pub mod synth;

pub use error::{Error, Result};
pub use features::RawAnnotations;
