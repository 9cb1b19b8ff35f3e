//! Topological entropy, kneading data, and parameter-space deformations for
//! real multimodal interval maps: polynomial families, the sawtooth S, and
//! stunted sawtooth maps T_zeta with exact rational arithmetic.
//!
//! The main pipelines:
//!
//! * lap-number census of piecewise-affine maps with certified entropy
//!   brackets ([`entropy`]);
//! * kneading invariants of polynomials and their realization as stunted
//!   sawtooth maps ([`symbolic`], [`correspondence`]);
//! * Markov transition graphs, rome reduction, and constant-slope models
//!   ([`markov`], [`rome`], [`slope_model`]);
//! * entropy-monotone parameter deformations on the stunted sawtooth space
//!   ([`deformations`]).

pub mod census;
pub mod correspondence;
pub mod cycles;
pub mod descr;
pub mod deformations;
pub mod entropy;
pub mod error;
pub mod maps;
pub mod markov;
pub mod rat;
pub mod rome;
pub mod slope_model;
pub mod symbolic;
pub mod verify;

pub use error::{CoreError, Result};
pub use rat::Q;
