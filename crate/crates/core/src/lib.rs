//! Monotone metric tensors, gradient vector fields and group actions on the
//! space of faithful qubit states.
//!
//! The crate evaluates the Petz family of monotone metrics on the Bloch ball,
//! builds the fundamental (unitary) and gradient vector fields, checks the
//! commutator relations that single out metrics admitting a group action,
//! and integrates the corresponding flows against the explicit actions of
//! `SL(2, C)` and the cotangent group `T*SU(2)`.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod flow_engine;
pub mod group_actions;
pub mod metric_family;
pub mod ode_classifier;
pub mod seeds;
mod serde_helpers;
pub mod state_space;
pub mod vector_fields;
pub mod verify;

pub use error::{Error, Result};
