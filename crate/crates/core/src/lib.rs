//! Autonomous two-qudit thermal machines that produce heralded entanglement.
//!
//! Two subsystems, each attached to its own heat bath, interact through an
//! energy-preserving Hamiltonian. The steady state of the resulting master
//! equation is filtered locally, and the postselected state is entangled when
//! the bath temperatures differ enough.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
pub mod entfilter;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mapping;
pub mod model;

pub use error::{Error, Result};
