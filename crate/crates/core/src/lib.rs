//! Time-reversed discrete symplectic systems
//! `z_k = (S_k + lambda V_k) z_{k+1} - J Psi_k f_k`.
//!
//! Start from [`system::build_system`] or the ready-made
//! [`system::examples`], then use [`propagation`] for solutions,
//! [`structure`] for disconjugacy and the quadratic functional,
//! [`recessive`] for solutions at infinity and [`extension`] for
//! square-summability and the Friedrichs extension. [`report`] runs the same
//! steps from a [`config::RunConfig`] and produces JSON verdicts.

pub mod config;
pub mod csvio;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod propagation;
pub mod recessive;
pub mod report;
pub mod structure;
pub mod system;
pub mod tolerances;

pub use error::{Error, Result};
