//! Torpedo Game toolkit: qudit phase-space algebra, discrete Wigner
//! functions, quantum and classical strategies for information retrieval
//! tasks, and bounded-memory contextuality via linear programming.

pub mod algebra;
pub mod classical_search;
pub mod contextuality;
pub mod dit;
mod error;
pub mod question;
pub mod tasks;
pub mod transformational;
pub mod verification;
pub mod wigner;

pub use error::{Error, Result};
pub use question::Question;
