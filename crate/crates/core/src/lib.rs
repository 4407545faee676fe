//! Schreier graphs of finite-index subgroups of right-angled groups, the
//! explicit rewiring that sparsifies them, rank-gradient bounds read off the
//! rewiring, and exact first homology through two independent presentations.

pub mod error;
pub mod farber;
pub mod group;
pub mod groupoid;
pub mod homology;
pub mod rewire;
pub mod runner;
pub mod schreier;

pub use error::{Error, Result};
