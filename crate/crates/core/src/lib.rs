//! Numerical verification toolkit for great-circle and great-sphere
//! fibrations: bivectors on `R^4`, oriented planes, orthogonal complex and
//! quaternionic structures, and fibrations of `S^3` by great circles.

pub mod cli;
pub mod error;
pub mod exterior;
pub mod gcfib;
pub mod grassmann;
pub mod numkern;
pub mod ocs;
pub mod quat;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
