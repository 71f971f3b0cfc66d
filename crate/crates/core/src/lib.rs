//! Updating and downdating orthogonal (rational) function recurrences via
//! structured inverse eigenvalue problems.

pub mod error;
pub mod experiments;
pub mod iep;
pub mod linalg;
pub mod lsq;
pub mod metrics;
pub mod poly;
pub mod rational;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
