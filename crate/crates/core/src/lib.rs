//! Exact word problem, truncated Cayley graphs and divergence estimators for
//! right-angled Coxeter groups and their relatively hyperbolic structures.

pub mod cayley;
pub mod coxeter;
pub mod divergence;
pub mod error;
pub mod experiments;
pub mod relhyp;

pub use error::{Error, Result};
