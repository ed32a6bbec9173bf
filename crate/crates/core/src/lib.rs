//! Action theories for POMDPs, compiled to probabilistic logic programs,
//! normal logic programs and CNF, with a brute-force oracle for the
//! underlying decision process.

pub mod action;
pub mod error;
pub mod fuzz;
pub mod nhplp;
pub mod policy;
pub mod pomdp;
pub mod rational;
pub mod translator;

pub use error::{Error, ParseError, Result};
