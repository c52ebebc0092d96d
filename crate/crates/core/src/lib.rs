#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod convexity;
pub mod dual;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod simplex;

pub use error::{Error, Result};
