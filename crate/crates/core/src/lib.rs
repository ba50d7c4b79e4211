// negated float comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod mc;
pub mod model;
pub mod quad;
pub mod scheme;
pub mod specfun;

pub use error::{Error, Result};
pub use scheme::Scheme;
