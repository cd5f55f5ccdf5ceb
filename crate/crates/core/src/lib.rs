// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod access;
pub mod builtins;
pub mod channel;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod io;
pub mod polytope;

pub use error::{Error, Result};
pub use group::GroupTable;
