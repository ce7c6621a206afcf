//! Certification toolkit for explicit height lower bounds attached to the
//! Galois representations of modular newforms.

pub mod algnum;
pub mod arith;
pub mod cli;
pub mod error;
pub mod heights;
pub mod lmfdb;
pub mod localfields;
pub mod matgroups;
pub mod newforms;
mod serde_big;

pub use error::{Error, Result};
