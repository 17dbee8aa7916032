//! Average shadowing for iterated function systems.
//!
//! The crate models parameterized IFS on a handful of compact metric spaces,
//! generates and validates (average) pseudo-orbits, builds shadowing orbits
//! for contracting systems with their error ledger, reproduces the circle
//! counterexample to average shadowing, and approximates chain-recurrent sets
//! through box graphs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod catalog;
pub mod chain;
pub mod error;
pub mod ifs;
pub mod io;
pub mod orbit;
pub mod shadow;
pub mod spaces;

pub use error::{Error, Result};
pub use ifs::{Ifs, Symbol, SymbolStream, SymbolWord};
pub use spaces::{Point, Space};
