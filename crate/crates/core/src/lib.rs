//! Exact invariants of `E₂`/`GE₂` over orders with finite unit group, and the
//! HFA decision for unit groups of integral group rings.

pub mod abelianization;
pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod decide;
pub mod error;
pub mod groups;
pub mod intmat;
pub mod lattice;
pub mod order;
pub mod units;
pub mod words;

pub use error::{Error, Result};
