//! Exact combinatorics of the moduli of tropical curves as combinatorial cone stacks.

pub mod certificate;
pub mod cones;
pub mod curves;
pub mod degeneration;
pub mod error;
pub mod graphs;
pub mod io;
pub mod linalg;
pub mod stacks;
pub mod universal;

pub use certificate::{Certificate, Check};
pub use error::{Error, Result};
