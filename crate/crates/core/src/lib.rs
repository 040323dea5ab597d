//! Subnormalized quantum states and trace-nonincreasing quantum maps:
//! exact volumes, random sampling, Choi/Kraus representations and
//! Monte-Carlo cross-checks of the closed forms.

pub mod channels;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod montecarlo;
pub mod quadrature;
pub mod sampling;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
