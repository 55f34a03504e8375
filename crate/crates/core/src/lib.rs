//! Skew-information coherence measures, SWAP-test interferometry and
//! channel monotonicity checks for finite-dimensional quantum systems.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line tool and parallel batch runners live in the companion `skewcoh`
//! crate.

#![no_std]

extern crate alloc;

pub mod channels;
pub mod error;
pub mod interferometry;
pub mod linalg;
pub mod measures;
pub mod operators;
pub mod optimize;
pub mod properties;
pub mod random;
pub mod shots;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use state::{DensityMatrix, Observable};
