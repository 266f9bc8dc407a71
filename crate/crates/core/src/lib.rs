//! Gamma-function inequalities, their interval certification, and
//! volumes of central sections of `l_p` balls.
//!
//! The crate is `no_std` with `alloc`. IO, the command-line front end and
//! parallel drivers live in the `gammasect` crate.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod certify;
pub mod error;
pub mod geometry;
pub mod interval;
pub mod sections;
pub mod specfun;

pub use error::{Error, Result};
pub use interval::Interval;
