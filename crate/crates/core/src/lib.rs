//! Dual affine connections on coordinate charts, warped-product geometry and
//! the geometry of several statistical models.
//!
//! The crate is `no_std` and only needs `alloc`. Every field is an immutable
//! bundle of `Send + Sync` closures, so evaluations can run concurrently.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chart;
pub mod error;
pub mod fd;
pub mod linalg;
pub mod models;
pub mod tensor;
pub mod verify;
pub mod warped;

pub use chart::{ChartBox, SampleGrid};
pub use error::{GeomError, Result};
pub use linalg::{Array3, Array4, Matrix};
pub use tensor::{ConnectionField, FlatnessReport, MetricField, PTensorField};
