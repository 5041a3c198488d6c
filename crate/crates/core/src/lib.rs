#![no_std]
//! Composite projected viscosity iterations for common fixed points of
//! families of nonexpansive maps in ℝ^d.

extern crate alloc;

pub mod error;
pub mod family;
pub mod hilbert;
pub mod oracle;
pub mod schedule;
pub mod solver;

pub use error::{Error, Result};
