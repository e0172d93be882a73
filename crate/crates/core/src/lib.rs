//! Exact and numerical workbench for Euler, cyclotomic and Bianchi complexes.

pub mod acceptance;
pub mod bianchi;
pub mod bloch;
pub mod cli;
pub mod complex;
pub mod dd;
pub mod error;
pub mod hmap;
pub mod modular_gl2z;
pub mod numberfields;
pub mod qlinalg;
pub mod qseries;
pub mod units;

pub use error::{Error, Result};
