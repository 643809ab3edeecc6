#![cfg_attr(not(test), no_std)]
#![doc = include_str!("../README.md")]

extern crate alloc;

pub mod commutator;
pub mod error;
pub mod function_spaces;
pub mod measure;
pub mod quadrature;
pub mod geometry;
pub mod kernels;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
