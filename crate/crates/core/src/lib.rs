//! Boundary measures and L^p cocycles for groups acting on hyperbolic spaces.
//!
//! Three model families are supported: free groups on their Cayley trees,
//! free products of finite cyclic groups, and Schottky groups in the
//! Poincaré disk. Tree computations are exact; disk computations are
//! floating point.

pub mod boundary;
pub mod cocycle;
pub mod dynamics;
pub mod error;
pub mod measures;
pub mod space;
pub mod word;

pub use error::{Error, Result};
pub use word::{GroupWord, Letter};
