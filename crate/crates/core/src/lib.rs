//! Exact q-series, third-order modular linear differential equations, and the
//! character classification searches built on them.

pub mod classify;
pub mod error;
pub mod exactq;
pub mod export;
pub mod hyper;
pub mod lattice;
pub mod mlde;
pub mod modforms;
pub mod poly;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
