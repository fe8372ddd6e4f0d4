//! Finite matrix group computations over Z/p^n and certified analytic bounds
//! for the adelic Galois image index of elliptic curves over Q.

pub mod analytic_bounds;
pub mod error;
pub mod gl2_ring;
pub mod index_assembly;
pub mod interval;
pub mod lie_filtration;
pub mod lifting;
pub mod local_criteria;
pub mod matgroups;
pub mod verify;

pub use error::{Error, Result};
