//! Exact computations in finite rings, centered on quasi-invertibility:
//! partial inverses, central orthogonality, the closure operator `cl`,
//! skew-corner transfer, 2x2 unimodular row reduction, extension/exchange
//! structure, and a symbolic model of the algebra F_p<x,y | xy = 1>.
//!
//! Everything is table-driven and deterministic. Element searches scan
//! indices in ascending order, so every returned witness is canonical.

pub mod elemset;
pub mod error;
pub mod ring;

pub mod ideals;
pub mod regular;

pub mod closure;
pub mod quasi;

pub mod matrix_qb;

pub mod exchange;
pub mod monoid;

pub mod jacobson;

pub mod report;
pub mod suites;
pub mod zoo;

pub use elemset::ElemSet;
pub use error::{QbrError, Result};
pub use ring::{build_ring, Elem, FiniteRing, RingSpec};
