//! Damped wave systems on discrete Hilbert-complex segments: structural
//! checks, spectral constants and the exponential-decay certificate,
//! backward-Euler trajectories and an exact matrix-exponential reference.
#![no_std]
// `!(x > 0.0)` rejects NaN too; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod complex;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod models;
pub mod spectral;

pub use complex::{ComplexSegment, PrimitivePair, State};
pub use error::{Error, Result};
pub use spectral::{Certificate, ConstantsReport};
