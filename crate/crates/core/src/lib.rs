//! Numerical laboratory for the square-root deformed Heisenberg algebra
//! `[x, p] = i hbar sqrt(1 + 2 beta p²)`.
//!
//! The crate covers both quantizations of the algebra: on the full momentum
//! line, where squeezed states localize arbitrarily well and a generalized
//! Fourier transform gives a genuine position representation, and on a
//! truncated momentum interval `[-p0, p0]`, where maximally localized states
//! carry a nonzero minimal position uncertainty and positions are read off in
//! the quasi-position representation. Free wave packets and the classical
//! minisuperspace dynamics induced by the same bracket are included.

// `!(a < b)` is the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod compacttheory;
pub mod cosmology;
pub mod error;
pub mod export;
pub mod fulltheory;
pub mod numerics;
pub mod squeezed;
pub mod state;
pub mod wavepacket;

pub use error::{Error, Result};
