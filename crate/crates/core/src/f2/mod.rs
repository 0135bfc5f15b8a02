//! Arithmetic over F2: packed vectors and matrices, spans, and the
//! Walsh–Hadamard transform.
//!
//! Group elements of `F2^h` (`h <= 24`) travel as packed `u64` values whose
//! bit `i` is coordinate `i`; the same packing indexes every dense table.

mod bitvec;
mod fourier;
mod matrix;
mod span;

pub use bitvec::{parity, BitVec, MAX_BITS};
pub use fourier::wht;
pub use matrix::{BitMatrix, Echelon};
pub use span::{cayley_bfs, independence_width, rank_wrt, span_dim, MAX_GROUP_DIM, UNREACHED};

pub(crate) use span::check_group_dim;
