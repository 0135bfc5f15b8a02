//! Locally testable codes and Cayley graphs over `F2^h`.
//!
//! Codes, testers, graphs and embeddings are generic over a [`Scalar`]
//! probability type: [`Rational`] for exact results, `f64`/`f32` for speed.

pub mod cayley;
pub mod codes;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod f2;
pub mod lp;
pub mod optimal;
pub mod scalar;
pub mod spectrum;
pub mod tester;

pub use cayley::{CayleyGraph, SpectrumTable};
pub use codes::{CosetTable, LinearCode, MatrixKind};
pub use embed::{CutEmbedding, DistortionReport};
pub use error::{Error, Result};
pub use f2::{BitMatrix, BitVec};
pub use optimal::{optimal_tester, LpCertificate, OptimalTester};
pub use scalar::{Extended, Scalar};
pub use spectrum::{SGReport, SpectrumGenerator};
pub use tester::{Tester, TesterReport};

/// Exact probabilities.
pub type Rational = num_rational::BigRational;

pub type ExactTester = Tester<Rational>;
pub type FloatTester = Tester<f64>;
pub type ExactGraph = CayleyGraph<Rational>;
pub type FloatGraph = CayleyGraph<f64>;
