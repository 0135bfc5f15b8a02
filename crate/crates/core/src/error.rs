use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("target is not in the span of the generators")]
    NotInSpan,
    #[error("input matrix has rank 0")]
    RankDeficient,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector {0} is not a dual codeword")]
    NotDualCodeword(String),
    #[error("probabilities must be nonnegative and sum to 1 (sum = {0})")]
    BadDistribution(String),
    #[error("graph has dimension 0")]
    DegenerateGraph,
    #[error("generators do not span F2^{h}")]
    NotGenerating { h: usize },
    #[error("generator set is disconnected")]
    Disconnected,
    #[error("functionals do not span the dual space")]
    NotSpanning,
    #[error("code distance {0} is below 3")]
    DistanceTooSmall(usize),
    #[error("explicit convolution would exceed the size budget")]
    SupportBlowup,
    #[error("premise violated: {0}")]
    PremiseViolated(String),
    #[error("no valid tester exists (every word is a codeword)")]
    NoValidTester,
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("embedding is not constant on cosets of the code")]
    NotCosetInvariant,
    #[error("some nonzero coset is never rejected")]
    DegenerateEmbedding,
    #[error("dual code is zero")]
    ZeroDual,
    #[error("tester support is not a basis of the dual code")]
    NotBasisTester,
    #[error("linear program did not converge: {0}")]
    Lp(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors that mean a proven identity or bound failed to hold,
    /// as opposed to bad input.
    pub fn is_identity_failure(&self) -> bool {
        matches!(
            self,
            Error::IdentityViolated(_) | Error::BoundViolated(_)
        )
    }
}
