use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("truncation too small: dim {dim} but at least {required} required")]
    TruncationTooSmall { dim: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not supported on the density matrix sub-basis (Fock {0})")]
    SupportMismatch(usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("postselection impossible at these parameters (probability {0:e})")]
    PostselectionImpossible(f64),

    #[error("amplitude at Fock {fock} is neither real nor purely imaginary")]
    MixedPhase { fock: usize },

    #[error("trace drift {0:e} exceeds limit; reduce the integration step")]
    TraceDrift(f64),
}

impl Error {
    /// True for failures of a numerical contract rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian(_)
                | Error::PostselectionImpossible(_)
                | Error::MixedPhase { .. }
                | Error::TraceDrift(_)
        )
    }
}
