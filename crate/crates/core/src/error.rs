use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("closed surfaces are not supported: punctures must be >= 1 (got {0})")]
    NoPunctures(usize),

    #[error("boundary index {index} out of range 1..={punctures}")]
    BoundaryIndex { index: usize, punctures: usize },

    #[error("unknown generator symbol `{0}`")]
    UnknownGenerator(String),

    #[error("malformed exponent in token `{0}` (only ^1 and ^-1 are allowed)")]
    MalformedExponent(String),

    #[error("representation is not a good point (centralizer dimension {centralizer_dim})")]
    NotGoodPoint { centralizer_dim: usize },

    #[error("representation stopped being a good point under a probe perturbation")]
    GoodnessLostUnderPerturbation,

    #[error("cochain is not closed (residual {residual:.3e})")]
    NotACocycle { residual: f64 },

    #[error("relative cochain does not vanish on the boundary (residual {residual:.3e})")]
    NotRelative { residual: f64 },

    #[error("ill-conditioned duality pairing (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("presentation mismatch: complex is ({complex_genus},{complex_punctures}), representation is ({rep_genus},{rep_punctures})")]
    PresentationMismatch {
        complex_genus: usize,
        complex_punctures: usize,
        rep_genus: usize,
        rep_punctures: usize,
    },

    #[error("scalar field does not match group family {0}")]
    FieldMismatch(&'static str),

    #[error("invalid group element: {0}")]
    InvalidElement(String),

    #[error("invalid representation document: {0}")]
    InvalidDocument(String),
}
