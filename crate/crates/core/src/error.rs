use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("`{0}` is not a principal system")]
    NotPrincipal(String),

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("negative eigenvalue {0:.3e} below clamp tolerance")]
    NegativeEigenvalue(f64),

    #[error("empty label selection")]
    EmptySelection,

    #[error("label sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("channel acts on ancilla `{0}`")]
    AncillaInChannel(String),

    #[error("copy basis of `{0}` is an eigenbasis of its input state")]
    CopyBasisIsEigenbasis(String),

    #[error("no basis given for `{0}`")]
    MissingBasis(String),

    #[error("no input state declared for `{0}`")]
    MissingInput(String),

    #[error("doubled dimension {required} exceeds the budget of {budget}")]
    Capacity { required: usize, budget: usize },

    #[error("gate is not a permutation of digit strings")]
    NonPermutation,

    #[error("probabilities must be nonnegative and sum to 1 (sum {0})")]
    InvalidDistribution(f64),

    #[error("conditional mutual information {0:.3e} below integrity floor")]
    NegativeCmi(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
