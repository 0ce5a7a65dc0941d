use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("invalid split of vertex {vertex}: {reason}")]
    InvalidSplit { vertex: usize, reason: String },
    #[error("vertex {vertex} has valence {valence}, expected a unary vertex")]
    NotUnary { vertex: usize, valence: usize },
    #[error("edge {0} is not an inner edge")]
    NotInnerEdge(usize),
    #[error("edge map does not define a morphism of trees: {0}")]
    NotAMorphism(String),
    #[error("cannot compose: target of the first map is not the source of the second")]
    NotComposable,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("invalid free operad element: {0}")]
    InvalidTerm(String),
    #[error("tree `{0}` is not in the skeleton")]
    NotInSkeleton(String),
    #[error("vertex {vertex} is not labeled by a permuted generator")]
    NotPermutedGenerator { vertex: usize },
    #[error("invalid presheaf data: {0}")]
    InvalidPresheaf(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("dangling reference: {0}")]
    Dangling(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
