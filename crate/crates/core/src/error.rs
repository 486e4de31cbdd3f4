use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid cyclic factor {0}: every factor must be at least 2")]
    InvalidFactor(u64),

    #[error("elements belong to different groups")]
    GroupMismatch,

    #[error("{what} bound exceeded: {actual} > {limit}")]
    BoundExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("classes do not partition the group: {0}")]
    NotAPartition(String),

    #[error("the identity is not a singleton class")]
    IdentityNotSingleton,

    #[error("class {0} is not closed under inversion")]
    NotInverseClosed(usize),

    #[error(
        "module closure violated: product of classes {x} and {y} takes different values at {z} and {z2} (same class)"
    )]
    ModuleClosure {
        x: usize,
        y: usize,
        z: usize,
        z2: usize,
    },

    #[error("domain is not invariant under the permutation group")]
    DomainNotInvariant,

    #[error("permutation is not a bijection on {0} points")]
    NotAPermutation(usize),

    #[error("multiplier {0} is not coprime to the group order")]
    InvalidMultiplier(i64),

    #[error("{0} is not an A-subgroup")]
    NotAnASubgroup(String),

    #[error("subgroups do not form a direct decomposition of the group")]
    NotADirectDecomposition,

    #[error("inconsistent lambda value for basic set {0}")]
    InconsistentLambda(usize),

    #[error("empty set")]
    EmptySet,

    #[error("wrong group shape: {0}")]
    WrongShape(String),

    #[error("not an automorphism of the group")]
    NotAnAutomorphism,

    #[error("incompatible rings on the section: {0}")]
    IncompatibleSection(String),

    #[error("construction result fails the S-ring axioms: {0}")]
    ResultFailsAxioms(String),

    #[error("coset pairing is not an isomorphism: {0}")]
    NotAnIsomorphism(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("basic set decomposition failed: {0}")]
    DecompositionFailure(String),

    #[error("trivial S-ring given where a nontrivial one is required")]
    TrivialInput,

    #[error("scheme automorphism search is inconsistent: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
