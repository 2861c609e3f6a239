use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{what} has size {size}, above the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("{what}: search cap {cap} exceeded")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("vertex set is not hereditary and saturated")]
    NotHereditarySaturated,
    #[error("first set is not contained in the second")]
    NotNested,
    #[error("vertex set is not a maximal tail")]
    NotATail,
    #[error("maximal tail is not of circle type")]
    NotCircle,
    #[error("map is not a monotone bijection")]
    NotMonotone,
    #[error("element is not supported in the given set")]
    NotSupportedInW,
    #[error("no image given for vertex `{0}`")]
    MissingImage(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("family is not a natural transformation")]
    NotNatural,
    #[error("family is not a cocycle")]
    NotACocycle,
    #[error("dimension equation fails at vertex `{vertex}`, block {block}")]
    DimensionEquationViolated { vertex: String, block: usize },
    #[error("dimension tables differ")]
    DimsMismatch,
    #[error("graph has a cycle")]
    HasCycle,
    #[error("more than {0} simple cycles")]
    CycleOverflow(usize),
    #[error("classifiers disagree on tail {tail}: {detail}")]
    InconsistentClassifiers { tail: String, detail: String },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
