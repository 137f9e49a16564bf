use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("undeclared generator `{name}` at position {position}")]
    UndeclaredGenerator { name: String, position: usize },

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("not a polycyclic relation: {0}")]
    NotPcRelation(String),

    #[error("tail of relation `{relation}` involves generators of index <= {index}")]
    TailOutOfRange { relation: String, index: usize },

    #[error("inconsistent presentation: overlap {overlap} fails ({lhs} != {rhs})")]
    Inconsistent { overlap: String, lhs: String, rhs: String },

    #[error("declared class {declared} but the presentation has class {actual}")]
    ClassMismatch { declared: usize, actual: usize },

    #[error("elements belong to different groups")]
    GroupMismatch,

    #[error("relation `{relation}` is not preserved: image is {image}")]
    RelationFails { relation: String, image: String },

    #[error("subgroup is not normal: conjugate {0} escapes")]
    NotNormal(String),

    #[error("homomorphism is not injective: {0}")]
    NotInjective(String),

    #[error("embedding images are not isomorphic: {0}")]
    NotIsomorphic(String),

    #[error("image of {element} is not central: commutator {commutator}")]
    NotCentral { element: String, commutator: String },

    #[error("homomorphisms disagree on amalgamated generator {0}")]
    Disagreement(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unresolved reference `{0}`")]
    Unresolved(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("identity does not hold: {0}")]
    IdentityFails(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse { position, message: message.into() }
    }
}
