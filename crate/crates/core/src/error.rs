use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id {0}")]
    UnknownVertex(usize),

    #[error("unknown variable name `{0}`")]
    UnknownName(String),

    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),

    #[error("variable names must be nonempty")]
    EmptyName,

    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),

    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),

    #[error("edge set contains a directed cycle through `{0}`")]
    Cycle(String),

    #[error("vertex sets overlap on {overlap:?}")]
    OverlappingSets { overlap: Vec<usize> },

    #[error("vertex `{name}` has role {role}, expected an observed variable")]
    NotObserved { name: String, role: &'static str },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("collider status is undefined at path endpoint {0}")]
    EndpointCollider(usize),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("illegal endpoint marks on edge {a} - {b}: {mark_a} / {mark_b}")]
    IllegalMarks {
        a: String,
        b: String,
        mark_a: char,
        mark_b: char,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("universe mismatch: {0}")]
    UniverseMismatch(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle query {query} failed: {source}")]
    Oracle {
        query: String,
        #[source]
        source: Box<Error>,
    },

    #[error("orientation conflict on {edge}: mark at {at} is {existing}, {rule} requires {requested}")]
    OrientationConflict {
        edge: String,
        at: String,
        existing: char,
        requested: char,
        rule: String,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
