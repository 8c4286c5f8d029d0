use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Attaches the name of the pipeline stage that produced an error.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage { stage, source: Box::new(e) })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {gen} out of range for rank {rank}")]
    GeneratorOutOfRange { gen: usize, rank: usize },

    #[error("parse error in {input:?} at position {position}: {message}")]
    Parse { input: String, position: usize, message: String },

    #[error("coset enumeration exceeded {limit} cosets (group may be infinite or the limit too low)")]
    CosetLimit { limit: usize },

    #[error("coset table is incomplete")]
    IncompleteTable,

    #[error("word does not lie in the relation subgroup (traces to coset {end})")]
    NotInSubgroup { end: usize },

    #[error("lattice containment violated: {0}")]
    Containment(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} budget exceeded: {detail}")]
    Budget { what: &'static str, detail: String },

    #[error("exponent overflow during collection")]
    Overflow,

    #[error("inconsistent pc presentation: {0}")]
    Inconsistent(String),

    #[error("morphism is not certified: {0}")]
    Uncertified(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("catalog error in entry {entry:?}, field {field}: {message}")]
    Catalog { entry: String, field: String, message: String },

    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
