use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("variable count mismatch: {0}")]
    VarsMismatch(String),
    #[error("singular change of parameters")]
    SingularChange,
    #[error("not divisible, remainder norm {remainder:e}")]
    NotDivisible { remainder: f64 },
    #[error("form is not annihilated by the line")]
    NotInKernel,
    #[error("zero form")]
    ZeroForm,
    #[error("sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),
    #[error("q is a square")]
    SquareQ,
    #[error("internal identity failure: {0}")]
    InternalIdentityFailure(String),
    #[error("parameter lies in the exceptional set")]
    ExceptionalParameter,
    #[error("input is a cube")]
    CubeInput,
    #[error("search exhausted after {0} attempts")]
    SearchExhausted(usize),
    #[error("retries exhausted in {stage} after {attempts} attempts")]
    RetriesExhausted { stage: &'static str, attempts: usize },
    #[error("non-transverse intersection with the line")]
    NonTransverse,
    #[error("no branch of the double-line refinement applies")]
    DegenerateG,
    #[error("certification violated: {0}")]
    CertificationViolated(String),
    #[error("identity failure: {0}")]
    IdentityFailure(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("stage {stage} failed (seed {seed}): {source}")]
    Stage {
        stage: &'static str,
        seed: u64,
        source: Box<Error>,
    },
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn at_stage(self, stage: &'static str, seed: u64) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                seed,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self.root(), Error::Parse { .. })
    }
}
