use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("element {id}: {msg}")]
    Element { id: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported monomial degree {degree} (maximum {max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("missing rate constant `{0}`")]
    MissingRateConstant(String),

    #[error("rate constant `{name}` is negative ({value})")]
    NegativeRateConstant { name: String, value: f64 },

    #[error("negative concentration {value:e} ({context})")]
    NegativeConcentration { value: f64, context: String },

    #[error("negative weight {value} for step {step}")]
    NegativeWeight { step: usize, value: f64 },

    #[error("singular or ill-conditioned linear system (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("nonlinear solve did not converge after {iterations} iterations (update norm {update:e})")]
    NonlinearDivergence { iterations: usize, update: f64 },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{context}: {inner}")]
    Context { context: String, inner: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps the error with a location or pipeline stage.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), inner: Box::new(self) }
    }

    /// True for failures raised by the numerical solvers (as opposed to bad input).
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Singular { .. }
            | Error::NonlinearDivergence { .. }
            | Error::NegativeConcentration { .. } => true,
            Error::Context { inner, .. } => inner.is_solver_failure(),
            _ => false,
        }
    }
}
