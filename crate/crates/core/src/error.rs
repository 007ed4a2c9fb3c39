use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: pivot {pivot:.3e} at column {column}")]
    Singular { column: usize, pivot: f64 },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("non-unique steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("steady-state residual {0:.3e} exceeds 1e-9")]
    SteadyStateResidual(f64),

    #[error("invariant violated at t = {time} ps: {what}")]
    Invariant { time: f64, what: String },

    #[error("non-finite value encountered at t = {0} ps")]
    NonFinite(f64),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("time {time} ps lies outside the integration window starting at {start} ps")]
    OutsideWindow { time: f64, start: f64 },

    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("spectrum point at detuning {detuning} ueV failed: {source}")]
    SpectrumPoint {
        detuning: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {constraint}")]
    Validation { key: String, constraint: String },

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable class, also used to pick the process exit code.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Parse { .. } | Error::Validation { .. } | Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::OutsideWindow { .. } | Error::InvalidAxis(_) => "config",
            _ => "numerical",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            "config" => 2,
            "io" => 4,
            _ => 3,
        }
    }
}
