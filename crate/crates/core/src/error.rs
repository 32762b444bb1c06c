use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StarError {
    /// Invalid user-supplied parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A circuit whose faults cannot be represented as a matching graph.
    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),

    /// A conjugation was requested through a non-unitary operation.
    #[error("cannot conjugate through non-unitary gate {0}")]
    NonUnitary(String),

    /// A fit could not be carried out with the supplied data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T> = std::result::Result<T, StarError>;
