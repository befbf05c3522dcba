use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("invalid CPT for variable `{variable}`: {reason}")]
    InvalidCpt { variable: String, reason: String },
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("state `{state}` is not in the domain of `{variable}`")]
    InvalidState { variable: String, state: String },
    #[error("diagrams are defined over different variable lists")]
    VariableMismatch,
    #[error("mechanism change undefined: {0}")]
    MechanismChange(String),
    #[error("joint state space of {size} assignments exceeds the enumeration bound {bound}")]
    StateSpaceTooLarge { size: u128, bound: u128 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty data: {0}")]
    EmptyData(String),
    #[error("too many variables for exhaustive enumeration ({n} > {max}); use an external structure search")]
    TooManyVariables { n: usize, max: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
