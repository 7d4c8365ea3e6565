use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument outside domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("{function}: pole at {at}")]
    Pole { function: &'static str, at: f64 },
    #[error("matching denominator vanishes at E = {energy}")]
    PoleAtE { energy: f64 },
    #[error("ladder operator requires sigma = {required}")]
    SpinPrecondition { required: &'static str },
    #[error("state not admissible: {0}")]
    Inadmissible(String),
    #[error("integral does not converge: {0}")]
    Divergent(String),
    #[error("extrapolation unreliable: {0}")]
    ExtrapolationUnreliable(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
