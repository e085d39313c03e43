use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("unknown baseline id `{0}`")]
    UnknownBaseline(String),

    #[error("unknown model family `{0}`")]
    UnknownFamily(String),

    #[error("unknown builtin dataset `{0}`")]
    UnknownDataset(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    #[error("every optimizer start failed to produce a finite likelihood")]
    AllStartsFailed,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("order statistic index {i} out of range for sample size {n}")]
    OrderIndex { i: usize, n: usize },

    #[error("io error on `{path}`: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
