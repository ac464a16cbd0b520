use thiserror::Error;

/// Errors raised by chart evaluation, tensor calculus and the matrix search.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside its documented range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Evaluation was requested outside a chart domain or a function's
    /// domain of definition (log/sqrt of a nonpositive value, division by a
    /// zero-valued jet, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The metric matrix is numerically singular at a sampled point.
    #[error("degenerate metric at {point:?} (condition number {cond:.3e})")]
    DegenerateMetric { point: Vec<f64>, cond: f64 },

    /// A field does not carry enough derivative orders for the requested
    /// operation.
    #[error("insufficient jet order: {0}")]
    Capability(String),

    /// A verified precondition failed, e.g. a tensor handed to the
    /// extraction routine is not parallel.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An integrated curve left the chart domain.
    #[error("curve left the chart domain at parameter {parameter:.6}")]
    LeftDomain { parameter: f64 },

    /// Expression or case-file parsing failed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
