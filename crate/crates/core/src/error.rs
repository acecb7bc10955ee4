use alloc::string::String;
use core::fmt;

/// Errors raised by model validation and the numerical routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Framework dimension outside `{2, 3}` or a coordinate vector of the wrong length.
    Dimension { expected: usize, found: usize, context: String },
    /// A model invariant was violated; `element` names the offending item.
    Invariant { element: String, message: String },
    /// Three lengths do not form a proper triangle.
    TriangleInequality { lengths: [f64; 3] },
    /// The requested operation is not defined for the framework's strain model.
    StrainModel(&'static str),
    /// The framework does not satisfy the isostatic count or rank condition.
    NotIsostatic(String),
    /// An operation precondition does not hold.
    Precondition(String),
    /// A numerical routine failed.
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invariant(element: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invariant {
            element: element.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                expected,
                found,
                context,
            } => write!(f, "dimension mismatch in {context}: expected {expected}, found {found}"),
            Error::Invariant { element, message } => write!(f, "{element}: {message}"),
            Error::TriangleInequality { lengths } => write!(
                f,
                "triangle inequality violated for lengths ({}, {}, {})",
                lengths[0], lengths[1], lengths[2]
            ),
            Error::StrainModel(msg) => write!(f, "unsupported strain model: {msg}"),
            Error::NotIsostatic(msg) => write!(f, "framework is not isostatic: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::Numeric(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
