//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by layout parsing, model building and solving.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A normal vector is not unit length (or is zero).
    InvalidNormal(String),
    /// A width or height is not strictly positive.
    InvalidSize(String),
    /// A 4x4 matrix does not decompose into translation * rotation * scale.
    InvalidTransform(String),
    /// Clustering was asked to run on an empty value list.
    EmptyAttribute,
    /// A logic gate received the wrong number of inputs.
    Arity { gate: &'static str, expected: &'static str, got: usize },
    /// Two selection vectors over different attribute spaces were combined.
    AttributeMismatch { left: &'static str, right: &'static str },
    /// An operator over a set of selection vectors received an empty set.
    EmptyArgument,
    /// Exhaustive enumeration was asked to search more free variables than its cap.
    TooLarge { free: usize, cap: usize },
    /// A feasibility check received an assignment that does not cover all variables.
    PartialAssignment { expected: usize, got: usize },
    /// Residuals or selections do not match the model spaces they were built from.
    SpaceMismatch(String),
    /// The program is infeasible or the solver produced no usable incumbent.
    NoSolution(String),
    /// A synthetic-layout spec violates its invariants.
    InvalidSpec(String),
    /// A layout, config or report file failed to parse or validate.
    Parse(String),
    /// Underlying I/O failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidNormal(msg) => write!(f, "invalid normal: {msg}"),
            Error::InvalidSize(msg) => write!(f, "invalid size: {msg}"),
            Error::InvalidTransform(msg) => write!(f, "invalid transform: {msg}"),
            Error::EmptyAttribute => write!(f, "attribute has no values to cluster"),
            Error::Arity { gate, expected, got } => {
                write!(f, "{gate} gate expects {expected} inputs, got {got}")
            }
            Error::AttributeMismatch { left, right } => {
                write!(f, "selection vectors over different attributes: {left} vs {right}")
            }
            Error::EmptyArgument => write!(f, "operator applied to an empty set of vectors"),
            Error::TooLarge { free, cap } => {
                write!(f, "exhaustive search over {free} free variables exceeds cap {cap}")
            }
            Error::PartialAssignment { expected, got } => {
                write!(f, "assignment covers {got} variables, model has {expected}")
            }
            Error::SpaceMismatch(msg) => write!(f, "model space mismatch: {msg}"),
            Error::NoSolution(msg) => write!(f, "no solution: {msg}"),
            Error::InvalidSpec(msg) => write!(f, "invalid synthetic spec: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
