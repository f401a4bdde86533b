use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the workbench.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular parameters: mu * rho^2 = {product} is too close to 2")]
    SingularParameters { product: f64 },

    #[error("upper limit {upper} is not a node of a grid with {intervals} intervals")]
    OffGrid { upper: f64, intervals: usize },

    #[error("non-finite right-hand side value at component {component}, node {node}")]
    NonFinite { component: usize, node: usize },

    #[error("grid function shape mismatch: expected {expected:?}, got {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("Picard iteration diverged after {} iterations", history.len())]
    Divergence { history: Vec<f64> },

    #[error("stability condition violated: G * L = {product} >= 1")]
    StabilityCondition { product: f64 },

    #[error("empty vector family")]
    EmptyFamily,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
