use thiserror::Error;

/// Statistics of a ball enumeration that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PartialStats {
    /// Largest radius whose sphere was fully enumerated.
    pub completed_radius: u32,
    /// Vertices discovered before the budget tripped.
    pub vertices: usize,
    /// Sphere sizes for radii `0..=completed_radius`.
    pub sphere_sizes: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error(
        "budget exceeded after {} vertices (complete through radius {})",
        .0.vertices,
        .0.completed_radius
    )]
    BudgetExceeded(PartialStats),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
