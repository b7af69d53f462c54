use thiserror::Error;

/// Errors produced by the design and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("invalid array model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("sampling layout with {points} points is too small for order {order} (need {needed})")]
    LayoutTooSmall {
        points: usize,
        order: usize,
        needed: usize,
    },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("quadrature did not converge: max change {change:.3e} exceeds {tolerance:.1e} at order {order}")]
    Quadrature {
        order: usize,
        change: f64,
        tolerance: f64,
    },

    #[error("matrix is singular or ill-conditioned (condition {condition:.3e}); consider the bounded-sensitivity design")]
    IllConditioned { condition: f64 },

    #[error("look direction is degenerate for real weights (c^T C^-1 c = {value:.3e})")]
    DegenerateLook { value: f64 },

    #[error("sensitivity cap {cap:.6e} is below the real-weight lower bound {bound:.6e}")]
    Infeasible { cap: f64, bound: f64 },

    #[error("diagonal-loading search failed: {0}")]
    Bisection(String),

    #[error("grid too coarse: step {step_deg:.4} deg exceeds {max_deg:.4} deg")]
    GridTooCoarse { step_deg: f64, max_deg: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
