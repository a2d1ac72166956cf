use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not unimodular (|det| != 1)")]
    NotUnimodular,
    #[error("matrix is not hyperbolic (an eigenvalue has modulus 1)")]
    NotHyperbolic,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point is not in the tube")]
    PointNotInTube,
    #[error("lattice search radius cap {0} reached before the minimum was certified")]
    SearchBudgetExceeded(u64),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("orbit point lies on an eigenline through the origin")]
    DegenerateOrbit,
    #[error("no admissible perturbation of alpha")]
    PerturbationFailed,
    #[error("tubes have the same depth")]
    SameDepth,
    #[error("center is not in the truncated fractal (hits tube {0})")]
    CenterNotInFractal(usize),
    #[error("no Case-1 event within depth {0}")]
    DepthBudgetExceeded(usize),
    #[error("no tube up to depth {0} meets the window")]
    NoTubeMeetsWindow(usize),
    #[error("contracting directions of T and S are parallel")]
    TransversalityViolated,
    #[error("leaf did not reach the target segment; leaf half-length ~{leaf_length:.6e}")]
    IterationBudgetExceeded { leaf_length: f64 },
    #[error("orbit enters the box at iterate {0}")]
    AvoidanceFailed(usize),
}
