use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by distribution constructors, tail evaluators and the CLI.
///
/// Numerical routines never panic on bad input from configs; they return one
/// of these variants so the CLI can map them onto its exit-code contract
/// (1 config, 2 non-convergence, 3 hypothesis failure, 4 inconclusive).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A grid-convolution factor has no finite lower support bound.
    #[error("component {index} is not bounded below; lattice convolution unsupported")]
    Unsupported { index: usize },

    /// The requested lattice would exceed the configured cell budget.
    #[error("lattice budget exceeded: {requested} cell-steps requested, budget {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },

    /// A truncated series could not certify the requested tolerance.  The
    /// bracket reached when the level cap was hit is carried along so callers
    /// can still report it.
    #[error(
        "series remainder not within tolerance {tol} after {levels} levels \
         (achieved bracket [{lower:e}, {upper:e}])"
    )]
    NoConvergence {
        tol: f64,
        levels: usize,
        lower: f64,
        upper: f64,
    },

    /// A moment series was neither certified convergent nor divergent within
    /// the iteration cap.
    #[error("moment series neither certified convergent nor divergent within the iteration cap")]
    NonConvergent,

    /// The survival function vanishes at a grid point where an indicator
    /// needs a strictly positive tail.
    #[error("survival function vanishes at x = {x}; tail statistic undefined")]
    ZeroTail { x: f64 },

    #[error("pivot index {pivot} carries zero mass under the counting distribution")]
    PivotNotInSupport { pivot: usize },

    #[error("pivot tail vanishes on the calibration grid; envelope undefined")]
    DegeneratePivot,

    /// Too few denominator hits to quote a ratio confidence interval.
    #[error("ratio estimate unstable: {hits} denominator hits, need at least {min}")]
    Unstable { hits: u64, min: u64 },

    #[error("ratio undefined: denominator survival is zero at x = {x}")]
    DivisionDomain { x: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
