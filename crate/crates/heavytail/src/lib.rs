//! Tail analytics for randomly stopped sums and maxima of independent,
//! possibly non-identically distributed random variables.
//!
//! Given a component sequence ξ₁, ξ₂, … and an independent integer stopping
//! variable η, the crate computes certified two-sided brackets for the tails
//! of three stopped functionals,
//!
//! - the randomly stopped maximum  ξ₍η₎ = max(0, ξ₁, …, ξ_η),
//! - the randomly stopped sum      S_η = ξ₁ + ⋯ + ξ_η,
//! - the stopped maximum of sums   S₍η₎ = max(0, S₁, …, S_η),
//!
//! via the series  P(T_η > x) = Σₙ P(η = n) P(Tₙ > x)  with rigorous
//! truncation control.  On top of that sit empirical heavy-tail class
//! diagnostics (heavy, long, dominated variation, consistent variation,
//! regular variation, subexponentiality, and a Matuszewska-type upper index
//! estimate) and checkers for the hypotheses under which the stopped
//! functionals inherit consistent variation from their components.
//!
//! The `examples/` directory is the front door: each example exercises one
//! capability end to end.  A thin `heavytail` binary exposes the same
//! operations as subcommands (`tail`, `diagnose`, `check`, `mc`,
//! `reproduce`) driven by JSON experiment configs.

pub mod cli;
pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod montecarlo;
pub(crate) mod numeric;
pub mod rng;
pub mod tail_algebra;

pub use cli::{ExperimentConfig, TheoremId, SCHEMA_VERSION, TAIL_CSV_HEADER};
pub use diagnostics::{
    diagnose, ClassFinding, ConditionReport, DiagnosisReport, GridSpec, HypothesisReport,
    IndexEstimate, Verdict,
};
pub use distributions::{
    CountingDistribution, MomentValue, SequenceRule, SequenceSpec, TailDistribution,
    WeightSequence,
};
pub use error::{Error, Result};
pub use montecarlo::{mc_stopped_tail, CiLevel, MCConfig, RatioEstimate};
pub use tail_algebra::{
    stopped_tail, EstimateMethod, GridOptions, SeriesOptions, StoppedFunctional, TailEnvelope,
    TailEstimate,
};
