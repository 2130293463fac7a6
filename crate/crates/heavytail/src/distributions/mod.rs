//! Marginal laws, stopping variables, and component sequences.

mod counting;
mod sequence;
mod tail;

pub use counting::{CountingDistribution, MomentValue};
pub use sequence::{SequenceRule, SequenceSpec, WeightSequence};
pub use tail::{cai_tang_log_survival, cai_tang_survival, TailDistribution};
