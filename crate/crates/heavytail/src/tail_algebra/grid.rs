//! Certified lattice convolution for sums of bounded-below components.
//!
//! Each factor X_k with support lower bound L_k is shifted to the
//! nonnegative variable Y_k = X_k − L_k and discretized onto the lattice
//! {0, h, 2h, …} twice: once rounding mass down (a pointwise lower coupling
//! Y_k^− ≤ Y_k) and once rounding mass up (Y_k^+ ≥ Y_k).  Convolving the
//! rounded factors therefore brackets every tail of the true sum:
//!
//! P(Σ Y_k^− > y) ≤ P(Σ Y_k > y) ≤ P(Σ Y_k^+ > y).
//!
//! Mass at lattice index ≥ capacity is pooled into a scalar overflow and can
//! never re-enter the kept cells (all factors are nonnegative), so tails at
//! any threshold index τ ≤ capacity stay exact functions of the rounded
//! laws.  Every accumulated quantity is a sum of nonnegative products; no
//! step subtracts nearly equal values.

use crate::distributions::{SequenceSpec, TailDistribution};
use crate::error::{Error, Result};
use crate::numeric::Accumulator;

/// Rounding direction of the certified discretization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rounding {
    /// Mass of (jh, (j+1)h] sits at jh: the rounded variable is ≤ the truth.
    Down,
    /// Mass of ((j−1)h, jh] sits at jh: the rounded variable is ≥ the truth.
    Up,
}

/// A sub-probability mass vector on {0, h, …, (capacity−1)h} plus the mass
/// certified to lie at lattice index ≥ capacity.
#[derive(Clone, Debug)]
pub(crate) struct LatticeMass {
    cells: Vec<f64>,
    overflow: f64,
}

impl LatticeMass {
    fn point_mass_at_zero(capacity: usize) -> Self {
        let mut cells = vec![0.0; capacity];
        cells[0] = 1.0;
        LatticeMass {
            cells,
            overflow: 0.0,
        }
    }

    /// Discretize a nonnegative variable with the given survival function.
    fn from_survival(survival: impl Fn(f64) -> f64, h: f64, capacity: usize, r: Rounding) -> Self {
        let mut cells = vec![0.0; capacity];
        match r {
            Rounding::Down => {
                // cells[0] = P(Y ≤ h); cells[j] = P(Y ∈ (jh, (j+1)h]);
                // overflow = P(Y > capacity·h).
                let mut surv = survival(h);
                cells[0] = (1.0 - surv).max(0.0);
                for (j, cell) in cells.iter_mut().enumerate().skip(1) {
                    let next = survival((j as f64 + 1.0) * h);
                    *cell = (surv - next).max(0.0);
                    surv = next;
                }
                LatticeMass {
                    cells,
                    overflow: surv,
                }
            }
            Rounding::Up => {
                // cells[0] = P(Y = 0); cells[j] = P(Y ∈ ((j−1)h, jh]);
                // overflow = P(Y > (capacity−1)h).
                let mut surv = survival(0.0);
                cells[0] = (1.0 - surv).max(0.0);
                for (j, cell) in cells.iter_mut().enumerate().skip(1) {
                    let next = survival(j as f64 * h);
                    *cell = (surv - next).max(0.0);
                    surv = next;
                }
                LatticeMass {
                    cells,
                    overflow: surv,
                }
            }
        }
    }

    /// Convolution with another lattice mass of the same capacity.
    fn convolve(&self, factor: &LatticeMass) -> LatticeMass {
        let t = self.cells.len();
        debug_assert_eq!(t, factor.cells.len());
        // Suffix sums of the factor: sfx[j] = Σ_{l ≥ j} b_l.
        let mut sfx = vec![0.0; t + 1];
        for j in (0..t).rev() {
            sfx[j] = sfx[j + 1] + factor.cells[j];
        }
        let mut cells = vec![0.0; t];
        let mut of = Accumulator::new();
        // Overflow composes additively: if either side already overflowed, the
        // (nonnegative) sum stays at index ≥ capacity.
        of.add(self.overflow + factor.overflow - self.overflow * factor.overflow);
        for (i, &a) in self.cells.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let cut = t - i;
            for (j, &b) in factor.cells.iter().enumerate().take(cut) {
                cells[i + j] += a * b;
            }
            of.add(a * sfx[cut]);
        }
        LatticeMass {
            cells,
            overflow: of.value(),
        }
    }

    /// Mass at lattice index ≥ threshold (threshold ≤ capacity).
    fn tail_from(&self, threshold: usize) -> f64 {
        debug_assert!(threshold <= self.cells.len());
        let mut acc = Accumulator::new();
        for &c in &self.cells[threshold..] {
            acc.add(c);
        }
        acc.add(self.overflow);
        acc.value().min(1.0)
    }
}

/// Smallest lattice index j with j·h > y (the tail threshold for level y).
pub(crate) fn threshold_index(y: f64, h: f64) -> usize {
    debug_assert!(y >= 0.0);
    (y / h).floor() as usize + 1
}

/// Iteratively convolves the components of a sequence, maintaining certified
/// lower and upper lattice brackets of the partial-sum law.
#[derive(Debug)]
pub(crate) struct ConvolutionLadder<'a> {
    seq: &'a SequenceSpec,
    h: f64,
    capacity: usize,
    positive_part: bool,
    lower: LatticeMass,
    upper: LatticeMass,
    cache: Vec<(TailDistribution, LatticeMass, LatticeMass)>,
    level: usize,
}

impl<'a> ConvolutionLadder<'a> {
    /// `positive_part` replaces every factor X_k by max(X_k, 0) (zero shift).
    pub(crate) fn new(
        seq: &'a SequenceSpec,
        h: f64,
        capacity: usize,
        positive_part: bool,
        budget: usize,
    ) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("lattice step must be a positive real (got {h})"),
            });
        }
        if capacity > budget {
            return Err(Error::BudgetExceeded {
                requested: capacity as u64,
                budget: budget as u64,
            });
        }
        Ok(ConvolutionLadder {
            seq,
            h,
            capacity,
            positive_part,
            lower: LatticeMass::point_mass_at_zero(capacity),
            upper: LatticeMass::point_mass_at_zero(capacity),
            cache: Vec::new(),
            level: 0,
        })
    }

    /// Convolve the next component into both brackets.
    pub(crate) fn advance(&mut self) -> Result<()> {
        let k = self.level + 1;
        let dist = self.seq.dist_at(k);
        if !self.positive_part && !dist.is_bounded_below() {
            return Err(Error::Unsupported { index: k });
        }
        if !self.cache.iter().any(|(d, _, _)| d == dist) {
            let (h, cap) = (self.h, self.capacity);
            let (down, up) = if self.positive_part {
                let s = |y: f64| dist.positive_part_survival(y);
                (
                    LatticeMass::from_survival(s, h, cap, Rounding::Down),
                    LatticeMass::from_survival(s, h, cap, Rounding::Up),
                )
            } else {
                let shift = dist.support_lower();
                let s = |y: f64| dist.survival(y + shift);
                (
                    LatticeMass::from_survival(s, h, cap, Rounding::Down),
                    LatticeMass::from_survival(s, h, cap, Rounding::Up),
                )
            };
            self.cache.push((dist.clone(), down, up));
        }
        let (_, down, up) = self
            .cache
            .iter()
            .find(|(d, _, _)| d == dist)
            .expect("factor discretization cached above");
        self.lower = self.lower.convolve(down);
        self.upper = self.upper.convolve(up);
        self.level += 1;
        Ok(())
    }

    /// Certified bracket of P(S_level > x) (or of P(Σ X_k⁺ > x) in
    /// positive-part mode).  Requires the implied threshold to fit the
    /// capacity chosen at construction.
    pub(crate) fn bracket(&self, x: f64) -> (f64, f64) {
        let shift = if self.positive_part {
            0.0
        } else {
            self.seq.shift_sum(self.level)
        };
        let y = x - shift;
        if y < 0.0 {
            // The sum exceeds x almost surely: x lies below the summed
            // support lower bounds.
            return (1.0, 1.0);
        }
        let tau = threshold_index(y, self.h);
        debug_assert!(
            tau <= self.capacity,
            "ladder capacity {} too small for threshold {}",
            self.capacity,
            tau
        );
        let tau = tau.min(self.capacity);
        (self.lower.tail_from(tau), self.upper.tail_from(tau))
    }
}
