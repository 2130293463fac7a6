//! Tail evaluation for randomly stopped maxima, sums, and maxima of sums.
//!
//! Everything here is either exact or certified.  Fixed-level maxima have a
//! closed form; fixed-level sums are bracketed by lattice convolution with
//! controlled rounding; the stopped functionals are truncated series
//!
//! P(Z_η > x) = Σ_n P(η = n) · P(Z_n > x) + remainder,
//!
//! where the truncation remainder is bounded by certified quantities that
//! depend on the functional: for a random maximum both P(η > K) and
//! E[η 1{η > K}] · sup_k F̄_k(x) bound the discarded mass, while for the sum
//! kinds only P(η > K) is universally valid (each omitted term is a
//! probability ≤ 1, and no marginal union bound applies to a sum).  An
//! optional calibrated power envelope can stop the series earlier, but the
//! certified upper bracket always retains the crude remainder.

pub(crate) mod grid;

use serde::{Deserialize, Serialize};

use crate::distributions::{CountingDistribution, MomentValue, SequenceSpec, TailDistribution};
use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, log1mexp, Accumulator};
use grid::{threshold_index, ConvolutionLadder};

/// The three stopped functionals of a component sequence ξ_1, ξ_2, …
/// stopped at an independent counting variable η.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppedFunctional {
    /// ξ_(η) = max(0, ξ_1, …, ξ_η): the randomly stopped maximum.
    RandomMax,
    /// S_η = ξ_1 + ⋯ + ξ_η: the randomly stopped sum (S_0 = 0).
    RandomSum,
    /// S_(η) = max(S_0, S_1, …, S_η): the randomly stopped maximum of sums.
    RandomMaxOfSums,
}

impl StoppedFunctional {
    /// Stable token used in CSV output and log lines.
    pub fn label(&self) -> &'static str {
        match self {
            Self::RandomMax => "random_max",
            Self::RandomSum => "random_sum",
            Self::RandomMaxOfSums => "random_max_of_sums",
        }
    }
}

/// How a [`TailEstimate`] was produced, with the knobs that determined its
/// certified width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimateMethod {
    /// Closed form; the bracket has zero width.
    Exact,
    /// Truncated stopping-variable series: `levels` terms kept, `remainder`
    /// the certified bound on everything discarded.
    SeriesTruncated { levels: usize, remainder: f64 },
    /// Certified lattice convolution with step `step`.
    GridConvolution { step: f64 },
    /// Monte Carlo with a distribution-free confidence interval.
    MonteCarlo { samples: u64 },
}

impl EstimateMethod {
    /// Stable token used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::SeriesTruncated { .. } => "series",
            Self::GridConvolution { .. } => "grid",
            Self::MonteCarlo { .. } => "mc",
        }
    }
}

/// A tail probability with a certified enclosure.
///
/// Invariant: `lower <= value() <= upper`, with `value()` the midpoint
/// representative `exp(log_value)` clamped into the bracket.  Exact results
/// have `lower == upper`; `log_value` is `-inf` when the tail is exactly 0.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailEstimate {
    /// ln of the midpoint representative (−∞ for an exact zero).
    pub log_value: f64,
    /// Certified lower bound on the tail probability.
    pub lower: f64,
    /// Certified upper bound on the tail probability.
    pub upper: f64,
    /// Provenance and width-determining parameters.
    pub method: EstimateMethod,
}

impl TailEstimate {
    /// A zero-width estimate around an exactly known probability.
    pub fn exact(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p));
        TailEstimate {
            log_value: p.ln(),
            lower: p,
            upper: p,
            method: EstimateMethod::Exact,
        }
    }

    /// An estimate from a certified enclosure `[lower, upper]`.
    pub fn bracket(lower: f64, upper: f64, method: EstimateMethod) -> Self {
        debug_assert!(
            lower <= upper,
            "inverted bracket: [{lower}, {upper}] via {method:?}"
        );
        TailEstimate {
            log_value: (0.5 * (lower + upper)).ln(),
            lower,
            upper,
            method,
        }
    }

    /// Midpoint representative, always inside the certified bracket.
    pub fn value(&self) -> f64 {
        self.log_value.exp().clamp(self.lower, self.upper)
    }

    /// Width of the certified bracket.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Whether `p` lies inside the certified bracket.
    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

fn default_step() -> f64 {
    1.0 / 16.0
}

fn default_max_cells() -> usize {
    1 << 16
}

/// Lattice parameters for certified convolution.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GridOptions {
    /// Lattice step h; brackets tighten linearly as h shrinks.
    #[serde(default = "default_step")]
    pub step: f64,
    /// Cell budget: a convolution whose tail threshold needs more kept cells
    /// than this fails with a budget error instead of silently coarsening.
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            step: default_step(),
            max_cells: default_max_cells(),
        }
    }
}

/// Controls for the truncated stopping-variable series.
#[derive(Clone, Debug)]
pub struct SeriesOptions {
    /// Stop once the certified remainder is below `tol` times the accumulated
    /// certified lower bound.  Must lie in (0, 0.1].
    pub tol: f64,
    /// Hard cap on the number of series levels before giving up.
    pub level_cap: usize,
    /// Lattice parameters for the per-level sum brackets.
    pub grid: GridOptions,
    /// Optional calibrated envelope that may stop the series earlier for the
    /// sum functionals.  Never weakens the certified upper bracket.
    pub envelope: Option<TailEnvelope>,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            tol: 0.05,
            level_cap: 512,
            grid: GridOptions::default(),
            envelope: None,
        }
    }
}

/// P(S_n > x) for S_n a sum of n iid Exponential(rate) variables:
/// e^{−λx} Σ_{k<n} (λx)^k / k!.  Evaluated in log space so large λx cannot
/// overflow the partial sums.
pub fn erlang_tail(n: u64, rate: f64, x: f64) -> f64 {
    debug_assert!(rate > 0.0);
    if x < 0.0 {
        return 1.0;
    }
    if n == 0 {
        return 0.0;
    }
    let lx = rate * x;
    if lx == 0.0 {
        return 1.0;
    }
    let llx = lx.ln();
    let mut peak = f64::NEG_INFINITY;
    let logs: Vec<f64> = (0..n)
        .map(|k| {
            let v = k as f64 * llx - ln_factorial(k);
            peak = peak.max(v);
            v
        })
        .collect();
    let scaled: f64 = logs.iter().map(|&v| (v - peak).exp()).sum();
    (peak + scaled.ln() - lx).exp().min(1.0)
}

/// Exact tail P(ξ_(n) > x) of the running maximum ξ_(n) = max(0, ξ_1, …, ξ_n):
/// 1 − Π_{k≤n} F_k(x) for x ≥ 0, and 1 for x < 0 (the maximum includes 0).
pub fn max_tail_n(seq: &SequenceSpec, n: usize, x: f64) -> TailEstimate {
    if x < 0.0 {
        return TailEstimate::exact(1.0);
    }
    let mut log_cdf = Accumulator::new();
    for k in 1..=n {
        let s = seq.dist_at(k).survival(x);
        if s >= 1.0 {
            // Some component exceeds x almost surely.
            return TailEstimate::exact(1.0);
        }
        log_cdf.add((-s).ln_1p());
    }
    let log_p = log1mexp(log_cdf.value().min(0.0));
    let p = log_p.exp();
    TailEstimate {
        log_value: log_p,
        lower: p,
        upper: p,
        method: EstimateMethod::Exact,
    }
}

/// Bonferroni-type lower bound on the running-maximum tail:
/// P(ξ_(n) > x) ≥ Σ_{k≤n} F̄_k(x) · (1 − Σ_{k≤n} F̄_k(x)), clipped at 0.
///
/// This is the two-term inclusion–exclusion bound with the pair sum loosened
/// to the square of the first moment; it is informative exactly when the
/// marginal tails are collectively small, which is the heavy-tail regime the
/// asymptotics care about.
pub fn bonferroni_lower_max(seq: &SequenceSpec, n: usize, x: f64) -> f64 {
    let mut s1 = Accumulator::new();
    for k in 1..=n {
        s1.add(seq.dist_at(k).survival(x));
    }
    let s1 = s1.value();
    (s1 * (1.0 - s1)).max(0.0)
}

/// Certified bracket of the fixed-level sum tail P(S_n > x) via lattice
/// convolution.  Exact for n ≤ 1; errors if some component is not bounded
/// below or the lattice would exceed the cell budget.
pub fn sum_tail_grid(
    seq: &SequenceSpec,
    n: usize,
    x: f64,
    opts: &GridOptions,
) -> Result<TailEstimate> {
    if n == 0 {
        return Ok(TailEstimate::exact(if x < 0.0 { 1.0 } else { 0.0 }));
    }
    if n == 1 {
        return Ok(TailEstimate::exact(seq.dist_at(1).survival(x)));
    }
    let y = x - seq.shift_sum(n);
    if y < 0.0 {
        // x lies below the sum of the support lower bounds.
        return Ok(TailEstimate::exact(1.0));
    }
    let capacity = threshold_index(y, opts.step);
    let mut ladder = ConvolutionLadder::new(seq, opts.step, capacity, false, opts.max_cells)?;
    for _ in 0..n {
        ladder.advance()?;
    }
    let (lo, hi) = ladder.bracket(x);
    Ok(TailEstimate::bracket(
        lo,
        hi,
        EstimateMethod::GridConvolution { step: opts.step },
    ))
}

/// Certified bracket of the fixed-level maximum-of-sums tail P(S_(n) > x),
/// S_(n) = max(S_0, …, S_n), via the pathwise sandwich
///
/// P(S_n > x) ≤ P(S_(n) > x) ≤ P(ξ_1⁺ + ⋯ + ξ_n⁺ > x)   (x ≥ 0),
///
/// with equality throughout when every component is nonnegative.
pub fn maxsum_tail(
    seq: &SequenceSpec,
    n: usize,
    x: f64,
    opts: &GridOptions,
) -> Result<TailEstimate> {
    if x < 0.0 {
        // S_(n) ≥ S_0 = 0 > x.
        return Ok(TailEstimate::exact(1.0));
    }
    if n == 0 {
        return Ok(TailEstimate::exact(0.0));
    }
    if n == 1 {
        // P(max(0, ξ_1) > x) = F̄_1(x) for x ≥ 0.
        return Ok(TailEstimate::exact(seq.dist_at(1).survival(x)));
    }
    if seq.all_nonnegative() {
        // Partial sums are nondecreasing, so S_(n) = S_n beyond 0.
        return sum_tail_grid(seq, n, x, opts);
    }
    let lower = sum_tail_grid(seq, n, x, opts)?.lower;
    let capacity = threshold_index(x, opts.step);
    let mut ladder = ConvolutionLadder::new(seq, opts.step, capacity, true, opts.max_cells)?;
    for _ in 0..n {
        ladder.advance()?;
    }
    let (_, upper) = ladder.bracket(x);
    Ok(TailEstimate::bracket(
        lower,
        upper.max(lower),
        EstimateMethod::GridConvolution { step: opts.step },
    ))
}

/// Certified bracket of the two-fold convolution tail P(X_1 + X_2 > x) for
/// independent copies of the positive part of `dist`.  Exponential inputs
/// take the closed Erlang form; everything else goes through the lattice.
pub fn convolution_square_tail(
    dist: &TailDistribution,
    x: f64,
    opts: &GridOptions,
) -> Result<TailEstimate> {
    if x < 0.0 {
        return Ok(TailEstimate::exact(1.0));
    }
    if let TailDistribution::Exponential { rate } = dist {
        return Ok(TailEstimate::exact(erlang_tail(2, *rate, x)));
    }
    let seq = SequenceSpec::iid(dist.clone());
    let capacity = threshold_index(x, opts.step);
    let mut ladder = ConvolutionLadder::new(&seq, opts.step, capacity, true, opts.max_cells)?;
    ladder.advance()?;
    ladder.advance()?;
    let (lo, hi) = ladder.bracket(x);
    Ok(TailEstimate::bracket(
        lo,
        hi,
        EstimateMethod::GridConvolution { step: opts.step },
    ))
}

/// A calibrated power-shape envelope for fixed-level sum tails:
///
/// P(S_n > x) ≤ min(1, ĉ · n^{p+1} · F̄_ν(x)),
///
/// where ν is a reference component index and the constant ĉ is fitted on a
/// finite grid with a safety factor of two.  The shape (a power of the level
/// times the pivot marginal tail) is the one valid for dominatedly varying
/// pivots with uniformly comparable components and any p above the pivot's
/// upper Matuszewska index; the calibrated constant is heuristic, which is
/// why the envelope may only accelerate series truncation and never replaces
/// the crude remainder in a certified upper bound.
#[derive(Clone, Debug, Serialize)]
pub struct TailEnvelope {
    /// Reference component index ν ≥ 1.
    pub pivot: usize,
    /// Power parameter p in the n^{p+1} level factor.
    pub p: f64,
    /// Fitted constant ĉ (includes the safety factor).
    pub coefficient: f64,
    /// Set when [`TailEnvelope::verify`] found a violation and raised ĉ.
    pub recalibrated: bool,
}

impl TailEnvelope {
    /// Fit ĉ = 2 · max over the calibration grid of
    /// upper(P(S_n > x)) / (n^{p+1} F̄_ν(x)).
    pub fn calibrate(
        seq: &SequenceSpec,
        pivot: usize,
        p: f64,
        levels: &[usize],
        xs: &[f64],
        opts: &GridOptions,
    ) -> Result<Self> {
        if pivot == 0 {
            return Err(Error::InvalidParameter {
                name: "pivot",
                reason: "component indices start at 1".into(),
            });
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("envelope power must be finite and positive (got {p})"),
            });
        }
        if levels.is_empty() || xs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "calibration_grid",
                reason: "need at least one level and one threshold".into(),
            });
        }
        let mut coeff = 0.0f64;
        for &x in xs {
            let pivot_tail = seq.dist_at(pivot).survival(x);
            if pivot_tail <= 0.0 {
                return Err(Error::DegeneratePivot);
            }
            for &n in levels {
                if n == 0 {
                    continue;
                }
                let up = sum_tail_grid(seq, n, x, opts)?.upper;
                coeff = coeff.max(up / ((n as f64).powf(p + 1.0) * pivot_tail));
            }
        }
        Ok(TailEnvelope {
            pivot,
            p,
            coefficient: 2.0 * coeff,
            recalibrated: false,
        })
    }

    /// Envelope value min(1, ĉ n^{p+1} F̄_ν(x)).
    pub fn bound(&self, seq: &SequenceSpec, n: usize, x: f64) -> f64 {
        let pivot_tail = seq.dist_at(self.pivot).survival(x);
        (self.coefficient * (n as f64).powf(self.p + 1.0) * pivot_tail).min(1.0)
    }

    /// Re-check dominance of the envelope over certified upper brackets on a
    /// grid.  Returns `Ok(true)` when no violation is found; otherwise raises
    /// ĉ just enough (with the safety factor) to restore dominance on this
    /// grid, flags the envelope as recalibrated, and returns `Ok(false)`.
    pub fn verify(
        &mut self,
        seq: &SequenceSpec,
        levels: &[usize],
        xs: &[f64],
        opts: &GridOptions,
    ) -> Result<bool> {
        let mut clean = true;
        for &x in xs {
            let pivot_tail = seq.dist_at(self.pivot).survival(x);
            if pivot_tail <= 0.0 {
                return Err(Error::DegeneratePivot);
            }
            for &n in levels {
                if n == 0 {
                    continue;
                }
                let up = sum_tail_grid(seq, n, x, opts)?.upper;
                if up > self.bound(seq, n, x) {
                    let needed = up / ((n as f64).powf(self.p + 1.0) * pivot_tail);
                    self.coefficient = 2.0 * needed.max(self.coefficient);
                    self.recalibrated = true;
                    clean = false;
                }
            }
        }
        Ok(clean)
    }

    /// Envelope-shaped bound on the series remainder past level `cap`:
    /// Σ_{n>cap} P(η = n) min(1, ĉ n^{p+1} F̄_ν(x)) ≤ ĉ F̄_ν(x) E[η^{p+1} 1{η>cap}].
    /// `None` when the moment is infinite or cannot be certified.
    fn series_remainder(
        &self,
        seq: &SequenceSpec,
        eta: &CountingDistribution,
        cap: u64,
        x: f64,
    ) -> Option<f64> {
        let pivot_tail = seq.dist_at(self.pivot).survival(x);
        match eta.partial_power_moment_upper(self.p + 1.0, cap) {
            Ok(MomentValue::Finite(m)) => Some(self.coefficient * pivot_tail * m),
            _ => None,
        }
    }
}

/// Tail P(Z_η > x) of a stopped functional at x > 0, as a truncated series
/// over the stopping variable with a certified remainder.
///
/// Per-level terms: exact products for [`StoppedFunctional::RandomMax`],
/// certified lattice brackets for the sum kinds (the maximum of sums uses the
/// sandwich from [`maxsum_tail`]).  The series stops at level K once the
/// remainder bound drops below `tol` times the accumulated certified lower
/// bound, or vanishes exactly (finite stopping support).  Components with
/// negative support need lattice capacity that grows with the truncation
/// level, so those series restart with a doubled level target rather than
/// paying the worst case up front.
pub fn stopped_tail(
    functional: StoppedFunctional,
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    x: f64,
    opts: &SeriesOptions,
) -> Result<TailEstimate> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            reason: format!("stopped tails are evaluated at finite x > 0 (got {x})"),
        });
    }
    if !(opts.tol > 0.0 && opts.tol <= 0.1) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("series tolerance must lie in (0, 0.1] (got {})", opts.tol),
        });
    }
    if opts.level_cap == 0 {
        return Err(Error::InvalidParameter {
            name: "level_cap",
            reason: "need at least one series level".into(),
        });
    }
    if seq.max_survival(0.0) == 0.0 {
        // Every component is ≤ 0 almost surely, so each functional is ≤ 0.
        return Ok(TailEstimate::exact(0.0));
    }
    match functional {
        StoppedFunctional::RandomMax => stopped_max_series(seq, eta, x, opts),
        StoppedFunctional::RandomSum | StoppedFunctional::RandomMaxOfSums => {
            stopped_sum_series(functional, seq, eta, x, opts)
        }
    }
}

/// Series for the random maximum: terms are exact, so the bracket width comes
/// from the remainder alone.  The remainder past level K is bounded both by
/// P(η > K) and by sup_k F̄_k(x) · E[η 1{η > K}] (a union bound over the
/// components beyond level K); the smaller of the two is used.
fn stopped_max_series(
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    x: f64,
    opts: &SeriesOptions,
) -> Result<TailEstimate> {
    let sup_tail = seq.max_survival(x);
    let mut acc = Accumulator::new();
    let mut log_cdf = Accumulator::new();
    let mut product_zero = false;
    let mut last_remainder = 1.0;
    for n in 1..=opts.level_cap {
        let s = seq.dist_at(n).survival(x);
        if s >= 1.0 {
            product_zero = true;
        } else if !product_zero {
            log_cdf.add((-s).ln_1p());
        }
        let term = if product_zero {
            1.0
        } else {
            log1mexp(log_cdf.value().min(0.0)).exp()
        };
        let weight = eta.pmf(n as u64);
        if weight > 0.0 {
            acc.add(weight * term);
        }
        let crude = eta.tail_mass_upper(n as u64);
        let moment_bound = match eta.partial_first_moment_upper(n as u64) {
            MomentValue::Finite(m) => sup_tail * m,
            MomentValue::Infinite => f64::INFINITY,
        };
        let remainder = crude.min(moment_bound);
        last_remainder = remainder;
        if remainder == 0.0 {
            return Ok(TailEstimate::exact(acc.value().min(1.0)));
        }
        if remainder <= opts.tol * acc.value() {
            let lower = acc.value().min(1.0);
            let upper = (acc.value() + remainder).min(1.0);
            return Ok(TailEstimate::bracket(
                lower,
                upper,
                EstimateMethod::SeriesTruncated {
                    levels: n,
                    remainder,
                },
            ));
        }
    }
    Err(Error::NoConvergence {
        tol: opts.tol,
        levels: opts.level_cap,
        lower: acc.value().min(1.0),
        upper: (acc.value() + last_remainder).min(1.0),
    })
}

enum PassOutcome {
    Converged(TailEstimate),
    Unconverged { lower: f64, upper: f64 },
}

/// Series driver for the sum functionals.  Components with negative support
/// make the lattice capacity depend on the deepest level convolved, so the
/// level target doubles between passes; with nonnegative components a single
/// pass at the full level cap costs nothing extra.
fn stopped_sum_series(
    functional: StoppedFunctional,
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    x: f64,
    opts: &SeriesOptions,
) -> Result<TailEstimate> {
    let negative_shifts = seq.min_support_lower() < 0.0;
    let mut target = if negative_shifts {
        let seed = match eta.support_max() {
            Some(m) => (m as usize).max(16),
            None => 16,
        };
        seed.min(opts.level_cap)
    } else {
        opts.level_cap
    };
    loop {
        match run_sum_series_pass(functional, seq, eta, x, opts, target)? {
            PassOutcome::Converged(estimate) => return Ok(estimate),
            PassOutcome::Unconverged { lower, upper } => {
                if target >= opts.level_cap {
                    return Err(Error::NoConvergence {
                        tol: opts.tol,
                        levels: target,
                        lower,
                        upper,
                    });
                }
                target = (target * 2).min(opts.level_cap);
            }
        }
    }
}

fn run_sum_series_pass(
    functional: StoppedFunctional,
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    x: f64,
    opts: &SeriesOptions,
    target: usize,
) -> Result<PassOutcome> {
    let h = opts.grid.step;
    // Worst tail threshold over the levels this pass can reach.
    let mut worst_y = 0.0f64;
    let mut shift = 0.0;
    for k in 1..=target {
        shift += seq.dist_at(k).support_lower();
        worst_y = worst_y.max(x - shift);
    }
    let mut sum_ladder =
        ConvolutionLadder::new(seq, h, threshold_index(worst_y, h), false, opts.grid.max_cells)?;
    let needs_positive_part =
        functional == StoppedFunctional::RandomMaxOfSums && !seq.all_nonnegative();
    let mut pos_ladder = if needs_positive_part {
        Some(ConvolutionLadder::new(
            seq,
            h,
            threshold_index(x, h),
            true,
            opts.grid.max_cells,
        )?)
    } else {
        None
    };
    let mut lower_acc = Accumulator::new();
    let mut upper_acc = Accumulator::new();
    let mut crude = 1.0;
    for n in 1..=target {
        sum_ladder.advance()?;
        if let Some(ladder) = pos_ladder.as_mut() {
            ladder.advance()?;
        }
        let weight = eta.pmf(n as u64);
        if weight > 0.0 {
            let (term_lo, term_hi) = if n == 1 {
                let s = seq.dist_at(1).survival(x);
                (s, s)
            } else {
                let (sum_lo, sum_hi) = sum_ladder.bracket(x);
                match &pos_ladder {
                    Some(ladder) => (sum_lo, ladder.bracket(x).1.max(sum_lo)),
                    None => (sum_lo, sum_hi),
                }
            };
            lower_acc.add(weight * term_lo);
            upper_acc.add(weight * term_hi);
        }
        crude = eta.tail_mass_upper(n as u64);
        if crude == 0.0 {
            let lower = lower_acc.value().min(1.0);
            let upper = upper_acc.value().min(1.0).max(lower);
            let estimate = if lower == upper {
                TailEstimate::exact(lower)
            } else {
                TailEstimate::bracket(
                    lower,
                    upper,
                    EstimateMethod::SeriesTruncated {
                        levels: n,
                        remainder: 0.0,
                    },
                )
            };
            return Ok(PassOutcome::Converged(estimate));
        }
        // The envelope may certify a smaller discarded mass and stop the
        // series earlier, but the upper bracket keeps the crude remainder.
        let stop_remainder = match &opts.envelope {
            Some(env) => env
                .series_remainder(seq, eta, n as u64, x)
                .map_or(crude, |r| r.min(crude)),
            None => crude,
        };
        if stop_remainder <= opts.tol * lower_acc.value() {
            let lower = lower_acc.value().min(1.0);
            let upper = (upper_acc.value() + crude).min(1.0).max(lower);
            return Ok(PassOutcome::Converged(TailEstimate::bracket(
                lower,
                upper,
                EstimateMethod::SeriesTruncated {
                    levels: n,
                    remainder: crude,
                },
            )));
        }
    }
    let lower = lower_acc.value().min(1.0);
    Ok(PassOutcome::Unconverged {
        lower,
        upper: (upper_acc.value() + crude).min(1.0).max(lower),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::cai_tang_survival;

    fn example_alternating() -> SequenceSpec {
        // Odd components Pareto (1+x)^{-3} on [0, ∞), even components
        // (2+x)^{-3} on [−1, ∞).
        SequenceSpec::periodic(
            vec![
                TailDistribution::pareto_shifted(0.0, 3.0).unwrap(),
                TailDistribution::pareto_shifted(1.0, 3.0).unwrap(),
            ],
            vec![],
        )
    }

    fn example_mixed() -> SequenceSpec {
        // First component consistently varying, multiples of 3 exponential,
        // everything else degenerate at zero.
        SequenceSpec::periodic(
            vec![
                TailDistribution::degenerate_at_zero(),
                TailDistribution::degenerate_at_zero(),
                TailDistribution::exponential(1.0).unwrap(),
            ],
            vec![(1, TailDistribution::cai_tang(0.5).unwrap())],
        )
    }

    fn small_eta() -> CountingDistribution {
        CountingDistribution::finite_support(vec![
            (0, 0.30),
            (1, 0.20),
            (2, 0.10),
            (3, 0.15),
            (4, 0.15),
            (5, 0.10),
        ])
        .unwrap()
    }

    #[test]
    fn erlang_tail_matches_closed_forms() {
        let x = 3.2f64;
        assert!((erlang_tail(1, 1.0, x) - (-x).exp()).abs() < 1e-15);
        assert!((erlang_tail(2, 1.0, x) - (1.0 + x) * (-x).exp()).abs() < 1e-15);
        // Rate 0.5, n = 3 at x = 2: e^{-1} (1 + 1 + 1/2).
        let expected = 2.5 * (-1.0f64).exp();
        assert!((erlang_tail(3, 0.5, 2.0) - expected).abs() < 1e-15);
        assert_eq!(erlang_tail(2, 1.0, -0.5), 1.0);
        assert_eq!(erlang_tail(0, 1.0, 4.0), 0.0);
    }

    #[test]
    fn erlang_tail_is_stable_for_large_arguments() {
        let v = erlang_tail(5, 1.0, 800.0);
        assert!(v.is_finite() && (0.0..=1.0).contains(&v));
        // Survival of a sum dominates the survival of one addend.
        assert!(erlang_tail(2, 1.0, 30.0) > erlang_tail(1, 1.0, 30.0));
    }

    #[test]
    fn max_tail_two_exponentials_closed_form() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let x = std::f64::consts::LN_2;
        // F(ln 2) = 1/2, so P(max > ln 2) = 1 - 1/4.
        let est = max_tail_n(&seq, 2, x);
        assert!((est.value() - 0.75).abs() < 1e-14);
        assert_eq!(est.lower, est.upper);
        assert_eq!(est.method, EstimateMethod::Exact);
    }

    #[test]
    fn max_tail_edge_levels() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        assert_eq!(max_tail_n(&seq, 0, 1.0).value(), 0.0);
        assert_eq!(max_tail_n(&seq, 0, -1.0).value(), 1.0);
        assert_eq!(max_tail_n(&seq, 3, -0.5).value(), 1.0);
    }

    #[test]
    fn max_tail_mixed_components_matches_direct_product() {
        let seq = example_mixed();
        let x = 2.0;
        let expected = 1.0 - (1.0 - cai_tang_survival(0.5, x)) * (1.0 - (-x).exp());
        let est = max_tail_n(&seq, 3, x);
        assert!(
            (est.value() - expected).abs() < 1e-14,
            "{} vs {expected}",
            est.value()
        );
    }

    #[test]
    fn bonferroni_lower_bound_is_dominated_by_exact_tail() {
        let seq = example_alternating();
        for &n in &[1usize, 2, 5, 8] {
            for &x in &[0.5, 2.0, 10.0, 40.0] {
                let lower = bonferroni_lower_max(&seq, n, x);
                let exact = max_tail_n(&seq, n, x).value();
                assert!(
                    lower <= exact + 1e-12,
                    "bonferroni {lower} exceeds exact {exact} at n={n}, x={x}"
                );
            }
        }
        // Closed form for two iid exponentials at x = 5.
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let s1 = 2.0 * (-5.0f64).exp();
        assert!((bonferroni_lower_max(&seq, 2, 5.0) - s1 * (1.0 - s1)).abs() < 1e-15);
    }

    #[test]
    fn sum_tail_grid_brackets_erlang() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let opts = GridOptions {
            step: 1.0 / 64.0,
            ..GridOptions::default()
        };
        let exact = erlang_tail(3, 1.0, 6.0);
        let est = sum_tail_grid(&seq, 3, 6.0, &opts).unwrap();
        assert!(est.contains(exact), "[{}, {}] misses {exact}", est.lower, est.upper);
        assert!(est.width() < 0.01);
        assert!(matches!(est.method, EstimateMethod::GridConvolution { .. }));
    }

    #[test]
    fn sum_tail_grid_low_levels_are_exact() {
        let seq = example_alternating();
        let opts = GridOptions::default();
        assert_eq!(sum_tail_grid(&seq, 0, 3.0, &opts).unwrap().value(), 0.0);
        assert_eq!(sum_tail_grid(&seq, 0, -1.0, &opts).unwrap().value(), 1.0);
        let est = sum_tail_grid(&seq, 1, 9.0, &opts).unwrap();
        assert_eq!(est.value(), seq.dist_at(1).survival(9.0));
        assert_eq!(est.method, EstimateMethod::Exact);
    }

    #[test]
    fn maxsum_sandwich_is_ordered_and_tight_for_nonnegative() {
        let opts = GridOptions {
            step: 1.0 / 32.0,
            ..GridOptions::default()
        };
        // Mixed signs: bracket must contain the plain-sum bracket's lower
        // bound and be dominated by the positive-part upper bound.
        let seq = example_alternating();
        let sandwich = maxsum_tail(&seq, 4, 25.0, &opts).unwrap();
        let plain = sum_tail_grid(&seq, 4, 25.0, &opts).unwrap();
        assert!(sandwich.lower <= sandwich.upper);
        assert_eq!(sandwich.lower, plain.lower);
        assert!(sandwich.upper >= plain.upper - 1e-12);
        // Nonnegative components collapse the sandwich to the sum bracket.
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let a = maxsum_tail(&seq, 3, 5.0, &opts).unwrap();
        let b = sum_tail_grid(&seq, 3, 5.0, &opts).unwrap();
        assert_eq!((a.lower, a.upper), (b.lower, b.upper));
        // x below zero is certain.
        assert_eq!(maxsum_tail(&seq, 3, -2.0, &opts).unwrap().value(), 1.0);
    }

    #[test]
    fn convolution_square_uses_erlang_closed_form_for_exponentials() {
        let d = TailDistribution::exponential(2.0).unwrap();
        let est = convolution_square_tail(&d, 10.0, &GridOptions::default()).unwrap();
        assert_eq!(est.method, EstimateMethod::Exact);
        assert!((est.value() - erlang_tail(2, 2.0, 10.0)).abs() < 1e-18);
    }

    #[test]
    fn convolution_square_of_pareto_is_near_twice_the_marginal() {
        // Subexponential benchmark: F̄^{2*}(x)/F̄(x) → 2.  At x = 1000 the
        // ratio is within a few percent of the limit for Pareto(3).
        let d = TailDistribution::pareto_shifted(0.0, 3.0).unwrap();
        let x = 1000.0;
        let opts = GridOptions {
            step: 0.5,
            max_cells: 1 << 16,
        };
        let est = convolution_square_tail(&d, x, &opts).unwrap();
        let marginal = d.survival(x);
        assert!(est.lower / marginal > 1.9, "{}", est.lower / marginal);
        assert!(est.upper / marginal < 2.1, "{}", est.upper / marginal);
    }

    #[test]
    fn stopped_tail_degenerate_eta_is_the_fixed_level_tail() {
        let seq = SequenceSpec::iid(TailDistribution::pareto_shifted(0.0, 3.0).unwrap());
        let eta = CountingDistribution::degenerate_at(1);
        let opts = SeriesOptions::default();
        let marginal = seq.dist_at(1).survival(7.0);
        for functional in [
            StoppedFunctional::RandomMax,
            StoppedFunctional::RandomSum,
            StoppedFunctional::RandomMaxOfSums,
        ] {
            let est = stopped_tail(functional, &seq, &eta, 7.0, &opts).unwrap();
            assert!(
                (est.value() - marginal).abs() < 1e-15,
                "{functional:?}: {} vs {marginal}",
                est.value()
            );
            assert_eq!(est.lower, est.upper);
        }
    }

    #[test]
    fn stopped_max_finite_support_matches_enumeration() {
        let seq = example_mixed();
        let eta = small_eta();
        let x = 3.0;
        let mut expected = 0.0;
        for n in 1..=5usize {
            expected += eta.pmf(n as u64) * max_tail_n(&seq, n, x).value();
        }
        let est = stopped_tail(
            StoppedFunctional::RandomMax,
            &seq,
            &eta,
            x,
            &SeriesOptions::default(),
        )
        .unwrap();
        assert_eq!(est.method, EstimateMethod::Exact);
        assert!(
            ((est.value() - expected) / expected).abs() < 1e-12,
            "{} vs {expected}",
            est.value()
        );
    }

    #[test]
    fn stopped_sum_finite_support_brackets_the_erlang_mixture() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let eta = small_eta();
        let x = 6.0;
        let mut expected = 0.0;
        for n in 1..=5u64 {
            expected += eta.pmf(n) * erlang_tail(n, 1.0, x);
        }
        let opts = SeriesOptions {
            grid: GridOptions {
                step: 1.0 / 64.0,
                ..GridOptions::default()
            },
            ..SeriesOptions::default()
        };
        let sum = stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, x, &opts).unwrap();
        assert!(sum.contains(expected), "[{}, {}] misses {expected}", sum.lower, sum.upper);
        assert!(sum.width() < 0.01);
        // Nonnegative components: the maximum of partial sums is the full sum.
        let maxsum =
            stopped_tail(StoppedFunctional::RandomMaxOfSums, &seq, &eta, x, &opts).unwrap();
        assert_eq!((maxsum.lower, maxsum.upper), (sum.lower, sum.upper));
    }

    #[test]
    fn stopped_max_geometric_eta_matches_closed_form() {
        // For iid components and geometric η (pmf (1−q) q^n):
        // P(ξ_(η) > x) = 1 − (1−q)/(1 − q F(x)).
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let eta = CountingDistribution::geometric(0.5).unwrap();
        let x = 1.0f64;
        let f = 1.0 - (-x).exp();
        let expected = 1.0 - 0.5 / (1.0 - 0.5 * f);
        let opts = SeriesOptions {
            tol: 0.01,
            ..SeriesOptions::default()
        };
        let est = stopped_tail(StoppedFunctional::RandomMax, &seq, &eta, x, &opts).unwrap();
        assert!(est.contains(expected), "[{}, {}] misses {expected}", est.lower, est.upper);
        assert!(est.width() <= 0.011 * expected);
    }

    #[test]
    fn stopped_sum_with_zeta_eta_converges_with_certified_bracket() {
        let seq = example_alternating();
        let eta = CountingDistribution::zeta(6.0).unwrap();
        let est = stopped_tail(
            StoppedFunctional::RandomMaxOfSums,
            &seq,
            &eta,
            20.0,
            &SeriesOptions::default(),
        )
        .unwrap();
        assert!(est.lower > 0.0);
        assert!(est.upper < 1e-2);
        match est.method {
            EstimateMethod::SeriesTruncated { remainder, .. } => {
                assert!(remainder <= 0.05 * est.lower + 1e-18);
            }
            other => panic!("expected a truncated series, got {other:?}"),
        }
    }

    #[test]
    fn stopped_tail_rejects_bad_inputs() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let eta = CountingDistribution::geometric(0.5).unwrap();
        let opts = SeriesOptions::default();
        for x in [0.0, -3.0, f64::INFINITY, f64::NAN] {
            let err =
                stopped_tail(StoppedFunctional::RandomMax, &seq, &eta, x, &opts).unwrap_err();
            assert!(matches!(err, Error::InvalidParameter { name: "x", .. }));
        }
        for tol in [0.0, -0.5, 0.2] {
            let opts = SeriesOptions {
                tol,
                ..SeriesOptions::default()
            };
            let err =
                stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, 1.0, &opts).unwrap_err();
            assert!(matches!(err, Error::InvalidParameter { name: "tol", .. }));
        }
        let opts = SeriesOptions {
            level_cap: 0,
            ..SeriesOptions::default()
        };
        let err = stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "level_cap", .. }));
    }

    #[test]
    fn stopped_sum_no_convergence_carries_the_achieved_bracket() {
        let seq = SequenceSpec::iid(TailDistribution::pareto_shifted(0.0, 3.0).unwrap());
        let eta = CountingDistribution::zeta(6.0).unwrap();
        let opts = SeriesOptions {
            level_cap: 4,
            ..SeriesOptions::default()
        };
        let err = stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, 10.0, &opts).unwrap_err();
        match err {
            Error::NoConvergence {
                levels,
                lower,
                upper,
                ..
            } => {
                assert_eq!(levels, 4);
                assert!(lower > 0.0);
                assert!(upper > lower);
                assert!(upper <= 1.0);
            }
            other => panic!("expected NoConvergence, got {other}"),
        }
    }

    #[test]
    fn all_nonpositive_components_have_zero_stopped_tails() {
        let seq = SequenceSpec::iid(TailDistribution::degenerate_at_zero());
        let eta = CountingDistribution::geometric(0.5).unwrap();
        for functional in [
            StoppedFunctional::RandomMax,
            StoppedFunctional::RandomSum,
            StoppedFunctional::RandomMaxOfSums,
        ] {
            let est =
                stopped_tail(functional, &seq, &eta, 2.0, &SeriesOptions::default()).unwrap();
            assert_eq!(est.value(), 0.0);
            assert_eq!(est.method, EstimateMethod::Exact);
        }
    }

    #[test]
    fn envelope_calibration_dominates_the_fitted_grid() {
        let seq = SequenceSpec::iid(TailDistribution::pareto_shifted(0.0, 3.0).unwrap());
        let levels = [1usize, 2, 4];
        let xs = [30.0, 80.0];
        let opts = GridOptions::default();
        let mut env = TailEnvelope::calibrate(&seq, 1, 3.5, &levels, &xs, &opts).unwrap();
        assert!(!env.recalibrated);
        for &x in &xs {
            for &n in &levels {
                let up = sum_tail_grid(&seq, n, x, &opts).unwrap().upper;
                assert!(env.bound(&seq, n, x) >= up);
            }
        }
        assert!(env.verify(&seq, &levels, &xs, &opts).unwrap());
        assert!(!env.recalibrated);
    }

    #[test]
    fn envelope_verification_recalibrates_an_undersized_coefficient() {
        let seq = SequenceSpec::iid(TailDistribution::pareto_shifted(0.0, 3.0).unwrap());
        let mut env = TailEnvelope {
            pivot: 1,
            p: 3.5,
            coefficient: 1e-9,
            recalibrated: false,
        };
        let levels = [2usize, 4];
        let xs = [30.0];
        let opts = GridOptions::default();
        assert!(!env.verify(&seq, &levels, &xs, &opts).unwrap());
        assert!(env.recalibrated);
        assert!(env.coefficient > 1e-9);
        assert!(env.verify(&seq, &levels, &xs, &opts).unwrap());
    }

    #[test]
    fn envelope_never_delays_series_truncation() {
        let seq = example_alternating();
        let eta = CountingDistribution::zeta(6.0).unwrap();
        let x = 20.0;
        let plain = SeriesOptions::default();
        let baseline = stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, x, &plain).unwrap();
        let env =
            TailEnvelope::calibrate(&seq, 1, 3.5, &[1, 2, 4, 8], &[10.0, 20.0], &plain.grid)
                .unwrap();
        let accelerated_opts = SeriesOptions {
            envelope: Some(env),
            ..SeriesOptions::default()
        };
        let accelerated =
            stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, x, &accelerated_opts).unwrap();
        let levels_of = |m: &EstimateMethod| match m {
            EstimateMethod::SeriesTruncated { levels, .. } => *levels,
            other => panic!("expected a truncated series, got {other:?}"),
        };
        assert!(levels_of(&accelerated.method) <= levels_of(&baseline.method));
        // Both brackets enclose a common value: their intersection is
        // nonempty because each contains the true tail.
        assert!(accelerated.lower <= baseline.upper && baseline.lower <= accelerated.upper);
    }
}
