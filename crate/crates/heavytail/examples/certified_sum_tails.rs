//! Certified lattice-convolution brackets for fixed-level sums.
//!
//! The convolution of survival functions is bracketed on a lattice of step h
//! by rounding mass outward in both directions, so P(S_n > x) is enclosed by
//! construction: no sampling error, no asymptotic hand-waving.  Halving the
//! step can only tighten the enclosure.
//!
//! Two classical facts are visible numerically:
//! * for an Erlang cross-check, the bracket of an i.i.d. exponential sum
//!   contains the closed form at every step size;
//! * for power tails, P(X_1 + X_2 > x) / F̄(x) approaches 2 — one big jump
//!   dominates the sum — while for exponential tails the same ratio grows
//!   without bound (light tails gain from pooling many moderate summands).
//!
//! Run with: cargo run --example certified_sum_tails

use heavytail::montecarlo::sum_to_marginal_ratio;
use heavytail::tail_algebra::{convolution_square_tail, erlang_tail, sum_tail_grid};
use heavytail::{GridOptions, SequenceSpec, TailDistribution};

fn main() -> heavytail::Result<()> {
    // Erlang cross-check: S_5 of i.i.d. Exponential(1) at x = 7.
    let seq = SequenceSpec::iid(TailDistribution::exponential(1.0)?);
    let exact = erlang_tail(5, 1.0, 7.0);
    println!("P(S_5 > 7), i.i.d. exponential(1); closed form {exact:.10}");
    println!("{:>8}  {:>14}  {:>14}  {:>10}", "step", "lower", "upper", "width");
    let mut previous_width = f64::INFINITY;
    for k in 0..4 {
        let step = 0.25 / f64::powi(2.0, k);
        let opts = GridOptions {
            step,
            ..GridOptions::default()
        };
        let est = sum_tail_grid(&seq, 5, 7.0, &opts)?;
        println!(
            "{step:>8}  {:>14.10}  {:>14.10}  {:>10.2e}",
            est.lower,
            est.upper,
            est.width()
        );
        assert!(est.contains(exact), "bracket must contain the Erlang value");
        assert!(est.width() <= previous_width, "refinement can only tighten");
        previous_width = est.width();
    }

    // Single-big-jump signature: the two-fold convolution of a power tail is
    // asymptotically twice the marginal.
    let pareto = TailDistribution::pareto_shifted(0.0, 3.0)?;
    let opts = GridOptions::default();
    println!("\nP(X1 + X2 > x) / F̄(x) for the power tail (1+x)^-3:");
    for x in [50.0, 200.0, 1000.0] {
        let conv = convolution_square_tail(&pareto, x, &GridOptions {
            step: x / 20_000.0,
            ..opts
        })?;
        let ratio = conv.value() / pareto.survival(x);
        println!("  x = {x:>6}: ratio ≈ {ratio:.4}");
    }

    // The same phenomenon as a certified enclosure: the sum tail divided by
    // the *sum of the marginal tails*, P(S_n > x) / Σ_{k≤n} F̄_k(x), tends
    // to 1 — and the enclosure visibly tightens toward 1 as x grows.
    let seq = SequenceSpec::iid(pareto);
    println!();
    let mut previous_gap = f64::INFINITY;
    for x in [1.0e3, 1.0e4] {
        let ratio = sum_to_marginal_ratio(&seq, 2, x, &GridOptions {
            step: x / 20_000.0,
            ..opts
        })?;
        println!(
            "certified: P(S_2 > {x:.0e}) / (2 F̄({x:.0e})) ∈ [{:.5}, {:.5}]",
            ratio.lower, ratio.upper
        );
        assert!(ratio.lower > 0.95 && ratio.upper < 1.05);
        let gap = (ratio.estimate - 1.0).abs();
        assert!(gap < previous_gap, "must approach 1 as x grows");
        previous_gap = gap;
    }
    Ok(())
}
