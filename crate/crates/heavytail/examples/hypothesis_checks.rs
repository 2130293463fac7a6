//! Hypothesis checkers for the closure results behind the CLI's `check`
//! command.
//!
//! Each checker evaluates the assumptions of one theorem against concrete
//! component laws and a stopping variable, reporting a three-valued verdict
//! per condition: grid evidence can witness a violation (fail) or stay
//! consistent with the hypothesis (pass), and anything beyond the reach of a
//! finite grid is reported inconclusive instead of being silently assumed.
//!
//! Shown here:
//! * theorem 4 (stopped maximum, mixed components) on a sequence whose pivot
//!   has a consistently varying tail while every other component is either
//!   degenerate or exponentially negligible;
//! * theorem 5 (maximum of sums) on alternating power tails with a Zeta(6)
//!   stopping variable, including the half-integer moment exponent it
//!   certifies;
//! * corollary 2 rejecting an i.i.d. exponential sequence (light tails are
//!   outside the consistently varying class, and no finite moment order can
//!   clear an infinite Matuszewska index).
//!
//! Run with: cargo run --example hypothesis_checks

use heavytail::diagnostics::{check_corollary2, check_theorem4, check_theorem5};
use heavytail::{CountingDistribution, GridSpec, SequenceSpec, TailDistribution, Verdict};

fn print_report(title: &str, report: &heavytail::HypothesisReport) {
    println!("{title}");
    for condition in &report.conditions {
        let statistic = condition
            .statistic
            .map(|s| format!(" [statistic {s:.4}]"))
            .unwrap_or_default();
        println!(
            "  ({}) {}{statistic}: {}",
            condition.id,
            condition.verdict.label(),
            condition.description
        );
    }
    for note in &report.notes {
        println!("  note: {note}");
    }
    println!("  overall: {}\n", report.overall.label());
}

fn main() -> heavytail::Result<()> {
    let grid = GridSpec::default();

    // Pivot with a consistently varying (but not regularly varying) tail at
    // index 1, exponential components at indices divisible by 3, degenerate
    // components elsewhere.
    let mixed = SequenceSpec::periodic(
        vec![
            TailDistribution::degenerate_at_zero(),
            TailDistribution::degenerate_at_zero(),
            TailDistribution::exponential(1.0)?,
        ],
        vec![(1, TailDistribution::cai_tang(0.5)?)],
    )
    .with_pivot(1);
    let eta = CountingDistribution::geometric(0.5)?;
    let report = check_theorem4(&mixed, &eta, &grid, 64)?;
    print_report("theorem 4: stopped maximum over mixed components", &report);
    assert_eq!(report.overall, Verdict::Pass);

    let alternating = SequenceSpec::periodic(
        vec![
            TailDistribution::pareto_shifted(0.0, 3.0)?,
            TailDistribution::pareto_shifted(1.0, 3.0)?,
        ],
        vec![],
    );
    let eta = CountingDistribution::zeta(6.0)?;
    let report = check_theorem5(&alternating, &eta, &grid, 64)?;
    print_report("theorem 5: maximum of sums over alternating power tails", &report);
    assert_eq!(report.overall, Verdict::Pass);
    // The moment condition reports the certified exponent: E N^{p+1} < ∞ for
    // p = 3.5, the smallest half-integer above the pivot's index estimate.
    let moment = report
        .conditions
        .iter()
        .find(|c| c.id == "c")
        .expect("moment condition present");
    assert_eq!(moment.statistic, Some(3.5));

    let light = TailDistribution::exponential(1.0)?;
    let eta = CountingDistribution::geometric(0.5)?;
    let report = check_corollary2(&light, &eta, &grid)?;
    print_report("corollary 2: rejected for i.i.d. exponential components", &report);
    assert_eq!(report.overall, Verdict::Fail);
    Ok(())
}
