//! Acceptance gate: twelve named criteria, one pass/fail line each.
//!
//! Every criterion pins a quantitative behavior of the library at a stated
//! tolerance and runtime budget.  Oracles are computed independently inside
//! this file (closed forms, exhaustive enumeration, cross-implementation
//! comparisons) before the library result they certify.

use std::process::Command;
use std::time::{Duration, Instant};

use heavytail::diagnostics::{check_theorem4, check_theorem5, matuszewska_upper};
use heavytail::montecarlo::{running_max_to_sum_ratio, subexp_ratio, sum_to_marginal_ratio};
use heavytail::{
    diagnose, mc_stopped_tail, stopped_tail, CountingDistribution, GridOptions, GridSpec,
    MCConfig, MomentValue, SequenceSpec, SeriesOptions, StoppedFunctional, TailDistribution,
    Verdict,
};

fn pareto3() -> TailDistribution {
    TailDistribution::pareto_shifted(0.0, 3.0).expect("valid tail")
}

/// Alternating shifted power tails; component 2 is supported from -1.
fn alternating_power_sequence() -> SequenceSpec {
    SequenceSpec::periodic(
        vec![
            pareto3(),
            TailDistribution::pareto_shifted(1.0, 3.0).expect("valid tail"),
        ],
        vec![],
    )
}

/// Oscillating pivot at index 1, exponential components at indices divisible
/// by 3, degenerate components elsewhere.
fn mixed_max_sequence() -> SequenceSpec {
    SequenceSpec::periodic(
        vec![
            TailDistribution::degenerate_at_zero(),
            TailDistribution::degenerate_at_zero(),
            TailDistribution::exponential(1.0).expect("valid rate"),
        ],
        vec![(1, TailDistribution::cai_tang(0.5).expect("valid q"))],
    )
    .with_pivot(1)
}

#[test]
fn criterion_01_upper_index_recovers_the_power_law_exponent() {
    let started = Instant::now();
    let (estimate, curve) = matuszewska_upper(&pareto3(), &GridSpec::default()).unwrap();
    let value = estimate.value().expect("power tail has a finite upper index");
    assert!(
        (2.8..=3.2).contains(&value),
        "estimated upper index {value} outside [2.8, 3.2]"
    );
    assert_eq!(curve.len(), GridSpec::default().z_list.len());
    assert!(started.elapsed() < Duration::from_secs(1));
}

#[test]
fn criterion_02_alternating_power_pivot_comparability_is_exactly_one() {
    let started = Instant::now();
    let report = check_theorem5(
        &alternating_power_sequence(),
        &CountingDistribution::zeta(6.0).unwrap(),
        &GridSpec::default(),
        64,
    )
    .unwrap();
    let condition = report
        .conditions
        .iter()
        .find(|c| c.id == "b")
        .expect("comparability condition present");
    // Oracle: with F̄_1 the heaviest component at every x, the supremum over
    // n of (1/(n F̄_1(x))) Σ_{k≤n} F̄_k(x) is attained at n = 1 and equals 1.
    let xs = GridSpec::default().validated().unwrap().xs();
    let top_start = xs[xs.len() / 2];
    for &(x, statistic) in &condition.curve {
        if x >= top_start {
            assert!(
                (statistic - 1.0).abs() <= 1e-9,
                "comparability statistic at x = {x} is {statistic}, not 1"
            );
        }
    }
    assert!(condition.curve.iter().any(|&(x, _)| x >= top_start));
    assert_eq!(condition.verdict, Verdict::Pass);
    assert!(started.elapsed() < Duration::from_secs(1));
}

#[test]
fn criterion_03_mixed_sequence_weighted_dominance_stays_below_two() {
    let started = Instant::now();
    let report = check_theorem4(
        &mixed_max_sequence(),
        &CountingDistribution::geometric(0.5).unwrap(),
        &GridSpec::default(),
        64,
    )
    .unwrap();
    let condition = report
        .conditions
        .iter()
        .find(|c| c.id == "c")
        .expect("weighted dominance condition present");
    // Oracle bound: the pivot contributes 1 exactly at n = 1; every later
    // component is either zero or exponentially negligible against the
    // oscillating pivot tail, so the weighted sum never reaches 2.
    let mut checked = 0;
    for &(x, statistic) in &condition.curve {
        if x >= 32.0 {
            assert!(
                statistic <= 2.0,
                "weighted dominance statistic at x = {x} is {statistic} > 2"
            );
            checked += 1;
        }
    }
    assert!(checked > 0);
    assert_eq!(condition.verdict, Verdict::Pass);
    assert!(started.elapsed() < Duration::from_secs(1));
}

#[test]
fn criterion_04_oscillating_tail_is_consistently_but_not_regularly_varying() {
    let started = Instant::now();
    let law = TailDistribution::cai_tang(0.5).unwrap();
    let report = diagnose(&law, &GridSpec::default(), &GridOptions::default()).unwrap();
    assert_eq!(
        report.consistently_varying.verdict,
        Verdict::Pass,
        "scaling envelope statistic {}",
        report.consistently_varying.statistic
    );
    assert!(
        report.consistently_varying.statistic < 1.1,
        "scaling envelope at the tightest ratio is {}",
        report.consistently_varying.statistic
    );
    assert_eq!(
        report.regularly_varying.verdict,
        Verdict::Fail,
        "log-log residual {}",
        report.regularly_varying.statistic
    );
    assert!(
        report.regularly_varying.statistic > 0.05,
        "log-log residual {} should exceed the gate",
        report.regularly_varying.statistic
    );
    assert!(started.elapsed() < Duration::from_secs(1));
}

#[test]
fn criterion_05_power_moments_of_the_zeta_stopping_law_certify_both_ways() {
    let started = Instant::now();
    let eta = CountingDistribution::zeta(6.0).unwrap();
    // Oracle: E N^r = Σ m^r (m+1)^{-6} / ζ(6) converges exactly when
    // r < 5, so r = 4.5 is finite and r = 5.5 is infinite.
    match eta.moment(4.5).unwrap() {
        MomentValue::Finite(v) => assert!(v.is_finite() && v > 0.0),
        MomentValue::Infinite => panic!("moment of order 4.5 must certify finite"),
    }
    assert_eq!(eta.moment(5.5).unwrap(), MomentValue::Infinite);
    assert!(started.elapsed() < Duration::from_secs(1));
}

#[test]
fn criterion_06_series_matches_exhaustive_enumeration_on_finite_support() {
    let started = Instant::now();
    // Dyadic probabilities keep the enumeration oracle exact in binary
    // floating point.
    let pmf: Vec<(u64, f64)> = vec![
        (0, 0.25),
        (1, 0.25),
        (2, 0.125),
        (3, 0.125),
        (4, 0.125),
        (5, 0.125),
    ];
    let eta = CountingDistribution::finite_support(pmf.clone()).unwrap();

    // Maximum functional: mixed components, oracle by exhaustive enumeration
    // of the first-exceedance decomposition (cancellation-free form of
    // 1 - Π_{k≤n} (1 - F̄_k(x)) for x ≥ 0):
    // P(ξ_(n) > x) = Σ_{k≤n} F̄_k(x) Π_{j<k} (1 - F̄_j(x)).
    let seq = SequenceSpec::periodic(
        vec![pareto3(), TailDistribution::exponential(1.0).unwrap()],
        vec![],
    );
    let opts = SeriesOptions::default();
    for x in [2.0, 7.5, 30.0] {
        let mut oracle = 0.0;
        for &(n, p) in &pmf {
            let mut exceed = 0.0;
            let mut none_before = 1.0;
            for k in 1..=n as usize {
                let tail = seq.dist_at(k).survival(x);
                exceed += tail * none_before;
                none_before *= 1.0 - tail;
            }
            oracle += p * exceed;
        }
        let est = stopped_tail(StoppedFunctional::RandomMax, &seq, &eta, x, &opts).unwrap();
        assert!(
            (est.value() - oracle).abs() <= 1e-12 * oracle,
            "x = {x}: series {} vs enumeration {oracle}",
            est.value()
        );
        assert!(est.width() == 0.0 || est.contains(oracle));
    }

    // Sum functionals: i.i.d. exponential components so each level has the
    // closed Erlang form P(S_n > x) = e^{-x} Σ_{k<n} x^k / k!, written out
    // here directly; partial sums are nondecreasing, so the running maximum
    // agrees with the endpoint sum beyond zero.
    let erlang_oracle = |n: u64, x: f64| -> f64 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 0..n {
            if k > 0 {
                term *= x / k as f64;
            }
            sum += term;
        }
        (-x).exp() * sum
    };
    let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
    let opts = SeriesOptions {
        grid: GridOptions {
            step: 1.0 / 64.0,
            ..GridOptions::default()
        },
        ..SeriesOptions::default()
    };
    for functional in [StoppedFunctional::RandomSum, StoppedFunctional::RandomMaxOfSums] {
        for x in [1.5, 4.0, 9.0] {
            let oracle: f64 = pmf.iter().map(|&(n, p)| p * erlang_oracle(n, x)).sum();
            let est = stopped_tail(functional, &seq, &eta, x, &opts).unwrap();
            assert!(
                est.contains(oracle),
                "{}: bracket [{}, {}] at x = {x} misses enumeration {oracle}",
                functional.label(),
                est.lower,
                est.upper
            );
        }
    }
    assert!(started.elapsed() < Duration::from_secs(10));
}

#[test]
fn criterion_07_certified_brackets_and_monte_carlo_intervals_intersect() {
    let started = Instant::now();
    let seq = alternating_power_sequence();
    let eta = CountingDistribution::zeta(6.0).unwrap();
    let functional = StoppedFunctional::RandomMaxOfSums;
    let cfg = MCConfig {
        samples: 10_000_000,
        seed: 42,
        ..MCConfig::default()
    };
    for x in [20.0, 50.0, 100.0] {
        let certified =
            stopped_tail(functional, &seq, &eta, x, &SeriesOptions::default()).unwrap();
        let sampled = mc_stopped_tail(functional, &seq, &eta, x, &cfg);
        assert!(
            certified.lower <= sampled.upper && sampled.lower <= certified.upper,
            "x = {x}: certified [{:.3e}, {:.3e}] vs monte carlo [{:.3e}, {:.3e}]",
            certified.lower,
            certified.upper,
            sampled.lower,
            sampled.upper
        );
    }
    assert!(started.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_08_two_fold_sum_to_marginal_ratio_approaches_one() {
    let started = Instant::now();
    let seq = SequenceSpec::iid(pareto3());
    let mut previous_gap = f64::INFINITY;
    for x in [1.0e3, 1.0e4] {
        let ratio = sum_to_marginal_ratio(
            &seq,
            2,
            x,
            &GridOptions {
                step: x / 20_000.0,
                ..GridOptions::default()
            },
        )
        .unwrap();
        assert!(
            ratio.lower >= 0.95 && ratio.upper <= 1.05,
            "x = {x}: certified ratio [{}, {}] outside [0.95, 1.05]",
            ratio.lower,
            ratio.upper
        );
        let gap = (ratio.estimate - 1.0).abs();
        assert!(
            gap < previous_gap,
            "x = {x}: gap {gap} did not shrink from {previous_gap}"
        );
        previous_gap = gap;
    }
    assert!(started.elapsed() < Duration::from_secs(30));
}

#[test]
fn criterion_09_running_max_to_sum_ratio_near_one_and_shrinking() {
    let started = Instant::now();
    let seq = alternating_power_sequence();
    let cfg = MCConfig {
        samples: 10_000_000,
        seed: 7,
        ..MCConfig::default()
    };
    let near = running_max_to_sum_ratio(&seq, 3, 30.0, &cfg).unwrap();
    assert!(
        (1.0..=1.1).contains(&near.estimate),
        "ratio estimate {} outside [1.0, 1.1]",
        near.estimate
    );
    assert!(
        near.lower <= 1.1 && near.upper >= 1.0,
        "3σ interval [{}, {}] excludes [1.0, 1.1]",
        near.lower,
        near.upper
    );
    let far = running_max_to_sum_ratio(&seq, 3, 60.0, &cfg).unwrap();
    assert!(
        far.estimate < near.estimate,
        "ratio must shrink along x: {} at 30 vs {} at 60",
        near.estimate,
        far.estimate
    );
    assert!(started.elapsed() < Duration::from_secs(120));
}

#[test]
fn criterion_10_subexponential_ratio_benchmarks() {
    let started = Instant::now();
    let heavy = subexp_ratio(&pareto3(), 1.0e3, &GridOptions::default()).unwrap();
    assert!(
        heavy.estimate >= 1.8 && heavy.estimate <= 2.2,
        "power-tail convolution ratio {} outside [1.8, 2.2]",
        heavy.estimate
    );
    // Closed-form oracle: for Exponential(1) the two-fold convolution tail is
    // e^{-x}(1 + x), so the ratio at x = 20 is exactly 21.
    let light = subexp_ratio(
        &TailDistribution::exponential(1.0).unwrap(),
        20.0,
        &GridOptions::default(),
    )
    .unwrap();
    assert!(
        (light.estimate - 21.0).abs() <= 1e-6,
        "exponential convolution ratio {} is not 21",
        light.estimate
    );
    assert!(started.elapsed() < Duration::from_secs(30));
}

#[test]
fn criterion_11_no_diagnosis_violates_the_inclusion_order() {
    let started = Instant::now();
    let families = vec![
        pareto3(),
        TailDistribution::pareto_shifted(1.0, 3.0).unwrap(),
        TailDistribution::pareto_shifted(0.0, 0.5).unwrap(),
        TailDistribution::exponential(1.0).unwrap(),
        TailDistribution::exponential(0.02).unwrap(),
        TailDistribution::cai_tang(0.5).unwrap(),
        TailDistribution::cai_tang(0.25).unwrap(),
        TailDistribution::degenerate_at_zero(),
        TailDistribution::point_mass(5.0).unwrap(),
        TailDistribution::empirical(vec![0.5, 1.0, 2.5, 7.0, 19.0]).unwrap(),
    ];
    let small = GridSpec {
        x_min: 1.0,
        x_max: 40.0,
        points: 17,
        ..GridSpec::default()
    };
    for law in &families {
        for grid in [&GridSpec::default(), &small] {
            let report = diagnose(law, grid, &GridOptions::default()).unwrap();
            let violations = report.inclusion_violations();
            assert!(
                violations.is_empty(),
                "{law:?}: inclusion violations {violations:?}"
            );
        }
    }
    assert!(started.elapsed() < Duration::from_secs(5));
}

#[test]
fn criterion_12_reproduce_is_byte_identical_across_runs() {
    let started = Instant::now();
    let bin = env!("CARGO_BIN_EXE_heavytail");
    let dir = tempfile::tempdir().unwrap();
    let artifacts = [
        "config.json",
        "diagnosis.csv",
        "diagnosis.json",
        "check.json",
        "tail.csv",
    ];
    let mut captured: Vec<Vec<Vec<u8>>> = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        let output = Command::new(bin)
            .args(["reproduce", "2", "--seed", "7", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "reproduce run {run} failed: {}\n{}",
            output.status,
            String::from_utf8_lossy(&output.stderr)
        );
        captured.push(
            artifacts
                .iter()
                .map(|name| std::fs::read(out.join(name)).unwrap())
                .collect(),
        );
    }
    for (name, (first, second)) in artifacts
        .iter()
        .zip(captured[0].iter().zip(captured[1].iter()))
    {
        assert!(
            first == second,
            "{name} differs between identically seeded runs"
        );
    }
    assert!(started.elapsed() < Duration::from_secs(180));
}
