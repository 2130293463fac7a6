//! Monte Carlo estimation of stopped-functional tails and asymptotic ratios.
//!
//! The stopped-tail estimator stratifies on the stopping variable: each level
//! n ≤ `strata_cap` with positive mass gets its own batch of fixed-length
//! paths, and everything above the cap is pooled into one stratum that first
//! draws η conditionally on η > cap.  Within a stratum, paths are simulated
//! in blocks of 2¹⁶ with one dedicated random substream per (stratum, block);
//! block hit counts are integers, so the reduction is exact and the result is
//! bit-identical no matter how many worker threads participate.
//!
//! Confidence intervals are Wilson intervals within each stratum, composed
//! linearly across strata (conservative).  Ratio estimators reuse one set of
//! paths for numerator and denominator — the events are nested, so shared
//! random numbers strictly reduce the delta-method variance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{CountingDistribution, SequenceSpec, TailDistribution};
use crate::error::{Error, Result};
use crate::numeric::{wilson_interval, Accumulator};
use crate::rng::RandomStream;
use crate::tail_algebra::grid::threshold_index;
use crate::tail_algebra::{
    convolution_square_tail, sum_tail_grid, EstimateMethod, GridOptions, StoppedFunctional,
    TailEstimate,
};

/// Paths per random substream; also the parallel work unit.
const BLOCK: u64 = 1 << 16;

/// Fewest denominator hits for which a ratio interval is quoted.
const MIN_RATIO_HITS: u64 = 100;

/// Confidence level of Monte Carlo intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiLevel {
    /// Two-sided 95%.
    P95,
    /// Two-sided 99%.
    P99,
    /// z = 3 (≈ 99.73%), the default for cross-validation against certified
    /// brackets.
    ThreeSigma,
}

impl CiLevel {
    /// Two-sided normal quantile.
    pub fn z(&self) -> f64 {
        match self {
            CiLevel::P95 => 1.959_963_984_540_054,
            CiLevel::P99 => 2.575_829_303_548_900_4,
            CiLevel::ThreeSigma => 3.0,
        }
    }
}

fn default_samples() -> u64 {
    1_000_000
}

fn default_strata_cap() -> u64 {
    64
}

fn default_ci_level() -> CiLevel {
    CiLevel::ThreeSigma
}

/// Budget and determinism knobs for the Monte Carlo estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    /// Total path budget, distributed over strata proportionally to their
    /// probability mass (with a small per-stratum floor).
    #[serde(default = "default_samples")]
    pub samples: u64,
    /// Root seed; everything downstream is a pure function of it.
    #[serde(default)]
    pub seed: u64,
    /// Stopping values above this level are pooled into one conditional
    /// stratum, which bounds the work per path.
    #[serde(default = "default_strata_cap")]
    pub strata_cap: u64,
    #[serde(default = "default_ci_level")]
    pub ci_level: CiLevel,
    /// Worker override; `None` defers to the `HEAVYTAIL_THREADS` environment
    /// variable, then to the machine's core count.  Results never depend on
    /// this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for MCConfig {
    fn default() -> Self {
        MCConfig {
            samples: default_samples(),
            seed: 0,
            strata_cap: default_strata_cap(),
            ci_level: default_ci_level(),
            threads: None,
        }
    }
}

impl MCConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1000 {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need at least 1000 Monte Carlo paths (got {})", self.samples),
            });
        }
        if self.strata_cap == 0 {
            return Err(Error::InvalidParameter {
                name: "strata_cap",
                reason: "need at least one stratum level".into(),
            });
        }
        Ok(())
    }
}

/// A ratio of tail probabilities with a confidence interval or certified
/// bracket, depending on the method.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: EstimateMethod,
}

/// Build the worker pool: explicit override, then `HEAVYTAIL_THREADS`, then
/// the rayon default.
fn worker_pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    let resolved = threads.or_else(|| {
        std::env::var("HEAVYTAIL_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
    });
    if let Some(n) = resolved {
        builder = builder.num_threads(n);
    }
    builder.build().expect("worker pool construction cannot fail")
}

/// One simulated path of `n` components: the transformed functional values
/// (max(0, max ξ_k), S_n, max(0, max_k S_k)).
fn walk(seq: &SequenceSpec, n: u64, stream: &mut RandomStream) -> (f64, f64, f64) {
    let mut max_xi = 0.0f64;
    let mut sum = 0.0f64;
    let mut run_max = 0.0f64;
    for k in 1..=n {
        let xi = seq.dist_at(k as usize).sample(stream);
        max_xi = max_xi.max(xi);
        sum += xi;
        run_max = run_max.max(sum);
    }
    (max_xi, sum, run_max)
}

fn functional_value(functional: StoppedFunctional, path: (f64, f64, f64)) -> f64 {
    match functional {
        StoppedFunctional::RandomMax => path.0,
        StoppedFunctional::RandomSum => path.1,
        StoppedFunctional::RandomMaxOfSums => path.2,
    }
}

/// Per-stratum work units: `(block index, paths in block)`.
fn blocks(paths: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(paths.div_ceil(BLOCK) as usize);
    let mut start = 0;
    let mut index = 0;
    while start < paths {
        let count = BLOCK.min(paths - start);
        out.push((index, count));
        index += 1;
        start += count;
    }
    out
}

/// Hits of `{functional value > x}` over `paths` fixed-level-`n` paths.
/// Level 0 means the stratum draws its level per path from `eta | eta > cap`.
#[allow(clippy::too_many_arguments)]
fn stratum_hits(
    pool: &rayon::ThreadPool,
    seq: &SequenceSpec,
    functional: StoppedFunctional,
    level: Option<u64>,
    pooled: Option<(&CountingDistribution, u64)>,
    x: f64,
    paths: u64,
    stratum_stream: &RandomStream,
) -> u64 {
    pool.install(|| {
        blocks(paths)
            .par_iter()
            .map(|&(block, count)| {
                let mut stream = stratum_stream.substream(block);
                let mut hits = 0u64;
                for _ in 0..count {
                    let n = match (level, pooled) {
                        (Some(n), _) => n,
                        (None, Some((eta, cap))) => eta.sample_above(cap, &mut stream),
                        (None, None) => unreachable!("stratum needs a level or a pool"),
                    };
                    let value = functional_value(functional, walk(seq, n, &mut stream));
                    hits += (value > x) as u64;
                }
                hits
            })
            .sum()
    })
}

/// Paths allocated to a stratum of relative mass `share` of the budget.
fn allocate(samples: u64, share: f64) -> u64 {
    ((samples as f64 * share).round() as u64).max(256)
}

/// Stratified Monte Carlo estimate of P(Z_η > x) for a stopped functional Z.
///
/// Estimator: Σ_n P(η = n) p̂_n over levels 1..=cap plus a pooled conditional
/// stratum for η > cap, with Wilson intervals per stratum composed linearly.
/// Never fails — an uninformative result shows up as a wide interval.
/// Deterministic given the config, independent of worker count.
pub fn mc_stopped_tail(
    functional: StoppedFunctional,
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    x: f64,
    cfg: &MCConfig,
) -> TailEstimate {
    debug_assert!(x > 0.0, "stopped tails are sampled at x > 0 (got {x})");
    let z = cfg.ci_level.z();
    let pool = worker_pool(cfg.threads);
    let root = RandomStream::new(cfg.seed);
    let cap = match eta.support_max() {
        Some(m) => m.min(cfg.strata_cap),
        None => cfg.strata_cap,
    };
    // Renormalize the budget over the strata actually simulated (the η = 0
    // atom contributes exactly zero and consumes no paths).
    let pooled_weight = eta.tail_mass(cap);
    let mut simulated_mass = pooled_weight;
    for n in 1..=cap {
        simulated_mass += eta.pmf(n);
    }
    if simulated_mass <= 0.0 {
        // η = 0 almost surely: every functional is 0.
        return TailEstimate {
            log_value: f64::NEG_INFINITY,
            lower: 0.0,
            upper: 0.0,
            method: EstimateMethod::MonteCarlo { samples: 0 },
        };
    }
    let mut point = Accumulator::new();
    let mut lower = Accumulator::new();
    let mut upper = Accumulator::new();
    let mut total_paths = 0u64;
    for n in 1..=cap {
        let weight = eta.pmf(n);
        if weight <= 0.0 {
            continue;
        }
        let paths = allocate(cfg.samples, weight / simulated_mass);
        let hits = stratum_hits(
            &pool,
            seq,
            functional,
            Some(n),
            None,
            x,
            paths,
            &root.substream(n),
        );
        let (lo, hi) = wilson_interval(hits, paths, z);
        point.add(weight * hits as f64 / paths as f64);
        lower.add(weight * lo);
        upper.add(weight * hi);
        total_paths += paths;
    }
    if pooled_weight > 0.0 {
        let paths = allocate(cfg.samples, pooled_weight / simulated_mass);
        let hits = stratum_hits(
            &pool,
            seq,
            functional,
            None,
            Some((eta, cap)),
            x,
            paths,
            &root.substream(cap + 1),
        );
        let (lo, hi) = wilson_interval(hits, paths, z);
        point.add(pooled_weight * hits as f64 / paths as f64);
        lower.add(pooled_weight * lo);
        upper.add(pooled_weight * hi);
        total_paths += paths;
    }
    let estimate = point.value().min(1.0);
    let lower = lower.value().min(estimate);
    let upper = upper.value().min(1.0).max(estimate);
    TailEstimate {
        log_value: estimate.ln(),
        lower,
        upper,
        method: EstimateMethod::MonteCarlo {
            samples: total_paths,
        },
    }
}

/// Fixed-level maximum-of-sums tail, by certified grid when the running
/// maximum provably equals the final sum (all components nonnegative and the
/// level within the configured cap), otherwise by Monte Carlo over running
/// maxima of partial sums.
pub fn maxsum_tail_mc_or_grid(
    seq: &SequenceSpec,
    n: usize,
    x: f64,
    grid: &GridOptions,
    cfg: &MCConfig,
) -> Result<TailEstimate> {
    if x < 0.0 {
        return Ok(TailEstimate::exact(1.0));
    }
    if n == 0 {
        return Ok(TailEstimate::exact(0.0));
    }
    if seq.all_nonnegative() && n as u64 <= cfg.strata_cap {
        return sum_tail_grid(seq, n, x, grid);
    }
    let pool = worker_pool(cfg.threads);
    let root = RandomStream::new(cfg.seed);
    let hits = stratum_hits(
        &pool,
        seq,
        StoppedFunctional::RandomMaxOfSums,
        Some(n as u64),
        None,
        x,
        cfg.samples,
        &root.substream(n as u64),
    );
    let (lo, hi) = wilson_interval(hits, cfg.samples, cfg.ci_level.z());
    let estimate = hits as f64 / cfg.samples as f64;
    Ok(TailEstimate {
        log_value: estimate.ln(),
        lower: lo.min(estimate),
        upper: hi.max(estimate),
        method: EstimateMethod::MonteCarlo {
            samples: cfg.samples,
        },
    })
}

/// Shared-random-number estimate of the running-max-to-sum tail ratio
/// P(S_(n) > x) / P(S_n > x) at a fixed level n ≥ 2.
///
/// The hit events are nested (the running maximum exceeds x whenever the
/// final sum does), so the point estimate is ≥ 1 on every realization and
/// the delta-method relative variance reduces to
/// (1−p_B)/(N p_B) − (1−p_A)/(N p_A) with A ⊇ B the two events.
pub fn running_max_to_sum_ratio(
    seq: &SequenceSpec,
    n: usize,
    x: f64,
    cfg: &MCConfig,
) -> Result<RatioEstimate> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("the ratio needs at least two components (got n = {n})"),
        });
    }
    if seq.all_nonnegative() {
        // Running max of nondecreasing partial sums is the final sum.
        return Ok(RatioEstimate {
            estimate: 1.0,
            lower: 1.0,
            upper: 1.0,
            method: EstimateMethod::Exact,
        });
    }
    let pool = worker_pool(cfg.threads);
    let root = RandomStream::new(cfg.seed);
    let (num_hits, den_hits) = pool.install(|| {
        blocks(cfg.samples)
            .par_iter()
            .map(|&(block, count)| {
                let mut stream = root.substream(block);
                let mut num = 0u64;
                let mut den = 0u64;
                for _ in 0..count {
                    let (_, sum, run_max) = walk(seq, n as u64, &mut stream);
                    num += (run_max > x) as u64;
                    den += (sum > x) as u64;
                }
                (num, den)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    });
    if den_hits < MIN_RATIO_HITS {
        return Err(Error::Unstable {
            hits: den_hits,
            min: MIN_RATIO_HITS,
        });
    }
    let samples = cfg.samples as f64;
    let p_num = num_hits as f64 / samples;
    let p_den = den_hits as f64 / samples;
    let ratio = num_hits as f64 / den_hits as f64;
    // Nested events make this difference nonnegative.
    let rel_var = ((1.0 - p_den) / den_hits as f64) - ((1.0 - p_num) / num_hits as f64);
    let half_width = cfg.ci_level.z() * ratio * rel_var.max(0.0).sqrt();
    Ok(RatioEstimate {
        estimate: ratio,
        lower: (ratio - half_width).max(0.0),
        upper: ratio + half_width,
        method: EstimateMethod::MonteCarlo {
            samples: cfg.samples,
        },
    })
}

/// Ratio of the level-n sum tail to the sum of marginal tails,
/// P(S_n > x) / Σ_{k≤n} F̄_k(x): the finite-level comparison behind
/// subexponential-style tail equivalences.  Numerator by certified grid
/// convolution, denominator analytic.
pub fn sum_to_marginal_ratio(
    seq: &SequenceSpec,
    n: usize,
    x: f64,
    grid: &GridOptions,
) -> Result<RatioEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "the ratio needs at least one component".into(),
        });
    }
    let mut marginal = Accumulator::new();
    for k in 1..=n {
        marginal.add(seq.dist_at(k).survival(x));
    }
    let marginal = marginal.value();
    if marginal <= 0.0 {
        return Err(Error::DivisionDomain { x });
    }
    if n == 1 {
        return Ok(RatioEstimate {
            estimate: 1.0,
            lower: 1.0,
            upper: 1.0,
            method: EstimateMethod::Exact,
        });
    }
    let numerator = sum_tail_grid(seq, n, x, grid)?;
    Ok(RatioEstimate {
        estimate: numerator.value() / marginal,
        lower: numerator.lower / marginal,
        upper: numerator.upper / marginal,
        method: numerator.method,
    })
}

/// Subexponentiality benchmark ratio F̄*²(x) / F̄(x) for the positive part of
/// `dist`: tends to 2 along subexponential tails and diverges otherwise.
///
/// The numerator goes through the certified convolution (with the Erlang
/// closed form for exponential inputs).  When the requested step would blow
/// the cell budget at a large x, the step is widened to `x / (max_cells / 4)`
/// so the lattice always fits; the reported bracket stays certified at the
/// widened step.
pub fn subexp_ratio(dist: &TailDistribution, x: f64, grid: &GridOptions) -> Result<RatioEstimate> {
    let marginal = dist.survival(x);
    if marginal <= 0.0 {
        return Err(Error::DivisionDomain { x });
    }
    let mut effective = *grid;
    if x > 0.0 && threshold_index(x, effective.step) > effective.max_cells {
        effective.step = x / (effective.max_cells as f64 / 4.0).max(1.0);
    }
    let numerator = convolution_square_tail(dist, x, &effective)?;
    Ok(RatioEstimate {
        estimate: numerator.value() / marginal,
        lower: numerator.lower / marginal,
        upper: numerator.upper / marginal,
        method: numerator.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating_seq() -> SequenceSpec {
        SequenceSpec::periodic(
            vec![
                TailDistribution::pareto_shifted(0.0, 3.0).unwrap(),
                TailDistribution::pareto_shifted(1.0, 3.0).unwrap(),
            ],
            vec![],
        )
    }

    #[test]
    fn degenerate_eta_exponential_matches_analytic_tail() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let eta = CountingDistribution::degenerate_at(1);
        let cfg = MCConfig {
            samples: 100_000,
            seed: 7,
            ..MCConfig::default()
        };
        let est = mc_stopped_tail(StoppedFunctional::RandomMax, &seq, &eta, 1.0, &cfg);
        let exact = (-1.0f64).exp();
        assert!(
            est.contains(exact),
            "3-sigma interval [{}, {}] misses {exact}",
            est.lower,
            est.upper
        );
        assert!((est.value() - exact).abs() < 0.01);
    }

    #[test]
    fn all_zero_components_give_zero_estimate() {
        let seq = SequenceSpec::iid(TailDistribution::degenerate_at_zero());
        let eta = CountingDistribution::geometric(0.5).unwrap();
        for functional in [
            StoppedFunctional::RandomMax,
            StoppedFunctional::RandomSum,
            StoppedFunctional::RandomMaxOfSums,
        ] {
            let est = mc_stopped_tail(functional, &seq, &eta, 0.5, &MCConfig::default());
            assert_eq!(est.value(), 0.0);
            assert_eq!(est.lower, 0.0);
        }
    }

    #[test]
    fn estimates_are_bit_identical_across_worker_counts() {
        let seq = alternating_seq();
        let eta = CountingDistribution::zeta(6.0).unwrap();
        let base = MCConfig {
            samples: 50_000,
            seed: 42,
            ..MCConfig::default()
        };
        let single = MCConfig {
            threads: Some(1),
            ..base
        };
        let many = MCConfig {
            threads: Some(4),
            ..base
        };
        let a = mc_stopped_tail(StoppedFunctional::RandomMaxOfSums, &seq, &eta, 5.0, &single);
        let b = mc_stopped_tail(StoppedFunctional::RandomMaxOfSums, &seq, &eta, 5.0, &many);
        assert_eq!(a.value().to_bits(), b.value().to_bits());
        assert_eq!(a.lower.to_bits(), b.lower.to_bits());
        assert_eq!(a.upper.to_bits(), b.upper.to_bits());
    }

    #[test]
    fn wilson_coverage_on_analytic_case_is_nominal() {
        // Exponential component, η ≡ 1: the estimator is a plain binomial
        // proportion with true p = e^{-1}.  Over 200 fixed seeds the 95%
        // intervals must cover at the nominal rate.
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let eta = CountingDistribution::degenerate_at(1);
        let exact = (-1.0f64).exp();
        let mut covered = 0;
        for seed in 0..200u64 {
            let cfg = MCConfig {
                samples: 2000,
                seed,
                ci_level: CiLevel::P95,
                threads: Some(1),
                ..MCConfig::default()
            };
            let est = mc_stopped_tail(StoppedFunctional::RandomMax, &seq, &eta, 1.0, &cfg);
            if est.contains(exact) {
                covered += 1;
            }
        }
        let coverage = covered as f64 / 200.0;
        assert!(
            (0.90..=0.99).contains(&coverage),
            "coverage {coverage} outside [0.90, 0.99]"
        );
    }

    #[test]
    fn pathwise_dominance_of_the_three_functionals() {
        let seq = alternating_seq();
        let mut stream = RandomStream::new(9);
        for _ in 0..5000 {
            let (max_xi, sum, run_max) = walk(&seq, 7, &mut stream);
            assert!(sum <= run_max + 1e-12);
            assert!(max_xi >= 0.0 && run_max >= 0.0);
        }
        // With nonnegative components the max of the ξ's is dominated by the
        // running maximum of the partial sums on every path.
        let seq = SequenceSpec::iid(TailDistribution::pareto_shifted(0.0, 3.0).unwrap());
        let mut stream = RandomStream::new(10);
        for _ in 0..5000 {
            let (max_xi, sum, run_max) = walk(&seq, 7, &mut stream);
            assert!(max_xi <= run_max + 1e-12);
            assert!((sum - run_max).abs() < 1e-12);
        }
    }

    #[test]
    fn stratified_estimate_agrees_with_certified_series() {
        let seq = alternating_seq();
        let eta = CountingDistribution::zeta(6.0).unwrap();
        let x = 10.0;
        let cfg = MCConfig {
            samples: 400_000,
            seed: 3,
            ..MCConfig::default()
        };
        let mc = mc_stopped_tail(StoppedFunctional::RandomSum, &seq, &eta, x, &cfg);
        let series = crate::tail_algebra::stopped_tail(
            StoppedFunctional::RandomSum,
            &seq,
            &eta,
            x,
            &crate::tail_algebra::SeriesOptions::default(),
        )
        .unwrap();
        assert!(
            mc.lower <= series.upper && series.lower <= mc.upper,
            "MC [{}, {}] and series [{}, {}] do not intersect",
            mc.lower,
            mc.upper,
            series.lower,
            series.upper
        );
    }

    #[test]
    fn running_max_ratio_is_exactly_one_for_nonnegative_components() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let r = running_max_to_sum_ratio(&seq, 3, 2.0, &MCConfig::default()).unwrap();
        assert_eq!((r.estimate, r.lower, r.upper), (1.0, 1.0, 1.0));
        assert_eq!(r.method, EstimateMethod::Exact);
    }

    #[test]
    fn running_max_ratio_dominates_one_with_mixed_signs() {
        let seq = alternating_seq();
        let cfg = MCConfig {
            samples: 200_000,
            seed: 11,
            ..MCConfig::default()
        };
        let r = running_max_to_sum_ratio(&seq, 3, 5.0, &cfg).unwrap();
        assert!(r.estimate >= 1.0, "pathwise dominance violated: {}", r.estimate);
        assert!(r.lower <= r.estimate && r.estimate <= r.upper);
        assert!(r.upper < 1.5, "suspiciously wide: {}", r.upper);
    }

    #[test]
    fn running_max_ratio_is_unstable_without_denominator_hits() {
        let seq = alternating_seq();
        let cfg = MCConfig {
            samples: 1000,
            seed: 1,
            ..MCConfig::default()
        };
        let err = running_max_to_sum_ratio(&seq, 3, 500.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Unstable { min: 100, .. }));
        let err = running_max_to_sum_ratio(&seq, 1, 5.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "n", .. }));
    }

    #[test]
    fn sum_to_marginal_ratio_near_one_deep_in_the_tail() {
        // Two iid Pareto(3) components: subexponential-style equivalence
        // P(S_2 > x) ~ 2 F̄(x) = Σ marginals.
        let seq = SequenceSpec::iid(TailDistribution::pareto_shifted(0.0, 3.0).unwrap());
        let x = 1000.0;
        let grid = GridOptions {
            step: x / 2000.0,
            ..GridOptions::default()
        };
        let r = sum_to_marginal_ratio(&seq, 2, x, &grid).unwrap();
        assert!(r.lower > 0.95 && r.upper < 1.05, "[{}, {}]", r.lower, r.upper);
        // n = 1 is exactly 1 with no grid work.
        let one = sum_to_marginal_ratio(&seq, 1, x, &grid).unwrap();
        assert_eq!(one.estimate, 1.0);
        assert_eq!(one.method, EstimateMethod::Exact);
    }

    #[test]
    fn subexp_ratio_exponential_takes_the_closed_form() {
        let d = TailDistribution::exponential(1.0).unwrap();
        let r = subexp_ratio(&d, 20.0, &GridOptions::default()).unwrap();
        assert_eq!(r.method, EstimateMethod::Exact);
        assert!((r.estimate - 21.0).abs() < 1e-6, "{}", r.estimate);
    }

    #[test]
    fn subexp_ratio_pareto_approaches_two() {
        let d = TailDistribution::pareto_shifted(0.0, 3.0).unwrap();
        let grid = GridOptions {
            step: 0.5,
            ..GridOptions::default()
        };
        let r = subexp_ratio(&d, 1000.0, &grid).unwrap();
        assert!(r.lower > 1.8 && r.upper < 2.2, "[{}, {}]", r.lower, r.upper);
    }

    #[test]
    fn subexp_ratio_widens_the_step_instead_of_blowing_the_budget() {
        let d = TailDistribution::pareto_shifted(0.0, 3.0).unwrap();
        // Default step 1/16 would need 1.6e9 cells at this x.
        let r = subexp_ratio(&d, 1.0e8, &GridOptions::default()).unwrap();
        assert!(r.lower > 1.8 && r.upper < 2.2, "[{}, {}]", r.lower, r.upper);
        match r.method {
            EstimateMethod::GridConvolution { step } => assert!(step > 1.0),
            other => panic!("expected grid method, got {other:?}"),
        }
    }

    #[test]
    fn subexp_ratio_rejects_vanishing_marginals() {
        let d = TailDistribution::point_mass(1.0).unwrap();
        let err = subexp_ratio(&d, 1.5, &GridOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DivisionDomain { .. }));
    }

    #[test]
    fn maxsum_dispatch_uses_grid_for_nonnegative_components() {
        let seq = SequenceSpec::iid(TailDistribution::exponential(1.0).unwrap());
        let grid = GridOptions::default();
        let cfg = MCConfig::default();
        let a = maxsum_tail_mc_or_grid(&seq, 4, 6.0, &grid, &cfg).unwrap();
        let b = sum_tail_grid(&seq, 4, 6.0, &grid).unwrap();
        assert_eq!((a.lower, a.upper), (b.lower, b.upper));
        assert_eq!(maxsum_tail_mc_or_grid(&seq, 0, 3.0, &grid, &cfg).unwrap().value(), 0.0);
    }

    #[test]
    fn maxsum_dispatch_samples_mixed_sign_sequences() {
        let seq = alternating_seq();
        let grid = GridOptions::default();
        let cfg = MCConfig {
            samples: 200_000,
            seed: 5,
            ..MCConfig::default()
        };
        let mc = maxsum_tail_mc_or_grid(&seq, 3, 8.0, &grid, &cfg).unwrap();
        assert!(matches!(mc.method, EstimateMethod::MonteCarlo { .. }));
        // Dominance: P(S_(n) > x) ≥ P(S_n > x), so the MC interval for the
        // running maximum must reach at least the certified lower bound of
        // the plain sum.
        let plain = sum_tail_grid(&seq, 3, 8.0, &grid).unwrap();
        assert!(mc.upper >= plain.lower);
    }
}
