//! Counting distributions for the stopping variable.
//!
//! Moments are certified: a power or exponential moment is only reported
//! finite once a remainder bound for the truncated series drops below
//! 1e-10 of the partial sum, and only reported infinite when a comparison
//! test proves divergence (for example, a Zeta(s) law has a finite r-th
//! moment exactly when r < s - 1).  Everything else is a
//! [`crate::error::Error::NonConvergent`].

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, riemann_zeta, zeta_tail, Accumulator};
use crate::rng::RandomStream;

/// Relative remainder target for certified-convergent series.
const SERIES_RTOL: f64 = 1e-10;
/// Iteration cap before giving up on certification.
const SERIES_CAP: u64 = 2_000_000;

/// A certified moment value: finite with a value, or provably infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentValue {
    Finite(f64),
    Infinite,
}

impl Serialize for MomentValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MomentValue", 2)?;
        match self {
            MomentValue::Finite(v) => {
                s.serialize_field("finite", &true)?;
                s.serialize_field("value", v)?;
            }
            MomentValue::Infinite => {
                s.serialize_field("finite", &false)?;
                s.serialize_field("value", &Option::<f64>::None)?;
            }
        }
        s.end()
    }
}

impl MomentValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, MomentValue::Finite(_))
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self {
            MomentValue::Finite(v) => Some(*v),
            MomentValue::Infinite => None,
        }
    }
}

/// Distribution of a nonnegative integer-valued stopping variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountingDistribution {
    /// Point mass at n.
    DegenerateAt { n: u64 },
    /// P(N = l) = (1 - q) q^l on {0, 1, 2, ...}.
    Geometric { q: f64 },
    /// P(N = n) = e^(-lambda) lambda^n / n!.
    Poisson { lambda: f64 },
    /// P(N = m) = (m + 1)^(-s) / zeta(s) on {0, 1, 2, ...}, s > 1.
    Zeta { s: f64 },
    /// Explicit finite table of (value, probability) pairs.
    FiniteSupport { pmf: Vec<(u64, f64)> },
}

impl CountingDistribution {
    pub fn degenerate_at(n: u64) -> Self {
        Self::DegenerateAt { n }
    }

    pub fn geometric(q: f64) -> Result<Self> {
        Self::Geometric { q }.validated()
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::Poisson { lambda }.validated()
    }

    pub fn zeta(s: f64) -> Result<Self> {
        Self::Zeta { s }.validated()
    }

    pub fn finite_support(pmf: Vec<(u64, f64)>) -> Result<Self> {
        Self::FiniteSupport { pmf }.validated()
    }

    pub fn validated(mut self) -> Result<Self> {
        match &mut self {
            Self::DegenerateAt { .. } => {}
            Self::Geometric { q } => {
                if !(q.is_finite() && *q > 0.0 && *q < 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "q",
                        reason: format!("must lie strictly between 0 and 1 (got {q})"),
                    });
                }
            }
            Self::Poisson { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "lambda",
                        reason: format!("must be finite and positive (got {lambda})"),
                    });
                }
            }
            Self::Zeta { s } => {
                if !(s.is_finite() && *s > 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "s",
                        reason: format!("must exceed 1 for a normalizable law (got {s})"),
                    });
                }
            }
            Self::FiniteSupport { pmf } => {
                if pmf.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "pmf",
                        reason: "finite support table must be nonempty".into(),
                    });
                }
                pmf.sort_by_key(|&(n, _)| n);
                if pmf.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(Error::InvalidParameter {
                        name: "pmf",
                        reason: "duplicate support points".into(),
                    });
                }
                if pmf.iter().any(|&(_, p)| !(p.is_finite() && p >= 0.0)) {
                    return Err(Error::InvalidParameter {
                        name: "pmf",
                        reason: "probabilities must be finite and nonnegative".into(),
                    });
                }
                let total: f64 = pmf.iter().map(|&(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidParameter {
                        name: "pmf",
                        reason: format!("probabilities sum to {total}, expected 1 within 1e-12"),
                    });
                }
            }
        }
        Ok(self)
    }

    /// P(N = n).
    pub fn pmf(&self, n: u64) -> f64 {
        match self {
            Self::DegenerateAt { n: m } => {
                if n == *m {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Geometric { q } => (1.0 - q) * q.powf(n as f64),
            Self::Poisson { lambda } => {
                // exp(n ln lambda - lambda - ln n!) keeps large n finite.
                let nf = n as f64;
                (nf * lambda.ln() - lambda - ln_factorial(n)).exp()
            }
            Self::Zeta { s } => (n as f64 + 1.0).powf(-s) / riemann_zeta(*s),
            Self::FiniteSupport { pmf } => pmf
                .binary_search_by_key(&n, |&(m, _)| m)
                .map(|i| pmf[i].1)
                .unwrap_or(0.0),
        }
    }

    /// Whether P(N = 0) < 1.  Stopping variables degenerate at zero make
    /// every stopped tail identically zero and are rejected by the CLI.
    pub fn is_nondegenerate_at_zero(&self) -> bool {
        self.pmf(0) < 1.0
    }

    /// Largest support point, when the support is finite.
    pub fn support_max(&self) -> Option<u64> {
        match self {
            Self::DegenerateAt { n } => Some(*n),
            Self::FiniteSupport { pmf } => pmf.last().map(|&(n, _)| n),
            _ => None,
        }
    }

    /// P(N > cap) = 1 - sum_{n <= cap} pmf(n), computed without subtracting
    /// from one where a closed form or direct tail summation exists.
    pub fn tail_mass(&self, cap: u64) -> f64 {
        self.tail_mass_bracket(cap).0
    }

    /// Certified upper bound on P(N > cap); dominates [`tail_mass`].
    pub fn tail_mass_upper(&self, cap: u64) -> f64 {
        let (v, err) = self.tail_mass_bracket(cap);
        (v + err).min(1.0)
    }

    fn tail_mass_bracket(&self, cap: u64) -> (f64, f64) {
        match self {
            Self::DegenerateAt { n } => ((*n > cap) as u64 as f64, 0.0),
            Self::Geometric { q } => (q.powf(cap as f64 + 1.0), 0.0),
            Self::Poisson { lambda } => {
                // Direct tail sum with a geometric remainder bound.
                let mut acc = Accumulator::new();
                let mut n = cap + 1;
                loop {
                    let term = self.pmf(n);
                    acc.add(term);
                    let ratio = lambda / (n as f64 + 1.0);
                    if ratio < 1.0 {
                        let rem = term * ratio / (1.0 - ratio);
                        if rem <= 1e-15 * acc.value().max(1e-300) {
                            return (acc.value() + 0.5 * rem, 0.5 * rem);
                        }
                    }
                    n += 1;
                }
            }
            Self::Zeta { s } => {
                // Sum_{m > cap} (m+1)^(-s) = Sum_{j >= cap+2} j^(-s).
                let (t, err) = zeta_tail(*s, cap + 2);
                (t / riemann_zeta(*s), err / riemann_zeta(*s))
            }
            Self::FiniteSupport { pmf } => {
                let mut acc = Accumulator::new();
                for &(_, p) in pmf.iter().filter(|&&(n, _)| n > cap) {
                    acc.add(p);
                }
                (acc.value().max(0.0), 0.0)
            }
        }
    }

    /// First partial moment E[N 1{N > cap}], certified from above.
    /// Used as a truncation-remainder ingredient by the series evaluator.
    pub fn partial_first_moment_upper(&self, cap: u64) -> MomentValue {
        match self {
            Self::DegenerateAt { n } => {
                if *n > cap {
                    MomentValue::Finite(*n as f64)
                } else {
                    MomentValue::Finite(0.0)
                }
            }
            Self::Geometric { q } => {
                // Sum_{n > cap} n (1-q) q^n = q^(cap+1) ((cap+1) - cap q) / (1-q).
                let k = cap as f64;
                MomentValue::Finite(q.powf(k + 1.0) * ((k + 1.0) - k * q) / (1.0 - q))
            }
            Self::Poisson { lambda } => {
                // n pois(n) = lambda pois(n-1), so the partial first moment
                // is lambda * P(N >= cap) = lambda * P(N > cap - 1).
                let p = if cap == 0 {
                    1.0
                } else {
                    self.tail_mass_upper(cap - 1)
                };
                MomentValue::Finite(lambda * p)
            }
            Self::Zeta { s } => {
                if *s <= 2.0 {
                    return MomentValue::Infinite;
                }
                // n (n+1)^(-s) <= (n+1)^(1-s).
                let (t, err) = zeta_tail(s - 1.0, cap + 2);
                MomentValue::Finite((t + err) / riemann_zeta(*s))
            }
            Self::FiniteSupport { pmf } => MomentValue::Finite(
                pmf.iter()
                    .filter(|&&(n, _)| n > cap)
                    .map(|&(n, p)| n as f64 * p)
                    .sum(),
            ),
        }
    }

    /// Certified upper bound on the partial power moment E[N^r 1{N > cap}].
    /// Infinite exactly when the full moment diverges.
    pub fn partial_power_moment_upper(&self, r: f64, cap: u64) -> Result<MomentValue> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("moment order must be finite and positive (got {r})"),
            });
        }
        match self {
            Self::DegenerateAt { n } => Ok(MomentValue::Finite(if *n > cap {
                (*n as f64).powf(r)
            } else {
                0.0
            })),
            Self::FiniteSupport { pmf } => Ok(MomentValue::Finite(
                pmf.iter()
                    .filter(|&&(n, _)| n > cap)
                    .map(|&(n, p)| (n as f64).powf(r) * p)
                    .sum(),
            )),
            Self::Geometric { q } => {
                let term = |n: u64| (n as f64).powf(r) * (1.0 - q) * q.powf(n as f64);
                let ratio = |n: u64| q * ((n as f64 + 1.0) / n as f64).powf(r);
                bounded_tail_sum(cap + 1, term, ratio)
            }
            Self::Poisson { lambda } => {
                let pmf = |n: u64| self.pmf(n);
                let l = *lambda;
                let term = move |n: u64| (n as f64).powf(r) * pmf(n);
                let ratio =
                    move |n: u64| l / (n as f64 + 1.0) * ((n as f64 + 1.0) / n as f64).powf(r);
                bounded_tail_sum(cap + 1, term, ratio)
            }
            Self::Zeta { s } => {
                if r >= s - 1.0 {
                    return Ok(MomentValue::Infinite);
                }
                // n^r (n+1)^(-s) <= n^(r-s); p-series tail bound.
                let (t, err) = zeta_tail(s - r, (cap + 1).max(1));
                Ok(MomentValue::Finite((t + err) / riemann_zeta(*s)))
            }
        }
    }

    /// Certified power moment E[N^r] for r > 0.
    pub fn moment(&self, r: f64) -> Result<MomentValue> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("moment order must be finite and positive (got {r})"),
            });
        }
        match self {
            Self::DegenerateAt { n } => Ok(MomentValue::Finite((*n as f64).powf(r))),
            Self::FiniteSupport { pmf } => Ok(MomentValue::Finite(
                pmf.iter().map(|&(n, p)| (n as f64).powf(r) * p).sum(),
            )),
            Self::Geometric { q } => certified_sum(
                1,
                |n| (n as f64).powf(r) * (1.0 - q) * q.powf(n as f64),
                // Term ratio q ((n+1)/n)^r decreases in n, so the bound at n
                // dominates every later ratio.
                |n| q * ((n as f64 + 1.0) / n as f64).powf(r),
            ),
            Self::Poisson { lambda } => {
                let pmf = |n: u64| self.pmf(n);
                let l = *lambda;
                certified_sum(
                    1,
                    move |n| (n as f64).powf(r) * pmf(n),
                    // (n+1)^(r-1)/n^r is decreasing in n for every r > 0.
                    move |n| l / (n as f64 + 1.0) * ((n as f64 + 1.0) / n as f64).powf(r),
                )
            }
            Self::Zeta { s } => {
                // Sum of m^r (m+1)^(-s) = j^{r-s} (1 - 1/j)^r with j = m + 1.
                // Divergent exactly when r >= s - 1 by p-series comparison.
                if r >= s - 1.0 {
                    return Ok(MomentValue::Infinite);
                }
                let z = riemann_zeta(*s);
                // Taylor control: for u in (0, 1/2], (1-u)^r = 1 - r u + R(u)
                // with |R(u)| <= 2 r |r-1| u^2, so the tail past J equals
                // sum j^{r-s} - r sum j^{r-s-1} up to that quadratic slack.
                let quad = 2.0 * r * (r - 1.0).abs();
                let mut acc = Accumulator::new();
                let mut j = 2u64;
                loop {
                    if j.is_power_of_two() && j >= 64 {
                        let (t0, e0) = zeta_tail(s - r, j);
                        let (t1, e1) = zeta_tail(s - r + 1.0, j);
                        let (t2, e2) = zeta_tail(s - r + 2.0, j);
                        let center = t0 - r * t1;
                        let err = e0 + r * e1 + quad * (t2 + e2);
                        let total = acc.value() + center;
                        if center.is_finite() && err <= SERIES_RTOL * total {
                            return Ok(MomentValue::Finite(total / z));
                        }
                    }
                    let jf = j as f64;
                    acc.add((jf - 1.0).powf(r) * jf.powf(-s));
                    j += 1;
                    if j > SERIES_CAP {
                        return Err(Error::NonConvergent);
                    }
                }
            }
        }
    }

    /// Certified exponential moment E[base^N] for base > 1.
    pub fn exponential_moment(&self, base: f64) -> Result<MomentValue> {
        if !(base.is_finite() && base > 1.0) {
            return Err(Error::InvalidParameter {
                name: "base",
                reason: format!("base must be finite and exceed 1 (got {base})"),
            });
        }
        match self {
            Self::DegenerateAt { n } => Ok(MomentValue::Finite(base.powf(*n as f64))),
            Self::FiniteSupport { pmf } => Ok(MomentValue::Finite(
                pmf.iter().map(|&(n, p)| base.powf(n as f64) * p).sum(),
            )),
            Self::Geometric { q } => {
                if q * base >= 1.0 {
                    // Terms (1-q)(q b)^l do not vanish: divergent.
                    return Ok(MomentValue::Infinite);
                }
                certified_sum(0, |n| (1.0 - q) * (q * base).powf(n as f64), |_| q * base)
            }
            Self::Poisson { lambda } => {
                let pmf = |n: u64| self.pmf(n);
                let l = *lambda;
                certified_sum(
                    0,
                    move |n| base.powf(n as f64) * pmf(n),
                    move |n| l * base / (n as f64 + 1.0),
                )
            }
            Self::Zeta { .. } => {
                // base^m (m+1)^(-s) -> infinity for any base > 1: divergent.
                Ok(MomentValue::Infinite)
            }
        }
    }

    /// Mean E[N], when certified finite.
    pub fn mean(&self) -> Result<MomentValue> {
        self.moment(1.0)
    }

    /// One draw by inversion of the cumulative mass.
    pub fn sample(&self, stream: &mut RandomStream) -> u64 {
        match self {
            Self::DegenerateAt { n } => *n,
            Self::Geometric { q } => {
                let v = stream.next_unit();
                (v.ln() / q.ln()).floor() as u64
            }
            _ => {
                let u = stream.next_unit();
                let mut cum = 0.0;
                let mut n = 0u64;
                loop {
                    cum += self.pmf(n);
                    if cum >= u || n > 1 << 30 {
                        return n;
                    }
                    n += 1;
                }
            }
        }
    }

    /// One draw conditioned on N > cap (used by the pooled stratum of the
    /// stratified Monte Carlo estimator).
    pub fn sample_above(&self, cap: u64, stream: &mut RandomStream) -> u64 {
        let tail = self.tail_mass(cap);
        debug_assert!(tail > 0.0, "conditioning on an empty tail");
        let target = stream.next_unit() * tail;
        let mut cum = 0.0;
        let mut n = cap + 1;
        loop {
            cum += self.pmf(n);
            if cum >= target || n > cap + (1 << 30) {
                return n;
            }
            n += 1;
        }
    }
}

/// Sum a nonnegative series with an eventually-contractive term ratio.
///
/// `term(n)` is the n-th term; `ratio_bound(n)` must dominate
/// `term(m+1)/term(m)` for all m >= n.  Once the bound drops below 1 the
/// remainder is certified geometrically.
fn certified_sum(
    start: u64,
    term: impl Fn(u64) -> f64,
    ratio_bound: impl Fn(u64) -> f64,
) -> Result<MomentValue> {
    let mut acc = Accumulator::new();
    let mut n = start;
    loop {
        let t = term(n);
        acc.add(t);
        let rho = ratio_bound(n);
        if rho < 1.0 {
            let rem = t * rho / (1.0 - rho);
            if rem <= SERIES_RTOL * acc.value().max(f64::MIN_POSITIVE) {
                return Ok(MomentValue::Finite(acc.value() + 0.5 * rem));
            }
        }
        n += 1;
        if n > SERIES_CAP {
            return Err(Error::NonConvergent);
        }
    }
}

/// Upper bound on a tail sum Σ_{n ≥ start} term(n): direct summation until
/// the geometric remainder bound is a small fraction of the total, which is
/// then added in full.  `ratio_bound(n)` must dominate term(n+1)/term(n) for
/// every later index (true for the eventually-decreasing ratios used here).
fn bounded_tail_sum(
    start: u64,
    term: impl Fn(u64) -> f64,
    ratio_bound: impl Fn(u64) -> f64,
) -> Result<MomentValue> {
    let mut acc = Accumulator::new();
    let mut n = start.max(1);
    loop {
        let t = term(n);
        acc.add(t);
        let rho = ratio_bound(n);
        if rho < 1.0 {
            let rem = t * rho / (1.0 - rho);
            if rem <= 1e-3 * acc.value().max(f64::MIN_POSITIVE) {
                return Ok(MomentValue::Finite(acc.value() + rem));
            }
        }
        n += 1;
        if n > SERIES_CAP {
            return Err(Error::NonConvergent);
        }
    }
}
