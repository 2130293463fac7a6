//! Marginal (tail) distributions of the summands.
//!
//! Every kind exposes the survival function P(X > x) both in linear and in
//! log space.  All tail arithmetic elsewhere in the crate goes through
//! [`TailDistribution::log_survival`], so survival values down to 1e-300
//! never round to zero on the way into a product or a ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// A marginal distribution described by its survival function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailDistribution {
    /// P(X > x) = exp(-rate * x) for x >= 0.
    Exponential { rate: f64 },
    /// P(X > x) = (1 + shift + x)^(-alpha) for x >= -shift; support starts
    /// at -shift and the tail equals 1 there.
    ParetoShifted { shift: f64, alpha: f64 },
    /// Point mass at zero.
    DegenerateAtZero,
    /// Law of (1 + U) * 2^G with U uniform on [0, 1] and G geometric on
    /// {0, 1, ...} with success parameter q: P(G = l) = (1 - q) q^l.
    /// The tail oscillates between consecutive powers of two, which makes it
    /// consistently varying but not regularly varying.
    CaiTang { q: f64 },
    /// Empirical survival (#samples > x) / n with strict inequality.
    Empirical {
        samples: Vec<f64>,
        /// Declare the support unbounded below.  Lattice convolution then
        /// refuses the component instead of trusting the sample minimum.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        unbounded_below: bool,
    },
    /// Point mass at an arbitrary location.
    PointMass { at: f64 },
}

/// Piecewise-exact survival function of the (1 + U) * 2^G law.
///
/// For x in [2^m, 2^(m+1)) the tail equals q^m * ((1 - q)(2 - x 2^(-m)) + q);
/// below the support minimum 1 it equals 1.
pub fn cai_tang_survival(q: f64, x: f64) -> f64 {
    cai_tang_log_survival(q, x).exp()
}

/// Log-space version of [`cai_tang_survival`]; exact for cells so deep that
/// q^m underflows in linear space.
pub fn cai_tang_log_survival(q: f64, x: f64) -> f64 {
    debug_assert!(q > 0.0 && q < 1.0);
    if x < 1.0 {
        return 0.0;
    }
    let (m, u) = dyadic_cell(x);
    (m as f64) * q.ln() + (q + (1.0 - q) * (2.0 - u)).ln()
}

/// Split x >= 1 into (m, u) with x = u * 2^m and u in [1, 2).
fn dyadic_cell(x: f64) -> (i32, f64) {
    let mut m = x.log2().floor() as i32;
    let mut u = x * (2f64).powi(-m);
    // Guard against boundary rounding in log2.
    if u < 1.0 {
        m -= 1;
        u *= 2.0;
    } else if u >= 2.0 {
        m += 1;
        u /= 2.0;
    }
    (m, u)
}

impl TailDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn pareto_shifted(shift: f64, alpha: f64) -> Result<Self> {
        Self::ParetoShifted { shift, alpha }.validated()
    }

    pub fn degenerate_at_zero() -> Self {
        Self::DegenerateAtZero
    }

    pub fn cai_tang(q: f64) -> Result<Self> {
        Self::CaiTang { q }.validated()
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        Self::Empirical {
            samples,
            unbounded_below: false,
        }
        .validated()
    }

    pub fn point_mass(at: f64) -> Result<Self> {
        Self::PointMass { at }.validated()
    }

    /// Validate parameters and normalize internal state (sorts empirical
    /// samples).  Config deserialization funnels through here.
    pub fn validated(mut self) -> Result<Self> {
        match &mut self {
            Self::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(invalid("rate", "must be finite and positive", *rate));
                }
            }
            Self::ParetoShifted { shift, alpha } => {
                if !(shift.is_finite() && *shift >= 0.0) {
                    return Err(invalid("shift", "must be finite and nonnegative", *shift));
                }
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(invalid("alpha", "must be finite and positive", *alpha));
                }
            }
            Self::DegenerateAtZero => {}
            Self::CaiTang { q } => {
                if !(q.is_finite() && *q > 0.0 && *q < 1.0) {
                    return Err(invalid("q", "must lie strictly between 0 and 1", *q));
                }
            }
            Self::Empirical { samples, .. } => {
                if samples.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "samples",
                        reason: "empirical distribution needs at least one sample".into(),
                    });
                }
                if samples.iter().any(|s| !s.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "samples",
                        reason: "empirical samples must all be finite".into(),
                    });
                }
                samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
            Self::PointMass { at } => {
                if !at.is_finite() {
                    return Err(invalid("at", "must be finite", *at));
                }
            }
        }
        Ok(self)
    }

    /// Survival function P(X > x) with strict inequality at atoms.
    pub fn survival(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::ParetoShifted { shift, alpha } => {
                if x < -shift {
                    1.0
                } else {
                    (1.0 + shift + x).powf(-alpha)
                }
            }
            Self::DegenerateAtZero => {
                if x < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::CaiTang { q } => cai_tang_survival(*q, x),
            Self::Empirical { samples, .. } => {
                let above = samples.len() - samples.partition_point(|&s| s <= x);
                above as f64 / samples.len() as f64
            }
            Self::PointMass { at } => {
                if x < *at {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// ln P(X > x), computed directly so tails far below linear-space range
    /// stay finite (e.g. an Exponential at x = 10^6 gives -10^6, not -inf).
    pub fn log_survival(&self, x: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    -rate * x
                }
            }
            Self::ParetoShifted { shift, alpha } => {
                if x < -shift {
                    0.0
                } else {
                    -alpha * (1.0 + shift + x).ln()
                }
            }
            Self::DegenerateAtZero => {
                if x < 0.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::CaiTang { q } => cai_tang_log_survival(*q, x),
            Self::Empirical { .. } | Self::PointMass { .. } => self.survival(x).ln(),
        }
    }

    /// Cumulative distribution function P(X <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// Survival of the positive part max(X, 0): equals `survival(x)` for
    /// x >= 0 and 1 below zero.  Used when a certified upper bound needs a
    /// nonnegative proxy for a component that can dip below zero.
    pub fn positive_part_survival(&self, x: f64) -> f64 {
        if x < 0.0 {
            1.0
        } else {
            self.survival(x)
        }
    }

    /// Infimum of the support; `-inf` when an empirical sample is declared
    /// unbounded below.
    pub fn support_lower(&self) -> f64 {
        match self {
            Self::Exponential { .. } | Self::DegenerateAtZero => 0.0,
            Self::ParetoShifted { shift, .. } => -shift,
            Self::CaiTang { .. } => 1.0,
            Self::Empirical {
                samples,
                unbounded_below,
            } => {
                if *unbounded_below {
                    f64::NEG_INFINITY
                } else {
                    samples[0]
                }
            }
            Self::PointMass { at } => *at,
        }
    }

    pub fn is_bounded_below(&self) -> bool {
        self.support_lower().is_finite()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.support_lower() >= 0.0
    }

    /// Generalized inverse of the survival function:
    /// inf { x : P(X > x) <= p }.  For p >= 1 this is the support infimum.
    pub fn upper_quantile(&self, p: f64) -> f64 {
        debug_assert!(p > 0.0 && p.is_finite());
        if p >= 1.0 {
            return self.support_lower();
        }
        match self {
            Self::Exponential { rate } => -p.ln() / rate,
            Self::ParetoShifted { shift, alpha } => p.powf(-1.0 / alpha) - 1.0 - shift,
            Self::DegenerateAtZero => 0.0,
            Self::CaiTang { q } => {
                let mut m = (p.ln() / q.ln()).floor() as i32;
                let mut u = 2.0 - (p * q.powi(-m) - q) / (1.0 - q);
                if u < 1.0 {
                    m -= 1;
                    u = 2.0 - (p * q.powi(-m) - q) / (1.0 - q);
                } else if u > 2.0 {
                    m += 1;
                    u = 2.0 - (p * q.powi(-m) - q) / (1.0 - q);
                }
                u.clamp(1.0, 2.0) * (2f64).powi(m)
            }
            Self::Empirical { samples, .. } => {
                // survival(samples[i]) is nonincreasing in i; binary search
                // for the first sample whose survival drops to p or below.
                let n = samples.len();
                let mut lo = 0usize;
                let mut hi = n - 1;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if self.survival(samples[mid]) <= p {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                samples[lo]
            }
            Self::PointMass { at } => *at,
        }
    }

    /// One draw.  Analytic kinds invert the survival function; the Cai-Tang
    /// kind is sampled compositionally as (1 + U) * 2^G, and empirical kinds
    /// resample indices.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match self {
            Self::CaiTang { q } => {
                let u = stream.next_unit(); // uniform factor in (0, 1]
                let v = stream.next_unit();
                let g = (v.ln() / q.ln()).floor();
                (1.0 + (u - u.floor())) * (2f64).powf(g)
            }
            Self::Empirical { samples, .. } => {
                let u = stream.next_unit();
                let idx = ((u * samples.len() as f64).floor() as usize).min(samples.len() - 1);
                samples[idx]
            }
            Self::DegenerateAtZero => 0.0,
            Self::PointMass { at } => *at,
            _ => self.upper_quantile(stream.next_unit()),
        }
    }

    pub fn sample_many(&self, stream: &mut RandomStream, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample(stream)).collect()
    }
}

fn invalid(name: &'static str, why: &str, value: f64) -> Error {
    Error::InvalidParameter {
        name,
        reason: format!("{why} (got {value})"),
    }
}
