//! Component sequences: how the k-th summand is distributed.
//!
//! A sequence is described by a rule (i.i.d., periodic with head overrides,
//! or an explicit head with a default), a pivot index used by the hypothesis
//! checkers, and an optional weight sequence w(n) used to normalize the
//! boundedness statistic (default w(n) = n).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{CountingDistribution, MomentValue, TailDistribution};
use crate::error::{Error, Result};

/// Weight sequence w(n) for the boundedness statistic
/// sup_n (1 / (w(n) tail_pivot(x))) * sum_{k <= n} tail_k(x).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSequence {
    /// w(n) = n (the default).
    Identity,
    /// w(n) = n^exponent.
    Power { exponent: f64 },
    /// w(n) = value.
    Constant { value: f64 },
}

impl WeightSequence {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            WeightSequence::Identity => n as f64,
            WeightSequence::Power { exponent } => (n as f64).powf(*exponent),
            WeightSequence::Constant { value } => *value,
        }
    }

    /// Certified E[w(N) 1{N >= 1}] for a stopping variable N.
    pub fn expectation_over(&self, stopping: &CountingDistribution) -> Result<MomentValue> {
        match self {
            // n^e vanishes at n = 0, so the restriction to N >= 1 is free.
            WeightSequence::Identity => stopping.moment(1.0),
            WeightSequence::Power { exponent } => stopping.moment(*exponent),
            WeightSequence::Constant { value } => {
                Ok(MomentValue::Finite(value * (1.0 - stopping.pmf(0))))
            }
        }
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match &self {
            WeightSequence::Identity => true,
            WeightSequence::Power { exponent } => exponent.is_finite() && *exponent > 0.0,
            WeightSequence::Constant { value } => value.is_finite() && *value > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidParameter {
                name: "weights",
                reason: "weight sequence parameters must be finite and positive".into(),
            })
        }
    }
}

/// Assignment of a marginal law to every index k >= 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceRule {
    /// Every component has the same law.
    Iid { dist: TailDistribution },
    /// Component k follows `pattern[(k - 1) % pattern.len()]` unless `head`
    /// carries an override for that exact index.
    Periodic {
        pattern: Vec<TailDistribution>,
        #[serde(
            default,
            skip_serializing_if = "BTreeMap::is_empty",
            with = "index_keyed_map"
        )]
        head: BTreeMap<usize, TailDistribution>,
    },
    /// Components 1..=head.len() are listed explicitly; later indices all
    /// follow `default`.
    Explicit {
        head: Vec<TailDistribution>,
        default: TailDistribution,
    },
}

/// A component sequence plus checker metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub rule: SequenceRule,
    /// Pivot index for the dominance and boundedness conditions (1-based).
    #[serde(default = "default_pivot")]
    pub pivot: usize,
    /// Optional weight sequence; `None` means w(n) = n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightSequence>,
}

fn default_pivot() -> usize {
    1
}

/// JSON object keys are strings; round-trip the 1-based head indices through
/// string form (the tagged-enum deserializer buffers keys as strings, so the
/// map needs explicit key parsing).
mod index_keyed_map {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::distributions::TailDistribution;

    pub(super) fn serialize<S: Serializer>(
        map: &BTreeMap<usize, TailDistribution>,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub(super) fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<BTreeMap<usize, TailDistribution>, D::Error> {
        let raw = BTreeMap::<String, TailDistribution>::deserialize(de)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("head key {k:?} is not an index")))
            })
            .collect()
    }
}

impl SequenceSpec {
    pub fn iid(dist: TailDistribution) -> Self {
        Self {
            rule: SequenceRule::Iid { dist },
            pivot: 1,
            weights: None,
        }
    }

    pub fn periodic(pattern: Vec<TailDistribution>, head: Vec<(usize, TailDistribution)>) -> Self {
        Self {
            rule: SequenceRule::Periodic {
                pattern,
                head: head.into_iter().collect(),
            },
            pivot: 1,
            weights: None,
        }
    }

    pub fn with_pivot(mut self, pivot: usize) -> Self {
        self.pivot = pivot;
        self
    }

    pub fn with_weights(mut self, weights: WeightSequence) -> Self {
        self.weights = Some(weights);
        self
    }

    /// Check the structural invariants and re-validate every component law
    /// (needed for specs built by deserialization, which bypasses the
    /// distribution constructors).
    pub fn validated(self) -> Result<Self> {
        if self.pivot == 0 {
            return Err(Error::InvalidParameter {
                name: "pivot",
                reason: "pivot index is 1-based and must be at least 1".into(),
            });
        }
        let rule = match self.rule {
            SequenceRule::Iid { dist } => SequenceRule::Iid {
                dist: dist.validated()?,
            },
            SequenceRule::Periodic { pattern, head } => {
                if pattern.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "pattern",
                        reason: "periodic rule needs a nonempty pattern".into(),
                    });
                }
                if head.contains_key(&0) {
                    return Err(Error::InvalidParameter {
                        name: "head",
                        reason: "head overrides are 1-based; index 0 is invalid".into(),
                    });
                }
                SequenceRule::Periodic {
                    pattern: pattern
                        .into_iter()
                        .map(TailDistribution::validated)
                        .collect::<Result<_>>()?,
                    head: head
                        .into_iter()
                        .map(|(k, d)| Ok((k, d.validated()?)))
                        .collect::<Result<_>>()?,
                }
            }
            SequenceRule::Explicit { head, default } => {
                if head.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "head",
                        reason: "explicit rule needs a nonempty head".into(),
                    });
                }
                SequenceRule::Explicit {
                    head: head
                        .into_iter()
                        .map(TailDistribution::validated)
                        .collect::<Result<_>>()?,
                    default: default.validated()?,
                }
            }
        };
        let weights = self.weights.map(WeightSequence::validated).transpose()?;
        Ok(SequenceSpec {
            rule,
            pivot: self.pivot,
            weights,
        })
    }

    /// Marginal law of the k-th component (k >= 1).
    pub fn dist_at(&self, k: usize) -> &TailDistribution {
        debug_assert!(k >= 1, "component indices are 1-based");
        match &self.rule {
            SequenceRule::Iid { dist } => dist,
            SequenceRule::Periodic { pattern, head } => head
                .get(&k)
                .unwrap_or_else(|| &pattern[(k - 1) % pattern.len()]),
            SequenceRule::Explicit { head, default } => head.get(k - 1).unwrap_or(default),
        }
    }

    /// The effective weight w(n).
    pub fn weight(&self, n: usize) -> f64 {
        match &self.weights {
            Some(w) => w.value(n),
            None => n as f64,
        }
    }

    /// Distinct component laws among indices 1..=probe, with the first index
    /// at which each law occurs.  Periodic rules therefore get checked once
    /// per residue class rather than once per index.
    pub fn distinct_components(&self, probe: usize) -> Vec<(usize, &TailDistribution)> {
        let mut seen: Vec<(usize, &TailDistribution)> = Vec::new();
        for k in 1..=self.structural_probe_bound(probe) {
            let d = self.dist_at(k);
            if !seen.iter().any(|(_, e)| *e == d) {
                seen.push((k, d));
            }
        }
        seen
    }

    /// How many leading indices suffice to see every distinct law.
    fn structural_probe_bound(&self, probe: usize) -> usize {
        match &self.rule {
            SequenceRule::Iid { .. } => 1,
            SequenceRule::Periodic { pattern, head } => {
                let last_head = head.keys().max().copied().unwrap_or(0);
                probe.min(last_head + pattern.len()).max(1)
            }
            SequenceRule::Explicit { head, .. } => probe.min(head.len() + 1).max(1),
        }
    }

    /// Exact supremum of the component survival functions at x, over all
    /// k >= 1 (not just a probe prefix): every rule exposes a finite set of
    /// distinct laws.
    pub fn max_survival(&self, x: f64) -> f64 {
        self.all_laws()
            .map(|d| d.survival(x))
            .fold(0.0, f64::max)
    }

    /// Exact infimum of the component support lower bounds over all k >= 1.
    pub fn min_support_lower(&self) -> f64 {
        self.all_laws()
            .map(|d| d.support_lower())
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every component is bounded below.
    pub fn all_bounded_below(&self) -> bool {
        self.min_support_lower().is_finite()
    }

    /// True when every component is nonnegative.
    pub fn all_nonnegative(&self) -> bool {
        self.min_support_lower() >= 0.0
    }

    /// Sum of support lower bounds of components 1..=n.
    pub fn shift_sum(&self, n: usize) -> f64 {
        (1..=n).map(|k| self.dist_at(k).support_lower()).sum()
    }

    fn all_laws(&self) -> impl Iterator<Item = &TailDistribution> {
        let laws: Vec<&TailDistribution> = match &self.rule {
            SequenceRule::Iid { dist } => vec![dist],
            SequenceRule::Periodic { pattern, head } => {
                pattern.iter().chain(head.values()).collect()
            }
            SequenceRule::Explicit { head, default } => {
                head.iter().chain(std::iter::once(default)).collect()
            }
        };
        laws.into_iter()
    }
}
