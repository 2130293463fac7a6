//! Heavy-tail class indicators and hypothesis checkers.
//!
//! The indicators probe a survival function on a geometric grid and report a
//! three-valued verdict per class: heavy (H), long (L), dominatedly varying
//! (D), consistently varying (C), subexponential (S), and regularly varying
//! (R).  Statistics follow a top-half convention: limits as x -> infinity are
//! approximated on the upper half of the grid so that pre-asymptotic
//! transients on the lower half cannot contaminate a verdict.
//!
//! [`diagnose`] bundles the indicators into a [`DiagnosisReport`] and coerces
//! the verdicts onto the inclusion partial order
//! R ⊂ C ⊂ L∩D ⊂ S ⊂ L ⊂ H (and D ⊂ H): a pass for a subclass combined with
//! a fail for one of its superclasses is downgraded to inconclusive on both
//! sides, with a warning, rather than reported as a contradiction.
//!
//! The `check_theorem*` / `check_corollary*` functions evaluate the
//! hypotheses of the stopped-extremum closure results implemented by
//! [`crate::tail_algebra::stopped_tail`]: each checkable condition becomes a
//! [`ConditionReport`], and assumptions that cannot be tested from marginal
//! laws (mutual independence, independence of the stopping variable) are
//! surfaced as notes instead of silently assumed away.

use serde::{Deserialize, Serialize};

use crate::distributions::{CountingDistribution, MomentValue, SequenceSpec, TailDistribution};
use crate::error::{Error, Result};
use crate::montecarlo::subexp_ratio;
use crate::numeric::{linear_fit, max_abs_residual};
use crate::tail_algebra::GridOptions;

/// Exponential probe rates for the heaviness indicator.
const HEAVY_DELTAS: [f64; 3] = [0.01, 0.1, 1.0];
/// Additive shift used by the long-tail indicator.
const LONG_SHIFT: f64 = 1.0;
/// The long-tail deviation |F̄(x+1)/F̄(x) - 1| must end below this.
const LONG_FINAL_CAP: f64 = 0.05;
/// C-class cap: the ratio envelope at the y closest to 1 must stay below.
const C_RATIO_CAP: f64 = 1.1;
/// D-class cap on max_x F̄(x/2)/F̄(x).
const D_RATIO_CAP: f64 = 1e6;
/// D-class growth tolerance between the lower and upper half of the grid.
const D_TREND_FACTOR: f64 = 1.5;
/// Acceptance band for the convolution-square ratio F̄*²(x)/F̄(x) around 2.
const SUBEXP_BAND: (f64, f64) = (1.7, 2.3);
/// Number of top grid points probed by the subexponentiality indicator.
const SUBEXP_POINTS: usize = 3;
/// ln(1e-290): a scaled-ratio floor below which the Matuszewska statistic is
/// treated as underflowed and the upper index reported as infinite.
const UNDERFLOW_LOG: f64 = -667.0;
/// A tail is accepted as o(reference) when the final top-half ratio is below
/// this and the ratio is nonincreasing there.
const O_SMALL_CAP: f64 = 0.01;
/// Regular variation is rejected when the log-log fit residual exceeds this.
const RV_RESIDUAL_CAP: f64 = 0.05;
/// Boundedness statistics pass when the value at x_max does not exceed
/// `factor * value_at_first_top_point + slack`.
const BOUNDED_GROWTH_FACTOR: f64 = 1.1;
const BOUNDED_GROWTH_SLACK: f64 = 0.05;
/// Half-integer exponents p are searched on (anchor, anchor + span].
const MOMENT_SEARCH_SPAN: f64 = 2.0;
/// Bases b for which E b^N is probed by the light-stopping-tail condition.
const EXP_MOMENT_BASES: [f64; 3] = [1.01, 1.1, 2.0];

/// Evaluation grid for the class indicators.
///
/// `points` survival evaluations are placed geometrically on
/// `[x_min, x_max]`; `y_list` holds the scale factors y < 1 probed by the
/// C-class envelope, and `z_list` the scale factors z > 1 probed by the
/// upper Matuszewska statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub y_list: Vec<f64>,
    pub z_list: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_min: 1e2,
            x_max: 1e8,
            points: 129,
            y_list: vec![0.5, 0.75, 0.9, 0.95, 0.99],
            z_list: vec![16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0],
        }
    }
}

impl GridSpec {
    /// Validate ranges: 0 < x_min < x_max, at least 8 points, y in (0, 1)
    /// strictly increasing, z > 1 strictly increasing.
    pub fn validated(self) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidParameter {
            name: "grid",
            reason,
        };
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min > 0.0) {
            return Err(invalid("x_min must be finite and positive".into()));
        }
        if self.x_max <= self.x_min {
            return Err(invalid(format!(
                "x_max = {} must exceed x_min = {}",
                self.x_max, self.x_min
            )));
        }
        if self.points < 8 {
            return Err(invalid(format!(
                "need at least 8 grid points, got {}",
                self.points
            )));
        }
        if self.y_list.is_empty() || self.z_list.is_empty() {
            return Err(invalid("y_list and z_list must be nonempty".into()));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !self.y_list.iter().all(|y| (0.0..1.0).contains(y) && *y > 0.0)
            || !increasing(&self.y_list)
        {
            return Err(invalid(
                "y_list must be strictly increasing inside (0, 1)".into(),
            ));
        }
        if !self.z_list.iter().all(|z| z.is_finite() && *z > 1.0) || !increasing(&self.z_list) {
            return Err(invalid("z_list must be strictly increasing with z > 1".into()));
        }
        Ok(self)
    }

    /// Geometric evaluation points, endpoints included exactly.
    pub fn xs(&self) -> Vec<f64> {
        let n = self.points;
        let (a, b) = (self.x_min.ln(), self.x_max.ln());
        let mut xs: Vec<f64> = (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect();
        xs[0] = self.x_min;
        xs[n - 1] = self.x_max;
        xs
    }
}

/// Upper half of an evaluation grid: proxy for the limit x -> infinity.
fn top_half(xs: &[f64]) -> &[f64] {
    &xs[xs.len() / 2..]
}

/// Three-valued outcome of an indicator or a hypothesis condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Verdict plus the decision statistic and an optional supporting curve.
#[derive(Clone, Debug, Serialize)]
pub struct ClassFinding {
    pub verdict: Verdict,
    /// Headline decision statistic; NaN when the indicator could not run.
    pub statistic: f64,
    /// Supporting curve; the abscissa meaning depends on the indicator
    /// (grid point, scale factor, or probe rate).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<(f64, f64)>,
}

impl ClassFinding {
    fn unavailable() -> Self {
        ClassFinding {
            verdict: Verdict::Inconclusive,
            statistic: f64::NAN,
            curve: Vec::new(),
        }
    }
}

/// An estimated tail index that may be flagged as infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexEstimate {
    Finite { value: f64 },
    Infinite,
}

impl IndexEstimate {
    pub fn is_finite(&self) -> bool {
        matches!(self, IndexEstimate::Finite { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            IndexEstimate::Finite { value } => Some(*value),
            IndexEstimate::Infinite => None,
        }
    }
}

/// exp with saturation to the largest finite double, so that astronomically
/// large but honest ratios stay representable in reports.
fn saturating_exp(l: f64) -> f64 {
    if l > 700.0 {
        f64::MAX
    } else {
        l.exp()
    }
}

/// ln F̄ at every requested point, or [`Error::ZeroTail`] at the first point
/// where the survival function is exactly zero.
fn log_survivals(dist: &TailDistribution, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let ls = dist.log_survival(x);
            if ls == f64::NEG_INFINITY {
                Err(Error::ZeroTail { x })
            } else {
                Ok(ls)
            }
        })
        .collect()
}

/// Heaviness indicator: no exponential moment is finite.
///
/// For each probe rate δ the least-squares slope of ln F̄(x) + δx over the
/// top half of the grid is computed; the statistic is the smallest slope and
/// the class passes when every slope is positive (e^{δx} F̄(x) grows for all
/// probed δ).  The curve records (δ, slope).
pub fn heavy_indicator(dist: &TailDistribution, grid: &GridSpec) -> Result<ClassFinding> {
    let xs = grid.xs();
    let top = top_half(&xs);
    let ls = log_survivals(dist, top)?;
    let mut curve = Vec::with_capacity(HEAVY_DELTAS.len());
    let mut worst = f64::INFINITY;
    for delta in HEAVY_DELTAS {
        let ys: Vec<f64> = top.iter().zip(&ls).map(|(&x, &l)| l + delta * x).collect();
        let (slope, _) = linear_fit(top, &ys);
        curve.push((delta, slope));
        worst = worst.min(slope);
    }
    let verdict = if worst > 0.0 { Verdict::Pass } else { Verdict::Fail };
    Ok(ClassFinding {
        verdict,
        statistic: worst,
        curve,
    })
}

/// Long-tail indicator: F̄(x + 1) / F̄(x) -> 1.
///
/// The statistic is the largest top-half deviation |F̄(x+1)/F̄(x) - 1|; the
/// class passes when the deviation at x_max is below 0.05 and the second
/// half of the window does not exceed the first (the deviation is trending
/// down).  A sub-cap final value without the downward trend is inconclusive.
pub fn long_indicator(dist: &TailDistribution, grid: &GridSpec) -> Result<ClassFinding> {
    let xs = grid.xs();
    let top = top_half(&xs);
    let ls = log_survivals(dist, top)?;
    let mut devs = Vec::with_capacity(top.len());
    let mut curve = Vec::with_capacity(top.len());
    for (&x, &l) in top.iter().zip(&ls) {
        let shifted = dist.log_survival(x + LONG_SHIFT);
        if shifted == f64::NEG_INFINITY {
            return Err(Error::ZeroTail { x: x + LONG_SHIFT });
        }
        let dev = ((shifted - l).exp() - 1.0).abs();
        devs.push(dev);
        curve.push((x, dev));
    }
    let statistic = devs.iter().copied().fold(0.0, f64::max);
    let final_dev = *devs.last().expect("top half is nonempty");
    let half = devs.len() / 2;
    let early = devs[..half].iter().copied().fold(0.0, f64::max);
    let late = devs[half..].iter().copied().fold(0.0, f64::max);
    let trending_down = late <= early + 1e-9;
    let verdict = if final_dev >= LONG_FINAL_CAP {
        Verdict::Fail
    } else if trending_down {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(ClassFinding {
        verdict,
        statistic,
        curve,
    })
}

/// Consistent-variation indicator: limsup F̄(xy)/F̄(x) -> 1 as y -> 1.
///
/// For each y in the grid's `y_list` the envelope Ĉ(y) = max over top-half x
/// of F̄(xy)/F̄(x) is recorded as the curve; the statistic is Ĉ at the y
/// closest to 1 and the class passes when that value is below 1.1 and the
/// envelope is nonincreasing in y.
pub fn c_indicator(dist: &TailDistribution, grid: &GridSpec) -> Result<ClassFinding> {
    let xs = grid.xs();
    let top = top_half(&xs);
    let ls = log_survivals(dist, top)?;
    let mut curve = Vec::with_capacity(grid.y_list.len());
    for &y in &grid.y_list {
        let mut best = f64::NEG_INFINITY;
        for (&x, &l) in top.iter().zip(&ls) {
            best = best.max(dist.log_survival(x * y) - l);
        }
        curve.push((y, saturating_exp(best)));
    }
    let statistic = curve.last().expect("y_list is nonempty").1;
    let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));
    let verdict = if statistic >= C_RATIO_CAP {
        Verdict::Fail
    } else if monotone {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(ClassFinding {
        verdict,
        statistic,
        curve,
    })
}

/// Dominated-variation indicator: limsup F̄(x/2)/F̄(x) < infinity.
///
/// The halving ratio is evaluated over the whole grid; the statistic is its
/// maximum.  The class passes when the maximum stays below 1e6 and the upper
/// half of the grid does not exceed 1.5x the lower half (no growth trend
/// across decades); a bounded but still growing ratio is inconclusive.
pub fn d_indicator(dist: &TailDistribution, grid: &GridSpec) -> Result<ClassFinding> {
    let xs = grid.xs();
    let ls = log_survivals(dist, &xs)?;
    let mut curve = Vec::with_capacity(xs.len());
    for (&x, &l) in xs.iter().zip(&ls) {
        curve.push((x, saturating_exp(dist.log_survival(x / 2.0) - l)));
    }
    let statistic = curve.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let half = curve.len() / 2;
    let early = curve[..half].iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let late = curve[half..].iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let verdict = if statistic >= D_RATIO_CAP {
        Verdict::Fail
    } else if late <= D_TREND_FACTOR * early + 1e-9 {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(ClassFinding {
        verdict,
        statistic,
        curve,
    })
}

/// Subexponentiality indicator: F̄*²(x)/F̄(x) -> 2.
///
/// The convolution-square ratio is evaluated at the top `SUBEXP_POINTS` grid
/// points via certified lattice convolution (exact for the exponential law).
/// The class passes when every ratio lies in [1.7, 2.3] and the deviation
/// from 2 does not grow along the probe; out-of-band ratios fail, and an
/// in-band non-trending probe is inconclusive.  The statistic is the ratio
/// at x_max and the curve records (x, ratio).
pub fn subexp_indicator(
    dist: &TailDistribution,
    grid: &GridSpec,
    gopts: &GridOptions,
) -> Result<ClassFinding> {
    let xs = grid.xs();
    let take = SUBEXP_POINTS.min(xs.len());
    let probe = &xs[xs.len() - take..];
    let mut curve = Vec::with_capacity(probe.len());
    for &x in probe {
        let ratio = subexp_ratio(dist, x, gopts)?;
        curve.push((x, ratio.estimate));
    }
    let devs: Vec<f64> = curve.iter().map(|&(_, r)| (r - 2.0).abs()).collect();
    let in_band = curve
        .iter()
        .all(|&(_, r)| (SUBEXP_BAND.0..=SUBEXP_BAND.1).contains(&r));
    let trending = devs.last() <= devs.first().map(|d| d + 0.05).as_ref();
    let statistic = curve.last().expect("probe is nonempty").1;
    let verdict = if !in_band {
        Verdict::Fail
    } else if trending {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(ClassFinding {
        verdict,
        statistic,
        curve,
    })
}

/// Regular-variation fit: ln F̄ against ln x over the top half of the grid.
///
/// Returns the finding (statistic = largest absolute fit residual, pass when
/// it stays within 0.05) and the fitted tail exponent α̂ = -slope when the
/// fit is accepted.
pub fn rv_indicator(
    dist: &TailDistribution,
    grid: &GridSpec,
) -> Result<(ClassFinding, Option<f64>)> {
    let xs = grid.xs();
    let top = top_half(&xs);
    let ls = log_survivals(dist, top)?;
    let lnxs: Vec<f64> = top.iter().map(|x| x.ln()).collect();
    let (slope, intercept) = linear_fit(&lnxs, &ls);
    let residual = max_abs_residual(&lnxs, &ls, slope, intercept);
    let verdict = if residual > RV_RESIDUAL_CAP {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let alpha = if verdict == Verdict::Pass {
        Some(-slope)
    } else {
        None
    };
    let finding = ClassFinding {
        verdict,
        statistic: residual,
        curve: vec![(slope, intercept)],
    };
    Ok((finding, alpha))
}

/// Upper Matuszewska index estimate.
///
/// For each z in the grid's `z_list` the scaled-ratio floor
/// L̂(z) = min over top-half x of F̄(xz)/F̄(x) yields the per-scale exponent
/// Ĵ⁺(z) = -ln L̂(z) / ln z; the estimate is the largest such exponent.  If
/// any floor underflows below 1e-290 the index is flagged infinite.  The
/// returned curve holds the finite (z, Ĵ⁺(z)) pairs; for oscillating tails
/// its spread indicates how far the family is from pure power decay.
pub fn matuszewska_upper(
    dist: &TailDistribution,
    grid: &GridSpec,
) -> Result<(IndexEstimate, Vec<(f64, f64)>)> {
    let xs = grid.xs();
    let top = top_half(&xs);
    let ls = log_survivals(dist, top)?;
    let mut curve = Vec::with_capacity(grid.z_list.len());
    let mut underflow = false;
    let mut best = f64::NEG_INFINITY;
    for &z in &grid.z_list {
        let mut floor_ln = f64::INFINITY;
        for (&x, &l) in top.iter().zip(&ls) {
            floor_ln = floor_ln.min(dist.log_survival(x * z) - l);
        }
        if floor_ln < UNDERFLOW_LOG {
            underflow = true;
            continue;
        }
        let jz = -floor_ln / z.ln();
        curve.push((z, jz));
        best = best.max(jz);
    }
    let estimate = if underflow {
        IndexEstimate::Infinite
    } else {
        IndexEstimate::Finite { value: best }
    };
    Ok((estimate, curve))
}

/// Full class diagnosis of a single marginal law.
#[derive(Clone, Debug, Serialize)]
pub struct DiagnosisReport {
    pub grid: GridSpec,
    pub heavy: ClassFinding,
    pub long: ClassFinding,
    pub dominated_varying: ClassFinding,
    pub consistently_varying: ClassFinding,
    pub subexponential: ClassFinding,
    pub regularly_varying: ClassFinding,
    /// Upper Matuszewska index estimate; `None` when it could not be run.
    pub j_plus: Option<IndexEstimate>,
    /// Finite per-scale exponents (z, Ĵ⁺(z)) behind `j_plus`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub j_plus_curve: Vec<(f64, f64)>,
    /// Fitted regular-variation exponent, present only when the fit passed.
    pub rv_alpha: Option<f64>,
    pub warnings: Vec<String>,
}

/// Indices into the verdict vector used by the inclusion rules.
const H: usize = 0;
const L: usize = 1;
const D: usize = 2;
const C: usize = 3;
const S: usize = 4;
const R: usize = 5;

const CLASS_NAMES: [&str; 6] = [
    "heavy",
    "long",
    "dominated_varying",
    "consistently_varying",
    "subexponential",
    "regularly_varying",
];

/// Subclass-superclass pairs implied by
/// R ⊂ C ⊂ L∩D ⊂ S ⊂ L ⊂ H together with D ⊂ H.
const INCLUSION_EDGES: [(usize, usize); 7] = [
    (R, C),
    (C, S),
    (C, L),
    (C, D),
    (S, L),
    (L, H),
    (D, H),
];

/// Downgrade verdicts until no subclass passes while a superclass fails.
/// Also enforces the joint rule L∩D ⊂ S.  Returns a warning per downgrade.
fn coerce_inclusions(verdicts: &mut [Verdict; 6], warnings: &mut Vec<String>) {
    loop {
        let mut changed = false;
        for &(sub, sup) in &INCLUSION_EDGES {
            if verdicts[sub] == Verdict::Pass && verdicts[sup] == Verdict::Fail {
                verdicts[sub] = Verdict::Inconclusive;
                verdicts[sup] = Verdict::Inconclusive;
                warnings.push(format!(
                    "inclusion conflict: {} passed while {} failed; both downgraded to inconclusive",
                    CLASS_NAMES[sub], CLASS_NAMES[sup]
                ));
                changed = true;
            }
        }
        if verdicts[L] == Verdict::Pass
            && verdicts[D] == Verdict::Pass
            && verdicts[S] == Verdict::Fail
        {
            verdicts[L] = Verdict::Inconclusive;
            verdicts[D] = Verdict::Inconclusive;
            verdicts[S] = Verdict::Inconclusive;
            warnings.push(
                "inclusion conflict: long and dominated_varying passed while subexponential \
                 failed; all three downgraded to inconclusive"
                    .into(),
            );
            changed = true;
        }
        if !changed {
            return;
        }
    }
}

impl DiagnosisReport {
    /// (class, statistic, verdict) rows in fixed order, one per class.
    pub fn class_rows(&self) -> Vec<(&'static str, f64, Verdict)> {
        let f = [
            &self.heavy,
            &self.long,
            &self.dominated_varying,
            &self.consistently_varying,
            &self.subexponential,
            &self.regularly_varying,
        ];
        CLASS_NAMES
            .iter()
            .zip(f)
            .map(|(name, finding)| (*name, finding.statistic, finding.verdict))
            .collect()
    }

    fn verdict_vector(&self) -> [Verdict; 6] {
        [
            self.heavy.verdict,
            self.long.verdict,
            self.dominated_varying.verdict,
            self.consistently_varying.verdict,
            self.subexponential.verdict,
            self.regularly_varying.verdict,
        ]
    }

    /// Pairs (subclass, superclass) where a pass coexists with a fail.
    /// Empty on every report produced by [`diagnose`].
    pub fn inclusion_violations(&self) -> Vec<(&'static str, &'static str)> {
        let v = self.verdict_vector();
        let mut out: Vec<(&'static str, &'static str)> = INCLUSION_EDGES
            .iter()
            .filter(|&&(sub, sup)| v[sub] == Verdict::Pass && v[sup] == Verdict::Fail)
            .map(|&(sub, sup)| (CLASS_NAMES[sub], CLASS_NAMES[sup]))
            .collect();
        if v[L] == Verdict::Pass && v[D] == Verdict::Pass && v[S] == Verdict::Fail {
            out.push(("long*dominated_varying", "subexponential"));
        }
        out
    }
}

/// Run every class indicator on one marginal law and assemble the report.
///
/// Indicator errors (for example a survival function that is exactly zero on
/// the grid) downgrade the affected class to inconclusive and append a
/// warning instead of aborting the whole diagnosis.  Verdicts are then
/// coerced onto the inclusion partial order, and the dominated-variation
/// verdict is cross-checked against the Matuszewska index estimate (the
/// class is equivalent to a finite upper index; on disagreement the verdict
/// is downgraded to inconclusive).
pub fn diagnose(
    dist: &TailDistribution,
    grid: &GridSpec,
    gopts: &GridOptions,
) -> Result<DiagnosisReport> {
    let grid = grid.clone().validated()?;
    let mut warnings = Vec::new();
    let mut run = |name: &str, res: Result<ClassFinding>| match res {
        Ok(finding) => finding,
        Err(err) => {
            warnings.push(format!("{name}: {err}"));
            ClassFinding::unavailable()
        }
    };
    let heavy = run("heavy", heavy_indicator(dist, &grid));
    let long = run("long", long_indicator(dist, &grid));
    let dominated = run("dominated_varying", d_indicator(dist, &grid));
    let consistent = run("consistently_varying", c_indicator(dist, &grid));
    let subexp = run("subexponential", subexp_indicator(dist, &grid, gopts));
    let (regular, rv_alpha) = match rv_indicator(dist, &grid) {
        Ok(pair) => pair,
        Err(err) => {
            warnings.push(format!("regularly_varying: {err}"));
            (ClassFinding::unavailable(), None)
        }
    };
    let (j_plus, j_plus_curve) = match matuszewska_upper(dist, &grid) {
        Ok((estimate, curve)) => (Some(estimate), curve),
        Err(err) => {
            warnings.push(format!("matuszewska_upper: {err}"));
            (None, Vec::new())
        }
    };

    if heavy.verdict == Verdict::Fail
        && heavy.curve.iter().any(|&(_, slope)| slope.abs() < 1e-9)
    {
        warnings.push(
            "heavy: the flattest exponential probe is exactly neutral; the law sits on the \
             boundary between light and heavy tails"
                .into(),
        );
    }

    let mut verdicts = [
        heavy.verdict,
        long.verdict,
        dominated.verdict,
        consistent.verdict,
        subexp.verdict,
        regular.verdict,
    ];

    match (&j_plus, verdicts[D]) {
        (Some(IndexEstimate::Infinite), Verdict::Pass) => {
            verdicts[D] = Verdict::Inconclusive;
            warnings.push(
                "dominated_varying passed but the upper Matuszewska index appears infinite; \
                 verdict downgraded to inconclusive"
                    .into(),
            );
        }
        (Some(IndexEstimate::Finite { .. }), Verdict::Fail) => {
            verdicts[D] = Verdict::Inconclusive;
            warnings.push(
                "dominated_varying failed but the upper Matuszewska index appears finite; \
                 verdict downgraded to inconclusive"
                    .into(),
            );
        }
        _ => {}
    }

    coerce_inclusions(&mut verdicts, &mut warnings);

    let with = |finding: ClassFinding, verdict: Verdict| ClassFinding { verdict, ..finding };
    Ok(DiagnosisReport {
        grid,
        heavy: with(heavy, verdicts[H]),
        long: with(long, verdicts[L]),
        dominated_varying: with(dominated, verdicts[D]),
        consistently_varying: with(consistent, verdicts[C]),
        subexponential: with(subexp, verdicts[S]),
        regularly_varying: with(regular, verdicts[R]),
        j_plus,
        j_plus_curve,
        rv_alpha,
        warnings,
    })
}

/// One checkable hypothesis of a closure result.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    /// Short stable identifier ("a", "b", ...).
    pub id: &'static str,
    pub description: String,
    pub verdict: Verdict,
    /// Decision statistic when the condition reduces to one number
    /// (a certified exponent, a supremum, a moment value).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    /// Component indices (1-based, first representative of each distinct
    /// law) for which a per-component condition failed.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failing_indices: Vec<usize>,
    /// Supporting curve; abscissa meaning depends on the condition.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curve: Vec<(f64, f64)>,
}

impl ConditionReport {
    fn new(id: &'static str, description: impl Into<String>, verdict: Verdict) -> Self {
        ConditionReport {
            id,
            description: description.into(),
            verdict,
            statistic: None,
            failing_indices: Vec::new(),
            curve: Vec::new(),
        }
    }

    fn with_statistic(mut self, statistic: f64) -> Self {
        self.statistic = Some(statistic);
        self
    }

    fn with_curve(mut self, curve: Vec<(f64, f64)>) -> Self {
        self.curve = curve;
        self
    }
}

/// Outcome of checking every stated hypothesis of one closure result.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    /// Interface token of the result: "theorem1" ... "theorem5",
    /// "corollary1", "corollary2".
    pub theorem: &'static str,
    pub conditions: Vec<ConditionReport>,
    /// Fail if any condition failed; otherwise inconclusive if any condition
    /// was inconclusive; otherwise pass.
    pub overall: Verdict,
    /// Standing assumptions that cannot be verified from marginal laws.
    pub notes: Vec<String>,
}

impl HypothesisReport {
    fn assemble(
        theorem: &'static str,
        conditions: Vec<ConditionReport>,
        notes: Vec<String>,
    ) -> Self {
        let overall = if conditions.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if conditions.iter().any(|c| c.verdict == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        HypothesisReport {
            theorem,
            conditions,
            overall,
            notes,
        }
    }
}

fn independence_note() -> String {
    "components are assumed mutually independent and independent of the stopping variable; \
     independence is not testable from marginal laws and is taken as given"
        .into()
}

/// Map an indicator result onto a condition verdict, noting failures to run.
fn indicator_condition(
    id: &'static str,
    description: String,
    result: Result<ClassFinding>,
    notes: &mut Vec<String>,
) -> ConditionReport {
    match result {
        Ok(finding) => {
            let mut cond = ConditionReport::new(id, description, finding.verdict)
                .with_statistic(finding.statistic);
            cond.curve = finding.curve;
            cond
        }
        Err(err) => {
            notes.push(format!("condition {id}: indicator did not run: {err}"));
            ConditionReport::new(id, description, Verdict::Inconclusive)
        }
    }
}

/// Weighted partial-sum boundedness curve: for every grid x the value
/// sup over n in [n_min, probe] of (1 / (w(n) F̄_pivot(x))) Σ_{k<=n} F̄_k(x).
///
/// Evaluated over the whole grid (the pass rule below uses the top half).
fn boundedness_curve<W: Fn(usize) -> f64>(
    seq: &SequenceSpec,
    pivot: usize,
    n_min: usize,
    probe: usize,
    weight: W,
    xs: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let probe = probe.max(n_min).max(1);
    let mut curve = Vec::with_capacity(xs.len());
    for &x in xs {
        let pivot_ls = seq.dist_at(pivot).log_survival(x);
        if pivot_ls == f64::NEG_INFINITY {
            return Err(Error::ZeroTail { x });
        }
        let mut cum = 0.0;
        let mut best = 0.0f64;
        for n in 1..=probe {
            cum += (seq.dist_at(n).log_survival(x) - pivot_ls).exp();
            if n >= n_min {
                best = best.max(cum / weight(n));
            }
        }
        curve.push((x, best));
    }
    Ok(curve)
}

/// Boundedness pass rule: every value finite, and the value at x_max at most
/// `1.1 * (value at the first top-half point) + 0.05`.
fn boundedness_condition(
    id: &'static str,
    description: String,
    curve: Result<Vec<(f64, f64)>>,
    notes: &mut Vec<String>,
) -> ConditionReport {
    let curve = match curve {
        Ok(curve) => curve,
        Err(err) => {
            notes.push(format!("condition {id}: statistic did not run: {err}"));
            return ConditionReport::new(id, description, Verdict::Inconclusive);
        }
    };
    let statistic = curve.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let top = &curve[curve.len() / 2..];
    let first = top.first().expect("grid is nonempty").1;
    let last = top.last().expect("grid is nonempty").1;
    let verdict = if !statistic.is_finite() {
        Verdict::Fail
    } else if last <= BOUNDED_GROWTH_FACTOR * first + BOUNDED_GROWTH_SLACK {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    ConditionReport::new(id, description, verdict)
        .with_statistic(statistic)
        .with_curve(curve)
}

/// Top-half ratio test for F̄_num(x) = o(F̄_den(x)): the ratio must be
/// nonincreasing on the top half and end below 0.01.
fn o_small_holds(
    num: &TailDistribution,
    den: &TailDistribution,
    top: &[f64],
) -> Result<bool> {
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    for &x in top {
        let den_ls = den.log_survival(x);
        if den_ls == f64::NEG_INFINITY {
            return Err(Error::ZeroTail { x });
        }
        let ratio = (num.log_survival(x) - den_ls).exp();
        if ratio > prev * (1.0 + 1e-9) + 1e-300 {
            return Ok(false);
        }
        prev = ratio;
        last = ratio;
    }
    Ok(last < O_SMALL_CAP)
}

/// Per-component condition "F̄_k has a consistently varying tail or is
/// negligible against the pivot tail" over the distinct laws among indices
/// 1..=probe, skipping the pivot itself.
fn c_or_negligible_condition(
    id: &'static str,
    seq: &SequenceSpec,
    pivot: usize,
    probe: usize,
    grid: &GridSpec,
    notes: &mut Vec<String>,
) -> ConditionReport {
    let description = format!(
        "every non-pivot component law (distinct laws among indices 1..={probe}) either has a \
         consistently varying tail or is o of the pivot tail"
    );
    let xs = grid.xs();
    let top = top_half(&xs);
    let pivot_law = seq.dist_at(pivot).clone();
    let mut failing = Vec::new();
    let mut any_inconclusive = false;
    for (idx, law) in seq.distinct_components(probe) {
        if idx == pivot || *law == pivot_law {
            continue;
        }
        let in_c = match c_indicator(law, grid) {
            Ok(finding) => finding.verdict,
            Err(_) => Verdict::Fail, // a tail that dies on the grid is not in C
        };
        if in_c == Verdict::Pass {
            continue;
        }
        match o_small_holds(law, &pivot_law, top) {
            Ok(true) => {}
            Ok(false) => {
                if in_c == Verdict::Inconclusive {
                    any_inconclusive = true;
                    notes.push(format!(
                        "condition {id}: component {idx} inconclusive for consistent variation \
                         and not negligible against the pivot"
                    ));
                } else {
                    failing.push(idx);
                }
            }
            Err(err) => {
                any_inconclusive = true;
                notes.push(format!(
                    "condition {id}: negligibility ratio for component {idx} did not run: {err}"
                ));
            }
        }
    }
    let verdict = if !failing.is_empty() {
        Verdict::Fail
    } else if any_inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let mut cond = ConditionReport::new(id, description, verdict);
    cond.failing_indices = failing;
    cond
}

/// Smallest half-integer strictly above the anchor implied by an index
/// estimate, absorbing numerical wobble of +-1e-3 around half-integers.
fn half_integer_above(value: f64) -> f64 {
    let anchor = (2.0 * value).round() / 2.0;
    if anchor > value + 1e-3 {
        anchor
    } else {
        anchor + 0.5
    }
}

/// Moment condition E N^{p+1} < infinity for some p above the upper
/// Matuszewska index of the pivot law: p is searched on the half-integer
/// grid (anchor, anchor + 2] where anchor is the index estimate rounded to
/// the nearest half-integer.  The statistic is the certified p; the curve
/// records the certified moment value at p + 1.
fn moment_condition(
    id: &'static str,
    eta: &CountingDistribution,
    j_plus: Option<&IndexEstimate>,
    notes: &mut Vec<String>,
) -> ConditionReport {
    let description = "the stopping variable has a finite power moment E N^{p+1} for some p \
                       above the upper Matuszewska index of the pivot tail"
        .to_string();
    let value = match j_plus {
        None => {
            notes.push(format!(
                "condition {id}: the upper index estimate was unavailable, so no exponent \
                 could be certified"
            ));
            return ConditionReport::new(id, description, Verdict::Inconclusive);
        }
        Some(IndexEstimate::Infinite) => {
            notes.push(format!(
                "condition {id}: the upper Matuszewska index appears infinite, so no finite \
                 exponent p can dominate it"
            ));
            return ConditionReport::new(id, description, Verdict::Fail);
        }
        Some(IndexEstimate::Finite { value }) => *value,
    };
    let mut p = half_integer_above(value);
    let limit = value + MOMENT_SEARCH_SPAN + 1e-9;
    let mut any_unresolved = false;
    while p <= limit {
        match eta.moment(p + 1.0) {
            Ok(MomentValue::Finite(m)) => {
                return ConditionReport::new(id, description, Verdict::Pass)
                    .with_statistic(p)
                    .with_curve(vec![(p, m)]);
            }
            Ok(MomentValue::Infinite) => {}
            Err(_) => any_unresolved = true,
        }
        p += 0.5;
    }
    let verdict = if any_unresolved {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    ConditionReport::new(id, description, verdict)
}

/// Upper-index estimate for a pivot law, reported into the notes on failure.
fn pivot_index(
    seq_pivot: &TailDistribution,
    grid: &GridSpec,
    notes: &mut Vec<String>,
) -> Option<IndexEstimate> {
    match matuszewska_upper(seq_pivot, grid) {
        Ok((estimate, _)) => Some(estimate),
        Err(err) => {
            notes.push(format!("upper index estimate did not run: {err}"));
            None
        }
    }
}

fn require_pivot_in_support(eta: &CountingDistribution, pivot: usize) -> Result<()> {
    if eta.pmf(pivot as u64) > 0.0 {
        Ok(())
    } else {
        Err(Error::PivotNotInSupport { pivot })
    }
}

/// Hypotheses for the subexponential closure of the randomly stopped sum of
/// i.i.d. nonnegative components: the component law must be subexponential
/// and the stopping variable must have some finite exponential moment.
pub fn check_theorem1(
    dist: &TailDistribution,
    eta: &CountingDistribution,
    grid: &GridSpec,
    gopts: &GridOptions,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let mut notes = vec![independence_note()];
    let support = ConditionReport::new(
        "a",
        "components are nonnegative",
        if dist.is_nonnegative() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    );
    let subexp = indicator_condition(
        "b",
        "the common component law is subexponential (convolution-square ratio near 2)".into(),
        subexp_indicator(dist, &grid, gopts),
        &mut notes,
    );
    let mut exp_moment = ConditionReport::new(
        "c",
        format!(
            "the stopping variable has a finite exponential moment E b^N for some probed base \
             b in {EXP_MOMENT_BASES:?}"
        ),
        Verdict::Fail,
    );
    let mut any_unresolved = false;
    for base in EXP_MOMENT_BASES {
        match eta.exponential_moment(base) {
            Ok(MomentValue::Finite(m)) => {
                exp_moment.verdict = Verdict::Pass;
                exp_moment.statistic = Some(base);
                exp_moment.curve = vec![(base, m)];
                break;
            }
            Ok(MomentValue::Infinite) => {}
            Err(_) => any_unresolved = true,
        }
    }
    if exp_moment.verdict == Verdict::Fail && any_unresolved {
        exp_moment.verdict = Verdict::Inconclusive;
        notes.push(
            "condition c: at least one exponential-moment probe did not converge either way"
                .into(),
        );
    }
    Ok(HypothesisReport::assemble(
        "theorem1",
        vec![support, subexp, exp_moment],
        notes,
    ))
}

/// Hypotheses for the dominated-variation closure of the randomly stopped
/// sum of independent nonnegative components: the pivot law must have a
/// dominatedly varying tail, the pivot must carry positive stopping mass,
/// the partial tail sums must stay comparable to n times the pivot tail for
/// n >= pivot, and the stopping variable needs E N^{p+1} < infinity for some
/// p above the pivot's upper Matuszewska index.
pub fn check_theorem2(
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    grid: &GridSpec,
    probe: usize,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let pivot = seq.pivot;
    require_pivot_in_support(eta, pivot)?;
    let mut notes = vec![independence_note()];
    let support = ConditionReport::new(
        "a",
        "components are nonnegative",
        if seq.all_nonnegative() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    );
    let pivot_law = seq.dist_at(pivot);
    let dominated = indicator_condition(
        "b",
        format!("the pivot component law (index {pivot}) has a dominatedly varying tail"),
        d_indicator(pivot_law, &grid),
        &mut notes,
    );
    let bounded = boundedness_condition(
        "c",
        format!(
            "sup over n in [{pivot}, {probe}] of (1/(n F̄_pivot(x))) Σ_{{k<=n}} F̄_k(x) stays \
             bounded along the grid"
        ),
        boundedness_curve(seq, pivot, pivot, probe, |n| n as f64, &grid.xs()),
        &mut notes,
    );
    let j_plus = pivot_index(pivot_law, &grid, &mut notes);
    let moment = moment_condition("d", eta, j_plus.as_ref(), &mut notes);
    Ok(HypothesisReport::assemble(
        "theorem2",
        vec![support, dominated, bounded, moment],
        notes,
    ))
}

/// Hypotheses for the consistent-variation closure of the randomly stopped
/// sum of independent real-valued components, pivoted at the first
/// component: the first law must be in C, every later law must be in C or
/// negligible against it, the partial tail sums must stay comparable to n
/// times the first tail, and the stopping variable needs E N^{p+1} <
/// infinity for some p above the first law's upper Matuszewska index.
pub fn check_theorem3(
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    grid: &GridSpec,
    probe: usize,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let mut notes = vec![
        independence_note(),
        "components may be real-valued; no sign condition is required".into(),
    ];
    let first_law = seq.dist_at(1);
    let first_in_c = indicator_condition(
        "a",
        "the first component law has a consistently varying tail".into(),
        c_indicator(first_law, &grid),
        &mut notes,
    );
    let later = c_or_negligible_condition("b", seq, 1, probe, &grid, &mut notes);
    let bounded = boundedness_condition(
        "c",
        format!(
            "sup over n in [1, {probe}] of (1/(n F̄_1(x))) Σ_{{k<=n}} F̄_k(x) stays bounded \
             along the grid"
        ),
        boundedness_curve(seq, 1, 1, probe, |n| n as f64, &grid.xs()),
        &mut notes,
    );
    let j_plus = pivot_index(first_law, &grid, &mut notes);
    let moment = moment_condition("d", eta, j_plus.as_ref(), &mut notes);
    Ok(HypothesisReport::assemble(
        "theorem3",
        vec![first_in_c, later, bounded, moment],
        notes,
    ))
}

/// Hypotheses for the consistent-variation closure of the randomly stopped
/// maximum: the pivot law must be in C and carry positive stopping mass,
/// every other law must be in C or negligible against the pivot, the partial
/// tail sums must stay bounded against w(n) times the pivot tail, and the
/// weight sequence must satisfy E w(N) 1{N >= 1} < infinity.
pub fn check_theorem4(
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    grid: &GridSpec,
    probe: usize,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let pivot = seq.pivot;
    require_pivot_in_support(eta, pivot)?;
    let mut notes = vec![
        independence_note(),
        "components may be real-valued; no sign condition is required".into(),
    ];
    let pivot_law = seq.dist_at(pivot);
    let pivot_in_c = indicator_condition(
        "a",
        format!(
            "the pivot component law (index {pivot}, stopping mass {:.6}) has a consistently \
             varying tail",
            eta.pmf(pivot as u64)
        ),
        c_indicator(pivot_law, &grid),
        &mut notes,
    );
    let later = c_or_negligible_condition("b", seq, pivot, probe, &grid, &mut notes);
    let bounded = boundedness_condition(
        "c",
        format!(
            "sup over n in [1, {probe}] of (1/(w(n) F̄_pivot(x))) Σ_{{k<=n}} F̄_k(x) stays \
             bounded along the grid"
        ),
        boundedness_curve(seq, pivot, 1, probe, |n| seq.weight(n), &grid.xs()),
        &mut notes,
    );
    let weights = seq
        .weights
        .clone()
        .unwrap_or(crate::distributions::WeightSequence::Identity);
    let weight_moment = match weights.expectation_over(eta) {
        Ok(MomentValue::Finite(m)) => ConditionReport::new(
            "d",
            "the weight sequence satisfies E w(N) 1{N >= 1} < infinity",
            Verdict::Pass,
        )
        .with_statistic(m),
        Ok(MomentValue::Infinite) => ConditionReport::new(
            "d",
            "the weight sequence satisfies E w(N) 1{N >= 1} < infinity",
            Verdict::Fail,
        ),
        Err(err) => {
            notes.push(format!("condition d: weight moment did not converge: {err}"));
            ConditionReport::new(
                "d",
                "the weight sequence satisfies E w(N) 1{N >= 1} < infinity",
                Verdict::Inconclusive,
            )
        }
    };
    Ok(HypothesisReport::assemble(
        "theorem4",
        vec![pivot_in_c, later, bounded, weight_moment],
        notes,
    ))
}

/// Hypotheses for the consistent-variation closure of the randomly stopped
/// maximum of sums: every component law must be in C, the partial tail sums
/// must stay comparable to n times the first tail, and the stopping variable
/// needs E N^{p+1} < infinity for some p above the first law's upper
/// Matuszewska index.
pub fn check_theorem5(
    seq: &SequenceSpec,
    eta: &CountingDistribution,
    grid: &GridSpec,
    probe: usize,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let mut notes = vec![
        independence_note(),
        "components may be real-valued; no sign condition is required".into(),
    ];
    let mut failing = Vec::new();
    let mut any_inconclusive = false;
    for (idx, law) in seq.distinct_components(probe) {
        match c_indicator(law, &grid) {
            Ok(finding) => match finding.verdict {
                Verdict::Pass => {}
                Verdict::Fail => failing.push(idx),
                Verdict::Inconclusive => any_inconclusive = true,
            },
            Err(err) => {
                any_inconclusive = true;
                notes.push(format!(
                    "condition a: indicator for component {idx} did not run: {err}"
                ));
            }
        }
    }
    let all_in_c = {
        let verdict = if !failing.is_empty() {
            Verdict::Fail
        } else if any_inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        let mut cond = ConditionReport::new(
            "a",
            format!(
                "every component law (distinct laws among indices 1..={probe}) has a \
                 consistently varying tail"
            ),
            verdict,
        );
        cond.failing_indices = failing;
        cond
    };
    let bounded = boundedness_condition(
        "b",
        format!(
            "sup over n in [1, {probe}] of (1/(n F̄_1(x))) Σ_{{k<=n}} F̄_k(x) stays bounded \
             along the grid"
        ),
        boundedness_curve(seq, 1, 1, probe, |n| n as f64, &grid.xs()),
        &mut notes,
    );
    let j_plus = pivot_index(seq.dist_at(1), &grid, &mut notes);
    let moment = moment_condition("c", eta, j_plus.as_ref(), &mut notes);
    Ok(HypothesisReport::assemble(
        "theorem5",
        vec![all_in_c, bounded, moment],
        notes,
    ))
}

/// Hypotheses for the i.i.d. specialization of the randomly stopped maximum:
/// the common law must have a consistently varying tail and the stopping
/// variable a finite mean.
pub fn check_corollary1(
    dist: &TailDistribution,
    eta: &CountingDistribution,
    grid: &GridSpec,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let mut notes = vec![
        independence_note(),
        "components are i.i.d. copies of the given law".into(),
    ];
    let in_c = indicator_condition(
        "a",
        "the common component law has a consistently varying tail".into(),
        c_indicator(dist, &grid),
        &mut notes,
    );
    let mean = match eta.mean() {
        Ok(MomentValue::Finite(m)) => ConditionReport::new(
            "b",
            "the stopping variable has a finite mean",
            Verdict::Pass,
        )
        .with_statistic(m),
        Ok(MomentValue::Infinite) => ConditionReport::new(
            "b",
            "the stopping variable has a finite mean",
            Verdict::Fail,
        ),
        Err(err) => {
            notes.push(format!("condition b: mean did not converge: {err}"));
            ConditionReport::new(
                "b",
                "the stopping variable has a finite mean",
                Verdict::Inconclusive,
            )
        }
    };
    Ok(HypothesisReport::assemble(
        "corollary1",
        vec![in_c, mean],
        notes,
    ))
}

/// Hypotheses for the i.i.d. specialization of the randomly stopped maximum
/// of sums: the common law must have a consistently varying tail and the
/// stopping variable a finite power moment E N^{p+1} for some p above the
/// law's upper Matuszewska index.
pub fn check_corollary2(
    dist: &TailDistribution,
    eta: &CountingDistribution,
    grid: &GridSpec,
) -> Result<HypothesisReport> {
    let grid = grid.clone().validated()?;
    let mut notes = vec![
        independence_note(),
        "components are i.i.d. copies of the given law; the partial-sum comparability \
         condition holds automatically when the common tail is everywhere positive"
            .into(),
    ];
    let in_c = indicator_condition(
        "a",
        "the common component law has a consistently varying tail".into(),
        c_indicator(dist, &grid),
        &mut notes,
    );
    let j_plus = pivot_index(dist, &grid, &mut notes);
    let moment = moment_condition("b", eta, j_plus.as_ref(), &mut notes);
    Ok(HypothesisReport::assemble(
        "corollary2",
        vec![in_c, moment],
        notes,
    ))
}
